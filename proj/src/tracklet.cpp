#include "mln/tracklet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "mln/fusion.hpp"

namespace mln {

std::string Tracklet::topCategory() const {
  std::string best;
  double bestScore = -1.0;
  for (const auto& [name, score] : categoryScores)
    if (score > bestScore) {
      bestScore = score;
      best = name;
    }
  return best;
}

Eigen::Vector2d Zone::centroid() const {
  // Area-weighted polygon centroid; falls back to the vertex mean for
  // degenerate (zero-area) polygons.
  double area2 = 0.0;
  Eigen::Vector2d acc(0, 0);
  size_t n = polygon.size();
  for (size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& p = polygon[i];
    const Eigen::Vector2d& q = polygon[(i + 1) % n];
    double cross = p.x() * q.y() - q.x() * p.y();
    area2 += cross;
    acc += (p + q) * cross;
  }
  if (std::abs(area2) < 1e-12) {
    Eigen::Vector2d mean(0, 0);
    for (const auto& p : polygon) mean += p;
    return mean / static_cast<double>(n);
  }
  return acc / (3.0 * area2);
}

bool Zone::contains(const Eigen::Vector2d& point) const {
  // Ray casting; boundary points count as inside.
  size_t n = polygon.size();
  bool inside = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Eigen::Vector2d& a = polygon[i];
    const Eigen::Vector2d& b = polygon[j];
    // On-segment check.
    Eigen::Vector2d ab = b - a;
    Eigen::Vector2d ap = point - a;
    double cross = ab.x() * ap.y() - ab.y() * ap.x();
    double dot = ap.dot(ab);
    if (std::abs(cross) < 1e-9 && dot >= -1e-9 && dot <= ab.squaredNorm() + 1e-9)
      return true;
    if ((a.y() > point.y()) != (b.y() > point.y())) {
      double xCross = a.x() + (point.y() - a.y()) / (b.y() - a.y()) * ab.x();
      if (point.x() < xCross) inside = !inside;
    }
  }
  return inside;
}

std::vector<Tracklet> loadTrackletsCsv(const std::string& text) {
  std::vector<Tracklet> out;
  std::istringstream is(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(is, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() < 7 || (cells.size() - 4) % 3 != 0)
      throw std::invalid_argument(
          "tracklet csv line " + std::to_string(lineNo) +
          ": expected sensor,track,tStart,tEnd then t,x,y triples");
    Tracklet t;
    t.sensorId = cells[0];
    t.trackId = cells[1];
    t.tStart = std::stod(cells[2]);
    t.tEnd = std::stod(cells[3]);
    for (size_t i = 4; i + 2 < cells.size(); i += 3) {
      TrackPoint p;
      p.t = std::stod(cells[i]);
      p.x = std::stod(cells[i + 1]);
      p.y = std::stod(cells[i + 2]);
      t.trajectory.push_back(p);
    }
    if (t.tStart > t.tEnd)
      throw std::invalid_argument("tracklet csv line " + std::to_string(lineNo) +
                                  ": tStart > tEnd");
    if (!std::is_sorted(t.trajectory.begin(), t.trajectory.end(),
                        [](const TrackPoint& a, const TrackPoint& b) {
                          return a.t < b.t;
                        }))
      throw std::invalid_argument("tracklet csv line " + std::to_string(lineNo) +
                                  ": trajectory not time-ordered");
    out.push_back(std::move(t));
  }
  return out;
}

void applyTrackletMeta(std::vector<Tracklet>& tracklets,
                       const std::string& jsonText) {
  nlohmann::json doc = nlohmann::json::parse(jsonText);
  for (Tracklet& t : tracklets) {
    std::string key = t.sensorId + ":" + t.trackId;
    if (!doc.contains(key)) continue;
    const nlohmann::json& meta = doc.at(key);
    if (meta.contains("size")) {
      auto v = meta.at("size").get<std::vector<double>>();
      if (v.size() != 3)
        throw std::invalid_argument("meta '" + key + "': size needs 3 values");
      t.size = Eigen::Vector3d(v[0], v[1], v[2]);
    }
    if (meta.contains("category"))
      t.categoryScores =
          meta.at("category").get<std::map<std::string, double>>();
    if (meta.contains("bagScore"))
      t.carryBagScore = meta.at("bagScore").get<double>();
    if (meta.contains("features")) {
      auto v = meta.at("features").get<std::vector<double>>();
      auto grid = std::make_shared<PatchGrid>();
      grid->rows = 1;
      grid->cols = 1;
      grid->dim = static_cast<int>(v.size());
      grid->patches.push_back(
          Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()));
      grid->saliency = {1.0};
      grid->relevance = {1.0};
      t.appearance = grid;
    }
    if (meta.contains("patchGrid")) {
      const nlohmann::json& g = meta.at("patchGrid");
      auto grid = std::make_shared<PatchGrid>();
      grid->rows = g.at("rows").get<int>();
      grid->cols = g.at("cols").get<int>();
      grid->dim = g.at("dim").get<int>();
      auto values = g.at("values").get<std::vector<double>>();
      if (static_cast<int>(values.size()) != grid->rows * grid->cols * grid->dim)
        throw std::invalid_argument("meta '" + key + "': patchGrid size");
      for (int i = 0; i < grid->rows * grid->cols; ++i)
        grid->patches.push_back(Eigen::Map<const Eigen::VectorXd>(
            values.data() + static_cast<size_t>(i) * grid->dim, grid->dim));
      grid->saliency.assign(grid->patches.size(), 1.0);
      grid->relevance.assign(grid->patches.size(), 1.0);
      t.appearance = grid;
    }
  }
}

std::vector<Zone> loadZonesJson(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text);
  std::vector<Zone> out;
  for (const nlohmann::json& z : doc) {
    Zone zone;
    zone.id = z.at("id").get<std::string>();
    zone.sensorId = z.value("sensor", std::string());
    for (const nlohmann::json& p : z.at("polygon"))
      zone.polygon.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    if (zone.polygon.size() < 3)
      throw std::invalid_argument("zone '" + zone.id + "': polygon needs >= 3 vertices");
    if (z.contains("scores"))
      zone.geometricScores =
          z.at("scores").get<std::map<std::string, double>>();
    out.push_back(std::move(zone));
  }
  return out;
}

}  // namespace mln
