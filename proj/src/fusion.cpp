#include "mln/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mln {

namespace {

const double kProbClampLo = 1e-6;
const double kProbClampHi = 1.0 - 1e-6;

double clampProb(double p) {
  return std::min(kProbClampHi, std::max(kProbClampLo, p));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

RcaModel rcaFit(const std::vector<std::pair<Eigen::VectorXd, int>>& points,
                double lambda) {
  if (points.size() < 2)
    throw std::invalid_argument("rcaFit: need at least two points");
  if (lambda < 0) throw std::invalid_argument("rcaFit: lambda must be >= 0");
  const int dim = static_cast<int>(points.front().first.size());
  for (const auto& [x, label] : points)
    if (x.size() != dim)
      throw std::invalid_argument("rcaFit: inconsistent point dimension");

  std::map<int, std::pair<Eigen::VectorXd, int>> sums;
  for (const auto& [x, label] : points) {
    auto it = sums.find(label);
    if (it == sums.end())
      sums.emplace(label, std::make_pair(x, 1));
    else {
      it->second.first += x;
      it->second.second += 1;
    }
  }

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& [x, label] : points) {
    const auto& [sum, n] = sums.at(label);
    Eigen::VectorXd centered = x - sum / static_cast<double>(n);
    c.noalias() += centered * centered.transpose();
  }
  c /= static_cast<double>(points.size());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("rcaFit: eigendecomposition failed");
  Eigen::VectorXd values = eig.eigenvalues();
  double maxEig = values.maxCoeff();
  if (lambda == 0.0 && values.minCoeff() < 1e-12 * std::max(1.0, maxEig))
    throw std::invalid_argument(
        "rcaFit: in-class covariance is singular; pass lambda > 0 to "
        "regularize");

  Eigen::VectorXd invSqrt(dim);
  for (int i = 0; i < dim; ++i)
    invSqrt[i] = 1.0 / std::sqrt(std::max(values[i], 0.0) + lambda);

  RcaModel model;
  model.lambda = lambda;
  model.dim = dim;
  model.transform = eig.eigenvectors() * invSqrt.asDiagonal() *
                    eig.eigenvectors().transpose();
  return model;
}

Eigen::VectorXd rcaTransform(const RcaModel& model, const Eigen::VectorXd& v) {
  if (v.size() != model.dim)
    throw std::invalid_argument("rcaTransform: dimension mismatch");
  return model.transform * v;
}

double rcaDefaultLambda(
    const std::vector<std::pair<Eigen::VectorXd, int>>& points) {
  if (points.empty()) return 1e-3;
  const int dim = static_cast<int>(points.front().first.size());
  std::map<int, std::pair<Eigen::VectorXd, int>> sums;
  for (const auto& [x, label] : points) {
    auto it = sums.find(label);
    if (it == sums.end())
      sums.emplace(label, std::make_pair(x, 1));
    else {
      it->second.first += x;
      it->second.second += 1;
    }
  }
  double trace = 0.0;
  for (const auto& [x, label] : points) {
    const auto& [sum, n] = sums.at(label);
    trace += (x - sum / static_cast<double>(n)).squaredNorm();
  }
  trace /= static_cast<double>(points.size());
  return 1e-3 * trace / dim;
}

double gaussianKernel(double x, const GaussianKernelParams& k) {
  if (!(k.sigma > 0))
    throw std::invalid_argument("gaussian kernel: sigma must be positive");
  double d = (x - k.mean) / k.sigma;
  return std::exp(-0.5 * d * d);
}

double temporalSimilarity(double tEndA, double tStartB,
                          const GaussianKernelParams& k) {
  return gaussianKernel(tStartB - tEndA, k);
}

Eigen::Vector2d Homography::apply(const Eigen::Vector2d& p) const {
  Eigen::Vector3d h = matrix * Eigen::Vector3d(p.x(), p.y(), 1.0);
  if (std::abs(h.z()) < 1e-12)
    throw std::domain_error("homography: point maps to infinity");
  return {h.x() / h.z(), h.y() / h.z()};
}

double spatialSimilarity(const Eigen::Vector2d& locA,
                         const Eigen::Vector2d& locB, const Homography& homogA,
                         const Homography& homogB,
                         const GaussianKernelParams& k) {
  double dist = (homogA.apply(locA) - homogB.apply(locB)).norm();
  return gaussianKernel(dist, k);
}

double sizeSimilarity(const Eigen::Vector3d& sizeA, const Eigen::Vector3d& sizeB,
                      const GaussianKernelParams& k) {
  return gaussianKernel((sizeA - sizeB).norm(), k);
}

double classSimilarity(int obsA, int obsB, const ConfusionMatrix& cmA,
                       const ConfusionMatrix& cmB,
                       const Eigen::VectorXd& prior) {
  int n = cmA.classes();
  if (cmB.classes() != n || prior.size() != n)
    throw std::invalid_argument("classSimilarity: class count mismatch");
  if (obsA < 0 || obsA >= n || obsB < 0 || obsB >= n)
    throw std::out_of_range("classSimilarity: class index out of range");
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += cmA.p(k, obsA) * cmB.p(k, obsB) * prior[k];
  return sum;
}

double saliencyScore(const Eigen::VectorXd& patch,
                     const std::vector<Eigen::VectorXd>& referencePatches,
                     int K, const RcaModel* model) {
  if (K < 1 || static_cast<size_t>(K) > referencePatches.size())
    throw std::invalid_argument(
        "saliencyScore: K must satisfy 1 <= K <= |references|");
  Eigen::VectorXd probe = model ? rcaTransform(*model, patch) : patch;
  std::vector<double> dist;
  dist.reserve(referencePatches.size());
  for (const Eigen::VectorXd& ref : referencePatches)
    dist.push_back((probe - (model ? rcaTransform(*model, ref) : ref)).norm());
  std::partial_sort(dist.begin(), dist.begin() + K, dist.end());
  double mean = std::accumulate(dist.begin(), dist.begin() + K, 0.0) / K;
  double var = 0.0;
  for (int i = 0; i < K; ++i) var += (dist[i] - mean) * (dist[i] - mean);
  return var / K;
}

double relevanceScore(const RcaModel& model, int patchIndex, int patchDim) {
  if (patchDim < 1) throw std::invalid_argument("relevanceScore: bad patchDim");
  long start = static_cast<long>(patchIndex) * patchDim;
  if (patchIndex < 0 || start + patchDim > model.dim)
    throw std::out_of_range("relevanceScore: patch block out of range");
  double sum = 0.0;
  for (int i = 0; i < patchDim; ++i)
    sum += std::abs(model.transform(start + i, 0));
  return sum;
}

double appearanceSimilarity(const PatchGrid& gridP, const PatchGrid& gridQ,
                            double alpha, std::pair<int, int> searchWindow,
                            double sigmaD) {
  if (!(alpha > 0))
    throw std::invalid_argument("appearanceSimilarity: alpha must be > 0");
  if (gridP.rows != gridQ.rows || gridP.cols != gridQ.cols ||
      gridP.dim != gridQ.dim)
    throw std::invalid_argument("appearanceSimilarity: grid shape mismatch");
  const auto [dx, dy] = searchWindow;
  double sim = 0.0;
  for (int r = 0; r < gridP.rows; ++r) {
    for (int c = 0; c < gridP.cols; ++c) {
      double sp = gridP.s(r, c);
      double rp = gridP.rel(r, c);
      double best = 0.0;
      for (int rq = std::max(0, r - dy); rq <= std::min(gridP.rows - 1, r + dy);
           ++rq) {
        for (int cq = std::max(0, c - dx);
             cq <= std::min(gridP.cols - 1, c + dx); ++cq) {
          double d = std::exp(-(gridP.at(r, c) - gridQ.at(rq, cq)).squaredNorm() /
                              (2.0 * sigmaD * sigmaD));
          double term = sp * rp * d * gridQ.s(rq, cq) * gridQ.rel(rq, cq) /
                        (alpha + std::abs(sp - gridQ.s(rq, cq)));
          best = std::max(best, term);
        }
      }
      sim += best;
    }
  }
  return sim;
}

void computeGridSaliency(PatchGrid& grid,
                         const std::vector<Eigen::VectorXd>& referencePatches,
                         int K, const RcaModel* model) {
  grid.saliency.assign(grid.patches.size(), 0.0);
  double maxS = 0.0;
  for (size_t i = 0; i < grid.patches.size(); ++i) {
    grid.saliency[i] = saliencyScore(grid.patches[i], referencePatches, K, model);
    maxS = std::max(maxS, grid.saliency[i]);
  }
  if (maxS > 0)
    for (double& s : grid.saliency) s /= maxS;
}

void computeGridRelevance(PatchGrid& grid, const RcaModel& model) {
  grid.relevance.assign(grid.patches.size(), 0.0);
  for (size_t i = 0; i < grid.patches.size(); ++i)
    grid.relevance[i] = relevanceScore(model, static_cast<int>(i), grid.dim);
}

double fuseAttributeScores(const std::vector<double>& scores, int K,
                           std::pair<double, double> logistic) {
  if (scores.empty())
    throw std::invalid_argument("fuseAttributeScores: empty score list");
  if (K < 1) throw std::invalid_argument("fuseAttributeScores: K must be >= 1");
  std::vector<double> sorted = scores;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](double a, double b) { return std::abs(a) > std::abs(b); });
  size_t take = std::min<size_t>(K, sorted.size());
  double mean =
      std::accumulate(sorted.begin(), sorted.begin() + take, 0.0) / take;
  return sigmoid(logistic.first * mean + logistic.second);
}

double LogisticModel::apply(double score) const {
  return sigmoid(a * score + b);
}

LogisticModel fitLogisticCalibration(
    const std::vector<std::pair<double, int>>& labeled) {
  bool sawPos = false, sawNeg = false;
  for (const auto& [s, y] : labeled) (y ? sawPos : sawNeg) = true;
  if (!sawPos || !sawNeg)
    throw std::invalid_argument(
        "fitLogisticCalibration: need both positive and negative labels");

  LogisticModel m;
  m.a = 0.0;
  m.b = 0.0;
  const double guard = 50.0;
  for (int iter = 0; iter < 100; ++iter) {
    double ga = 0, gb = 0, haa = 0, hab = 0, hbb = 0;
    for (const auto& [s, y] : labeled) {
      double p = sigmoid(m.a * s + m.b);
      double r = static_cast<double>(y) - p;
      ga += r * s;
      gb += r;
      double w = p * (1 - p);
      haa += w * s * s;
      hab += w * s;
      hbb += w;
    }
    double det = haa * hbb - hab * hab;
    if (std::abs(det) < 1e-12) {
      // Curvature vanished: on separable data the weights ran off toward a
      // perfect fit before the magnitude guard tripped.
      double nll = 0.0;
      for (const auto& [s, y] : labeled) {
        double p = std::clamp(sigmoid(m.a * s + m.b), 1e-15, 1.0 - 1e-15);
        nll -= y ? std::log(p) : std::log(1.0 - p);
      }
      if (nll / labeled.size() < 1e-4) m.magnitudeGuardHit = true;
      break;
    }
    double da = (hbb * ga - hab * gb) / det;
    double db = (haa * gb - hab * ga) / det;
    // Damped steps keep Newton stable far from the optimum.
    double norm = std::max(std::abs(da), std::abs(db));
    if (norm > 5.0) {
      da *= 5.0 / norm;
      db *= 5.0 / norm;
    }
    m.a += da;
    m.b += db;
    if (std::abs(m.a) > guard || std::abs(m.b) > guard) {
      m.magnitudeGuardHit = true;
      m.a = std::clamp(m.a, -guard, guard);
      m.b = std::clamp(m.b, -guard, guard);
      break;
    }
    if (std::abs(da) < 1e-10 && std::abs(db) < 1e-10) break;
  }
  return m;
}

std::map<std::string, std::string> parseKeyValueConfig(
    const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    size_t comment = std::min(line.find('#'), line.find("//"));
    if (comment != std::string::npos) line = line.substr(0, comment);
    size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      size_t b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) out[key] = value;
  }
  return out;
}

FusionParams fusionParamsFromConfig(
    const std::map<std::string, std::string>& config) {
  FusionParams p;
  auto num = [&](const char* key, double fallback) {
    auto it = config.find(key);
    return it == config.end() ? fallback : std::stod(it->second);
  };
  p.temporal.mean = num("m_t", p.temporal.mean);
  p.temporal.sigma = num("sigma_t", p.temporal.sigma);
  p.spatial.mean = num("m_l", p.spatial.mean);
  p.spatial.sigma = num("sigma_l", p.spatial.sigma);
  p.size.mean = num("m_s", p.size.mean);
  p.size.sigma = num("sigma_s", p.size.sigma);
  p.alpha = num("alpha", p.alpha);
  p.sigmaD = num("sigma_d", p.sigmaD);
  p.K = static_cast<int>(num("K", p.K));
  p.searchWindow.first = static_cast<int>(num("window_dx", p.searchWindow.first));
  p.searchWindow.second =
      static_cast<int>(num("window_dy", p.searchWindow.second));
  return p;
}

namespace {

void addSoft(EvidenceSet& out, const KnowledgeBase& kb, const std::string& pred,
             const std::string& agentA, const std::string& agentB, double p) {
  int id = kb.predicateId(pred);
  if (id < 0)
    throw std::invalid_argument("emitSimilarityEvidence: predicate '" + pred +
                                "' not declared in the association KB");
  const PredicateSchema& schema = kb.schema(id);
  Atom atom;
  atom.predicate = id;
  atom.args.push_back(Term::constant(agentA, schema.argDomains[0]));
  atom.args.push_back(Term::constant(agentB, schema.argDomains[1]));
  out.push_back(EvidenceRecord::soft(std::move(atom), clampProb(p)));
}

}  // namespace

EvidenceSet emitSimilarityEvidence(const Tracklet& a, const Tracklet& b,
                                   const FusionModels& models,
                                   const KnowledgeBase& kb,
                                   std::vector<std::string>* warnings) {
  if (a.sensorId == b.sensorId)
    throw std::invalid_argument(
        "emitSimilarityEvidence: tracklets must come from different sensors");
  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };
  EvidenceSet out;
  const std::string ca = a.agentConstant();
  const std::string cb = b.agentConstant();

  addSoft(out, kb, "temporallyClose", ca, cb,
          temporalSimilarity(a.tEnd, b.tStart, models.params.temporal));

  auto ha = models.homographies.find(a.sensorId);
  auto hb = models.homographies.find(b.sensorId);
  if (ha == models.homographies.end() || hb == models.homographies.end()) {
    warn("no homography for sensor pair " + a.sensorId + "/" + b.sensorId +
         "; spatial cue omitted");
  } else if (a.trajectory.empty() || b.trajectory.empty()) {
    warn("empty trajectory; spatial cue omitted");
  } else {
    Eigen::Vector2d exitLoc(a.back().x, a.back().y);
    Eigen::Vector2d entryLoc(b.front().x, b.front().y);
    addSoft(out, kb, "spatiallyClose", ca, cb,
            spatialSimilarity(exitLoc, entryLoc, ha->second, hb->second,
                              models.params.spatial));
  }

  if (a.topCategory() == "VEHICLE" && b.topCategory() == "VEHICLE") {
    if (a.size && b.size)
      addSoft(out, kb, "similarSize", ca, cb,
              sizeSimilarity(*a.size, *b.size, models.params.size));
    else
      warn("vehicle pair without mensurated size; size cue omitted");
  }

  auto cma = models.confusion.find(a.sensorId);
  auto cmb = models.confusion.find(b.sensorId);
  if (cma == models.confusion.end() || cmb == models.confusion.end() ||
      models.classNames.empty()) {
    warn("no confusion matrix for sensor pair " + a.sensorId + "/" +
         b.sensorId + "; class cue omitted");
  } else {
    auto classIndex = [&](const Tracklet& t) {
      const std::string top = t.topCategory();
      for (size_t i = 0; i < models.classNames.size(); ++i)
        if (models.classNames[i] == top) return static_cast<int>(i);
      return -1;
    };
    int ia = classIndex(a);
    int ib = classIndex(b);
    if (ia < 0 || ib < 0) {
      warn("tracklet category outside the confusion-matrix classes");
    } else {
      addSoft(out, kb, "similarClass", ca, cb,
              classSimilarity(ia, ib, cma->second, cmb->second,
                              models.classPrior));
    }
  }

  if (a.appearance && b.appearance) {
    double raw = appearanceSimilarity(*a.appearance, *b.appearance,
                                      models.params.alpha,
                                      models.params.searchWindow,
                                      models.params.sigmaD);
    addSoft(out, kb, "similarAppearance", ca, cb,
            models.appearanceCalibration.apply(raw));
  } else {
    warn("missing appearance descriptor; appearance cue omitted");
  }
  return out;
}

FusionModels loadFusionModels(
    const std::map<std::string, std::string>& config,
    const std::function<std::string(const std::string&)>& readFile) {
  FusionModels models;
  models.params = fusionParamsFromConfig(config);

  auto splitList = [](const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string cell;
    while (std::getline(is, cell, ',')) {
      size_t a = cell.find_first_not_of(" \t");
      size_t b = cell.find_last_not_of(" \t");
      if (a != std::string::npos) out.push_back(cell.substr(a, b - a + 1));
    }
    return out;
  };

  if (auto it = config.find("classes"); it != config.end())
    models.classNames = splitList(it->second);
  if (auto it = config.find("class_prior"); it != config.end()) {
    std::vector<std::string> cells = splitList(it->second);
    models.classPrior.resize(cells.size());
    for (size_t i = 0; i < cells.size(); ++i)
      models.classPrior[i] = std::stod(cells[i]);
  }

  Eigen::VectorXd filePrior;
  for (const auto& [key, value] : config) {
    if (key.rfind("homography.", 0) == 0)
      models.homographies[key.substr(11)] = loadHomography(readFile(value));
    else if (key.rfind("confusion.", 0) == 0)
      models.confusion[key.substr(10)] =
          loadConfusionMatrixCsv(readFile(value), &filePrior);
  }
  if (models.classPrior.size() == 0 && filePrior.size() > 0)
    models.classPrior = filePrior;
  if (models.classPrior.size() == 0 && !models.classNames.empty())
    models.classPrior = Eigen::VectorXd::Constant(
        models.classNames.size(), 1.0 / models.classNames.size());

  auto num = [&](const char* key, double fallback) {
    auto it = config.find(key);
    return it == config.end() ? fallback : std::stod(it->second);
  };
  models.appearanceCalibration.a = num("appearance_a", 1.0);
  models.appearanceCalibration.b = num("appearance_b", 0.0);
  return models;
}

ConfusionMatrix loadConfusionMatrixCsv(const std::string& text,
                                       Eigen::VectorXd* prior) {
  std::vector<std::vector<double>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("confusion matrix: empty file");
  size_t n = rows[0].size();
  if (n < 2) throw std::invalid_argument("confusion matrix: need N >= 2");
  bool hasPrior = rows.size() == n + 1;
  if (rows.size() != n && !hasPrior)
    throw std::invalid_argument("confusion matrix: need N or N+1 rows");

  ConfusionMatrix cm;
  cm.p.resize(n, n);
  for (size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n)
      throw std::invalid_argument("confusion matrix: ragged row");
    double sum = 0.0;
    for (size_t j = 0; j < n; ++j) sum += rows[i][j];
    if (std::abs(sum - 1.0) > 1e-6)
      throw std::invalid_argument("confusion matrix: row does not sum to 1");
    for (size_t j = 0; j < n; ++j) cm.p(i, j) = rows[i][j] / sum;
  }
  if (prior) {
    if (hasPrior) {
      if (rows[n].size() != n)
        throw std::invalid_argument("confusion matrix: bad prior row");
      prior->resize(n);
      double sum = 0.0;
      for (size_t j = 0; j < n; ++j) sum += rows[n][j];
      if (std::abs(sum - 1.0) > 1e-6)
        throw std::invalid_argument("confusion matrix: prior does not sum to 1");
      for (size_t j = 0; j < n; ++j) (*prior)[j] = rows[n][j] / sum;
    } else {
      *prior = Eigen::VectorXd::Constant(n, 1.0 / n);
    }
  }
  return cm;
}

Homography loadHomography(const std::string& text) {
  std::istringstream is(text);
  Homography h;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (!(is >> h.matrix(i, j)))
        throw std::invalid_argument("homography: expected 9 reals");
  if (std::abs(h.matrix.determinant()) < 1e-12)
    throw std::invalid_argument("homography: matrix is singular");
  return h;
}

PatchGrid loadPatchGridCsv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line))
    throw std::invalid_argument("patch grid: empty file");
  PatchGrid grid;
  {
    std::istringstream hs(line);
    std::string cell;
    std::vector<int> dims;
    while (std::getline(hs, cell, ',')) dims.push_back(std::stoi(cell));
    if (dims.size() != 3)
      throw std::invalid_argument("patch grid: header must be M,N,dim");
    grid.rows = dims[0];
    grid.cols = dims[1];
    grid.dim = dims[2];
  }
  if (grid.rows < 1 || grid.cols < 1 || grid.dim < 1)
    throw std::invalid_argument("patch grid: bad header");
  for (int i = 0; i < grid.rows * grid.cols; ++i) {
    if (!std::getline(is, line))
      throw std::invalid_argument("patch grid: missing patch rows");
    std::istringstream ls(line);
    std::string cell;
    Eigen::VectorXd v(grid.dim);
    int j = 0;
    while (std::getline(ls, cell, ',')) {
      if (j >= grid.dim) throw std::invalid_argument("patch grid: row too long");
      v[j++] = std::stod(cell);
    }
    if (j != grid.dim) throw std::invalid_argument("patch grid: row too short");
    grid.patches.push_back(std::move(v));
  }
  grid.saliency.assign(grid.patches.size(), 1.0);
  grid.relevance.assign(grid.patches.size(), 1.0);
  return grid;
}

}  // namespace mln
