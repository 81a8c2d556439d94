#ifndef MLN_TRACKLET_HPP
#define MLN_TRACKLET_HPP

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mln {

struct PatchGrid;

struct TrackPoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};

/// Single-sensor track fragment: time span, trajectory samples, per-category
/// scores, optional mensurated 3-D size (vehicles), optional carried-bag
/// score and appearance descriptor grid.
struct Tracklet {
  std::string sensorId;
  std::string trackId;
  double tStart = 0.0;
  double tEnd = 0.0;
  std::vector<TrackPoint> trajectory;
  std::map<std::string, double> categoryScores;
  std::optional<Eigen::Vector3d> size;
  std::optional<double> carryBagScore;
  std::shared_ptr<const PatchGrid> appearance;

  /// Constant naming this tracklet as an agent, e.g. "S1_T3".
  std::string agentConstant() const { return sensorId + "_" + trackId; }
  /// Highest-scoring category name; empty when no scores.
  std::string topCategory() const;
  const TrackPoint& front() const { return trajectory.front(); }
  const TrackPoint& back() const { return trajectory.back(); }
};

struct Zone {
  std::string id;
  std::string sensorId;
  std::vector<Eigen::Vector2d> polygon;
  std::map<std::string, double> geometricScores;  // SKY/VERTICAL/HORIZONTAL

  Eigen::Vector2d centroid() const;
  bool contains(const Eigen::Vector2d& point) const;
};

/// CSV rows: sensorId,trackId,tStart,tEnd,t1,x1,y1,t2,x2,y2,...
std::vector<Tracklet> loadTrackletsCsv(const std::string& text);

/// Sidecar JSON keyed by "sensorId:trackId" with optional fields size,
/// category, bagScore, features (flat vector treated as a 1x1 patch grid)
/// or patchGrid (rows/cols/dim/values).
void applyTrackletMeta(std::vector<Tracklet>& tracklets,
                       const std::string& jsonText);

/// JSON array of {id, sensor, polygon: [[x,y],...], scores: {...}}.
std::vector<Zone> loadZonesJson(const std::string& text);

}  // namespace mln

#endif
