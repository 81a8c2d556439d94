#ifndef MLN_PIPELINE_HPP
#define MLN_PIPELINE_HPP

#include <string>
#include <vector>

#include "mln/fusion.hpp"
#include "mln/inference.hpp"
#include "mln/learning.hpp"
#include "mln/parser.hpp"
#include "mln/tracklet.hpp"

namespace mln {

struct WindowPlan {
  double windowLength = 900.0;
  double overlap = 300.0;
  std::vector<std::pair<double, double>> windows;
};

/// Overlapping windows advancing by windowLength - overlap; the final window
/// is clipped to the timeline end. Requires overlap < windowLength.
WindowPlan planWindows(double timelineStart, double timelineEnd,
                       double windowLength, double overlap);

struct PrimitiveThresholds {
  double locGrid = 1.0;        // quantization of Loc_X_Y constants
  double timeQuantum = 1.0;    // quantization of time constants
  double sampleInterval = 1.0; // trajectory resampling step
  double epsMove = 0.5;        // displacement per sample above which we move
  double nearLocDist = 3.0;    // nearLoc(L1, L2) radius
};

struct PrimitiveResult {
  EvidenceSet evidence;
  std::vector<std::string> warnings;
};

/// Ground primitive-event and attribute evidence from tracklets and zones:
/// appear/disappear (with composite Loc/Time constants), move/stationary
/// runs with TimeInt constants, appearI/disappearI zone hits, class and
/// carryBag soft evidence, zoneClass soft evidence, plus the relation
/// predicates observedIn, agentInt, afterInt, timeInInt and nearLoc.
/// Predicates the KB does not declare are skipped, so one generator serves
/// the scene, sensor and monolithic knowledge bases.
PrimitiveResult generatePrimitivePredicates(
    const std::vector<Tracklet>& tracklets, const std::vector<Zone>& zones,
    const PrimitiveThresholds& thresholds, const KnowledgeBase& kb);

/// Symmetric zoneAdjacentZone evidence: centroids within centroidDistMax and
/// (when required) polygon edges within edgeEps of each other over positive
/// length. Skipped when the KB does not declare zoneAdjacentZone.
EvidenceSet computeZoneAdjacency(const std::vector<Zone>& zones,
                                 double centroidDistMax,
                                 bool requireSharedBoundary,
                                 const KnowledgeBase& kb,
                                 double edgeEps = 0.5);

/// Scene-labeling inference: runs the zone KB over the given evidence and
/// returns marginals for every open predicate grounding (entryExitZone,
/// zoneBuildingEntExit).
MarginalResult inferEntryExitZones(const EvidenceSet& evidence,
                                   const KnowledgeBase& kbSceneLabeling,
                                   const InferenceParams& params);

struct PipelineConfig {
  PrimitiveThresholds thresholds;
  double centroidDistMax = 30.0;
  bool requireSharedBoundary = true;
  double edgeEps = 0.5;
  double minAssociationGap = -60.0;  // allow slight overlap
  double maxAssociationGap = 900.0;
  /// Sensor-level marginals below this are not forwarded to the top level
  /// (0 forwards everything). Unforwarded groundings are false under the
  /// top KB's closed world.
  double forwardThreshold = 0.5;
  double windowLength = 900.0;
  double overlap = 300.0;
  InferenceParams inference;
  GroundOptions grounding;
};

struct SoftForward {
  std::string atomText;
  double probability = 0.0;
  int window = -1;           // -1: not window-scoped (association stage)
  std::string sensorId;      // empty for cross-sensor results
  std::string stage;         // "scene", "sensor", "association"
};

struct PipelineResult {
  struct WindowQuery {
    int window = -1;
    std::string sensorId;
    std::string atomText;
    double probability = 0.0;
  };
  std::vector<WindowQuery> windowMarginals;   // per window/sensor results
  std::vector<QueryMarginal> topMarginals;    // complex-event level
  std::vector<SoftForward> provenance;        // every forwarded soft evidence
  std::vector<std::string> warnings;
};

struct HierarchicalInputs {
  KnowledgeBase kbScene;
  KnowledgeBase kbSensor;   // shared across sensors; observedIn gates rules
  KnowledgeBase kbAssoc;
  KnowledgeBase kbTop;
  std::vector<Tracklet> tracklets;
  std::vector<Zone> zones;
  FusionModels models;
  PipelineConfig config;
};

/// Per window and sensor: scene labeling feeds the sensor-event MLN, whose
/// sub-event marginals are merged across windows (max per ground atom) and
/// forwarded with the cross-sensor association marginals into the top-level
/// MLN as log-odds soft evidence. A failed window is skipped with a warning.
PipelineResult runHierarchical(const HierarchicalInputs& inputs);

/// Single network containing every rule and all evidence; used as the
/// reference path the hierarchical decomposition is compared against.
PipelineResult runMonolithic(const KnowledgeBase& kbMono,
                             const std::vector<Tracklet>& tracklets,
                             const std::vector<Zone>& zones,
                             const FusionModels& models,
                             const PipelineConfig& config);

/// "TimeInt_S_E" -> (S, E); throws on malformed constants.
std::pair<double, double> parseTimeInterval(const std::string& constant);

}  // namespace mln

#endif
