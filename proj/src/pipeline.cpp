#include "mln/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <set>
#include <sstream>

#include "mln/grounder.hpp"

namespace mln {
namespace {

uint64_t mixSeed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double clampProb(double p) {
  return std::min(1.0 - 1e-6, std::max(1e-6, p));
}

long long quant(double v, double step) {
  return static_cast<long long>(std::floor(v / step));
}

std::string locConstant(double x, double y, double grid) {
  return "Loc_" + std::to_string(quant(x, grid)) + "_" +
         std::to_string(quant(y, grid));
}

std::string timeConstant(double t, double q) {
  return "Time_" + std::to_string(quant(t, q));
}

std::string intervalConstant(double s, double e, double q) {
  return "TimeInt_" + std::to_string(quant(s, q)) + "_" +
         std::to_string(quant(e, q));
}

/// Builds evidence atoms by predicate name; names the KB does not declare
/// are skipped so the same generator feeds every stage KB.
struct EvidenceBuilder {
  const KnowledgeBase& kb;
  EvidenceSet& out;
  std::set<std::string> seen;

  bool has(const std::string& pred) const { return kb.predicateId(pred) >= 0; }

  bool add(const std::string& pred, const std::vector<std::string>& args,
           EvidenceRecord::Truth truth, double p) {
    int id = kb.predicateId(pred);
    if (id < 0) return false;
    const PredicateSchema& schema = kb.schema(id);
    if (static_cast<int>(args.size()) != schema.arity())
      throw std::invalid_argument("evidence builder: arity mismatch for '" +
                                  pred + "'");
    std::string key = pred;
    for (const std::string& a : args) key += "|" + a;
    if (truth == EvidenceRecord::Truth::Soft) key += "@" + std::to_string(p);
    if (!seen.insert(key).second) return true;
    Atom atom;
    atom.predicate = id;
    for (size_t i = 0; i < args.size(); ++i)
      atom.args.push_back(Term::constant(args[i], schema.argDomains[i]));
    EvidenceRecord rec;
    rec.atom = std::move(atom);
    rec.truth = truth;
    rec.p = p;
    out.push_back(std::move(rec));
    return true;
  }
  bool hard(const std::string& pred, const std::vector<std::string>& args) {
    return add(pred, args, EvidenceRecord::Truth::True, 1.0);
  }
  bool soft(const std::string& pred, const std::vector<std::string>& args,
            double p) {
    return add(pred, args, EvidenceRecord::Truth::Soft, clampProb(p));
  }
};

struct TrackSample {
  double t;
  Eigen::Vector2d pos;
};

std::vector<TrackSample> resample(const Tracklet& t, double step) {
  std::vector<TrackSample> out;
  if (t.trajectory.empty()) return out;
  auto posAt = [&](double time) {
    const auto& traj = t.trajectory;
    if (time <= traj.front().t)
      return Eigen::Vector2d(traj.front().x, traj.front().y);
    for (size_t i = 0; i + 1 < traj.size(); ++i) {
      if (time <= traj[i + 1].t) {
        double span = traj[i + 1].t - traj[i].t;
        double f = span > 0 ? (time - traj[i].t) / span : 0.0;
        return Eigen::Vector2d(traj[i].x + f * (traj[i + 1].x - traj[i].x),
                               traj[i].y + f * (traj[i + 1].y - traj[i].y));
      }
    }
    return Eigen::Vector2d(traj.back().x, traj.back().y);
  };
  for (double time = t.tStart; time < t.tEnd; time += step)
    out.push_back({time, posAt(time)});
  out.push_back({t.tEnd, posAt(t.tEnd)});
  return out;
}

struct IntervalInfo {
  std::string constant;
  double start;
  double end;
};

}  // namespace

std::pair<double, double> parseTimeInterval(const std::string& constant) {
  if (constant.rfind("TimeInt_", 0) != 0)
    throw std::invalid_argument("not a TimeInt constant: " + constant);
  std::string rest = constant.substr(8);
  size_t sep = rest.find('_', rest[0] == '-' ? 1 : 0);
  if (sep == std::string::npos)
    throw std::invalid_argument("malformed TimeInt constant: " + constant);
  try {
    return {std::stod(rest.substr(0, sep)), std::stod(rest.substr(sep + 1))};
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed TimeInt constant: " + constant);
  }
}

WindowPlan planWindows(double timelineStart, double timelineEnd,
                       double windowLength, double overlap) {
  if (!(timelineEnd > timelineStart))
    throw std::invalid_argument("planWindows: timeline end must exceed start");
  if (!(windowLength > 0) || overlap < 0 || overlap >= windowLength)
    throw std::invalid_argument(
        "planWindows: need 0 <= overlap < windowLength");
  WindowPlan plan;
  plan.windowLength = windowLength;
  plan.overlap = overlap;
  double step = windowLength - overlap;
  for (double s = timelineStart;; s += step) {
    plan.windows.emplace_back(s, std::min(s + windowLength, timelineEnd));
    if (s + windowLength >= timelineEnd) break;
  }
  return plan;
}

PrimitiveResult generatePrimitivePredicates(
    const std::vector<Tracklet>& tracklets, const std::vector<Zone>& zones,
    const PrimitiveThresholds& th, const KnowledgeBase& kb) {
  PrimitiveResult result;
  EvidenceBuilder b{kb, result.evidence, {}};

  std::vector<IntervalInfo> intervals;
  std::vector<std::string> instants;
  std::vector<double> instantTimes;
  std::map<std::string, Eigen::Vector2d> locs;

  auto zoneAt = [&](const Tracklet& t, const Eigen::Vector2d& p) -> const Zone* {
    for (const Zone& z : zones) {
      if (!z.sensorId.empty() && z.sensorId != t.sensorId) continue;
      if (z.contains(p)) return &z;
    }
    return nullptr;
  };
  auto noteLoc = [&](const std::string& c, const Eigen::Vector2d& p) {
    locs.emplace(c, Eigen::Vector2d(std::floor(p.x() / th.locGrid) * th.locGrid,
                                    std::floor(p.y() / th.locGrid) * th.locGrid));
  };
  auto noteInstant = [&](const std::string& c, double t) {
    if (std::find(instants.begin(), instants.end(), c) == instants.end()) {
      instants.push_back(c);
      instantTimes.push_back(std::floor(t / th.timeQuantum) * th.timeQuantum);
    }
  };

  for (const Tracklet& t : tracklets) {
    if (t.trajectory.empty()) {
      result.warnings.push_back("tracklet " + t.agentConstant() +
                                " has no trajectory samples; skipped");
      continue;
    }
    std::string agent = t.agentConstant();
    b.hard("observedIn", {agent, t.sensorId});

    for (const auto& [category, score] : t.categoryScores)
      b.soft("class", {agent, category}, score);
    if (t.carryBagScore) b.soft("carryBag", {agent}, *t.carryBagScore);

    Eigen::Vector2d first(t.front().x, t.front().y);
    Eigen::Vector2d last(t.back().x, t.back().y);
    std::string locA = locConstant(first.x(), first.y(), th.locGrid);
    std::string locB = locConstant(last.x(), last.y(), th.locGrid);
    std::string timeA = timeConstant(t.tStart, th.timeQuantum);
    std::string timeB = timeConstant(t.tEnd, th.timeQuantum);
    noteLoc(locA, first);
    noteLoc(locB, last);
    noteInstant(timeA, t.tStart);
    noteInstant(timeB, t.tEnd);
    b.hard("appear", {agent, locA, timeA});
    b.hard("disappear", {agent, locB, timeB});

    if (const Zone* z = zoneAt(t, first)) {
      b.hard("appearI", {agent, z->id});
    } else if (b.has("appearI")) {
      result.warnings.push_back("tracklet " + agent +
                                " appears outside every zone");
    }
    if (const Zone* z = zoneAt(t, last)) {
      b.hard("disappearI", {agent, z->id});
    } else if (b.has("disappearI")) {
      result.warnings.push_back("tracklet " + agent +
                                " disappears outside every zone");
    }

    // Movement runs: classify per resampled step, then merge.
    std::vector<TrackSample> samples = resample(t, th.sampleInterval);
    struct Run {
      bool moving;
      size_t first, last;  // sample indices
    };
    std::vector<Run> runs;
    for (size_t i = 0; i + 1 < samples.size(); ++i) {
      double dt = samples[i + 1].t - samples[i].t;
      if (dt <= 0) continue;
      double speed = (samples[i + 1].pos - samples[i].pos).norm() / dt;
      bool moving = speed > th.epsMove / th.sampleInterval;
      if (!runs.empty() && runs.back().moving == moving)
        runs.back().last = i + 1;
      else
        runs.push_back({moving, i, i + 1});
    }
    if (runs.empty() && t.tEnd > t.tStart && !samples.empty())
      runs.push_back({false, 0, samples.size() - 1});

    for (const Run& run : runs) {
      double s = samples[run.first].t;
      double e = samples[run.last].t;
      std::string interval = intervalConstant(s, e, th.timeQuantum);
      std::string from = locConstant(samples[run.first].pos.x(),
                                     samples[run.first].pos.y(), th.locGrid);
      std::string to = locConstant(samples[run.last].pos.x(),
                                   samples[run.last].pos.y(), th.locGrid);
      noteLoc(from, samples[run.first].pos);
      noteLoc(to, samples[run.last].pos);
      bool used;
      if (run.moving) {
        used = b.hard("move", {agent, from, to, interval});
        b.hard("moveInt", {agent, interval});
      } else {
        used = b.hard("stationary", {agent, from, interval});
        b.hard("stationaryInt", {agent, interval});
      }
      if (used || b.has("afterInt") || b.has("agentInt") || b.has("timeInInt")) {
        bool known = false;
        for (const IntervalInfo& info : intervals)
          if (info.constant == interval) known = true;
        if (!known)
          intervals.push_back({interval,
                               std::floor(s / th.timeQuantum) * th.timeQuantum,
                               std::floor(e / th.timeQuantum) * th.timeQuantum});
        b.hard("agentInt", {agent, interval});
      }
    }
  }

  for (const IntervalInfo& a : intervals)
    for (const IntervalInfo& bInt : intervals) {
      if (a.constant == bInt.constant) continue;
      if (a.end <= bInt.start) b.hard("afterInt", {a.constant, bInt.constant});
    }
  for (size_t i = 0; i < instants.size(); ++i)
    for (const IntervalInfo& info : intervals)
      if (instantTimes[i] >= info.start && instantTimes[i] <= info.end)
        b.hard("timeInInt", {instants[i], info.constant});
  for (const auto& [ca, pa] : locs)
    for (const auto& [cb, pb] : locs)
      if ((pa - pb).norm() <= th.nearLocDist) b.hard("nearLoc", {ca, cb});

  for (const Zone& z : zones)
    for (const auto& [category, score] : z.geometricScores)
      b.soft("zoneClass", {z.id, category}, score);

  return result;
}

EvidenceSet computeZoneAdjacency(const std::vector<Zone>& zones,
                                 double centroidDistMax,
                                 bool requireSharedBoundary,
                                 const KnowledgeBase& kb, double edgeEps) {
  EvidenceSet out;
  EvidenceBuilder b{kb, out, {}};
  if (!b.has("zoneAdjacentZone")) return out;

  auto segmentDistance = [](const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                            const Eigen::Vector2d& bPt) {
    Eigen::Vector2d ab = bPt - a;
    double len2 = ab.squaredNorm();
    double f = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (p - (a + f * ab)).norm();
  };
  auto boundaryDistance = [&](const Eigen::Vector2d& p, const Zone& z) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < z.polygon.size(); ++i)
      best = std::min(best, segmentDistance(p, z.polygon[i],
                                            z.polygon[(i + 1) % z.polygon.size()]));
    return best;
  };
  auto sharesBoundary = [&](const Zone& za, const Zone& zb) {
    const int samplesPerEdge = 64;
    for (size_t i = 0; i < za.polygon.size(); ++i) {
      const Eigen::Vector2d& a = za.polygon[i];
      const Eigen::Vector2d& c = za.polygon[(i + 1) % za.polygon.size()];
      double edgeLen = (c - a).norm();
      if (edgeLen <= 0) continue;
      int hits = 0;
      for (int s = 0; s <= samplesPerEdge; ++s) {
        Eigen::Vector2d p = a + (c - a) * (static_cast<double>(s) / samplesPerEdge);
        if (boundaryDistance(p, zb) <= edgeEps) ++hits;
      }
      // contiguous overlap of positive length, not a single corner touch
      if (hits >= 2 && edgeLen * hits / (samplesPerEdge + 1) > 1e-9) return true;
    }
    return false;
  };

  for (size_t i = 0; i < zones.size(); ++i)
    for (size_t j = i + 1; j < zones.size(); ++j) {
      if (zones[i].sensorId != zones[j].sensorId) continue;
      if ((zones[i].centroid() - zones[j].centroid()).norm() > centroidDistMax)
        continue;
      if (requireSharedBoundary && !sharesBoundary(zones[i], zones[j]) &&
          !sharesBoundary(zones[j], zones[i]))
        continue;
      b.hard("zoneAdjacentZone", {zones[i].id, zones[j].id});
      b.hard("zoneAdjacentZone", {zones[j].id, zones[i].id});
    }
  return out;
}

namespace {

QuerySpec openPredicateQuery(const KnowledgeBase& kb,
                             const std::vector<std::string>& restrictTo = {}) {
  QuerySpec spec;
  for (size_t i = 0; i < kb.schemas().size(); ++i) {
    const PredicateSchema& s = kb.schemas()[i];
    if (s.closedWorld) continue;
    if (!restrictTo.empty() &&
        std::find(restrictTo.begin(), restrictTo.end(), s.name) ==
            restrictTo.end())
      continue;
    spec.addPredicate(static_cast<int>(i));
  }
  return spec;
}

struct StageResult {
  GroundNetwork network;
  MarginalResult marginals;
};

StageResult runStage(const KnowledgeBase& kb, const EvidenceSet& evidence,
                     const InferenceParams& params, const GroundOptions& opts,
                     const std::vector<std::string>& restrictTo = {}) {
  StageResult stage{ground(kb, evidence, openPredicateQuery(kb, restrictTo),
                           opts),
                    {}};
  stage.marginals = gibbsMarginals(stage.network, stage.network.queryAtoms,
                                   params);
  return stage;
}

struct NamedMarginal {
  std::string predicate;
  std::vector<std::string> args;
  double p;
};

std::vector<NamedMarginal> namedMarginals(const StageResult& stage) {
  std::vector<NamedMarginal> out;
  for (const QueryMarginal& m : stage.marginals.marginals) {
    const GroundAtom& ga = stage.network.atoms.atom(m.atomIndex);
    const PredicateSchema& schema = stage.network.kb->schema(ga.predicate);
    NamedMarginal named;
    named.predicate = schema.name;
    for (size_t i = 0; i < ga.args.size(); ++i)
      named.args.push_back(
          stage.network.domains->constants(schema.argDomains[i])[ga.args[i]]);
    named.p = m.probability;
    out.push_back(std::move(named));
  }
  return out;
}

std::string atomTextOf(const NamedMarginal& m) {
  std::string s = m.predicate + "(";
  for (size_t i = 0; i < m.args.size(); ++i) {
    if (i) s += ",";
    s += m.args[i];
  }
  return s + ")";
}

/// afterInt evidence over every TimeInt constant referenced by the evidence
/// atoms of timeInterval-typed argument positions.
void addAfterIntFromEvidence(EvidenceSet& evidence, const KnowledgeBase& kb) {
  EvidenceBuilder b{kb, evidence, {}};
  if (!b.has("afterInt")) return;
  std::set<std::string> constants;
  for (const EvidenceRecord& rec : evidence) {
    const PredicateSchema& schema = kb.schema(rec.atom.predicate);
    for (size_t i = 0; i < rec.atom.args.size(); ++i)
      if (schema.argDomains[i] == "timeInterval" &&
          rec.atom.args[i].symbol.rfind("TimeInt_", 0) == 0)
        constants.insert(rec.atom.args[i].symbol);
  }
  for (const std::string& a : constants)
    for (const std::string& c : constants) {
      if (a == c) continue;
      auto [s1, e1] = parseTimeInterval(a);
      auto [s2, e2] = parseTimeInterval(c);
      (void)s1;
      (void)e2;
      if (e1 <= s2) b.hard("afterInt", {a, c});
    }
}

std::vector<std::pair<size_t, size_t>> associationPairs(
    const std::vector<Tracklet>& tracklets, const PipelineConfig& config) {
  std::vector<std::pair<size_t, size_t>> pairs;
  for (size_t i = 0; i < tracklets.size(); ++i)
    for (size_t j = 0; j < tracklets.size(); ++j) {
      if (i == j) continue;
      if (tracklets[i].sensorId == tracklets[j].sensorId) continue;
      double gap = tracklets[j].tStart - tracklets[i].tEnd;
      if (gap < config.minAssociationGap || gap > config.maxAssociationGap)
        continue;
      pairs.emplace_back(i, j);
    }
  return pairs;
}

}  // namespace

MarginalResult inferEntryExitZones(const EvidenceSet& evidence,
                                   const KnowledgeBase& kbSceneLabeling,
                                   const InferenceParams& params) {
  return runStage(kbSceneLabeling, evidence, params, {}).marginals;
}

PipelineResult runHierarchical(const HierarchicalInputs& inputs) {
  const PipelineConfig& config = inputs.config;
  PipelineResult result;

  double t0 = std::numeric_limits<double>::infinity();
  double t1 = -std::numeric_limits<double>::infinity();
  std::set<std::string> sensorIds;
  for (const Tracklet& t : inputs.tracklets) {
    t0 = std::min(t0, t.tStart);
    t1 = std::max(t1, t.tEnd);
    sensorIds.insert(t.sensorId);
  }

  struct JobOutput {
    int window;
    std::string sensor;
    std::vector<NamedMarginal> marginals;
    std::vector<std::string> warnings;
    bool failed = false;
    std::string error;
  };
  std::vector<JobOutput> jobs;

  if (!inputs.tracklets.empty() && t1 > t0) {
    WindowPlan plan =
        planWindows(t0, t1, config.windowLength, config.overlap);

    std::vector<std::future<JobOutput>> futures;
    int windowIdx = 0;
    for (const auto& [ws, we] : plan.windows) {
      int sensorIdx = 0;
      for (const std::string& sensor : sensorIds) {
        std::vector<Tracklet> local;
        for (const Tracklet& t : inputs.tracklets)
          if (t.sensorId == sensor && t.tStart <= we && t.tEnd >= ws)
            local.push_back(t);
        if (local.empty()) {
          ++sensorIdx;
          continue;
        }
        std::vector<Zone> zones;
        for (const Zone& z : inputs.zones)
          if (z.sensorId.empty() || z.sensorId == sensor) zones.push_back(z);

        uint64_t seedBase = mixSeed(config.inference.rngSeed,
                                    windowIdx * 131 + sensorIdx);
        futures.push_back(std::async(std::launch::async, [&, local, zones,
                                                          windowIdx, sensor,
                                                          seedBase]() {
          JobOutput out;
          out.window = windowIdx;
          out.sensor = sensor;
          try {
            // Scene labeling feeds the sensor-event MLN bottom-up.
            PrimitiveResult scenePrim = generatePrimitivePredicates(
                local, zones, config.thresholds, inputs.kbScene);
            EvidenceSet sceneEv = scenePrim.evidence;
            EvidenceSet adj = computeZoneAdjacency(
                zones, config.centroidDistMax, config.requireSharedBoundary,
                inputs.kbScene, config.edgeEps);
            sceneEv.insert(sceneEv.end(), adj.begin(), adj.end());
            InferenceParams sceneParams = config.inference;
            sceneParams.rngSeed = mixSeed(seedBase, 1);
            StageResult scene = runStage(inputs.kbScene, sceneEv, sceneParams,
                                         config.grounding);

            PrimitiveResult sensorPrim = generatePrimitivePredicates(
                local, zones, config.thresholds, inputs.kbSensor);
            EvidenceSet sensorEv = sensorPrim.evidence;
            EvidenceBuilder sb{inputs.kbSensor, sensorEv, {}};
            for (const NamedMarginal& m : namedMarginals(scene))
              sb.soft(m.predicate, m.args, m.p);
            InferenceParams sensorParams = config.inference;
            sensorParams.rngSeed = mixSeed(seedBase, 2);
            StageResult stage = runStage(inputs.kbSensor, sensorEv,
                                         sensorParams, config.grounding);
            out.marginals = namedMarginals(stage);
            out.warnings = scenePrim.warnings;
            out.warnings.insert(out.warnings.end(), sensorPrim.warnings.begin(),
                                sensorPrim.warnings.end());
          } catch (const std::exception& e) {
            out.failed = true;
            out.error = e.what();
          }
          return out;
        }));
        ++sensorIdx;
      }
      ++windowIdx;
    }
    for (auto& f : futures) jobs.push_back(f.get());
  }

  // Merge duplicate ground atoms across windows: keep the max probability.
  struct Merged {
    NamedMarginal m;
    int window;
    std::string sensor;
  };
  std::map<std::string, Merged> merged;
  for (const JobOutput& job : jobs) {
    if (job.failed) {
      result.warnings.push_back("window " + std::to_string(job.window) +
                                " sensor " + job.sensor +
                                " failed: " + job.error);
      continue;
    }
    for (const std::string& w : job.warnings) result.warnings.push_back(w);
    for (const NamedMarginal& m : job.marginals) {
      result.windowMarginals.push_back(
          {job.window, job.sensor, atomTextOf(m), m.p});
      std::string key = atomTextOf(m);
      auto it = merged.find(key);
      if (it == merged.end() || m.p > it->second.m.p)
        merged[key] = {m, job.window, job.sensor};
    }
  }

  // Cross-sensor association on the full tracklet set.
  std::vector<NamedMarginal> association;
  {
    EvidenceSet cueEv;
    for (const auto& [i, j] : associationPairs(inputs.tracklets, config)) {
      EvidenceSet cues =
          emitSimilarityEvidence(inputs.tracklets[i], inputs.tracklets[j],
                                 inputs.models, inputs.kbAssoc,
                                 &result.warnings);
      cueEv.insert(cueEv.end(), cues.begin(), cues.end());
    }
    if (!cueEv.empty()) {
      InferenceParams assocParams = config.inference;
      assocParams.rngSeed = mixSeed(config.inference.rngSeed, 0xA550C);
      StageResult assoc = runStage(inputs.kbAssoc, cueEv, assocParams,
                                   config.grounding);
      association = namedMarginals(assoc);
    }
  }

  // Top level: merged sub-event and association marginals enter as log-odds
  // soft evidence; afterInt over the forwarded interval constants.
  EvidenceSet topEv;
  EvidenceBuilder tb{inputs.kbTop, topEv, {}};
  for (const auto& [key, entry] : merged) {
    if (entry.m.p < config.forwardThreshold) continue;
    if (tb.soft(entry.m.predicate, entry.m.args, entry.m.p))
      result.provenance.push_back({atomTextOf(entry.m), entry.m.p,
                                   entry.window, entry.sensor, "sensor"});
  }
  for (const NamedMarginal& m : association) {
    if (tb.soft(m.predicate, m.args, m.p))
      result.provenance.push_back({atomTextOf(m), m.p, -1, "", "association"});
  }
  addAfterIntFromEvidence(topEv, inputs.kbTop);

  InferenceParams topParams = config.inference;
  topParams.rngSeed = mixSeed(config.inference.rngSeed, 0x709);
  StageResult top = runStage(inputs.kbTop, topEv, topParams, config.grounding);
  result.topMarginals = top.marginals.marginals;
  return result;
}

PipelineResult runMonolithic(const KnowledgeBase& kbMono,
                             const std::vector<Tracklet>& tracklets,
                             const std::vector<Zone>& zones,
                             const FusionModels& models,
                             const PipelineConfig& config) {
  PipelineResult result;
  PrimitiveResult prim =
      generatePrimitivePredicates(tracklets, zones, config.thresholds, kbMono);
  result.warnings = prim.warnings;
  EvidenceSet evidence = prim.evidence;
  EvidenceSet adj =
      computeZoneAdjacency(zones, config.centroidDistMax,
                           config.requireSharedBoundary, kbMono, config.edgeEps);
  evidence.insert(evidence.end(), adj.begin(), adj.end());
  for (const auto& [i, j] : associationPairs(tracklets, config)) {
    EvidenceSet cues = emitSimilarityEvidence(tracklets[i], tracklets[j],
                                              models, kbMono,
                                              &result.warnings);
    evidence.insert(evidence.end(), cues.begin(), cues.end());
  }

  InferenceParams params = config.inference;
  params.rngSeed = mixSeed(config.inference.rngSeed, 0x30303);
  // Restrict query expansion to the complex-event predicates when they
  // exist; hidden atoms still enter the network through their clauses.
  std::vector<std::string> restrict;
  for (const char* name : {"bagStealEvent", "bagDropEvent"})
    if (kbMono.predicateId(name) >= 0) restrict.push_back(name);
  StageResult stage =
      runStage(kbMono, evidence, params, config.grounding, restrict);
  result.topMarginals = stage.marginals.marginals;
  return result;
}

}  // namespace mln
