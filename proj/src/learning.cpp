#include "mln/learning.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>
#include <sstream>

namespace mln {
namespace {

uint64_t mixSeed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

struct InstanceNetworks {
  GroundNetwork clamped;  // evidence plus labels
  GroundNetwork free;     // evidence only, same domains
};

InstanceNetworks groundInstance(const KnowledgeBase& kb,
                                const TrainingInstance& instance) {
  EvidenceSet combined = instance.evidence;
  combined.insert(combined.end(), instance.labels.begin(),
                  instance.labels.end());

  GroundOptions freeOptions;
  for (const EvidenceRecord& rec : instance.labels) {
    const PredicateSchema& schema = kb.schema(rec.atom.predicate);
    for (size_t i = 0; i < rec.atom.args.size(); ++i)
      freeOptions.extraConstants.emplace_back(schema.argDomains[i],
                                              rec.atom.args[i].symbol);
  }

  InstanceNetworks nets{ground(kb, combined), ground(kb, instance.evidence, {},
                                                     freeOptions)};
  return nets;
}

std::vector<double> expectedCounts(GroundNetwork& net,
                                   const std::vector<double>& weights,
                                   const LearnParams& params, uint64_t seed) {
  refreshWeights(net, weights);
  std::vector<double> counts;
  switch (params.estimator) {
    case LearnParams::Estimator::Exact:
      counts = exactExpectedClauseCounts(net);
      break;
    case LearnParams::Estimator::MapCounts: {
      InferenceParams ip;
      ip.rngSeed = seed;
      ip.maxFlips = 20000;
      ip.maxTries = 3;
      World w = mapInference(net, ip);
      counts = worldClauseCounts(net, w);
      break;
    }
    case LearnParams::Estimator::Gibbs: {
      InferenceParams ip;
      ip.samples = params.samplesPerGradient;
      ip.chains = 1;
      ip.rngSeed = seed;
      ip.hardWeight = params.hardWeight;
      counts = gibbsExpectedClauseCounts(net, ip);
      break;
    }
  }
  for (size_t f = 0; f < counts.size(); ++f) counts[f] += net.satisfiedTally[f];
  return counts;
}

// Data term of the CLL gradient (no prior).
std::vector<double> dataGradient(const KnowledgeBase& kb,
                                 InstanceNetworks& nets,
                                 const std::vector<double>& weights,
                                 const LearnParams& params, uint64_t seed) {
  std::vector<double> clamped =
      expectedCounts(nets.clamped, weights, params, mixSeed(seed, 1));
  std::vector<double> free =
      expectedCounts(nets.free, weights, params, mixSeed(seed, 2));
  std::vector<double> g(kb.formulas().size(), 0.0);
  for (size_t f = 0; f < g.size(); ++f) {
    if (kb.formulas()[f].hard) continue;
    g[f] = clamped[f] - free[f];
  }
  return g;
}

void applyPrior(const KnowledgeBase& kb, const std::vector<double>& weights,
                const LearnParams& params, std::vector<double>& g) {
  if (params.l2Sigma <= 0) return;
  double inv = 1.0 / (params.l2Sigma * params.l2Sigma);
  for (size_t f = 0; f < g.size(); ++f)
    if (!kb.formulas()[f].hard) g[f] -= weights[f] * inv;
}

void checkLearnable(const KnowledgeBase& kb,
                    const std::vector<TrainingInstance>& instances) {
  std::set<int> queryPreds;
  for (const TrainingInstance& inst : instances)
    for (const EvidenceRecord& rec : inst.labels)
      queryPreds.insert(rec.atom.predicate);
  for (const Formula& f : kb.formulas()) {
    if (f.hard) continue;
    bool touches = false;
    for (const Literal& lit : f.literals)
      if (queryPreds.count(lit.atom.predicate)) touches = true;
    if (!touches)
      throw std::invalid_argument(
          "learnWeights: soft formula touches no query predicate: " +
          f.sourceText);
  }
}

}  // namespace

std::vector<double> cllGradient(const KnowledgeBase& kb,
                                const TrainingInstance& instance,
                                const std::vector<double>& weights,
                                const LearnParams& params) {
  if (weights.size() != kb.formulas().size())
    throw std::invalid_argument("cllGradient: weight vector length mismatch");
  InstanceNetworks nets = groundInstance(kb, instance);
  std::vector<double> g =
      dataGradient(kb, nets, weights, params, params.rngSeed);
  applyPrior(kb, weights, params, g);
  return g;
}

std::vector<double> learnWeights(const KnowledgeBase& kb,
                                 const std::vector<TrainingInstance>& instances,
                                 const LearnParams& params) {
  if (instances.empty())
    throw std::invalid_argument("learnWeights: need at least one instance");
  checkLearnable(kb, instances);

  size_t F = kb.formulas().size();
  std::vector<double> w(F, 0.0);
  if (params.iterations <= 0) return w;

  std::vector<InstanceNetworks> nets;
  nets.reserve(instances.size());
  for (const TrainingInstance& inst : instances)
    nets.push_back(groundInstance(kb, inst));

  std::vector<double> avg(F, 0.0);
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  for (int iter = 0; iter < params.iterations; ++iter) {
    std::vector<double> grad(F, 0.0);
    // Per-instance contributions in parallel chunks, summed in index order.
    size_t chunk = (nets.size() + threads - 1) / threads;
    std::vector<std::future<std::vector<double>>> futures;
    for (size_t start = 0; start < nets.size(); start += chunk) {
      size_t end = std::min(nets.size(), start + chunk);
      futures.push_back(std::async(std::launch::async, [&, start, end, iter]() {
        std::vector<double> local(F, 0.0);
        for (size_t i = start; i < end; ++i) {
          std::vector<double> g =
              dataGradient(kb, nets[i], w, params,
                           mixSeed(params.rngSeed, iter * 1315423911ull + i));
          for (size_t f = 0; f < F; ++f) local[f] += g[f];
        }
        return local;
      }));
    }
    for (auto& fut : futures) {
      std::vector<double> local = fut.get();
      for (size_t f = 0; f < F; ++f) grad[f] += local[f];
    }
    for (double& g : grad) g /= static_cast<double>(nets.size());
    applyPrior(kb, w, params, grad);

    for (size_t f = 0; f < F; ++f) {
      if (kb.formulas()[f].hard) continue;
      w[f] += params.learningRate * grad[f];
      if (std::abs(w[f]) > params.divergenceGuard) {
        std::ostringstream os;
        os << "learnWeights: weight " << f << " diverged (|" << w[f] << "| > "
           << params.divergenceGuard << ") on formula: "
           << kb.formulas()[f].sourceText;
        throw std::runtime_error(os.str());
      }
    }
    for (size_t f = 0; f < F; ++f) avg[f] += w[f];
  }
  if (params.averaging) {
    for (double& v : avg) v /= params.iterations;
    return avg;
  }
  return w;
}

double exactConditionalLogLikelihood(const KnowledgeBase& kb,
                                     const TrainingInstance& instance,
                                     const std::vector<double>& weights) {
  InstanceNetworks nets = groundInstance(kb, instance);
  refreshWeights(nets.clamped, weights);
  refreshWeights(nets.free, weights);
  double constTerm = 0.0;
  for (size_t f = 0; f < kb.formulas().size(); ++f) {
    if (kb.formulas()[f].hard) continue;
    constTerm += weights[f] * (nets.clamped.satisfiedTally[f] -
                               nets.free.satisfiedTally[f]);
  }
  return constTerm + exactLogPartition(nets.clamped) -
         exactLogPartition(nets.free);
}

std::vector<double> learnAssociationWeights(
    const KnowledgeBase& assocKb, const std::vector<Tracklet>& tracklets,
    const FusionModels& models, const std::vector<AssociationLabel>& labels,
    const LearnParams& params) {
  int equalAgent = assocKb.predicateId("equalAgent");
  if (equalAgent < 0)
    throw std::invalid_argument(
        "learnAssociationWeights: KB does not declare equalAgent");
  bool anyPositive = false;
  for (const AssociationLabel& l : labels) anyPositive |= l.equal;
  if (!anyPositive)
    throw std::invalid_argument(
        "learnAssociationWeights: no positive pairs in labels");

  const PredicateSchema& schema = assocKb.schema(equalAgent);
  TrainingInstance instance;
  for (const AssociationLabel& l : labels) {
    const Tracklet& a = tracklets.at(l.trackletA);
    const Tracklet& b = tracklets.at(l.trackletB);
    EvidenceSet cues = emitSimilarityEvidence(a, b, models, assocKb);
    instance.evidence.insert(instance.evidence.end(), cues.begin(), cues.end());
    Atom atom;
    atom.predicate = equalAgent;
    atom.args.push_back(
        Term::constant(a.agentConstant(), schema.argDomains[0]));
    atom.args.push_back(
        Term::constant(b.agentConstant(), schema.argDomains[1]));
    instance.labels.push_back(EvidenceRecord::hard(std::move(atom), l.equal));
  }
  return learnWeights(assocKb, {instance}, params);
}

}  // namespace mln
