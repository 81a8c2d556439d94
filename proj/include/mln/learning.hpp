#ifndef MLN_LEARNING_HPP
#define MLN_LEARNING_HPP

#include <cstdint>
#include <vector>

#include "mln/fusion.hpp"
#include "mln/grounder.hpp"
#include "mln/inference.hpp"

namespace mln {

/// One labeled database: observed evidence X plus ground-truth labels Y for
/// the query predicates (closed world over the labels: groundings of a query
/// predicate not listed true must be listed false or are treated as false).
struct TrainingInstance {
  EvidenceSet evidence;
  EvidenceSet labels;
};

struct LearnParams {
  double learningRate = 0.05;
  int iterations = 100;
  /// Gaussian prior std on weights; <= 0 disables the prior.
  double l2Sigma = 10.0;
  long samplesPerGradient = 1000;
  /// Return the running average of iterates instead of the last one.
  bool averaging = true;
  enum class Estimator { Gibbs, MapCounts, Exact };
  Estimator estimator = Estimator::Gibbs;
  uint64_t rngSeed = 0;
  double divergenceGuard = 100.0;
  double hardWeight = 40.0;
};

/// Gradient of the conditional log-likelihood w.r.t. the soft formula
/// weights at the given point:
///   g_i = E[n_i | x, y] - E_w[n_i | x] - w_i/sigma^2
/// with both expectations over the instantiated network (exact counts when
/// the labels pin everything). Hard formulas get gradient zero.
std::vector<double> cllGradient(const KnowledgeBase& kb,
                                const TrainingInstance& instance,
                                const std::vector<double>& weights,
                                const LearnParams& params);

/// Averaged gradient ascent from zero-initialized weights; hard formulas are
/// never updated. Aborts with a diagnostic when a weight passes the
/// divergence guard.
std::vector<double> learnWeights(const KnowledgeBase& kb,
                                 const std::vector<TrainingInstance>& instances,
                                 const LearnParams& params);

/// Exact conditional log-likelihood of an instance, constant-clause tallies
/// included. Enumeration-limited; test and diagnostics use.
double exactConditionalLogLikelihood(const KnowledgeBase& kb,
                                     const TrainingInstance& instance,
                                     const std::vector<double>& weights);

struct AssociationLabel {
  size_t trackletA = 0;  // indices into the tracklet list
  size_t trackletB = 0;
  bool equal = false;
};

/// Learns the weights of the cross-sensor association rules: similarity soft
/// evidence is generated for every labeled pair by the fusion models, the
/// equalAgent groundings are clamped to the labels, and the KB weights are
/// fit discriminatively. Returns the full weight vector aligned with
/// assocKb.formulas().
std::vector<double> learnAssociationWeights(
    const KnowledgeBase& assocKb, const std::vector<Tracklet>& tracklets,
    const FusionModels& models, const std::vector<AssociationLabel>& labels,
    const LearnParams& params);

}  // namespace mln

#endif
