#ifndef MLN_INFERENCE_HPP
#define MLN_INFERENCE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mln/grounder.hpp"

namespace mln {

/// ln(p/(1-p)); the unit-clause weight of a soft-evidence atom.
double logOddsWeight(double p);

struct InferenceParams {
  long samples = 10000;
  long burnIn = -1;  // -1 selects samples/10
  int chains = 3;
  uint64_t rngSeed = 0;
  /// Finite stand-in for hard clauses while sampling; exact inference and
  /// MAP treat hard clauses strictly.
  double hardWeight = 40.0;
  long maxFlips = 100000;
  int maxTries = 10;
  double noiseProb = 0.2;
  /// Per-chain marginals further apart than this are flagged.
  double disagreementThreshold = 0.05;

  long effectiveBurnIn() const { return burnIn >= 0 ? burnIn : samples / 10; }
};

struct QueryMarginal {
  int atomIndex = -1;
  std::string atomText;
  double probability = 0.0;
  std::vector<double> perChain;
  bool chainDisagreement = false;
};

struct MarginalResult {
  std::vector<QueryMarginal> marginals;
  long samplesPerChain = 0;
  int chains = 1;

  double probabilityOf(int atomIndex) const;
};

/// A complete assignment over the atom table; evidence atoms hold their
/// fixed values.
struct World {
  std::vector<uint8_t> assignment;
  double score = 0.0;  // sum of satisfied soft weights incl. soft-evidence bias
  long hardUnsatisfied = 0;
};

/// Marginal probabilities by Gibbs sampling. Chains start from a
/// hard-satisfying state located by MAP search and run independently (in
/// parallel); the estimate is the mean post-burn-in true fraction across
/// chains. Throws UnsatisfiableError when no hard-satisfying start exists
/// within maxTries.
MarginalResult gibbsMarginals(const GroundNetwork& network,
                              const std::vector<int>& queryAtoms,
                              const InferenceParams& params);

/// Exhaustive enumeration over the sampleable atoms (<= 20); worlds that
/// violate a hard clause carry zero probability.
MarginalResult exactMarginals(const GroundNetwork& network,
                              const std::vector<int>& queryAtoms);

/// MaxWalkSAT-style stochastic local search maximizing the soft score with
/// hard clauses at strictly higher priority. Best-effort: always returns the
/// best world found and its unsatisfied hard-clause count.
World mapInference(const GroundNetwork& network, const InferenceParams& params);

/// Log of the partition sum over sampleable atoms (hard-violating worlds
/// excluded); soft-evidence bias clauses included. Enumeration-limited.
double exactLogPartition(const GroundNetwork& network);

/// Expected number of true ground clauses per formula (clause part only;
/// add GroundNetwork::satisfiedTally for absolute counts).
std::vector<double> exactExpectedClauseCounts(const GroundNetwork& network);
std::vector<double> gibbsExpectedClauseCounts(const GroundNetwork& network,
                                              const InferenceParams& params);
/// Per-formula true-clause counts in one world.
std::vector<double> worldClauseCounts(const GroundNetwork& network,
                                      const World& world);

}  // namespace mln

#endif
