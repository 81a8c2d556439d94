#include "mln/inference.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace mln {

double logOddsWeight(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument(
        "logOddsWeight: probability must lie strictly inside (0,1)");
  return std::log(p / (1.0 - p));
}

double MarginalResult::probabilityOf(int atomIndex) const {
  for (const QueryMarginal& m : marginals)
    if (m.atomIndex == atomIndex) return m.probability;
  throw std::out_of_range("atom not among query results");
}

namespace {

uint64_t mixSeed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Flat clause/occurrence representation shared by the samplers. Soft
/// evidence biases are materialized as unit clauses so every engine treats
/// them uniformly.
struct Engine {
  int numAtoms = 0;
  std::vector<int32_t> lits;       // concatenated clause literals
  std::vector<int> clauseStart;    // size C+1
  std::vector<double> weight;      // per clause; hard clauses use hard flag
  std::vector<uint8_t> hard;
  std::vector<int> sourceFormula;  // -1 for bias unit clauses
  std::vector<int> occStart;       // size numAtoms+1
  std::vector<int32_t> occ;        // clause index, sign in low bit? see below
  std::vector<uint8_t> fixed;      // evidence atoms
  std::vector<uint8_t> fixedValue;
  std::vector<int> sampleable;     // atom indices to resample

  // occ entry encodes (clauseIdx << 1) | positive
  static int occClause(int32_t e) { return e >> 1; }
  static bool occPositive(int32_t e) { return e & 1; }

  explicit Engine(const GroundNetwork& net) {
    numAtoms = static_cast<int>(net.atoms.size());
    fixed.assign(numAtoms, 0);
    fixedValue.assign(numAtoms, 0);
    for (int i = 0; i < numAtoms; ++i) {
      AtomStatus s = net.atoms.status(i);
      if (s == AtomStatus::EvidenceTrue) {
        fixed[i] = 1;
        fixedValue[i] = 1;
      } else if (s == AtomStatus::EvidenceFalse) {
        fixed[i] = 1;
      } else {
        sampleable.push_back(i);
      }
    }
    auto addClause = [&](const std::vector<int32_t>& ls, double w, bool h,
                         int src) {
      clauseStart.push_back(static_cast<int>(lits.size()));
      lits.insert(lits.end(), ls.begin(), ls.end());
      weight.push_back(w);
      hard.push_back(h);
      sourceFormula.push_back(src);
    };
    for (const GroundClause& c : net.clauses)
      addClause(c.lits, c.weight, c.hard, c.sourceFormula);
    for (int i = 0; i < numAtoms; ++i)
      if (i < static_cast<int>(net.softBias.size()) && net.softBias[i] != 0.0)
        addClause({i + 1}, net.softBias[i], false, -1);
    clauseStart.push_back(static_cast<int>(lits.size()));

    std::vector<int> counts(numAtoms + 1, 0);
    for (int32_t lit : lits) ++counts[GroundClause::atomIndex(lit)];
    occStart.assign(numAtoms + 1, 0);
    for (int i = 0; i < numAtoms; ++i) occStart[i + 1] = occStart[i] + counts[i];
    occ.assign(lits.size(), 0);
    std::vector<int> cursor(occStart.begin(), occStart.end() - 1);
    for (int c = 0; c < clauseCount(); ++c)
      for (int k = clauseStart[c]; k < clauseStart[c + 1]; ++k) {
        int atom = GroundClause::atomIndex(lits[k]);
        occ[cursor[atom]++] =
            (c << 1) | (GroundClause::positive(lits[k]) ? 1 : 0);
      }
  }

  int clauseCount() const { return static_cast<int>(weight.size()); }
  int clauseSize(int c) const { return clauseStart[c + 1] - clauseStart[c]; }

  int countTrue(int c, const std::vector<uint8_t>& x) const {
    int n = 0;
    for (int k = clauseStart[c]; k < clauseStart[c + 1]; ++k) {
      int atom = GroundClause::atomIndex(lits[k]);
      if (static_cast<bool>(x[atom]) == GroundClause::positive(lits[k])) ++n;
    }
    return n;
  }

  double softScore(const std::vector<uint8_t>& x) const {
    double s = 0.0;
    for (int c = 0; c < clauseCount(); ++c)
      if (!hard[c] && countTrue(c, x) > 0) s += weight[c];
    return s;
  }

  long hardUnsat(const std::vector<uint8_t>& x) const {
    long n = 0;
    for (int c = 0; c < clauseCount(); ++c)
      if (hard[c] && countTrue(c, x) == 0) ++n;
    return n;
  }
};

/// Stochastic local search state with incremental bookkeeping.
struct WalkState {
  const Engine& eng;
  std::vector<uint8_t> x;
  std::vector<int> numTrue;
  std::vector<int> costBearing;     // clause indices currently carrying cost
  std::vector<int> costPos;         // position in costBearing, -1 absent
  double score = 0.0;
  long hardBad = 0;

  explicit WalkState(const Engine& e) : eng(e) {}

  bool bearsCost(int c) const {
    if (eng.hard[c]) return numTrue[c] == 0;
    if (eng.weight[c] > 0) return numTrue[c] == 0;
    if (eng.weight[c] < 0) return numTrue[c] > 0;
    return false;
  }

  void syncCostMembership(int c) {
    bool want = bearsCost(c);
    bool have = costPos[c] >= 0;
    if (want == have) return;
    if (want) {
      costPos[c] = static_cast<int>(costBearing.size());
      costBearing.push_back(c);
    } else {
      int pos = costPos[c];
      int last = costBearing.back();
      costBearing[pos] = last;
      costPos[last] = pos;
      costBearing.pop_back();
      costPos[c] = -1;
    }
  }

  void init(const std::vector<uint8_t>& assignment) {
    x = assignment;
    numTrue.assign(eng.clauseCount(), 0);
    costBearing.clear();
    costPos.assign(eng.clauseCount(), -1);
    score = 0.0;
    hardBad = 0;
    for (int c = 0; c < eng.clauseCount(); ++c) {
      numTrue[c] = eng.countTrue(c, x);
      if (eng.hard[c]) {
        if (numTrue[c] == 0) ++hardBad;
      } else if (numTrue[c] > 0) {
        score += eng.weight[c];
      }
      syncCostMembership(c);
    }
  }

  void flip(int atom) {
    x[atom] ^= 1;
    bool nowTrue = x[atom];
    for (int k = eng.occStart[atom]; k < eng.occStart[atom + 1]; ++k) {
      int c = Engine::occClause(eng.occ[k]);
      bool litTrue = Engine::occPositive(eng.occ[k]) == nowTrue;
      int before = numTrue[c];
      numTrue[c] += litTrue ? 1 : -1;
      if (eng.hard[c]) {
        if (before == 0 && numTrue[c] > 0) --hardBad;
        if (before > 0 && numTrue[c] == 0) ++hardBad;
      } else {
        if (before == 0 && numTrue[c] > 0) score += eng.weight[c];
        if (before > 0 && numTrue[c] == 0) score -= eng.weight[c];
      }
      syncCostMembership(c);
    }
  }

  // Cost change of flipping an atom: (hard delta, score delta).
  std::pair<long, double> probeFlip(int atom) {
    flip(atom);
    double s = score;
    long h = hardBad;
    flip(atom);
    return {h, s};
  }

  // Deterministic hill climb to a single-flip local optimum. Unlike the
  // walk itself this never accepts a worsening flip, so a consistent
  // assignment of implication chains survives intact.
  void greedyDescent(int maxSweeps = 60) {
    for (int sweep = 0; sweep < maxSweeps; ++sweep) {
      bool improved = false;
      for (int atom = 0; atom < eng.numAtoms; ++atom) {
        if (eng.fixed[atom]) continue;
        auto [h, s] = probeFlip(atom);
        if (h < hardBad || (h == hardBad && s > score + 1e-12)) {
          flip(atom);
          improved = true;
        }
      }
      if (!improved) break;
    }
  }
};

thread_local std::vector<int> candidates_;

World runMaxWalkSat(const Engine& eng, const InferenceParams& params,
                    uint64_t seed) {
  std::mt19937_64 rng(mixSeed(seed, 0x6d6170));  // "map"
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  WalkState state(eng);
  World best;
  best.hardUnsatisfied = std::numeric_limits<long>::max();
  best.score = -std::numeric_limits<double>::infinity();

  std::vector<uint8_t> assignment(eng.numAtoms, 0);
  for (int t = 0; t < std::max(1, params.maxTries); ++t) {
    // First tries probe the all-false and all-true corners: implication-heavy
    // networks have their optima near one of them, and random starts can land
    // in the wrong basin of an effectively frozen landscape.
    for (int i = 0; i < eng.numAtoms; ++i)
      assignment[i] = eng.fixed[i]
                          ? eng.fixedValue[i]
                          : (t == 0 ? 0 : t == 1 ? 1 : (rng() & 1));
    state.init(assignment);

    auto consider = [&]() {
      if (state.hardBad < best.hardUnsatisfied ||
          (state.hardBad == best.hardUnsatisfied && state.score > best.score)) {
        best.assignment = state.x;
        best.score = state.score;
        best.hardUnsatisfied = state.hardBad;
      }
    };
    // Both corner starts settle into their local optimum first; the
    // stochastic walk then explores from there.
    if (t < 2) state.greedyDescent();
    consider();

    for (long f = 0; f < params.maxFlips; ++f) {
      if (state.costBearing.empty()) break;
      int c = state.costBearing[rng() % state.costBearing.size()];
      // Candidate flips: for an unsatisfied clause any literal helps; for a
      // satisfied negative-weight clause only currently-true literals do.
      candidates_.clear();
      bool unsat = state.numTrue[c] == 0;
      for (int k = eng.clauseStart[c]; k < eng.clauseStart[c + 1]; ++k) {
        int atom = GroundClause::atomIndex(eng.lits[k]);
        if (eng.fixed[atom]) continue;
        bool litTrue =
            static_cast<bool>(state.x[atom]) == GroundClause::positive(eng.lits[k]);
        if (unsat || litTrue) candidates_.push_back(atom);
      }
      if (candidates_.empty()) continue;
      int chosen;
      if (uni(rng) < params.noiseProb) {
        chosen = candidates_[rng() % candidates_.size()];
      } else {
        chosen = candidates_[0];
        long bestHard = 0;
        double bestScore = 0.0;
        bool first = true;
        for (int atom : candidates_) {
          auto [h, s] = state.probeFlip(atom);
          if (first || h < bestHard || (h == bestHard && s > bestScore)) {
            bestHard = h;
            bestScore = s;
            chosen = atom;
            first = false;
          }
        }
      }
      state.flip(chosen);
      consider();
    }
    if (best.hardUnsatisfied == 0 && state.costBearing.empty()) break;
  }
  if (best.assignment.empty()) {
    best.assignment = assignment;
    best.score = state.score;
    best.hardUnsatisfied = state.hardBad;
  }
  return best;
}

struct ChainResult {
  std::vector<long> trueCount;          // per sampleable atom slot
  std::vector<double> formulaCounts;    // accumulated per formula
  long sweeps = 0;
};

void runChain(const Engine& eng, const GroundNetwork& net,
              const InferenceParams& params, uint64_t chainSeed,
              bool trackFormulas, ChainResult& out) {
  std::mt19937_64 rng(chainSeed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  // Hard-satisfying start via MAP search; plain random start otherwise.
  std::vector<uint8_t> x(eng.numAtoms, 0);
  bool anyHard = std::find(eng.hard.begin(), eng.hard.end(), 1) != eng.hard.end();
  if (anyHard) {
    InferenceParams mapParams = params;
    mapParams.maxFlips =
        std::max<long>(std::min<long>(params.maxFlips, 20000),
                       8L * static_cast<long>(eng.sampleable.size()));
    World start = runMaxWalkSat(eng, mapParams, chainSeed);
    if (start.hardUnsatisfied > 0)
      throw UnsatisfiableError(
          "no hard-satisfying initial state found; hard clauses may be "
          "unsatisfiable (best state violates " +
          std::to_string(start.hardUnsatisfied) + " hard clauses)");
    x = start.assignment;
  } else {
    for (int i = 0; i < eng.numAtoms; ++i)
      x[i] = eng.fixed[i] ? eng.fixedValue[i] : (rng() & 1);
  }

  std::vector<int> numTrue(eng.clauseCount());
  for (int c = 0; c < eng.clauseCount(); ++c) numTrue[c] = eng.countTrue(c, x);

  out.trueCount.assign(eng.sampleable.size(), 0);
  if (trackFormulas)
    out.formulaCounts.assign(net.kb->formulas().size(), 0.0);
  out.sweeps = 0;

  long burnIn = params.effectiveBurnIn();
  for (long sweep = 0; sweep < burnIn + params.samples; ++sweep) {
    // Annealed burn-in: hard clauses start soft so the chain can cross
    // constraint ratchets, and reach full strength before sampling begins.
    double hardNow = params.hardWeight;
    if (anyHard && burnIn > 0 && sweep < burnIn) {
      double f = static_cast<double>(sweep) / static_cast<double>(burnIn);
      hardNow = 2.0 + f * (params.hardWeight - 2.0);
    }
    for (int atom : eng.sampleable) {
      double delta = 0.0;
      bool cur = x[atom];
      for (int k = eng.occStart[atom]; k < eng.occStart[atom + 1]; ++k) {
        int c = Engine::occClause(eng.occ[k]);
        bool positive = Engine::occPositive(eng.occ[k]);
        int without = numTrue[c] - ((cur == positive) ? 1 : 0);
        double satIfTrue = (without > 0 || positive) ? 1.0 : 0.0;
        double satIfFalse = (without > 0 || !positive) ? 1.0 : 0.0;
        double w = eng.hard[c] ? hardNow : eng.weight[c];
        delta += w * (satIfTrue - satIfFalse);
      }
      bool newVal = uni(rng) < 1.0 / (1.0 + std::exp(-delta));
      if (newVal != cur) {
        x[atom] = newVal;
        for (int k = eng.occStart[atom]; k < eng.occStart[atom + 1]; ++k) {
          int c = Engine::occClause(eng.occ[k]);
          numTrue[c] += (Engine::occPositive(eng.occ[k]) == newVal) ? 1 : -1;
        }
      }
    }
    if (sweep < burnIn) continue;
    ++out.sweeps;
    for (size_t s = 0; s < eng.sampleable.size(); ++s)
      out.trueCount[s] += x[eng.sampleable[s]];
    if (trackFormulas) {
      for (int c = 0; c < eng.clauseCount(); ++c) {
        int f = eng.sourceFormula[c];
        if (f >= 0 && numTrue[c] > 0) out.formulaCounts[f] += 1.0;
      }
    }
  }
}

std::vector<ChainResult> runChains(const Engine& eng, const GroundNetwork& net,
                                   const InferenceParams& params,
                                   bool trackFormulas) {
  int chains = std::max(1, params.chains);
  std::vector<ChainResult> results(chains);
  if (chains == 1) {
    runChain(eng, net, params, mixSeed(params.rngSeed, 0), trackFormulas,
             results[0]);
    return results;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(chains);
  for (int c = 0; c < chains; ++c)
    workers.emplace_back([&, c]() {
      try {
        runChain(eng, net, params, mixSeed(params.rngSeed, c), trackFormulas,
                 results[c]);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace

MarginalResult gibbsMarginals(const GroundNetwork& network,
                              const std::vector<int>& queryAtoms,
                              const InferenceParams& params) {
  if (params.samples < 1)
    throw std::invalid_argument("samples must be >= 1");
  Engine eng(network);
  std::vector<ChainResult> chains = runChains(eng, network, params, false);

  std::vector<int> slotOf(network.atoms.size(), -1);
  for (size_t s = 0; s < eng.sampleable.size(); ++s)
    slotOf[eng.sampleable[s]] = static_cast<int>(s);

  MarginalResult result;
  result.chains = static_cast<int>(chains.size());
  result.samplesPerChain = params.samples;
  for (int q : queryAtoms) {
    QueryMarginal m;
    m.atomIndex = q;
    m.atomText = network.atomText(q);
    if (network.atoms.status(q) == AtomStatus::EvidenceTrue) {
      m.probability = 1.0;
      m.perChain.assign(chains.size(), 1.0);
    } else if (network.atoms.status(q) == AtomStatus::EvidenceFalse) {
      m.probability = 0.0;
      m.perChain.assign(chains.size(), 0.0);
    } else {
      int slot = slotOf[q];
      double sum = 0.0;
      for (const ChainResult& cr : chains) {
        double est = static_cast<double>(cr.trueCount[slot]) /
                     static_cast<double>(cr.sweeps);
        m.perChain.push_back(est);
        sum += est;
      }
      m.probability = sum / static_cast<double>(chains.size());
      double lo = *std::min_element(m.perChain.begin(), m.perChain.end());
      double hi = *std::max_element(m.perChain.begin(), m.perChain.end());
      m.chainDisagreement = (hi - lo) > params.disagreementThreshold;
    }
    result.marginals.push_back(std::move(m));
  }
  return result;
}

namespace {

/// Exact enumeration runs per connected component of the sampleable atoms,
/// so only the largest coupled block is limited to 20 atoms.
struct ComponentEnumerator {
  const Engine& eng;
  std::vector<std::vector<int>> componentAtoms;    // engine atom indices
  std::vector<std::vector<int>> componentClauses;  // clause indices

  explicit ComponentEnumerator(const Engine& e) : eng(e) {
    std::vector<int> parent(eng.numAtoms);
    for (int i = 0; i < eng.numAtoms; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) {
      while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
      }
      return x;
    };
    for (int c = 0; c < eng.clauseCount(); ++c) {
      int first = -1;
      for (int k = eng.clauseStart[c]; k < eng.clauseStart[c + 1]; ++k) {
        int atom = GroundClause::atomIndex(eng.lits[k]);
        if (first < 0)
          first = atom;
        else
          parent[find(atom)] = find(first);
      }
    }
    std::map<int, int> componentOf;
    for (int atom : eng.sampleable) {
      int root = find(atom);
      auto it = componentOf.find(root);
      if (it == componentOf.end()) {
        componentOf.emplace(root, static_cast<int>(componentAtoms.size()));
        componentAtoms.emplace_back();
        componentClauses.emplace_back();
      }
      componentAtoms[componentOf.at(root)].push_back(atom);
    }
    for (int c = 0; c < eng.clauseCount(); ++c) {
      if (eng.clauseSize(c) == 0) continue;
      int atom = GroundClause::atomIndex(eng.lits[eng.clauseStart[c]]);
      auto it = componentOf.find(find(atom));
      if (it != componentOf.end()) componentClauses[it->second].push_back(c);
    }
  }

  /// Calls visit(logScore, assignmentView) for every hard-consistent world
  /// of one component; returns false when every world is hard-violating.
  template <typename Visit>
  bool enumerate(int comp, std::vector<uint8_t>& x, const Visit& visit) const {
    const std::vector<int>& atoms = componentAtoms[comp];
    size_t n = atoms.size();
    if (n > 20)
      throw ResourceLimitError(
          "exact inference: a connected component has " + std::to_string(n) +
          " open atoms (limit 20)");
    bool any = false;
    for (uint64_t mask = 0; mask < (uint64_t(1) << n); ++mask) {
      for (size_t s = 0; s < n; ++s) x[atoms[s]] = (mask >> s) & 1;
      bool violated = false;
      double logScore = 0.0;
      for (int c : componentClauses[comp]) {
        bool sat = eng.countTrue(c, x) > 0;
        if (eng.hard[c]) {
          if (!sat) {
            violated = true;
            break;
          }
        } else if (sat) {
          logScore += eng.weight[c];
        }
      }
      if (violated) continue;
      any = true;
      visit(logScore, mask);
    }
    return any;
  }
};

}  // namespace

MarginalResult exactMarginals(const GroundNetwork& network,
                              const std::vector<int>& queryAtoms) {
  Engine eng(network);
  ComponentEnumerator comps(eng);

  std::vector<uint8_t> x(eng.numAtoms, 0);
  for (int i = 0; i < eng.numAtoms; ++i)
    if (eng.fixed[i]) x[i] = eng.fixedValue[i];

  std::vector<double> marginal(eng.numAtoms, 0.0);
  for (size_t comp = 0; comp < comps.componentAtoms.size(); ++comp) {
    const auto& atoms = comps.componentAtoms[comp];
    // Two passes: max log-score, then normalized true-mass per atom.
    double maxLog = -std::numeric_limits<double>::infinity();
    bool any = comps.enumerate(comp, x, [&](double ls, uint64_t) {
      maxLog = std::max(maxLog, ls);
    });
    if (!any)
      throw UnsatisfiableError("exactMarginals: hard clauses admit no world");
    double z = 0.0;
    std::vector<double> mass(atoms.size(), 0.0);
    comps.enumerate(comp, x, [&](double ls, uint64_t mask) {
      double p = std::exp(ls - maxLog);
      z += p;
      for (size_t s = 0; s < atoms.size(); ++s)
        if ((mask >> s) & 1) mass[s] += p;
    });
    for (size_t s = 0; s < atoms.size(); ++s) marginal[atoms[s]] = mass[s] / z;
  }

  MarginalResult result;
  result.chains = 1;
  for (int q : queryAtoms) {
    QueryMarginal m;
    m.atomIndex = q;
    m.atomText = network.atomText(q);
    if (network.atoms.status(q) == AtomStatus::EvidenceTrue)
      m.probability = 1.0;
    else if (network.atoms.status(q) == AtomStatus::EvidenceFalse)
      m.probability = 0.0;
    else
      m.probability = marginal[q];
    m.perChain = {m.probability};
    result.marginals.push_back(std::move(m));
  }
  return result;
}

World mapInference(const GroundNetwork& network, const InferenceParams& params) {
  Engine eng(network);
  return runMaxWalkSat(eng, params, params.rngSeed);
}

double exactLogPartition(const GroundNetwork& network) {
  Engine eng(network);
  ComponentEnumerator comps(eng);
  std::vector<uint8_t> x(eng.numAtoms, 0);
  for (int i = 0; i < eng.numAtoms; ++i)
    if (eng.fixed[i]) x[i] = eng.fixedValue[i];

  double logZ = 0.0;
  for (size_t comp = 0; comp < comps.componentAtoms.size(); ++comp) {
    double maxLog = -std::numeric_limits<double>::infinity();
    bool any = comps.enumerate(comp, x, [&](double ls, uint64_t) {
      maxLog = std::max(maxLog, ls);
    });
    if (!any)
      throw UnsatisfiableError("exactLogPartition: hard clauses admit no world");
    double z = 0.0;
    comps.enumerate(comp, x,
                    [&](double ls, uint64_t) { z += std::exp(ls - maxLog); });
    logZ += std::log(z) + maxLog;
  }
  return logZ;
}

std::vector<double> exactExpectedClauseCounts(const GroundNetwork& network) {
  Engine eng(network);
  ComponentEnumerator comps(eng);
  std::vector<uint8_t> x(eng.numAtoms, 0);
  for (int i = 0; i < eng.numAtoms; ++i)
    if (eng.fixed[i]) x[i] = eng.fixedValue[i];

  size_t formulas = network.kb->formulas().size();
  std::vector<double> acc(formulas, 0.0);
  std::vector<double> perWorld(formulas, 0.0);
  for (size_t comp = 0; comp < comps.componentAtoms.size(); ++comp) {
    double maxLog = -std::numeric_limits<double>::infinity();
    bool any = comps.enumerate(comp, x, [&](double ls, uint64_t) {
      maxLog = std::max(maxLog, ls);
    });
    if (!any)
      throw UnsatisfiableError("exactExpectedClauseCounts: no satisfying world");
    double z = 0.0;
    std::vector<double> compAcc(formulas, 0.0);
    comps.enumerate(comp, x, [&](double ls, uint64_t) {
      double p = std::exp(ls - maxLog);
      z += p;
      std::fill(perWorld.begin(), perWorld.end(), 0.0);
      for (int c : comps.componentClauses[comp])
        if (eng.sourceFormula[c] >= 0 && eng.countTrue(c, x) > 0)
          perWorld[eng.sourceFormula[c]] += 1.0;
      for (size_t f = 0; f < formulas; ++f) compAcc[f] += p * perWorld[f];
    });
    for (size_t f = 0; f < formulas; ++f) acc[f] += compAcc[f] / z;
  }
  return acc;
}

std::vector<double> gibbsExpectedClauseCounts(const GroundNetwork& network,
                                              const InferenceParams& params) {
  Engine eng(network);
  std::vector<ChainResult> chains = runChains(eng, network, params, true);
  std::vector<double> acc(network.kb->formulas().size(), 0.0);
  long sweeps = 0;
  for (const ChainResult& cr : chains) {
    sweeps += cr.sweeps;
    for (size_t f = 0; f < acc.size(); ++f) acc[f] += cr.formulaCounts[f];
  }
  for (double& v : acc) v /= static_cast<double>(sweeps);
  return acc;
}

std::vector<double> worldClauseCounts(const GroundNetwork& network,
                                      const World& world) {
  Engine eng(network);
  std::vector<double> acc(network.kb->formulas().size(), 0.0);
  for (int c = 0; c < eng.clauseCount(); ++c) {
    if (eng.sourceFormula[c] < 0) continue;
    if (eng.countTrue(c, world.assignment) > 0)
      acc[eng.sourceFormula[c]] += 1.0;
  }
  return acc;
}

}  // namespace mln
