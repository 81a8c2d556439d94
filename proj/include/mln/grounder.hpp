#ifndef MLN_GROUNDER_HPP
#define MLN_GROUNDER_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mln/evidence.hpp"
#include "mln/logic.hpp"

namespace mln {

enum class AtomStatus : uint8_t { EvidenceTrue, EvidenceFalse, Soft, Open };

/// Fully ground atom with interned constant ids (dense per domain).
struct GroundAtom {
  int predicate = -1;
  std::vector<int> args;

  bool operator==(const GroundAtom& o) const {
    return predicate == o.predicate && args == o.args;
  }
};

struct GroundAtomHash {
  size_t operator()(const GroundAtom& a) const {
    size_t h = 1469598103934665603ull ^ static_cast<size_t>(a.predicate);
    for (int v : a.args) {
      h ^= static_cast<size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

/// Dense, insertion-ordered atom index. Indices are stable for identical
/// inputs (deterministic grounding).
class GroundAtomTable {
 public:
  int ensure(const GroundAtom& atom, AtomStatus status, double p = 0.0);
  int find(const GroundAtom& atom) const;
  size_t size() const { return atoms_.size(); }
  const GroundAtom& atom(int idx) const { return atoms_.at(idx); }
  AtomStatus status(int idx) const { return status_.at(idx); }
  double softProb(int idx) const { return softP_.at(idx); }
  bool sampleable(int idx) const {
    AtomStatus s = status_.at(idx);
    return s == AtomStatus::Soft || s == AtomStatus::Open;
  }

 private:
  std::vector<GroundAtom> atoms_;
  std::vector<AtomStatus> status_;
  std::vector<double> softP_;
  std::unordered_map<GroundAtom, int, GroundAtomHash> index_;
};

/// Ground clause: literals reference atom indices, encoded as +-(idx+1).
/// Only open or soft atoms survive simplification, so every literal here is
/// sampleable.
struct GroundClause {
  std::vector<int32_t> lits;
  double weight = 0.0;
  bool hard = false;
  int sourceFormula = -1;  // -1 for synthetic clauses (none emitted today)

  static int atomIndex(int32_t lit) { return (lit > 0 ? lit : -lit) - 1; }
  static bool positive(int32_t lit) { return lit > 0; }
};

struct GroundOptions {
  double maxGroundClauses = 5e6;   // diagnostic instead of silent blow-up
  double maxBindings = 1e8;        // join/product enumeration guard
  /// (domain, symbol) pairs added to the collected domains before grounding;
  /// weight learning uses this so the label constants of a training instance
  /// exist in the evidence-only network too.
  std::vector<std::pair<std::string, std::string>> extraConstants;
};

/// The instantiated Markov network. Immutable after grounding except for
/// clause weights, which weight learning refreshes in place on its own copy.
struct GroundNetwork {
  GroundAtomTable atoms;
  std::vector<GroundClause> clauses;
  std::vector<double> softBias;        // per atom: ln(p/(1-p)) or 0
  std::vector<double> satisfiedTally;  // per formula: groundings constant-true
  std::vector<double> falsifiedTally;  // per formula: soft groundings constant-false
  std::vector<int> queryAtoms;
  std::shared_ptr<const KnowledgeBase> kb;
  std::shared_ptr<const Domains> domains;

  std::string atomText(int idx) const;
  size_t openAtomCount() const;
};

/// Union of the constants enumerated in the KB and those appearing in the
/// evidence, per domain.
Domains collectDomains(const EvidenceSet& evidence, const KnowledgeBase& kb);

/// Instantiates every formula against the evidence, bottom-up: bindings are
/// enumerated by joining the listed tuples of closed-world predicates that
/// occur negated in the clause, so unlisted groundings (whose clause is
/// satisfied under the closed world) are never materialized. Satisfied
/// clauses are tallied per formula; falsified soft clauses are tallied;
/// falsified hard clauses raise UnsatisfiableError.
GroundNetwork ground(const KnowledgeBase& kb, const EvidenceSet& evidence,
                     const QuerySpec& queries = {},
                     const GroundOptions& options = {});

/// Truth lookup for countTrueGroundings. Returns the value of a ground atom
/// or nullopt when the world does not list it (closed-world predicates then
/// default to false; open predicates raise "incomplete world").
using WorldFn = std::function<std::optional<bool>(const Atom&)>;

/// Exact number of true groundings of formula k under a complete world,
/// including groundings that simplification would drop.
double countTrueGroundings(int formulaIdx, const KnowledgeBase& kb,
                           const Domains& domains, const WorldFn& world);

/// Partition by clause co-occurrence of sampleable atoms. Tallies are not
/// carried over; components exist for inference locality only.
std::vector<GroundNetwork> connectedComponents(const GroundNetwork& network);

/// Debug dump: one clause per line "w | +i -j ...", then an atom legend.
std::string dumpNetwork(const GroundNetwork& network);

/// Points clause weights at a new formula weight vector.
void refreshWeights(GroundNetwork& network,
                    const std::vector<double>& formulaWeights);

}  // namespace mln

#endif
