#ifndef MLN_EVIDENCE_HPP
#define MLN_EVIDENCE_HPP

#include <string>
#include <vector>

#include "mln/logic.hpp"

namespace mln {

/// A fully ground atom asserted as hard truth or with a probability p in
/// (0,1). Soft records become unit clauses of weight ln(p/(1-p)) in the
/// ground network.
struct EvidenceRecord {
  enum class Truth { True, False, Soft };
  Atom atom;
  Truth truth = Truth::True;
  double p = 1.0;  // Soft only

  static EvidenceRecord hard(Atom a, bool value) {
    return {std::move(a), value ? Truth::True : Truth::False, value ? 1.0 : 0.0};
  }
  static EvidenceRecord soft(Atom a, double prob) {
    return {std::move(a), Truth::Soft, prob};
  }
};

using EvidenceSet = std::vector<EvidenceRecord>;

/// Query selection: whole predicates (every grounding) and/or individual
/// atoms; atoms may contain variables acting as wildcards.
struct QuerySpec {
  std::vector<int> predicates;
  std::vector<Atom> atoms;

  bool empty() const { return predicates.empty() && atoms.empty(); }
  void addPredicate(int id) { predicates.push_back(id); }
};

}  // namespace mln

#endif
