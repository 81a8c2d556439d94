#include "mln/grounder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mln/inference.hpp"

namespace mln {

int GroundAtomTable::ensure(const GroundAtom& atom, AtomStatus status,
                            double p) {
  auto it = index_.find(atom);
  if (it != index_.end()) return it->second;
  int idx = static_cast<int>(atoms_.size());
  atoms_.push_back(atom);
  status_.push_back(status);
  softP_.push_back(p);
  index_.emplace(atom, idx);
  return idx;
}

int GroundAtomTable::find(const GroundAtom& atom) const {
  auto it = index_.find(atom);
  return it == index_.end() ? -1 : it->second;
}

std::string GroundNetwork::atomText(int idx) const {
  const GroundAtom& a = atoms.atom(idx);
  const PredicateSchema& schema = kb->schema(a.predicate);
  std::ostringstream os;
  os << schema.name << '(';
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (i) os << ',';
    os << domains->constants(schema.argDomains[i])[a.args[i]];
  }
  os << ')';
  return os.str();
}

size_t GroundNetwork::openAtomCount() const {
  size_t n = 0;
  for (size_t i = 0; i < atoms.size(); ++i)
    if (atoms.sampleable(static_cast<int>(i))) ++n;
  return n;
}

Domains collectDomains(const EvidenceSet& evidence, const KnowledgeBase& kb) {
  Domains domains = kb.enumeratedDomains();
  for (const EvidenceRecord& rec : evidence) {
    const PredicateSchema& schema = kb.schema(rec.atom.predicate);
    for (size_t i = 0; i < rec.atom.args.size(); ++i)
      domains.addConstant(schema.argDomains[i], rec.atom.args[i].symbol);
  }
  return domains;
}

namespace {

struct EvidenceIndex {
  // Listed tuples per predicate, in file order. True and soft tuples feed
  // the clause joins; false tuples behave like unlisted under closed world.
  struct Tuple {
    std::vector<int> args;
    AtomStatus status;
    double p;
  };
  std::vector<std::vector<Tuple>> byPredicate;
  std::unordered_map<GroundAtom, std::pair<AtomStatus, double>, GroundAtomHash>
      lookup;
};

EvidenceIndex indexEvidence(const EvidenceSet& evidence,
                            const KnowledgeBase& kb, const Domains& domains) {
  EvidenceIndex index;
  index.byPredicate.resize(kb.schemas().size());
  for (const EvidenceRecord& rec : evidence) {
    const PredicateSchema& schema = kb.schema(rec.atom.predicate);
    GroundAtom atom;
    atom.predicate = rec.atom.predicate;
    for (size_t i = 0; i < rec.atom.args.size(); ++i)
      atom.args.push_back(
          domains.constantId(schema.argDomains[i], rec.atom.args[i].symbol));
    AtomStatus status = rec.truth == EvidenceRecord::Truth::True
                            ? AtomStatus::EvidenceTrue
                        : rec.truth == EvidenceRecord::Truth::False
                            ? AtomStatus::EvidenceFalse
                            : AtomStatus::Soft;
    auto [it, inserted] = index.lookup.emplace(atom, std::make_pair(status, rec.p));
    if (!inserted) {
      if (it->second.first != status || (status == AtomStatus::Soft &&
                                         it->second.second != rec.p))
        throw ParseError("conflicting evidence for atom '" +
                         schema.name + "(...)'");
      continue;  // exact duplicate
    }
    if (status != AtomStatus::EvidenceFalse)
      index.byPredicate[atom.predicate].push_back(
          {atom.args, status, rec.p});
  }
  return index;
}

/// Grounds one formula at a time. Variables are bound by joining over the
/// listed tuples of closed-world predicates that appear negated (their
/// unlisted groundings satisfy the clause), then by full domain products for
/// whatever is left.
class FormulaGrounder {
 public:
  FormulaGrounder(const KnowledgeBase& kb, const Domains& domains,
                  const EvidenceIndex& evidence, const GroundOptions& options,
                  GroundNetwork& out)
      : kb_(kb),
        domains_(domains),
        evidence_(evidence),
        options_(options),
        out_(out) {
    // Snapshot of the per-domain binding ranges: constants that appear only
    // inside formulas are interned for naming but never bind variables.
    for (const std::string& d : domains.domainNames())
      bindLimit_[d] = domains.size(d);
  }

  double processedBindings() const { return processed_; }

  void groundFormula(int formulaIdx) {
    formulaIdx_ = formulaIdx;
    const Formula& f = kb_.formulas()[formulaIdx];
    universals_ = f.universalVariables();
    existentials_ = f.existentialVariables();
    for (const Term& v : existentials_)
      if (limit(v.domain) == 0)
        throw std::invalid_argument("empty domain '" + v.domain +
                                    "' for existential variable '" + v.symbol +
                                    "' in formula: " + f.sourceText);

    totalBindings_ = 1.0;
    for (const Term& v : universals_)
      totalBindings_ *= static_cast<double>(limit(v.domain));
    if (totalBindings_ == 0.0) return;  // no groundings at all

    varIndex_.clear();
    for (size_t i = 0; i < universals_.size(); ++i)
      varIndex_[universals_[i].symbol] = static_cast<int>(i);
    binding_.assign(universals_.size(), -1);

    joinLiterals_.clear();
    for (const Literal& lit : f.literals) {
      if (!lit.negated) continue;
      if (!kb_.schema(lit.atom.predicate).closedWorld) continue;
      bool usesExistential = false;
      for (const Term& t : lit.atom.args)
        if (t.isVariable() && f.isExistential(t.symbol)) usesExistential = true;
      if (usesExistential) continue;  // expanded per binding instead
      joinLiterals_.push_back(&lit);
    }
    joinUsed_.assign(joinLiterals_.size(), false);

    emitted_ = 0.0;
    enumerate(f);
    out_.satisfiedTally[formulaIdx_] += totalBindings_ - emitted_;
  }

 private:
  size_t limit(const std::string& domain) const {
    auto it = bindLimit_.find(domain);
    return it == bindLimit_.end() ? 0 : it->second;
  }

  // Picks the unused join literal with the most bound variables, breaking
  // ties by smaller tuple list.
  int chooseJoinLiteral() const {
    int best = -1;
    int bestBound = -1;
    size_t bestTuples = 0;
    for (size_t i = 0; i < joinLiterals_.size(); ++i) {
      if (joinUsed_[i]) continue;
      const Literal& lit = *joinLiterals_[i];
      int bound = 0;
      for (const Term& t : lit.atom.args)
        if (!t.isVariable() || binding_[varIndex_.at(t.symbol)] >= 0) ++bound;
      size_t tuples = evidence_.byPredicate[lit.atom.predicate].size();
      if (best < 0 || bound > bestBound ||
          (bound == bestBound && tuples < bestTuples)) {
        best = static_cast<int>(i);
        bestBound = bound;
        bestTuples = tuples;
      }
    }
    return best;
  }

  void enumerate(const Formula& f) {
    int j = chooseJoinLiteral();
    if (j >= 0) {
      joinUsed_[j] = true;
      const Literal& lit = *joinLiterals_[j];
      for (const auto& tuple : evidence_.byPredicate[lit.atom.predicate]) {
        std::vector<int> touched;
        bool ok = true;
        for (size_t i = 0; i < lit.atom.args.size() && ok; ++i) {
          const Term& t = lit.atom.args[i];
          if (t.isVariable()) {
            int vi = varIndex_.at(t.symbol);
            if (binding_[vi] < 0) {
              binding_[vi] = tuple.args[i];
              touched.push_back(vi);
            } else if (binding_[vi] != tuple.args[i]) {
              ok = false;
            }
          } else {
            int cid = domains_.constantId(t.domain, t.symbol);
            if (cid != tuple.args[i]) ok = false;
          }
        }
        if (ok) enumerate(f);
        for (int vi : touched) binding_[vi] = -1;
      }
      joinUsed_[j] = false;
      return;
    }
    // Remaining variables range over their whole domains.
    int free = -1;
    for (size_t i = 0; i < binding_.size(); ++i)
      if (binding_[i] < 0) {
        free = static_cast<int>(i);
        break;
      }
    if (free >= 0) {
      size_t n = limit(universals_[free].domain);
      for (size_t c = 0; c < n; ++c) {
        binding_[free] = static_cast<int>(c);
        enumerate(f);
      }
      binding_[free] = -1;
      return;
    }
    processBinding(f);
  }

  GroundAtom groundLiteralAtom(const Literal& lit,
                               const std::map<std::string, int>& existBinding) {
    GroundAtom atom;
    atom.predicate = lit.atom.predicate;
    atom.args.reserve(lit.atom.args.size());
    for (const Term& t : lit.atom.args) {
      if (!t.isVariable()) {
        atom.args.push_back(domains_.constantId(t.domain, t.symbol));
      } else if (auto it = existBinding.find(t.symbol);
                 it != existBinding.end()) {
        atom.args.push_back(it->second);
      } else {
        atom.args.push_back(binding_[varIndex_.at(t.symbol)]);
      }
    }
    return atom;
  }

  void processBinding(const Formula& f) {
    processed_ += 1.0;
    if (processed_ > options_.maxBindings)
      throw ResourceLimitError(
          "grounding enumerated more than " +
          std::to_string(static_cast<long long>(options_.maxBindings)) +
          " bindings; simplify the knowledge base or raise the ceiling");

    groundLits_.clear();
    bool satisfied = false;
    auto addLiteral = [&](const GroundAtom& atom, bool negated) {
      auto it = evidence_.lookup.find(atom);
      AtomStatus status = AtomStatus::Open;
      if (it != evidence_.lookup.end())
        status = it->second.first;
      else if (kb_.schema(atom.predicate).closedWorld)
        status = AtomStatus::EvidenceFalse;
      if (status == AtomStatus::EvidenceTrue) {
        if (!negated) satisfied = true;
        return;  // negated literal on a true atom is false: drop literal
      }
      if (status == AtomStatus::EvidenceFalse) {
        if (negated) satisfied = true;
        return;
      }
      for (const auto& [existing, existingNeg] : groundLits_) {
        if (existing == atom) {
          if (existingNeg != negated) satisfied = true;  // tautology
          if (existingNeg == negated) return;            // duplicate
        }
      }
      if (!satisfied) groundLits_.emplace_back(atom, negated);
    };

    std::map<std::string, int> existBinding;
    if (existentials_.empty()) {
      for (const Literal& lit : f.literals) {
        addLiteral(groundLiteralAtom(lit, existBinding), lit.negated);
        if (satisfied) break;
      }
    } else {
      // Non-existential literals once, then the disjunctive expansion.
      for (const Literal& lit : f.literals) {
        bool usesExistential = false;
        for (const Term& t : lit.atom.args)
          if (t.isVariable() && f.isExistential(t.symbol))
            usesExistential = true;
        if (!usesExistential) {
          addLiteral(groundLiteralAtom(lit, existBinding), lit.negated);
          if (satisfied) break;
        }
      }
      if (!satisfied) {
        std::vector<size_t> idx(existentials_.size(), 0);
        while (!satisfied) {
          existBinding.clear();
          for (size_t i = 0; i < existentials_.size(); ++i)
            existBinding[existentials_[i].symbol] = static_cast<int>(idx[i]);
          for (const Literal& lit : f.literals) {
            bool usesExistential = false;
            for (const Term& t : lit.atom.args)
              if (t.isVariable() && f.isExistential(t.symbol))
                usesExistential = true;
            if (usesExistential) {
              addLiteral(groundLiteralAtom(lit, existBinding), lit.negated);
              if (satisfied) break;
            }
          }
          size_t k = 0;
          while (k < existentials_.size() &&
                 ++idx[k] == limit(existentials_[k].domain)) {
            idx[k] = 0;
            ++k;
          }
          if (k == existentials_.size()) break;
        }
      }
    }

    // emitted_ counts every binding that reached simplification; the
    // remainder of the binding space was excluded by a join, which means
    // some negated closed-world literal is true there: constant-satisfied.
    emitted_ += 1.0;
    if (satisfied) {
      out_.satisfiedTally[formulaIdx_] += 1.0;
      return;
    }
    if (groundLits_.empty()) {
      if (f.hard)
        throw UnsatisfiableError("evidence falsifies hard formula: " +
                                 f.sourceText + " under binding " +
                                 bindingText(f));
      out_.falsifiedTally[formulaIdx_] += 1.0;
      return;
    }

    GroundClause clause;
    clause.weight = f.weight;
    clause.hard = f.hard;
    clause.sourceFormula = formulaIdx_;
    for (const auto& [atom, neg] : groundLits_) {
      int idx = out_.atoms.ensure(atom, AtomStatus::Open);
      clause.lits.push_back(neg ? -(idx + 1) : (idx + 1));
    }
    out_.clauses.push_back(std::move(clause));
    if (static_cast<double>(out_.clauses.size()) > options_.maxGroundClauses)
      throw ResourceLimitError(
          "ground clause ceiling exceeded (" +
          std::to_string(static_cast<long long>(options_.maxGroundClauses)) +
          ")");
  }

  std::string bindingText(const Formula& f) const {
    std::ostringstream os;
    os << '{';
    for (size_t i = 0; i < universals_.size(); ++i) {
      if (i) os << ", ";
      os << universals_[i].symbol << "=";
      os << domains_.constants(universals_[i].domain)[binding_[i]];
    }
    os << '}';
    return os.str();
  }

  const KnowledgeBase& kb_;
  const Domains& domains_;
  const EvidenceIndex& evidence_;
  const GroundOptions& options_;
  GroundNetwork& out_;

  std::map<std::string, size_t> bindLimit_;
  int formulaIdx_ = -1;
  std::vector<Term> universals_;
  std::vector<Term> existentials_;
  std::map<std::string, int> varIndex_;
  std::vector<int> binding_;
  std::vector<const Literal*> joinLiterals_;
  std::vector<bool> joinUsed_;
  std::vector<std::pair<GroundAtom, bool>> groundLits_;
  double totalBindings_ = 0.0;
  double emitted_ = 0.0;
  double processed_ = 0.0;
};

void resolveQueries(const QuerySpec& queries, const KnowledgeBase& kb,
                    Domains& domains, const EvidenceIndex& evidence,
                    const GroundOptions& options, GroundNetwork& out) {
  auto ensureAtom = [&](const GroundAtom& atom) {
    auto it = evidence.lookup.find(atom);
    AtomStatus status = AtomStatus::Open;
    double p = 0.0;
    if (it != evidence.lookup.end()) {
      status = it->second.first;
      p = it->second.second;
    } else if (kb.schema(atom.predicate).closedWorld) {
      status = AtomStatus::EvidenceFalse;
    }
    int idx = out.atoms.ensure(atom, status, p);
    if (std::find(out.queryAtoms.begin(), out.queryAtoms.end(), idx) ==
        out.queryAtoms.end())
      out.queryAtoms.push_back(idx);
  };

  auto expandPattern = [&](const Atom& pattern) {
    const PredicateSchema& schema = kb.schema(pattern.predicate);
    std::vector<std::vector<int>> choices(pattern.args.size());
    double total = 1.0;
    for (size_t i = 0; i < pattern.args.size(); ++i) {
      const Term& t = pattern.args[i];
      if (t.isVariable()) {
        size_t n = domains.size(schema.argDomains[i]);
        choices[i].resize(n);
        for (size_t c = 0; c < n; ++c) choices[i][c] = static_cast<int>(c);
        total *= static_cast<double>(n);
      } else {
        // Unknown constants are interned so the atom can be addressed; they
        // fall outside every variable's binding range.
        choices[i] = {domains.addConstant(schema.argDomains[i], t.symbol)};
      }
    }
    if (total > options.maxBindings)
      throw ResourceLimitError("query expansion too large for predicate '" +
                               schema.name + "'");
    if (total == 0.0) return;
    std::vector<size_t> idx(pattern.args.size(), 0);
    while (true) {
      GroundAtom atom;
      atom.predicate = pattern.predicate;
      for (size_t i = 0; i < idx.size(); ++i)
        atom.args.push_back(choices[i][idx[i]]);
      ensureAtom(atom);
      size_t k = 0;
      while (k < idx.size() && ++idx[k] == choices[k].size()) {
        idx[k] = 0;
        ++k;
      }
      if (k == idx.size()) break;
    }
  };

  for (int pred : queries.predicates) {
    Atom pattern;
    pattern.predicate = pred;
    const PredicateSchema& schema = kb.schema(pred);
    for (size_t i = 0; i < schema.argDomains.size(); ++i)
      pattern.args.push_back(
          Term::variable("q" + std::to_string(i), schema.argDomains[i]));
    expandPattern(pattern);
  }
  for (const Atom& atom : queries.atoms) expandPattern(atom);
}

}  // namespace

GroundNetwork ground(const KnowledgeBase& kb, const EvidenceSet& evidence,
                     const QuerySpec& queries, const GroundOptions& options) {
  GroundNetwork net;
  net.kb = std::make_shared<KnowledgeBase>(kb);

  auto domains = std::make_shared<Domains>(collectDomains(evidence, kb));
  for (const auto& [domain, symbol] : options.extraConstants)
    domains->addConstant(domain, symbol);
  EvidenceIndex index = indexEvidence(evidence, kb, *domains);

  // Register the listed evidence atoms first: stable indices, and soft atoms
  // must exist even when no clause mentions them.
  for (const EvidenceRecord& rec : evidence) {
    const PredicateSchema& schema = kb.schema(rec.atom.predicate);
    GroundAtom atom;
    atom.predicate = rec.atom.predicate;
    for (size_t i = 0; i < rec.atom.args.size(); ++i)
      atom.args.push_back(
          domains->constantId(schema.argDomains[i], rec.atom.args[i].symbol));
    auto st = index.lookup.at(atom);
    net.atoms.ensure(atom, st.first, st.second);
  }

  net.satisfiedTally.assign(kb.formulas().size(), 0.0);
  net.falsifiedTally.assign(kb.formulas().size(), 0.0);

  {
    FormulaGrounder grounder(kb, *domains, index, options, net);
    // Constants that only occur inside formulas: intern after the binding
    // snapshot so they never enlarge a variable's range.
    for (const Formula& f : kb.formulas())
      for (const Literal& lit : f.literals)
        for (const Term& t : lit.atom.args)
          if (!t.isVariable()) domains->addConstant(t.domain, t.symbol);
    for (size_t k = 0; k < kb.formulas().size(); ++k)
      grounder.groundFormula(static_cast<int>(k));
  }

  resolveQueries(queries, kb, *domains, index, options, net);

  net.softBias.assign(net.atoms.size(), 0.0);
  for (size_t i = 0; i < net.atoms.size(); ++i)
    if (net.atoms.status(static_cast<int>(i)) == AtomStatus::Soft)
      net.softBias[i] = logOddsWeight(net.atoms.softProb(static_cast<int>(i)));

  net.domains = std::move(domains);
  return net;
}

double countTrueGroundings(int formulaIdx, const KnowledgeBase& kb,
                           const Domains& domains, const WorldFn& world) {
  const Formula& f = kb.formulas().at(formulaIdx);
  std::vector<Term> universals = f.universalVariables();
  std::vector<Term> existentials = f.existentialVariables();

  double total = 1.0;
  for (const Term& v : universals)
    total *= static_cast<double>(domains.size(v.domain));
  if (total > 5e7)
    throw ResourceLimitError("countTrueGroundings: binding space too large");
  if (total == 0.0) return 0.0;

  auto literalTruth = [&](const Literal& lit, const Binding& b) {
    Atom ground = substitute(lit.atom, b);
    std::optional<bool> v = world(ground);
    if (!v.has_value()) {
      if (kb.schema(ground.predicate).closedWorld)
        v = false;
      else
        throw std::invalid_argument("incomplete world: no value for atom '" +
                                    toString(ground, kb) + "'");
    }
    return lit.negated ? !*v : *v;
  };

  auto clauseTrue = [&](Binding& b) {
    // Disjunction; existential literals expand over their domains.
    for (const Literal& lit : f.literals) {
      bool usesExistential = false;
      for (const Term& t : lit.atom.args)
        if (t.isVariable() && f.isExistential(t.symbol)) usesExistential = true;
      if (usesExistential) continue;
      if (literalTruth(lit, b)) return true;
    }
    if (existentials.empty()) return false;
    std::vector<size_t> idx(existentials.size(), 0);
    for (const Term& v : existentials)
      if (domains.size(v.domain) == 0)
        throw std::invalid_argument("empty domain for existential variable '" +
                                    v.symbol + "'");
    while (true) {
      for (size_t i = 0; i < existentials.size(); ++i)
        b[existentials[i].symbol] =
            domains.constants(existentials[i].domain)[idx[i]];
      for (const Literal& lit : f.literals) {
        bool usesExistential = false;
        for (const Term& t : lit.atom.args)
          if (t.isVariable() && f.isExistential(t.symbol))
            usesExistential = true;
        if (usesExistential && literalTruth(lit, b)) return true;
      }
      size_t k = 0;
      while (k < existentials.size() &&
             ++idx[k] == domains.size(existentials[k].domain)) {
        idx[k] = 0;
        ++k;
      }
      if (k == existentials.size()) break;
    }
    for (const Term& v : existentials) b.erase(v.symbol);
    return false;
  };

  double count = 0.0;
  std::vector<size_t> idx(universals.size(), 0);
  Binding binding;
  while (true) {
    for (size_t i = 0; i < universals.size(); ++i)
      binding[universals[i].symbol] =
          domains.constants(universals[i].domain)[idx[i]];
    if (clauseTrue(binding)) count += 1.0;
    size_t k = 0;
    while (k < universals.size() &&
           ++idx[k] == domains.size(universals[k].domain)) {
      idx[k] = 0;
      ++k;
    }
    if (k == universals.size()) break;
  }
  return count;
}

std::vector<GroundNetwork> connectedComponents(const GroundNetwork& network) {
  size_t n = network.atoms.size();
  std::vector<int> parent(n);
  for (size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };

  for (const GroundClause& c : network.clauses)
    for (size_t i = 1; i < c.lits.size(); ++i)
      unite(GroundClause::atomIndex(c.lits[0]),
            GroundClause::atomIndex(c.lits[i]));

  // Components of sampleable atoms, ordered by smallest member index.
  std::map<int, std::vector<int>> groups;
  for (size_t i = 0; i < n; ++i) {
    if (!network.atoms.sampleable(static_cast<int>(i))) continue;
    groups[find(static_cast<int>(i))].push_back(static_cast<int>(i));
  }
  std::vector<std::vector<int>> ordered;
  for (auto& [root, members] : groups) ordered.push_back(members);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });

  std::vector<GroundNetwork> out;
  for (const auto& members : ordered) {
    GroundNetwork comp;
    comp.kb = network.kb;
    comp.domains = network.domains;
    comp.satisfiedTally.assign(network.satisfiedTally.size(), 0.0);
    comp.falsifiedTally.assign(network.falsifiedTally.size(), 0.0);
    std::unordered_map<int, int> remap;
    for (int idx : members) {
      int local = comp.atoms.ensure(network.atoms.atom(idx),
                                    network.atoms.status(idx),
                                    network.atoms.softProb(idx));
      remap.emplace(idx, local);
    }
    comp.softBias.assign(comp.atoms.size(), 0.0);
    for (int idx : members) comp.softBias[remap[idx]] = network.softBias[idx];
    for (const GroundClause& c : network.clauses) {
      if (c.lits.empty()) continue;
      int root = GroundClause::atomIndex(c.lits[0]);
      if (!remap.count(root)) continue;
      GroundClause local = c;
      for (int32_t& lit : local.lits) {
        int idx = remap.at(GroundClause::atomIndex(lit));
        lit = GroundClause::positive(lit) ? (idx + 1) : -(idx + 1);
      }
      comp.clauses.push_back(std::move(local));
    }
    for (int q : network.queryAtoms)
      if (remap.count(q)) comp.queryAtoms.push_back(remap.at(q));
    out.push_back(std::move(comp));
  }
  return out;
}

std::string dumpNetwork(const GroundNetwork& network) {
  std::ostringstream os;
  os.precision(17);
  for (const GroundClause& c : network.clauses) {
    if (c.hard)
      os << "HARD";
    else
      os << c.weight;
    os << " |";
    for (int32_t lit : c.lits)
      os << ' ' << (GroundClause::positive(lit) ? '+' : '-')
         << GroundClause::atomIndex(lit);
    os << '\n';
  }
  for (size_t i = 0; i < network.atoms.size(); ++i) {
    if (network.softBias.size() > i && network.softBias[i] != 0.0)
      os << network.softBias[i] << " | +" << i << '\n';
  }
  os << "# atoms\n";
  for (size_t i = 0; i < network.atoms.size(); ++i) {
    os << "# " << i << ' ' << network.atomText(static_cast<int>(i));
    switch (network.atoms.status(static_cast<int>(i))) {
      case AtomStatus::EvidenceTrue: os << " true"; break;
      case AtomStatus::EvidenceFalse: os << " false"; break;
      case AtomStatus::Soft:
        os << " soft " << network.atoms.softProb(static_cast<int>(i));
        break;
      case AtomStatus::Open: os << " open"; break;
    }
    os << '\n';
  }
  return os.str();
}

void refreshWeights(GroundNetwork& network,
                    const std::vector<double>& formulaWeights) {
  for (GroundClause& c : network.clauses) {
    if (c.hard || c.sourceFormula < 0) continue;
    c.weight = formulaWeights.at(c.sourceFormula);
  }
}

}  // namespace mln
