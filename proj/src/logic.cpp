#include "mln/logic.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace mln {

const std::vector<std::string> Domains::kEmpty;

bool Formula::isExistential(const std::string& var) const {
  return std::find(existentialVars.begin(), existentialVars.end(), var) !=
         existentialVars.end();
}

static void collectVariables(const std::vector<Literal>& literals,
                             std::vector<Term>& out, bool existential,
                             const Formula& f) {
  std::set<std::string> seen;
  for (const Literal& lit : literals)
    for (const Term& t : lit.atom.args) {
      if (!t.isVariable()) continue;
      if (f.isExistential(t.symbol) != existential) continue;
      if (seen.insert(t.symbol).second) out.push_back(t);
    }
}

std::vector<Term> Formula::universalVariables() const {
  std::vector<Term> out;
  collectVariables(literals, out, false, *this);
  return out;
}

std::vector<Term> Formula::existentialVariables() const {
  std::vector<Term> out;
  collectVariables(literals, out, true, *this);
  return out;
}

RuleAst RuleAst::leaf(Atom a) {
  RuleAst f;
  f.kind = Kind::Leaf;
  f.atom = std::move(a);
  return f;
}
RuleAst RuleAst::negate(RuleAst g) {
  RuleAst f;
  f.kind = Kind::Not;
  f.kids.push_back(std::move(g));
  return f;
}
static RuleAst binary(RuleAst::Kind k, RuleAst a, RuleAst b) {
  RuleAst f;
  f.kind = k;
  f.kids.push_back(std::move(a));
  f.kids.push_back(std::move(b));
  return f;
}
RuleAst RuleAst::conj(RuleAst a, RuleAst b) {
  return binary(Kind::And, std::move(a), std::move(b));
}
RuleAst RuleAst::disj(RuleAst a, RuleAst b) {
  return binary(Kind::Or, std::move(a), std::move(b));
}
RuleAst RuleAst::implies(RuleAst a, RuleAst b) {
  return binary(Kind::Implies, std::move(a), std::move(b));
}

int Domains::addConstant(const std::string& domain, const std::string& symbol) {
  auto it = table_.find(domain);
  if (it == table_.end()) {
    order_.push_back(domain);
    it = table_.emplace(domain, Entry{}).first;
  }
  Entry& e = it->second;
  auto hit = e.index.find(symbol);
  if (hit != e.index.end()) return hit->second;
  int id = static_cast<int>(e.constants.size());
  e.constants.push_back(symbol);
  e.index.emplace(symbol, id);
  return id;
}

int Domains::constantId(const std::string& domain,
                        const std::string& symbol) const {
  auto it = table_.find(domain);
  if (it == table_.end()) return -1;
  auto hit = it->second.index.find(symbol);
  return hit == it->second.index.end() ? -1 : hit->second;
}

const std::vector<std::string>& Domains::constants(
    const std::string& domain) const {
  auto it = table_.find(domain);
  return it == table_.end() ? kEmpty : it->second.constants;
}

size_t Domains::size(const std::string& domain) const {
  return constants(domain).size();
}

std::vector<std::string> Domains::domainNames() const { return order_; }

int KnowledgeBase::declarePredicate(PredicateSchema schema) {
  if (schema.argDomains.empty())
    throw ParseError("predicate '" + schema.name + "' must have arity >= 1");
  if (schemaIndex_.count(schema.name))
    throw ParseError("duplicate predicate declaration '" + schema.name + "'");
  int id = static_cast<int>(schemas_.size());
  schemaIndex_.emplace(schema.name, id);
  schemas_.push_back(std::move(schema));
  return id;
}

int KnowledgeBase::predicateId(const std::string& name) const {
  auto it = schemaIndex_.find(name);
  return it == schemaIndex_.end() ? -1 : it->second;
}

Atom substitute(const Atom& atom, const Binding& binding) {
  Atom out = atom;
  for (Term& t : out.args) {
    if (!t.isVariable()) continue;
    auto it = binding.find(t.symbol);
    if (it == binding.end())
      throw std::invalid_argument("unbound variable '" + t.symbol + "'");
    t = Term::constant(it->second, t.domain);
  }
  return out;
}

Formula substitute(const Formula& formula, const Binding& binding) {
  Formula out = formula;
  out.existentialVars.clear();
  for (Literal& lit : out.literals) lit.atom = substitute(lit.atom, binding);
  return out;
}

namespace {

// Negation normal form with implications eliminated.
RuleAst toNnf(const RuleAst& f, bool negated) {
  using K = RuleAst::Kind;
  switch (f.kind) {
    case K::Leaf: {
      RuleAst leaf = RuleAst::leaf(f.atom);
      return negated ? RuleAst::negate(std::move(leaf)) : leaf;
    }
    case K::Not:
      return toNnf(f.kids[0], !negated);
    case K::And:
    case K::Or: {
      bool conj = (f.kind == K::And) != negated;  // De Morgan under negation
      RuleAst a = toNnf(f.kids[0], negated);
      RuleAst b = toNnf(f.kids[1], negated);
      return conj ? RuleAst::conj(std::move(a), std::move(b))
                  : RuleAst::disj(std::move(a), std::move(b));
    }
    case K::Implies: {
      RuleAst a = toNnf(f.kids[0], !negated);
      RuleAst b = toNnf(f.kids[1], negated);
      return negated ? RuleAst::conj(std::move(a), std::move(b))
                     : RuleAst::disj(std::move(a), std::move(b));
    }
  }
  throw std::logic_error("unreachable");
}

using ClauseSet = std::vector<std::vector<Literal>>;

// CNF of an NNF formula: And of Ors of literals.
ClauseSet toCnf(const RuleAst& f) {
  using K = RuleAst::Kind;
  switch (f.kind) {
    case K::Leaf:
      return {{Literal{f.atom, false}}};
    case K::Not:
      return {{Literal{f.kids[0].atom, true}}};  // NNF: operand is a leaf
    case K::And: {
      ClauseSet a = toCnf(f.kids[0]);
      ClauseSet b = toCnf(f.kids[1]);
      a.insert(a.end(), std::make_move_iterator(b.begin()),
               std::make_move_iterator(b.end()));
      return a;
    }
    case K::Or: {
      ClauseSet a = toCnf(f.kids[0]);
      ClauseSet b = toCnf(f.kids[1]);
      ClauseSet out;
      out.reserve(a.size() * b.size());
      for (const auto& ca : a)
        for (const auto& cb : b) {
          std::vector<Literal> merged = ca;
          merged.insert(merged.end(), cb.begin(), cb.end());
          out.push_back(std::move(merged));
        }
      return out;
    }
    case K::Implies:
      throw std::logic_error("implication survived NNF");
  }
  throw std::logic_error("unreachable");
}

void dedupeLiterals(std::vector<Literal>& lits) {
  std::vector<Literal> out;
  for (const Literal& l : lits) {
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  }
  lits = std::move(out);
}

}  // namespace

std::vector<Formula> clausify(const RuleAst& body, double weight, bool hard,
                              const std::vector<std::string>& existentialVars,
                              const std::string& sourceText) {
  ClauseSet clauses = toCnf(toNnf(body, false));
  for (auto& c : clauses) dedupeLiterals(c);

  auto clauseUsesVar = [](const std::vector<Literal>& c,
                          const std::string& var) {
    for (const Literal& l : c)
      for (const Term& t : l.atom.args)
        if (t.isVariable() && t.symbol == var) return true;
    return false;
  };

  // The supported fragment requires each existential variable to live inside
  // a single clause; otherwise the finite expansion would not be equivalent.
  for (const std::string& var : existentialVars) {
    int touched = 0;
    for (const auto& c : clauses)
      if (clauseUsesVar(c, var)) ++touched;
    if (touched > 1)
      throw ParseError(
          "unsupported formula shape: existential variable '" + var +
          "' spans multiple clauses of the CNF");
  }

  std::vector<Formula> out;
  double splitWeight = clauses.empty() ? weight : weight / clauses.size();
  for (auto& c : clauses) {
    Formula f;
    f.hard = hard;
    f.weight = hard ? 0.0 : splitWeight;
    f.literals = std::move(c);
    f.sourceText = sourceText;
    for (const std::string& var : existentialVars)
      if (clauseUsesVar(f.literals, var)) f.existentialVars.push_back(var);
    out.push_back(std::move(f));
  }
  return out;
}

Formula expandExistential(const Formula& formula, const Domains& domains) {
  if (formula.existentialVars.empty()) return formula;
  std::vector<Term> vars = formula.existentialVariables();
  for (const Term& v : vars)
    if (domains.size(v.domain) == 0)
      throw std::invalid_argument("empty domain '" + v.domain +
                                  "' for existential variable '" + v.symbol +
                                  "'");

  Formula out = formula;
  out.existentialVars.clear();
  out.literals.clear();
  for (const Literal& lit : formula.literals) {
    bool usesExistential = false;
    for (const Term& t : lit.atom.args)
      if (t.isVariable() && formula.isExistential(t.symbol))
        usesExistential = true;
    if (!usesExistential) out.literals.push_back(lit);
  }

  // Disjunction over the product of the existential domains.
  std::vector<size_t> idx(vars.size(), 0);
  while (true) {
    Binding binding;
    for (size_t i = 0; i < vars.size(); ++i)
      binding[vars[i].symbol] = domains.constants(vars[i].domain)[idx[i]];
    for (const Literal& lit : formula.literals) {
      bool usesExistential = false;
      for (const Term& t : lit.atom.args)
        if (t.isVariable() && formula.isExistential(t.symbol))
          usesExistential = true;
      if (!usesExistential) continue;
      Literal expanded = lit;
      for (Term& t : expanded.atom.args)
        if (t.isVariable() && binding.count(t.symbol))
          t = Term::constant(binding[t.symbol], t.domain);
      if (std::find(out.literals.begin(), out.literals.end(), expanded) ==
          out.literals.end())
        out.literals.push_back(std::move(expanded));
    }
    size_t k = 0;
    while (k < vars.size() && ++idx[k] == domains.size(vars[k].domain)) {
      idx[k] = 0;
      ++k;
    }
    if (k == vars.size()) break;
  }
  return out;
}

std::string toString(const Atom& atom, const KnowledgeBase& kb) {
  std::ostringstream os;
  os << kb.schema(atom.predicate).name << '(';
  for (size_t i = 0; i < atom.args.size(); ++i) {
    if (i) os << ", ";
    os << atom.args[i].symbol;
  }
  os << ')';
  return os.str();
}

std::string toString(const Formula& f, const KnowledgeBase& kb) {
  std::ostringstream os;
  if (!f.existentialVars.empty()) {
    os << "EXIST ";
    for (size_t i = 0; i < f.existentialVars.size(); ++i) {
      if (i) os << ',';
      os << f.existentialVars[i];
    }
    os << ' ';
  }
  for (size_t i = 0; i < f.literals.size(); ++i) {
    if (i) os << " v ";
    if (f.literals[i].negated) os << '!';
    os << toString(f.literals[i].atom, kb);
  }
  return os.str();
}

}  // namespace mln
