#ifndef MLN_LOGIC_HPP
#define MLN_LOGIC_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mln/errors.hpp"

namespace mln {

/// A term is either a constant symbol or a variable, tagged with the typed
/// domain it ranges over. Composite constants such as "Loc_12_45" are opaque
/// symbols here; only the fusion/pipeline layers look inside them.
struct Term {
  enum class Kind { Constant, Variable };
  Kind kind = Kind::Constant;
  std::string symbol;
  std::string domain;

  static Term constant(std::string symbol, std::string domain) {
    return {Kind::Constant, std::move(symbol), std::move(domain)};
  }
  static Term variable(std::string name, std::string domain) {
    return {Kind::Variable, std::move(name), std::move(domain)};
  }
  bool isVariable() const { return kind == Kind::Variable; }
  bool operator==(const Term& o) const {
    return kind == o.kind && symbol == o.symbol && domain == o.domain;
  }
};

/// Declared predicate: name, typed argument list, and whether the closed
/// world assumption applies (evidence predicate) or not (query/hidden).
struct PredicateSchema {
  std::string name;
  std::vector<std::string> argDomains;
  bool closedWorld = false;

  int arity() const { return static_cast<int>(argDomains.size()); }
};

struct Atom {
  int predicate = -1;  // index into KnowledgeBase::schemas
  std::vector<Term> args;

  bool ground() const {
    for (const Term& t : args)
      if (t.isVariable()) return false;
    return true;
  }
  bool operator==(const Atom& o) const {
    return predicate == o.predicate && args == o.args;
  }
};

struct Literal {
  Atom atom;
  bool negated = false;

  bool operator==(const Literal& o) const {
    return negated == o.negated && atom == o.atom;
  }
};

/// One weighted (or hard) clause. Formulas whose CNF has several clauses are
/// split by clausify(); each resulting Formula is an independent entry in the
/// knowledge base and the weight vector. Variables listed in existentialVars
/// are expanded into a finite disjunction at grounding time; all other
/// variables are implicitly universal.
struct Formula {
  double weight = 0.0;
  bool hard = false;
  std::vector<Literal> literals;
  std::string sourceText;
  std::vector<std::string> existentialVars;

  bool isExistential(const std::string& var) const;
  /// Distinct universal variables in first-appearance order.
  std::vector<Term> universalVariables() const;
  /// Distinct existential variables in first-appearance order.
  std::vector<Term> existentialVariables() const;
};

/// Rule body as parsed, before clausal conversion.
struct RuleAst {
  enum class Kind { Leaf, Not, And, Or, Implies };
  Kind kind = Kind::Leaf;
  Atom atom;                  // Kind::Leaf only
  std::vector<RuleAst> kids;  // 1 for Not, 2 otherwise

  static RuleAst leaf(Atom a);
  static RuleAst negate(RuleAst f);
  static RuleAst conj(RuleAst a, RuleAst b);
  static RuleAst disj(RuleAst a, RuleAst b);
  static RuleAst implies(RuleAst a, RuleAst b);
};

/// Ordered constant sets per typed domain. Order is first-appearance and is
/// part of the deterministic-grounding contract.
class Domains {
 public:
  /// Adds the constant if absent; returns its dense id within the domain.
  int addConstant(const std::string& domain, const std::string& symbol);
  /// -1 when unknown.
  int constantId(const std::string& domain, const std::string& symbol) const;
  const std::vector<std::string>& constants(const std::string& domain) const;
  size_t size(const std::string& domain) const;
  std::vector<std::string> domainNames() const;  // insertion order
  bool empty() const { return order_.empty(); }

 private:
  struct Entry {
    std::vector<std::string> constants;
    std::map<std::string, int> index;
  };
  std::map<std::string, Entry> table_;
  std::vector<std::string> order_;
  static const std::vector<std::string> kEmpty;
};

/// Immutable after construction (see buildKb in the parser); formula order is
/// stable so that weight vectors can be addressed by index.
class KnowledgeBase {
 public:
  int declarePredicate(PredicateSchema schema);  // throws on duplicate name
  int predicateId(const std::string& name) const;  // -1 when undeclared
  const PredicateSchema& schema(int id) const { return schemas_.at(id); }
  const std::vector<PredicateSchema>& schemas() const { return schemas_; }

  void addFormula(Formula f) { formulas_.push_back(std::move(f)); }
  const std::vector<Formula>& formulas() const { return formulas_; }
  std::vector<Formula>& formulas() { return formulas_; }

  Domains& enumeratedDomains() { return enums_; }
  const Domains& enumeratedDomains() const { return enums_; }

 private:
  std::vector<PredicateSchema> schemas_;
  std::map<std::string, int> schemaIndex_;
  std::vector<Formula> formulas_;
  Domains enums_;
};

using Binding = std::map<std::string, std::string>;  // variable -> constant

/// Applies a variable binding to every literal. The binding must cover all
/// variables of the formula and respect their domains; weight and hard flag
/// carry over unchanged.
Formula substitute(const Formula& formula, const Binding& binding);
Atom substitute(const Atom& atom, const Binding& binding);

/// Converts a rule body to CNF clauses. A multi-clause CNF splits the weight
/// equally across clauses; hard rules yield hard clauses. Existential
/// variables may appear in at most one clause of the CNF ("unsupported
/// formula shape" otherwise).
std::vector<Formula> clausify(const RuleAst& body, double weight, bool hard,
                              const std::vector<std::string>& existentialVars,
                              const std::string& sourceText);

/// Replaces the existential variables of a clause by the finite disjunction
/// over their domains. Errors on an empty domain.
Formula expandExistential(const Formula& formula, const Domains& domains);

/// Renders an atom/literal/formula in the concrete rule syntax.
std::string toString(const Atom& atom, const KnowledgeBase& kb);
std::string toString(const Formula& f, const KnowledgeBase& kb);

}  // namespace mln

#endif
