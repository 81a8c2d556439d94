#include "doctest.h"
#include "mln/logic.hpp"
#include "mln/parser.hpp"

using namespace mln;

namespace {

KnowledgeBase twoPredKb() {
  KnowledgeBase kb;
  kb.declarePredicate({"P", {"agent"}, true});
  kb.declarePredicate({"Q", {"agent"}, false});
  return kb;
}

}  // namespace

TEST_CASE("substitute grounds an implication clause") {
  KnowledgeBase kb = twoPredKb();
  Atom p{0, {Term::variable("x", "agent")}};
  Atom q{1, {Term::variable("x", "agent")}};
  RuleAst body = RuleAst::implies(RuleAst::leaf(p), RuleAst::leaf(q));
  std::vector<Formula> clauses = clausify(body, 1.5, false, {}, "P(x) => Q(x)");
  REQUIRE(clauses.size() == 1);

  Formula ground = substitute(clauses[0], {{"x", "A"}});
  REQUIRE(ground.literals.size() == 2);
  CHECK(ground.literals[0].negated);
  CHECK(ground.literals[0].atom.args[0].symbol == "A");
  CHECK_FALSE(ground.literals[1].negated);
  CHECK(ground.literals[1].atom.args[0].symbol == "A");
  CHECK(ground.weight == doctest::Approx(1.5));
}

TEST_CASE("substitute on a ground formula with empty binding is identity") {
  KnowledgeBase kb = twoPredKb();
  Formula f;
  f.weight = 2.0;
  f.literals.push_back({Atom{1, {Term::constant("A", "agent")}}, false});
  Formula g = substitute(f, {});
  CHECK(g.literals == f.literals);
  CHECK(g.weight == f.weight);
}

TEST_CASE("substitute with a missing variable fails") {
  Formula f;
  f.literals.push_back({Atom{0, {Term::variable("x", "agent")}}, false});
  CHECK_THROWS_WITH_AS(substitute(f, {}), doctest::Contains("unbound variable"),
                       std::invalid_argument);
}

TEST_CASE("clausify keeps a single-clause implication intact") {
  Atom a{0, {Term::variable("x", "agent")}};
  Atom b{1, {Term::variable("x", "agent")}};
  Atom c{1, {Term::variable("y", "agent")}};
  // A ^ B => C  with weight 2 -> one clause !A v !B v C, weight 2
  RuleAst body = RuleAst::implies(
      RuleAst::conj(RuleAst::leaf(a), RuleAst::leaf(b)), RuleAst::leaf(c));
  std::vector<Formula> clauses = clausify(body, 2.0, false, {}, "");
  REQUIRE(clauses.size() == 1);
  CHECK(clauses[0].weight == doctest::Approx(2.0));
  CHECK(clauses[0].literals.size() == 3);
  CHECK(clauses[0].literals[0].negated);
  CHECK(clauses[0].literals[1].negated);
  CHECK_FALSE(clauses[0].literals[2].negated);
}

TEST_CASE("clausify splits weight across a multi-clause CNF") {
  Atom a{0, {Term::variable("x", "agent")}};
  Atom b{1, {Term::variable("x", "agent")}};
  Atom c{1, {Term::variable("y", "agent")}};
  // A => B ^ C  with weight 2 -> {!A v B (1.0), !A v C (1.0)}
  RuleAst body = RuleAst::implies(
      RuleAst::leaf(a), RuleAst::conj(RuleAst::leaf(b), RuleAst::leaf(c)));
  std::vector<Formula> clauses = clausify(body, 2.0, false, {}, "");
  REQUIRE(clauses.size() == 2);
  CHECK(clauses[0].weight == doctest::Approx(1.0));
  CHECK(clauses[1].weight == doctest::Approx(1.0));
}

TEST_CASE("clausify of a bare positive literal is a unit clause") {
  Atom a{1, {Term::variable("x", "agent")}};
  std::vector<Formula> clauses = clausify(RuleAst::leaf(a), 0.7, false, {}, "");
  REQUIRE(clauses.size() == 1);
  CHECK(clauses[0].literals.size() == 1);
  CHECK(clauses[0].weight == doctest::Approx(0.7));
}

TEST_CASE("existential expansion becomes a finite disjunction") {
  Domains domains;
  domains.addConstant("zone", "A");
  domains.addConstant("zone", "B");

  Formula f;
  f.weight = 1.0;
  f.literals.push_back({Atom{0, {Term::variable("z", "zone")}}, false});
  f.existentialVars = {"z"};

  Formula expanded = expandExistential(f, domains);
  REQUIRE(expanded.literals.size() == 2);
  CHECK(expanded.literals[0].atom.args[0].symbol == "A");
  CHECK(expanded.literals[1].atom.args[0].symbol == "B");
  CHECK(expanded.existentialVars.empty());

  SUBCASE("singleton domain") {
    Domains one;
    one.addConstant("zone", "A");
    Formula e = expandExistential(f, one);
    CHECK(e.literals.size() == 1);
  }
  SUBCASE("empty domain fails") {
    Domains none;
    CHECK_THROWS_AS(expandExistential(f, none), std::invalid_argument);
  }
}

TEST_CASE("existential variable spanning several CNF clauses is rejected") {
  Atom pz{0, {Term::variable("z", "agent")}};
  Atom qz{1, {Term::variable("z", "agent")}};
  // EXIST z (P(z) ^ Q(z)) clausifies to two clauses both using z.
  RuleAst body = RuleAst::conj(RuleAst::leaf(pz), RuleAst::leaf(qz));
  CHECK_THROWS_WITH_AS(clausify(body, 1.0, false, {"z"}, ""),
                       doctest::Contains("unsupported formula shape"),
                       ParseError);
}

// Clausification preserves the set of satisfying assignments. Checked by
// enumerating all assignments of the (few) ground atoms in both forms.
TEST_CASE("clausify is satisfaction-equivalent to its input") {
  Atom a{0, {Term::constant("A", "agent")}};
  Atom b{1, {Term::constant("A", "agent")}};
  Atom c{1, {Term::constant("B", "agent")}};

  auto evalAst = [&](const RuleAst& f, auto&& self, bool va, bool vb,
                     bool vc) -> bool {
    auto value = [&](const Atom& atom) {
      if (atom == a) return va;
      if (atom == b) return vb;
      return vc;
    };
    switch (f.kind) {
      case RuleAst::Kind::Leaf: return value(f.atom);
      case RuleAst::Kind::Not: return !self(f.kids[0], self, va, vb, vc);
      case RuleAst::Kind::And:
        return self(f.kids[0], self, va, vb, vc) &&
               self(f.kids[1], self, va, vb, vc);
      case RuleAst::Kind::Or:
        return self(f.kids[0], self, va, vb, vc) ||
               self(f.kids[1], self, va, vb, vc);
      case RuleAst::Kind::Implies:
        return !self(f.kids[0], self, va, vb, vc) ||
               self(f.kids[1], self, va, vb, vc);
    }
    return false;
  };
  auto evalClauses = [&](const std::vector<Formula>& clauses, bool va, bool vb,
                         bool vc) {
    auto value = [&](const Atom& atom) {
      if (atom == a) return va;
      if (atom == b) return vb;
      return vc;
    };
    for (const Formula& cl : clauses) {
      bool sat = false;
      for (const Literal& lit : cl.literals)
        if (value(lit.atom) != lit.negated) sat = true;
      if (!sat) return false;
    }
    return true;
  };

  std::vector<RuleAst> shapes;
  shapes.push_back(RuleAst::implies(
      RuleAst::conj(RuleAst::leaf(a), RuleAst::leaf(b)), RuleAst::leaf(c)));
  shapes.push_back(RuleAst::implies(
      RuleAst::leaf(a), RuleAst::conj(RuleAst::leaf(b), RuleAst::leaf(c))));
  shapes.push_back(RuleAst::negate(
      RuleAst::disj(RuleAst::leaf(a), RuleAst::negate(RuleAst::leaf(b)))));
  shapes.push_back(RuleAst::implies(
      RuleAst::negate(RuleAst::leaf(a)),
      RuleAst::disj(RuleAst::leaf(b), RuleAst::negate(RuleAst::leaf(c)))));

  for (const RuleAst& shape : shapes) {
    std::vector<Formula> clauses = clausify(shape, 1.0, false, {}, "");
    for (int world = 0; world < 8; ++world) {
      bool va = world & 1, vb = world & 2, vc = world & 4;
      CHECK(evalAst(shape, evalAst, va, vb, vc) ==
            evalClauses(clauses, va, vb, vc));
    }
  }
}

// Grounding a clause then clausifying equals clausifying then substituting.
TEST_CASE("substitution commutes with clausification") {
  Atom a{0, {Term::variable("x", "agent")}};
  Atom b{1, {Term::variable("x", "agent")}};
  RuleAst body = RuleAst::implies(RuleAst::leaf(a), RuleAst::leaf(b));

  std::vector<Formula> clausesFirst = clausify(body, 1.0, false, {}, "");
  Formula thenSubstituted = substitute(clausesFirst[0], {{"x", "A"}});

  RuleAst groundBody = RuleAst::implies(
      RuleAst::leaf(Atom{0, {Term::constant("A", "agent")}}),
      RuleAst::leaf(Atom{1, {Term::constant("A", "agent")}}));
  std::vector<Formula> substitutedFirst = clausify(groundBody, 1.0, false, {}, "");

  CHECK(thenSubstituted.literals == substitutedFirst[0].literals);
}
