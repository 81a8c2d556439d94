#include <random>
#include <sstream>

#include "doctest.h"
#include "mln/grounder.hpp"
#include "mln/inference.hpp"
#include "mln/parser.hpp"
#include "oracles.hpp"

using namespace mln;

TEST_CASE("collectDomains gathers evidence constants and enumerations") {
  KnowledgeBase kb = parseKb(
      "zoneType = { SKY, VERTICAL, HORIZONTAL }\n"
      "*p(agent)\n"
      "*r(agent, zone)\n");
  EvidenceSet ev = parseEvidence("p(A)\np(B)\nr(A, Z1)\n", kb);
  Domains d = collectDomains(ev, kb);
  CHECK(d.constants("agent") == std::vector<std::string>{"A", "B"});
  CHECK(d.constants("zone") == std::vector<std::string>{"Z1"});
  CHECK(d.size("zoneType") == 3);

  SUBCASE("empty evidence leaves evidence domains empty") {
    Domains d2 = collectDomains({}, kb);
    CHECK(d2.size("agent") == 0);
    CHECK(d2.size("zoneType") == 3);
  }
}

TEST_CASE("closed-world pruning keeps only the supported binding") {
  KnowledgeBase kb = parseKb(
      "*p(agent)\n"
      "q(agent)\n"
      "1.5 p(x) => q(x)\n");
  EvidenceSet ev = parseEvidence("p(A)\np(B)\n", kb);
  // Only evidence constants exist; retract B by listing it false.
  ev.pop_back();
  ev.push_back(EvidenceRecord::hard(
      Atom{0, {Term::constant("B", "agent")}}, false));

  GroundNetwork net = ground(kb, ev);
  // Binding x=B: !p(B) is true under the closed world -> clause satisfied.
  REQUIRE(net.clauses.size() == 1);
  CHECK(net.clauses[0].lits.size() == 1);  // unit q(A)
  CHECK(net.clauses[0].weight == doctest::Approx(1.5));
  CHECK(net.satisfiedTally[0] == doctest::Approx(1.0));
  int qa = net.clauses[0].lits[0] - 1;
  CHECK(net.atomText(qa) == "q(A)");
}

TEST_CASE("evidence violating a hard formula names it") {
  KnowledgeBase kb = parseKb(
      "*p(agent)\n"
      "!p(x).\n");
  EvidenceSet ev = parseEvidence("p(A)\n", kb);
  CHECK_THROWS_WITH_AS(ground(kb, ev), doctest::Contains("!p(x)"),
                       UnsatisfiableError);
}

TEST_CASE("empty KB grounds to an empty network") {
  KnowledgeBase kb = parseKb("");
  GroundNetwork net = ground(kb, {});
  CHECK(net.clauses.empty());
  CHECK(net.atoms.size() == 0);
}

TEST_CASE("soft evidence produces log-odds unit bias") {
  KnowledgeBase kb = parseKb("*p(agent)\n");
  EvidenceSet ev = parseEvidence("0.9 p(A)\n", kb);
  GroundNetwork net = ground(kb, ev);
  REQUIRE(net.atoms.size() == 1);
  CHECK(net.softBias[0] == doctest::Approx(std::log(9.0)).epsilon(1e-9));
}

TEST_CASE("countTrueGroundings matches hand counts") {
  KnowledgeBase kb = parseKb(
      "*p(agent)\n"
      "q(agent)\n"
      "1.0 p(x)\n"
      "1.0 q(x) v !q(x)\n"
      "1.0 !p(x) v q(x)\n");
  Domains domains;

  SUBCASE("unit formula over two constants") {
    domains.addConstant("agent", "A");
    domains.addConstant("agent", "B");
    WorldFn world = [&](const Atom& a) -> std::optional<bool> {
      if (a.predicate == 0) return a.args[0].symbol == "A";  // p(A)=T p(B)=F
      return false;
    };
    CHECK(countTrueGroundings(0, kb, domains, world) == doctest::Approx(1.0));
  }
  SUBCASE("tautology counts every binding") {
    domains.addConstant("agent", "A");
    WorldFn world = [&](const Atom&) -> std::optional<bool> { return false; };
    CHECK(countTrueGroundings(1, kb, domains, world) == doctest::Approx(1.0));
  }
  SUBCASE("implication with all-true world counts all three bindings") {
    domains.addConstant("agent", "A");
    domains.addConstant("agent", "B");
    domains.addConstant("agent", "C");
    WorldFn world = [&](const Atom&) -> std::optional<bool> { return true; };
    CHECK(countTrueGroundings(2, kb, domains, world) == doctest::Approx(3.0));
  }
  SUBCASE("incomplete world over an open predicate is an error") {
    domains.addConstant("agent", "A");
    WorldFn world = [&](const Atom& a) -> std::optional<bool> {
      if (a.predicate == 0) return true;
      return std::nullopt;
    };
    CHECK_THROWS_WITH_AS(countTrueGroundings(2, kb, domains, world),
                         doctest::Contains("incomplete world"),
                         std::invalid_argument);
  }
}

TEST_CASE("connected components partition by clause co-occurrence") {
  KnowledgeBase kb = parseKb(
      "q(agent)\n"
      "r(agent)\n"
      "1.0 q(x) v r(x)\n");
  EvidenceSet ev;

  SUBCASE("two disjoint clauses give two components") {
    QuerySpec spec;
    spec.addPredicate(0);
    spec.addPredicate(1);
    KnowledgeBase kb2 = parseKb(
        "agentD = { A, B }\n"
        "q(agentD)\n"
        "r(agentD)\n"
        "1.0 q(A) v r(A)\n"
        "1.0 q(B) v r(B)\n");
    GroundNetwork net = ground(kb2, {}, {});
    auto comps = connectedComponents(net);
    CHECK(comps.size() == 2);
    CHECK(comps[0].clauses.size() == 1);
  }
  SUBCASE("a chain stays one component") {
    KnowledgeBase kb3 = parseKb(
        "d = { C1 }\n"
        "q1(d)\nq2(d)\nq3(d)\n"
        "1.0 q1(C1) v q2(C1)\n"
        "1.0 q2(C1) v q3(C1)\n");
    GroundNetwork net = ground(kb3, {});
    auto comps = connectedComponents(net);
    CHECK(comps.size() == 1);
    CHECK(comps[0].atoms.size() == 3);
  }
  SUBCASE("empty network yields no components") {
    GroundNetwork net = ground(parseKb(""), {});
    CHECK(connectedComponents(net).empty());
  }
}

TEST_CASE("query expansion registers unconstrained atoms") {
  KnowledgeBase kb = parseKb(
      "*p(agent)\n"
      "q(agent)\n"
      "1.0 p(x) => q(x)\n");
  EvidenceSet ev = parseEvidence("p(A)\n!p(B)\n", kb);
  QuerySpec spec;
  spec.addPredicate(kb.predicateId("q"));
  GroundNetwork net = ground(kb, ev, spec);
  REQUIRE(net.queryAtoms.size() == 2);
  // q(B) is in no clause yet queryable.
  MarginalResult exact = exactMarginals(net, net.queryAtoms);
  bool sawFree = false;
  for (const auto& m : exact.marginals)
    if (m.atomText == "q(B)") {
      CHECK(m.probability == doctest::Approx(0.5));
      sawFree = true;
    }
  CHECK(sawFree);
}

TEST_CASE("network dump lists clauses then an atom legend") {
  KnowledgeBase kb = parseKb(
      "*p(agent)\n"
      "q(agent)\n"
      "2.0 p(x) => q(x)\n");
  EvidenceSet ev = parseEvidence("p(A)\n", kb);
  GroundNetwork net = ground(kb, ev);
  std::string dump = dumpNetwork(net);
  CHECK(dump.find("# atoms") != std::string::npos);
  CHECK(dump.find("q(A) open") != std::string::npos);
}

// Pruning must not change the distribution: exact marginals on the pruned
// network match a no-pruning brute-force oracle on random small instances.
TEST_CASE("grounding is distribution-preserving on random instances") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::ostringstream kbText;
    kbText << "*e(thing)\n"
           << "h(thing)\n"
           << "g(thing)\n";
    std::uniform_real_distribution<double> wdist(-2.0, 2.0);
    kbText << wdist(rng) << " e(x) => h(x)\n";
    kbText << wdist(rng) << " h(x) v g(x)\n";
    kbText << wdist(rng) << " !g(x) v h(x)\n";
    if (trial % 3 == 0) kbText << wdist(rng) << " g(x) ^ h(x) => e(x)\n";
    KnowledgeBase kb = parseKb(kbText.str());

    std::ostringstream evText;
    int nConst = 2 + static_cast<int>(rng() % 2);
    for (int c = 0; c < nConst; ++c) {
      std::string name = "C" + std::to_string(c);
      int kind = static_cast<int>(rng() % 3);
      if (kind == 0)
        evText << "e(" << name << ")\n";
      else if (kind == 1)
        evText << "!e(" << name << ")\n";
      else
        evText << (0.1 + 0.8 * (static_cast<double>(rng() % 100) / 100.0))
               << " e(" << name << ")\n";
    }
    EvidenceSet ev = parseEvidence(evText.str(), kb);

    QuerySpec spec;
    spec.addPredicate(kb.predicateId("h"));
    spec.addPredicate(kb.predicateId("g"));
    GroundNetwork net = ground(kb, ev, spec);
    MarginalResult pruned = exactMarginals(net, net.queryAtoms);

    Domains domains = collectDomains(ev, kb);
    oracle::NaiveMarginals naive = oracle::naiveMarginals(kb, ev, domains);
    for (const auto& m : pruned.marginals) {
      const GroundAtom& ga = net.atoms.atom(m.atomIndex);
      Atom a;
      a.predicate = ga.predicate;
      const auto& schema = kb.schema(ga.predicate);
      for (size_t i = 0; i < ga.args.size(); ++i)
        a.args.push_back(Term::constant(
            net.domains->constants(schema.argDomains[i])[ga.args[i]],
            schema.argDomains[i]));
      CHECK(m.probability ==
            doctest::Approx(naive.of(a)).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("deterministic atom indexing") {
  KnowledgeBase kb = parseKb(
      "*p(agent)\n"
      "q(agent)\n"
      "1.0 p(x) => q(x)\n"
      "0.5 q(x) v q(y)\n");
  EvidenceSet ev = parseEvidence("p(A)\np(B)\n0.6 p(C)\n", kb);
  GroundNetwork a = ground(kb, ev);
  GroundNetwork b = ground(kb, ev);
  REQUIRE(a.atoms.size() == b.atoms.size());
  for (size_t i = 0; i < a.atoms.size(); ++i)
    CHECK(a.atomText(static_cast<int>(i)) == b.atomText(static_cast<int>(i)));
  CHECK(a.clauses.size() == b.clauses.size());
}

TEST_CASE("ground clause ceiling raises a resource error") {
  KnowledgeBase kb = parseKb(
      "*p(agent)\n"
      "q(agent)\n"
      "1.0 q(x) v q(y) v q(z)\n");
  EvidenceSet ev;
  for (int i = 0; i < 12; ++i)
    ev.push_back(EvidenceRecord::hard(
        Atom{0, {Term::constant("A" + std::to_string(i), "agent")}}, true));
  // 12 constants and arity-3 products exceed a tiny ceiling.
  GroundOptions opts;
  opts.maxGroundClauses = 100;
  bool threw = false;
  try {
    ground(kb, ev, {}, opts);
  } catch (const ResourceLimitError&) {
    threw = true;
  } catch (const UnsatisfiableError&) {
  }
  CHECK(threw);
}
