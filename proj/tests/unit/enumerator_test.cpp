#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "boundsmith/enumerator.hpp"
#include "boundsmith/lang.hpp"
#include "boundsmith/translator.hpp"
#include "oracle.hpp"

using namespace boundsmith;

namespace {

Model sll() { return load_model(oracle::model_text("sll.bsm")); }

std::set<std::string> keys(const std::vector<Scenario>& list) {
  std::set<std::string> out;
  for (const auto& s : list) out.insert(scenario_key(s));
  return out;
}

}  // namespace

TEST(SizeUnits, LinkedListSizeTwo) {
  Model m = sll();
  CnfDocument cnf = translate(m, m.commands[0], 2);
  auto list = size_unit_clauses(m, "List", cnf.symbols);
  EXPECT_FALSE(list.relationalFact);
  EXPECT_EQ(list.clauses, (std::vector<Clause>{{1}, {2}}));
  EXPECT_EQ(size_unit_clauses(m, "Node", cnf.symbols).clauses, (std::vector<Clause>{{3}, {4}}));
}

TEST(SizeUnits, LinkedListSizeThree) {
  Model m = sll();
  CnfDocument cnf = translate(m, m.commands[0], 3);
  EXPECT_EQ(size_unit_clauses(m, "List", cnf.symbols).clauses, (std::vector<Clause>{{1}, {2}, {3}}));
}

TEST(SizeUnits, AbstractAndOne) {
  Model m = load_model(oracle::model_text("classes.bsm"));
  CnfDocument cnf = translate(m, m.commands[0], 2);
  EXPECT_TRUE(size_unit_clauses(m, "Class", cnf.symbols).relationalFact);
  auto one = size_unit_clauses(m, "Object", cnf.symbols);
  EXPECT_FALSE(one.relationalFact);
  EXPECT_TRUE(one.clauses.empty());
  EXPECT_THROW(size_unit_clauses(m, "Nope", cnf.symbols), std::invalid_argument);
}

TEST(Blocking, FromAssignment) {
  std::vector<bool> a{false, true, false, true, true, false};
  EXPECT_EQ(blocking_clause(a, 3), (Clause{-1, 2, -3}));
  EXPECT_EQ(blocking_clause(a, 0), Clause{});
}

TEST(Blocking, FromScenarioMatchesAssignment) {
  Model m = sll();
  CnfDocument cnf = translate(m, m.commands[0], 2);
  sat::Solver solver(cnf);
  for (int i = 0; i < 20; ++i) {
    auto r = solver.solve();
    ASSERT_TRUE(r.sat());
    Scenario s = decode_scenario(m, cnf, r.assignment, std::nullopt, i);
    Clause c = blocking_clause(r.assignment, cnf.numPrimary);
    EXPECT_EQ(blocking_clause(s, cnf), c);
    solver.add_clause(c);
  }
}

TEST(Decode, SizeOneList) {
  Model m = sll();
  CnfDocument cnf = translate(m, m.commands[0], 1);
  std::vector<bool> a(static_cast<std::size_t>(cnf.numVars) + 1, false);
  a[1] = a[2] = a[3] = true;  // L0, N0, L0->N0
  Scenario s = decode_scenario(m, cnf, a, std::string("List"), 4);
  EXPECT_EQ(s.size, 1);
  EXPECT_EQ(s.ordinal, 4);
  EXPECT_EQ(s.phase, "List");
  EXPECT_EQ(*s.atoms_of("List"), (std::vector<std::string>{"L0"}));
  EXPECT_EQ(*s.tuples_of("header"), (std::vector<AtomPair>{{"L0", "N0"}}));
  EXPECT_TRUE(s.tuples_of("link")->empty());
  EXPECT_EQ(s.atoms_of("Missing"), nullptr);
}

TEST(Decode, OneAndAbstract) {
  Model m = load_model(oracle::model_text("classes.bsm"));
  CnfDocument cnf = translate(m, m.commands[0], 2);
  std::vector<bool> a(static_cast<std::size_t>(cnf.numVars) + 1, false);
  a[static_cast<std::size_t>(cnf.symbols.sig_vars("Custom")[1])] = true;
  Scenario s = decode_scenario(m, cnf, a, std::nullopt, 0);
  EXPECT_EQ(*s.atoms_of("Object"), (std::vector<std::string>{"C0"}));
  EXPECT_EQ(*s.atoms_of("Custom"), (std::vector<std::string>{"C1"}));
  EXPECT_EQ(*s.atoms_of("Class"), (std::vector<std::string>{"C0", "C1"}));
  EXPECT_EQ(s.size, 2);
}

TEST(Session, LinkedListPhases) {
  Model m = sll();
  const int counts[] = {1, 6, 93};
  for (int k = 0; k <= 2; ++k) {
    EnumerationSession session(m, m.commands[0], k);
    EXPECT_EQ(collect(session).size(), static_cast<std::size_t>(counts[k])) << k;
    EXPECT_EQ(session.state(), SessionState::Exhausted);
  }
  EnumerationSession two(m, m.commands[0], 2);
  collect(two);
  auto phases = two.phase_counts();
  ASSERT_EQ(phases.size(), 2u);
  EXPECT_EQ(phases[0].found, 50);
  EXPECT_EQ(phases[1].found, 43);
  EXPECT_EQ(two.blockers().size(), 93u);
}

TEST(Session, FirstScenarioOfEachPhase) {
  Model m = sll();
  EnumerationSession session(m, m.commands[0], 1);
  EXPECT_EQ(session.phases(), (std::vector<std::string>{"List", "Node"}));
  auto first = session.next();
  ASSERT_TRUE(first);
  EXPECT_EQ(first->phase, "List");
  EXPECT_EQ(first->ordinal, 0);
  EXPECT_EQ(session.active_phase(), 0);
  // Lowest variable false first: only the forced L0.
  EXPECT_EQ(*first->atoms_of("List"), (std::vector<std::string>{"L0"}));
  EXPECT_TRUE(first->atoms_of("Node")->empty());
}

TEST(Session, ExhaustionIsSticky) {
  Model m = sll();
  EnumerationSession session(m, m.commands[0], 1);
  collect(session);
  auto calls = session.solve_calls();
  EXPECT_FALSE(session.next());
  EXPECT_FALSE(session.next());
  EXPECT_EQ(session.solve_calls(), calls);

  EnumerationSession zero(m, m.commands[0], 0);
  EXPECT_TRUE(zero.next());
  EXPECT_FALSE(zero.next());
  EXPECT_FALSE(zero.next());
}

TEST(Session, SizeZeroCases) {
  // Empty scenario with no clauses at all: no solver needed.
  Model free = load_model("sig A {}\nrun {} for 2\n");
  EnumerationSession a(free, free.commands[0], 0);
  EXPECT_EQ(collect(a).size(), 1u);
  EXPECT_EQ(a.solve_calls(), 0u);

  Model needsSome = load_model("sig A {}\nrun { some A } for 2\n");
  EnumerationSession b(needsSome, needsSome.commands[0], 0);
  EXPECT_TRUE(collect(b).empty());

  Model single = load_model(oracle::model_text("singleton.bsm"));
  EnumerationSession c(single, single.commands[0], 0);
  EXPECT_TRUE(collect(c).empty());
}

TEST(Session, NoListFact) {
  Model m = load_model(
      "sig List {header: lone Node}\nsig Node {link: lone Node}\nfact { no List }\nrun {} for 2\n");
  EnumerationSession session(m, m.commands[0], 1);
  auto all = collect(session);
  auto phases = session.phase_counts();
  EXPECT_EQ(phases[0].found, 0);
  EXPECT_EQ(phases[1].found, 2);
  EXPECT_EQ(all.size(), 2u);
}

TEST(Session, SingletonPhaseAtSizeOne) {
  Model m = load_model(oracle::model_text("singleton.bsm"));
  EnumerationSession one(m, m.commands[0], 1);
  EXPECT_EQ(one.phases(), (std::vector<std::string>{"Item", "Root"}));
  collect(one);
  auto phases = one.phase_counts();
  EXPECT_EQ(phases[0].found, 2);
  EXPECT_EQ(phases[1].found, 1);

  EnumerationSession two(m, m.commands[0], 2);
  EXPECT_EQ(two.phases(), (std::vector<std::string>{"Item"}));
  EXPECT_EQ(collect(two).size(), 12u);
}

TEST(Session, ExtensionOfOneSigCannotReachSize) {
  Model m = load_model("one sig A {}\nsig C extends A {}\nsig B {}\nrun {} for 2\n");
  EnumerationSession session(m, m.commands[0], 2);
  auto all = collect(session);
  for (const auto& s : all) EXPECT_EQ(s.size, 2);
  EXPECT_EQ(keys(all), oracle::scenario_keys(m, m.commands[0], 2, 2));
  EXPECT_EQ(session.phase_counts()[0].sig, "C");
  EXPECT_EQ(session.phase_counts()[0].found, 0);
}

TEST(Session, OrdinalsAreSequential) {
  Model m = sll();
  EnumerationSession session(m, m.commands[0], 2);
  int expected = 0;
  while (auto s = session.next()) EXPECT_EQ(s->ordinal, expected++);
}

TEST(Session, TraceGoesToStream) {
  Model m = sll();
  EnumerationSession session(m, m.commands[0], 1);
  std::ostringstream trace;
  session.set_trace(&trace);
  session.next();
  EXPECT_NE(trace.str().find("decision"), std::string::npos);
}

TEST(Session, RandomModelsAgainstOracle) {
  std::mt19937 rng(17);
  for (int i = 0; i < 100; ++i) {
    std::string text = oracle::random_model(rng);
    Model m = load_model(text);
    for (int k = 0; k <= 2; ++k) {
      EnumerationSession session(m, m.commands[0], k);
      auto all = collect(session);
      ASSERT_EQ(keys(all).size(), all.size()) << text;
      ASSERT_EQ(keys(all), oracle::scenario_keys(m, m.commands[0], k, k)) << text << " k=" << k;
    }
  }
}

TEST(Plain, AnalyzerModeAtScope) {
  Model m = sll();
  PlainEnumeration plain(m, m.commands[0], 2, "analyzer", std::nullopt);
  auto all = collect(plain);
  std::map<int, int> bySize;
  for (const auto& s : all) ++bySize[s.size];
  EXPECT_EQ(bySize[0], 1);
  EXPECT_EQ(bySize[2], 93);
  EXPECT_EQ(plain.metrics().mode, "analyzer");
  EXPECT_FALSE(plain.metrics().size);
}

TEST(Cached, ReplaysWithoutSolving) {
  Model m = sll();
  EnumerationSession session(m, m.commands[0], 1);
  auto all = collect(session);
  CachedStream cached(all, session.metrics(), session.phase_counts());
  EXPECT_EQ(cached.metrics().solveCalls, 0u);
  auto again = collect(cached);
  EXPECT_EQ(keys(again), keys(all));
  EXPECT_EQ(cached.state(), SessionState::Exhausted);
  EXPECT_EQ(cached.phase_counts()[0].found, 4);
}

TEST(Scenario, JsonRoundTrip) {
  Model m = sll();
  EnumerationSession session(m, m.commands[0], 2);
  for (const auto& s : collect(session)) {
    Scenario back = scenario_from_json(nlohmann::ordered_json::parse(to_json(s).dump()));
    ASSERT_EQ(scenario_key(back), scenario_key(s));
    ASSERT_EQ(back.phase, s.phase);
    ASSERT_EQ(back.ordinal, s.ordinal);
  }
}

TEST(Scenario, JsonShape) {
  Model m = sll();
  EnumerationSession session(m, m.commands[0], 0);
  auto doc = to_json(*session.next());
  EXPECT_EQ(doc.dump(), R"({"size":0,"ordinal":0,"phase":null,"sigs":{"List":[],"Node":[]},"fields":{"header":[],"link":[]}})");
}

TEST(Scenario, CanonicalKeyCompactsPools) {
  Scenario a;
  a.sigs = {{"List", {"L1"}}, {"Node", {"N0", "N2"}}};
  a.fields = {{"header", {{"L1", "N2"}}}, {"link", {}}};
  Scenario b;
  b.sigs = {{"List", {"L0"}}, {"Node", {"N0", "N1"}}};
  b.fields = {{"header", {{"L0", "N1"}}}, {"link", {}}};
  Model m = sll();
  EXPECT_NE(scenario_key(a), scenario_key(b));
  EXPECT_EQ(canonical_key(m, a), canonical_key(m, b));
}

TEST(Scenario, DotRendering) {
  Model m = sll();
  EnumerationSession session(m, m.commands[0], 0);
  std::string empty = to_dot(m, *session.next());
  EXPECT_NE(empty.find("(empty)"), std::string::npos);

  Scenario s;
  s.sigs = {{"List", {"L0"}}, {"Node", {"N0"}}};
  s.fields = {{"header", {{"L0", "N0"}}}, {"link", {{"N0", "N0"}}}};
  std::string dot = to_dot(m, s);
  EXPECT_EQ(dot.rfind("digraph", 0), 0u);
  EXPECT_NE(dot.find("\"L0\" -> \"N0\" [label=\"header\"]"), std::string::npos) << dot;
  EXPECT_NE(dot.find("\"N0\" -> \"N0\" [label=\"link\"]"), std::string::npos) << dot;
}
