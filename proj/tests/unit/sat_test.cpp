#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "boundsmith/sat.hpp"

using namespace boundsmith;
using sat::Solver;

namespace {

bool satisfies(const std::vector<Clause>& clauses, const std::vector<bool>& a) {
  for (const auto& c : clauses) {
    bool hit = false;
    for (int l : c) hit |= a.at(static_cast<std::size_t>(std::abs(l))) == (l > 0);
    if (!hit) return false;
  }
  return true;
}

bool brute_force(int n, const std::vector<Clause>& clauses) {
  for (unsigned m = 0; m < (1u << n); ++m) {
    std::vector<bool> a(static_cast<std::size_t>(n) + 1);
    for (int i = 1; i <= n; ++i) a[static_cast<std::size_t>(i)] = m >> (i - 1) & 1u;
    if (satisfies(clauses, a)) return true;
  }
  return false;
}

}  // namespace

TEST(Sat, EmptyFormulaIsSat) {
  Solver s(3, {});
  auto r = s.solve();
  ASSERT_TRUE(r.sat());
  EXPECT_EQ(r.assignment.size(), 4u);
  // Lowest variable first, false first.
  EXPECT_FALSE(r.assignment[1]);
  EXPECT_FALSE(r.assignment[3]);
}

TEST(Sat, EmptyClauseIsUnsat) {
  Solver s(1, {{}});
  EXPECT_FALSE(s.solve().sat());
}

TEST(Sat, SimpleUnsat) {
  Solver s(2, {{1, 2}, {-1, 2}, {1, -2}, {-1, -2}});
  EXPECT_FALSE(s.solve().sat());
  EXPECT_EQ(s.solve_calls(), 1u);
}

TEST(Sat, Pigeonhole3Into2) {
  // p(i,j): pigeon i in hole j -> var 2*i + j + 1
  std::vector<Clause> cls;
  for (int i = 0; i < 3; ++i) cls.push_back({2 * i + 1, 2 * i + 2});
  for (int j = 0; j < 2; ++j)
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) cls.push_back({-(2 * a + j + 1), -(2 * b + j + 1)});
  Solver s(6, cls);
  EXPECT_FALSE(s.solve().sat());
  EXPECT_GT(s.conflicts(), 0u);
}

TEST(Sat, RejectsUnknownVariables) {
  Solver s(2, {});
  std::vector<int> bad{3};
  EXPECT_THROW(s.add_clause(bad), sat::SolverError);
  std::vector<int> zero{0};
  EXPECT_THROW(s.add_clause(zero), sat::SolverError);
}

TEST(Sat, Deterministic) {
  std::vector<Clause> cls{{1, 2, 3}, {-1, -2}, {-2, -3}, {2, 3}};
  auto a = Solver(3, cls).solve();
  auto b = Solver(3, cls).solve();
  ASSERT_TRUE(a.sat());
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.assignment, (std::vector<bool>{false, false, false, true}));
}

TEST(Sat, RebuildDropsRetractableKeepsPersistent) {
  Solver s(2, {{1, 2}});
  std::vector<int> notOne{-1};
  std::vector<int> notTwo{-2};
  s.add_clause(notOne, true);
  s.add_clause(notTwo, false);
  EXPECT_FALSE(s.solve().sat());
  s.rebuild({});
  auto r = s.solve();
  ASSERT_TRUE(r.sat());
  EXPECT_TRUE(r.assignment[1]);
  EXPECT_FALSE(r.assignment[2]);
}

TEST(Sat, RebuildInstallsKeptClausesAsRetractable) {
  Solver s(3, {});
  std::vector<Clause> keep{{1}, {2}};
  s.rebuild(keep);
  auto r = s.solve();
  ASSERT_TRUE(r.sat());
  EXPECT_TRUE(r.assignment[1] && r.assignment[2]);
  s.rebuild({});
  r = s.solve();
  ASSERT_TRUE(r.sat());
  EXPECT_FALSE(r.assignment[1]);
}

TEST(Sat, BlockingLoopCountsModels) {
  // x1 xor x2, x3 free: 4 models
  Solver s(3, {{1, 2}, {-1, -2}});
  int n = 0;
  for (;;) {
    auto r = s.solve();
    if (!r.sat()) break;
    ++n;
    Clause block;
    for (int v = 1; v <= 3; ++v) block.push_back(r.assignment[static_cast<std::size_t>(v)] ? -v : v);
    s.add_clause(block);
  }
  EXPECT_EQ(n, 4);
}

TEST(Sat, TraceLines) {
  Solver s(2, {{1, 2}, {-1, 2}});
  std::ostringstream trace;
  s.set_trace(&trace);
  ASSERT_TRUE(s.solve().sat());
  std::string text = trace.str();
  EXPECT_EQ(text.rfind("decision -1\n", 0), 0u) << text;
  EXPECT_NE(text.find("propagate 2\n"), std::string::npos) << text;
}

TEST(Sat, TraceShowsLearning) {
  Solver s(3, {{1, 2}, {1, -2}, {-1, 3}, {-1, -3}});
  std::ostringstream trace;
  s.set_trace(&trace);
  EXPECT_FALSE(s.solve().sat());
  EXPECT_NE(trace.str().find("conflict "), std::string::npos);
  EXPECT_NE(trace.str().find("learn "), std::string::npos);
}

TEST(Sat, GlobalCounter) {
  auto before = Solver::total_solve_calls();
  Solver a(1, {});
  Solver b(1, {});
  a.solve();
  b.solve();
  b.solve();
  EXPECT_EQ(Solver::total_solve_calls() - before, 3u);
}

TEST(Sat, RandomAgainstTruthTable) {
  std::mt19937 rng(99);
  for (int round = 0; round < 1000; ++round) {
    int n = std::uniform_int_distribution<int>(1, 10)(rng);
    int m = std::uniform_int_distribution<int>(0, 50)(rng);
    std::vector<Clause> cls;
    for (int i = 0; i < m; ++i) {
      Clause c;
      int len = std::uniform_int_distribution<int>(1, 3)(rng);
      for (int j = 0; j < len; ++j) {
        int v = std::uniform_int_distribution<int>(1, n)(rng);
        c.push_back(std::bernoulli_distribution(0.5)(rng) ? v : -v);
      }
      cls.push_back(c);
    }
    Solver s(n, cls);
    auto r = s.solve();
    ASSERT_EQ(r.sat(), brute_force(n, cls)) << "round " << round;
    if (r.sat()) ASSERT_TRUE(satisfies(cls, r.assignment));
  }
}

TEST(Sat, IncrementalMatchesFresh) {
  std::mt19937 rng(4);
  for (int round = 0; round < 200; ++round) {
    int n = 8;
    Solver inc(n, {});
    std::vector<Clause> all;
    for (int step = 0; step < 30; ++step) {
      Clause c;
      for (int j = 0; j < 3; ++j) {
        int v = std::uniform_int_distribution<int>(1, n)(rng);
        c.push_back(std::bernoulli_distribution(0.5)(rng) ? v : -v);
      }
      all.push_back(c);
      inc.add_clause(c);
      auto r = inc.solve();
      ASSERT_EQ(r.sat(), brute_force(n, all));
      if (!r.sat()) break;
      ASSERT_TRUE(satisfies(all, r.assignment));
    }
  }
}
