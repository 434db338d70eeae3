#pragma once

#include <atomic>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "boundsmith/cnf.hpp"

namespace boundsmith::sat {

enum class Status { Sat, Unsat };

struct SolveResult {
  Status status = Status::Unsat;
  /// On Sat: value of every variable, index 0 unused.
  std::vector<bool> assignment;

  bool sat() const { return status == Status::Sat; }
};

class SolverError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Deterministic CDCL solver (two watched literals, first-UIP learning, no restarts).
/// Decisions always pick the lowest-index unassigned variable, false first.
///
/// Clauses are either part of the base (given at construction), persistent, or
/// retractable. rebuild() drops retractable and learned clauses, keeps base and
/// persistent ones, and adds `keep` as the new retractable set.
class Solver {
 public:
  Solver(int numVars, std::vector<Clause> base);
  explicit Solver(const CnfDocument& cnf) : Solver(cnf.numVars, cnf.clauses) {}

  int num_vars() const { return numVars_; }

  void add_clause(std::span<const int> literals, bool retractable = false);
  SolveResult solve();
  void rebuild(std::span<const Clause> keep);

  /// Writes decision/propagate/conflict/learn lines when set.
  void set_trace(std::ostream* trace) { trace_ = trace; }

  std::uint64_t solve_calls() const { return solveCalls_; }
  std::uint64_t conflicts() const { return conflicts_; }
  std::uint64_t decisions() const { return decisions_; }

  /// Solve calls across every solver in the process.
  static std::uint64_t total_solve_calls() { return totalSolveCalls_.load(); }

 private:
  using Lit = int;  // 2*var + (negative ? 1 : 0)

  static Lit to_lit(int dimacs) { return dimacs > 0 ? 2 * dimacs : 2 * -dimacs + 1; }
  static int to_dimacs(Lit l) { return (l & 1) ? -(l >> 1) : (l >> 1); }
  static int var_of(Lit l) { return l >> 1; }
  static Lit neg(Lit l) { return l ^ 1; }

  // 1 true, -1 false, 0 unassigned
  int value(Lit l) const {
    int v = assigns_[static_cast<std::size_t>(var_of(l))];
    return (l & 1) ? -v : v;
  }

  void reset();
  void insert_clause(std::span<const int> literals);
  int attach(std::vector<Lit> lits, bool learned);
  void enqueue(Lit l, int reason);
  int propagate();
  void analyze(int conflict, std::vector<Lit>& learned, int& backjump);
  void cancel_until(int level);
  int decision_level() const { return static_cast<int>(trailLim_.size()); }
  bool pick_branch(Lit& out);

  int numVars_;
  std::vector<Clause> base_;
  std::vector<Clause> persistent_;
  std::vector<Clause> retractable_;

  std::vector<std::vector<Lit>> clauses_;
  std::vector<std::vector<int>> watches_;
  std::vector<int> assigns_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<Lit> trail_;
  std::vector<int> trailLim_;
  std::vector<char> seen_;
  std::size_t qhead_ = 0;
  int nextVar_ = 1;
  bool inconsistent_ = false;

  std::ostream* trace_ = nullptr;
  std::uint64_t solveCalls_ = 0;
  std::uint64_t conflicts_ = 0;
  std::uint64_t decisions_ = 0;
  static std::atomic<std::uint64_t> totalSolveCalls_;
};

}  // namespace boundsmith::sat
