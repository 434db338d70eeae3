#include "boundsmith/sat.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace boundsmith::sat {

std::atomic<std::uint64_t> Solver::totalSolveCalls_{0};

Solver::Solver(int numVars, std::vector<Clause> base) : numVars_(numVars), base_(std::move(base)) {
  if (numVars_ < 0) throw SolverError("negative variable count");
  for (const auto& c : base_)
    for (int lit : c)
      if (lit == 0 || std::abs(lit) > numVars_)
        throw SolverError("literal " + std::to_string(lit) + " outside 1.." + std::to_string(numVars_));
  reset();
  for (const auto& c : base_) insert_clause(c);
}

void Solver::reset() {
  const auto n = static_cast<std::size_t>(numVars_) + 1;
  clauses_.clear();
  watches_.assign(2 * n, {});
  assigns_.assign(n, 0);
  level_.assign(n, 0);
  reason_.assign(n, -1);
  seen_.assign(n, 0);
  trail_.clear();
  trailLim_.clear();
  qhead_ = 0;
  nextVar_ = 1;
  inconsistent_ = false;
}

void Solver::add_clause(std::span<const int> literals, bool retractable) {
  for (int lit : literals)
    if (lit == 0 || std::abs(lit) > numVars_)
      throw SolverError("unknown variable in literal " + std::to_string(lit));
  (retractable ? retractable_ : persistent_).emplace_back(literals.begin(), literals.end());
  insert_clause(literals);
}

void Solver::rebuild(std::span<const Clause> keep) {
  for (const auto& c : keep)
    for (int lit : c)
      if (lit == 0 || std::abs(lit) > numVars_)
        throw SolverError("unknown variable in literal " + std::to_string(lit));
  retractable_.assign(keep.begin(), keep.end());
  reset();
  for (const auto& c : base_) insert_clause(c);
  for (const auto& c : persistent_) insert_clause(c);
  for (const auto& c : retractable_) insert_clause(c);
}

void Solver::insert_clause(std::span<const int> literals) {
  if (inconsistent_) return;
  // Clauses only arrive between solves, at decision level 0.
  std::vector<Lit> lits;
  for (int d : literals) lits.push_back(to_lit(d));
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::vector<Lit> kept;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i + 1 < lits.size() && lits[i + 1] == neg(lits[i])) return;  // tautology
    int v = value(lits[i]);
    if (v > 0) return;
    if (v == 0) kept.push_back(lits[i]);
  }
  if (kept.empty()) {
    inconsistent_ = true;
    return;
  }
  if (kept.size() == 1) {
    enqueue(kept[0], -1);
    if (propagate() >= 0) inconsistent_ = true;
    return;
  }
  attach(std::move(kept), false);
}

int Solver::attach(std::vector<Lit> lits, bool /*learned*/) {
  int idx = static_cast<int>(clauses_.size());
  watches_[static_cast<std::size_t>(lits[0])].push_back(idx);
  watches_[static_cast<std::size_t>(lits[1])].push_back(idx);
  clauses_.push_back(std::move(lits));
  return idx;
}

void Solver::enqueue(Lit l, int reason) {
  int v = var_of(l);
  assigns_[static_cast<std::size_t>(v)] = (l & 1) ? -1 : 1;
  level_[static_cast<std::size_t>(v)] = decision_level();
  reason_[static_cast<std::size_t>(v)] = reason;
  trail_.push_back(l);
  if (trace_ && reason >= 0) *trace_ << "propagate " << to_dimacs(l) << '\n';
}

int Solver::propagate() {
  while (qhead_ < trail_.size()) {
    Lit p = trail_[qhead_++];
    Lit falseLit = neg(p);
    auto& ws = watches_[static_cast<std::size_t>(falseLit)];
    std::size_t i = 0;
    std::size_t j = 0;
    int conflict = -1;
    while (i < ws.size()) {
      int ci = ws[i++];
      auto& c = clauses_[static_cast<std::size_t>(ci)];
      if (c[0] == falseLit) std::swap(c[0], c[1]);
      if (value(c[0]) > 0) {
        ws[j++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k) {
        if (value(c[k]) >= 0) {
          std::swap(c[1], c[k]);
          watches_[static_cast<std::size_t>(c[1])].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = ci;
      if (value(c[0]) < 0) {
        conflict = ci;
        while (i < ws.size()) ws[j++] = ws[i++];
      } else {
        enqueue(c[0], ci);
      }
    }
    ws.resize(j);
    if (conflict >= 0) {
      qhead_ = trail_.size();
      return conflict;
    }
  }
  return -1;
}

void Solver::analyze(int conflict, std::vector<Lit>& learned, int& backjump) {
  learned.assign(1, 0);
  int pathCount = 0;
  Lit p = -1;
  int idx = static_cast<int>(trail_.size()) - 1;
  int clause = conflict;
  do {
    const auto& c = clauses_[static_cast<std::size_t>(clause)];
    for (std::size_t k = (p == -1 ? 0 : 1); k < c.size(); ++k) {
      Lit q = c[k];
      int v = var_of(q);
      if (seen_[static_cast<std::size_t>(v)] || level_[static_cast<std::size_t>(v)] == 0) continue;
      seen_[static_cast<std::size_t>(v)] = 1;
      if (level_[static_cast<std::size_t>(v)] >= decision_level()) ++pathCount;
      else learned.push_back(q);
    }
    while (!seen_[static_cast<std::size_t>(var_of(trail_[static_cast<std::size_t>(idx)]))]) --idx;
    p = trail_[static_cast<std::size_t>(idx)];
    --idx;
    clause = reason_[static_cast<std::size_t>(var_of(p))];
    seen_[static_cast<std::size_t>(var_of(p))] = 0;
    --pathCount;
  } while (pathCount > 0);
  learned[0] = neg(p);

  backjump = 0;
  std::size_t maxAt = 1;
  for (std::size_t k = 1; k < learned.size(); ++k) {
    int lvl = level_[static_cast<std::size_t>(var_of(learned[k]))];
    if (lvl > backjump) {
      backjump = lvl;
      maxAt = k;
    }
  }
  if (learned.size() > 1) std::swap(learned[1], learned[maxAt]);
  for (Lit l : learned) seen_[static_cast<std::size_t>(var_of(l))] = 0;
}

void Solver::cancel_until(int level) {
  if (decision_level() <= level) return;
  std::size_t stop = static_cast<std::size_t>(trailLim_[static_cast<std::size_t>(level)]);
  for (std::size_t i = trail_.size(); i-- > stop;) {
    int v = var_of(trail_[i]);
    assigns_[static_cast<std::size_t>(v)] = 0;
    reason_[static_cast<std::size_t>(v)] = -1;
    nextVar_ = std::min(nextVar_, v);
  }
  trail_.resize(stop);
  trailLim_.resize(static_cast<std::size_t>(level));
  qhead_ = trail_.size();
}

bool Solver::pick_branch(Lit& out) {
  while (nextVar_ <= numVars_ && assigns_[static_cast<std::size_t>(nextVar_)] != 0) ++nextVar_;
  if (nextVar_ > numVars_) return false;
  out = 2 * nextVar_ + 1;
  return true;
}

SolveResult Solver::solve() {
  ++solveCalls_;
  ++totalSolveCalls_;
  SolveResult result;
  if (inconsistent_) return result;
  std::vector<Lit> learned;
  for (;;) {
    int conflict = propagate();
    if (conflict >= 0) {
      ++conflicts_;
      if (trace_) *trace_ << "conflict " << conflict << '\n';
      if (decision_level() == 0) {
        inconsistent_ = true;
        return result;
      }
      int backjump = 0;
      analyze(conflict, learned, backjump);
      cancel_until(backjump);
      if (trace_) {
        *trace_ << "learn";
        for (Lit l : learned) *trace_ << ' ' << to_dimacs(l);
        *trace_ << '\n';
      }
      if (learned.size() == 1) {
        enqueue(learned[0], -1);
      } else {
        Lit first = learned[0];
        int idx = attach(learned, true);
        enqueue(first, idx);
      }
      continue;
    }
    Lit decision;
    if (!pick_branch(decision)) {
      result.status = Status::Sat;
      result.assignment.assign(static_cast<std::size_t>(numVars_) + 1, false);
      for (int v = 1; v <= numVars_; ++v) result.assignment[static_cast<std::size_t>(v)] = assigns_[static_cast<std::size_t>(v)] > 0;
      cancel_until(0);
      return result;
    }
    ++decisions_;
    if (trace_) *trace_ << "decision " << to_dimacs(decision) << '\n';
    trailLim_.push_back(static_cast<int>(trail_.size()));
    enqueue(decision, -1);
  }
}

}  // namespace boundsmith::sat
