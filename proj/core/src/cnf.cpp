#include "boundsmith/cnf.hpp"

#include <cstdlib>
#include <sstream>

namespace boundsmith {

bool CnfDocument::trivially_unsat() const {
  for (const auto& c : clauses)
    if (c.empty()) return true;
  return false;
}

std::string CnfDocument::to_dimacs() const {
  std::ostringstream out;
  out << "c primary 1.." << numPrimary << '\n';
  for (const auto& e : symbols.entries())
    out << "c var " << e.var << ' ' << e.relation << ' ' << tuple_text(universe, e.tuple) << '\n';
  out << "p cnf " << numVars << ' ' << clauses.size() << '\n';
  for (const auto& c : clauses) {
    for (int lit : c) out << lit << ' ';
    out << "0\n";
  }
  return out.str();
}

namespace {

// Sinz sequential counter: at most `bound` (>= 1) of `xs`.
void sequential_at_most(std::span<const int> xs, int bound, int& numVars, std::vector<Clause>& out) {
  const int n = static_cast<int>(xs.size());
  // s[i][j]: at least j+1 of x_0..x_i are true (only the forward direction is encoded).
  std::vector<std::vector<int>> s(static_cast<std::size_t>(n - 1), std::vector<int>(static_cast<std::size_t>(bound)));
  for (auto& row : s)
    for (int& v : row) v = ++numVars;
  auto S = [&](int i, int j) { return s[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };
  auto X = [&](int i) { return xs[static_cast<std::size_t>(i)]; };

  out.push_back({-X(0), S(0, 0)});
  for (int j = 1; j < bound; ++j) out.push_back({-S(0, j)});
  for (int i = 1; i < n - 1; ++i) {
    out.push_back({-X(i), S(i, 0)});
    out.push_back({-S(i - 1, 0), S(i, 0)});
    for (int j = 1; j < bound; ++j) {
      out.push_back({-X(i), -S(i - 1, j - 1), S(i, j)});
      out.push_back({-S(i - 1, j), S(i, j)});
    }
    out.push_back({-X(i), -S(i - 1, bound - 1)});
  }
  out.push_back({-X(n - 1), -S(n - 2, bound - 1)});
}

void at_most(std::span<const int> xs, int bound, int& numVars, std::vector<Clause>& out) {
  const int n = static_cast<int>(xs.size());
  if (bound >= n) return;
  if (bound < 0) {
    out.push_back({});
    return;
  }
  if (bound == 0) {
    for (int x : xs) out.push_back({-x});
    return;
  }
  if (bound == 1) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) out.push_back({-xs[static_cast<std::size_t>(i)], -xs[static_cast<std::size_t>(j)]});
    return;
  }
  sequential_at_most(xs, bound, numVars, out);
}

void at_least(std::span<const int> xs, int bound, int& numVars, std::vector<Clause>& out) {
  const int n = static_cast<int>(xs.size());
  if (bound <= 0) return;
  if (bound > n) {
    out.push_back({});
    return;
  }
  if (bound == 1) {
    out.emplace_back(xs.begin(), xs.end());
    return;
  }
  // at least k of xs  <=>  at most n-k of their negations
  std::vector<int> negated;
  for (int x : xs) negated.push_back(-x);
  at_most(negated, n - bound, numVars, out);
}

}  // namespace

std::vector<Clause> encode_cardinality(std::span<const int> literals, CmpOp op, int bound,
                                       int& numVars) {
  std::vector<Clause> out;
  switch (op) {
    case CmpOp::Le: at_most(literals, bound, numVars, out); break;
    case CmpOp::Lt: at_most(literals, bound - 1, numVars, out); break;
    case CmpOp::Ge: at_least(literals, bound, numVars, out); break;
    case CmpOp::Gt: at_least(literals, bound + 1, numVars, out); break;
    case CmpOp::Eq:
      at_most(literals, bound, numVars, out);
      at_least(literals, bound, numVars, out);
      break;
  }
  return out;
}

int TseitinEncoder::literal(int node, std::vector<Clause>& out) {
  if (!circuit_.is_gate(node)) return node;
  int label = std::abs(node);
  auto found = gateVar_.find(label);
  if (found != gateVar_.end()) return node > 0 ? found->second : -found->second;

  std::vector<int> ins;
  for (int in : circuit_.gate_inputs(label)) ins.push_back(literal(in, out));
  int v = ++numVars_;
  gateVar_[label] = v;
  // v <-> AND(ins)
  Clause back{v};
  for (int in : ins) {
    out.push_back({-v, in});
    back.push_back(-in);
  }
  out.push_back(std::move(back));
  return node > 0 ? v : -v;
}

void TseitinEncoder::assert_true(int node, std::vector<Clause>& out) {
  if (node == Circuit::kTrue) return;
  if (node == Circuit::kFalse) {
    out.push_back({});
    return;
  }
  if (circuit_.is_gate(node)) {
    const auto& ins = circuit_.gate_inputs(node);
    if (node > 0) {
      for (int in : ins) assert_true(in, out);
    } else {
      Clause c;
      for (int in : ins) c.push_back(-literal(in, out));
      out.push_back(std::move(c));
    }
    return;
  }
  out.push_back({node});
}

}  // namespace boundsmith
