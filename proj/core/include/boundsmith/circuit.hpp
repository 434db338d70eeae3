#pragma once

#include <climits>
#include <map>
#include <span>
#include <vector>

namespace boundsmith {

/// Hash-consed AND/NOT circuit over primary inputs 1..P.
///
/// A node is a signed label: |label| <= P is an input, larger labels are AND gates,
/// negation flips the sign. kTrue/kFalse are folded eagerly, so a node built only from
/// constants is always a constant.
class Circuit {
 public:
  static constexpr int kTrue = INT_MAX;
  static constexpr int kFalse = -INT_MAX;

  explicit Circuit(int numInputs) : numInputs_(numInputs) {}

  int num_inputs() const { return numInputs_; }
  int num_gates() const { return static_cast<int>(gates_.size()); }
  bool is_constant(int node) const { return node == kTrue || node == kFalse; }
  bool is_input(int node) const { return !is_constant(node) && std::abs(node) <= numInputs_; }
  bool is_gate(int node) const { return !is_constant(node) && std::abs(node) > numInputs_; }
  /// Inputs of the AND gate |node|.
  const std::vector<int>& gate_inputs(int node) const;

  static int constant(bool value) { return value ? kTrue : kFalse; }
  static int negate(int node) { return -node; }

  int and_of(std::vector<int> inputs);
  int or_of(std::vector<int> inputs);
  int and2(int a, int b) { return and_of({a, b}); }
  int or2(int a, int b) { return or_of({a, b}); }
  int implies(int a, int b) { return or2(-a, b); }
  int iff(int a, int b) { return and2(implies(a, b), implies(b, a)); }

  /// "At least `threshold` of `nodes` are true": pairwise for threshold 2, a sequential
  /// counter above that.
  int at_least(std::span<const int> nodes, int threshold);
  int at_most(std::span<const int> nodes, int bound) { return -at_least(nodes, bound + 1); }

  /// Evaluates a node under an assignment of the inputs (index 0 unused).
  bool evaluate(int node, const std::vector<bool>& inputs) const;

 private:
  int numInputs_;
  std::vector<std::vector<int>> gates_;
  std::map<std::vector<int>, int> unique_;
};

}  // namespace boundsmith
