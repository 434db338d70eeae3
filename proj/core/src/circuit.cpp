#include "boundsmith/circuit.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace boundsmith {

const std::vector<int>& Circuit::gate_inputs(int node) const {
  int g = std::abs(node) - numInputs_ - 1;
  return gates_.at(static_cast<std::size_t>(g));
}

int Circuit::and_of(std::vector<int> inputs) {
  std::vector<int> kept;
  kept.reserve(inputs.size());
  for (int x : inputs) {
    if (x == kFalse) return kFalse;
    if (x != kTrue) kept.push_back(x);
  }
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  for (int x : kept)
    if (x > 0 && std::binary_search(kept.begin(), kept.end(), -x)) return kFalse;
  if (kept.empty()) return kTrue;
  if (kept.size() == 1) return kept.front();
  auto [it, inserted] = unique_.try_emplace(kept, 0);
  if (inserted) {
    gates_.push_back(kept);
    it->second = numInputs_ + static_cast<int>(gates_.size());
  }
  return it->second;
}

int Circuit::or_of(std::vector<int> inputs) {
  for (int& x : inputs) x = -x;
  return -and_of(std::move(inputs));
}

int Circuit::at_least(std::span<const int> nodes, int threshold) {
  std::vector<int> xs;
  for (int x : nodes) {
    if (x == kTrue) --threshold;
    else if (x != kFalse) xs.push_back(x);
  }
  const int n = static_cast<int>(xs.size());
  if (threshold <= 0) return kTrue;
  if (threshold > n) return kFalse;
  if (threshold == 1) return or_of(xs);
  if (threshold == n) return and_of(xs);
  if (threshold == 2) {
    std::vector<int> pairs;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) pairs.push_back(and2(xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(j)]));
    return or_of(pairs);
  }
  // counts[j] = "at least j of the inputs seen so far"
  std::vector<int> counts(static_cast<std::size_t>(threshold) + 1, kFalse);
  counts[0] = kTrue;
  for (int x : xs) {
    for (int j = threshold; j >= 1; --j)
      counts[static_cast<std::size_t>(j)] =
          or2(counts[static_cast<std::size_t>(j)], and2(x, counts[static_cast<std::size_t>(j) - 1]));
  }
  return counts[static_cast<std::size_t>(threshold)];
}

bool Circuit::evaluate(int node, const std::vector<bool>& inputs) const {
  if (node == kTrue) return true;
  if (node == kFalse) return false;
  bool positive = node > 0;
  int label = std::abs(node);
  bool value;
  if (label <= numInputs_) {
    value = inputs.at(static_cast<std::size_t>(label));
  } else {
    value = true;
    for (int in : gate_inputs(label))
      if (!evaluate(in, inputs)) {
        value = false;
        break;
      }
  }
  return positive ? value : !value;
}

}  // namespace boundsmith
