#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "boundsmith/cnf.hpp"
#include "boundsmith/model.hpp"

namespace boundsmith {

using AtomPair = std::pair<std::string, std::string>;

/// A concrete instance: atoms per signature and tuples per field.
struct Scenario {
  int size = 0;
  /// Every signature in declaration order, atoms in pool order.
  std::vector<std::pair<std::string, std::vector<std::string>>> sigs;
  /// Every field in declaration order, tuples lexicographic by atom index.
  std::vector<std::pair<std::string, std::vector<AtomPair>>> fields;
  int ordinal = 0;
  std::optional<std::string> phase;

  const std::vector<std::string>* atoms_of(const std::string& sig) const;
  const std::vector<AtomPair>* tuples_of(const std::string& field) const;
};

/// Reads a scenario off a total assignment over the primary variables of `cnf`.
Scenario decode_scenario(const Model& m, const CnfDocument& cnf, const std::vector<bool>& assignment,
                         std::optional<std::string> phase, int ordinal);

/// Negation of the assignment restricted to the primary variables 1..numPrimary.
Clause blocking_clause(const std::vector<bool>& assignment, int numPrimary);
/// Same clause, recovered from a decoded scenario.
Clause blocking_clause(const Scenario& s, const CnfDocument& cnf);

/// Exact identity of a scenario (atom names as decoded).
std::string scenario_key(const Scenario& s);
/// Identity up to renaming atoms within each pool to 0..n-1, preserving order. Lets
/// scenarios found under different universe bounds be compared.
std::string canonical_key(const Model& m, const Scenario& s);

nlohmann::ordered_json to_json(const Scenario& s);
/// Inverse of to_json. Key order matters, so parse with ordered_json.
Scenario scenario_from_json(const nlohmann::ordered_json& doc);

/// Graphviz rendering: atoms as nodes shaped per top-level signature, tuples as edges.
std::string to_dot(const Model& m, const Scenario& s);
/// Short human-readable rendering.
std::string to_text(const Scenario& s);

}  // namespace boundsmith
