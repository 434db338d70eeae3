#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "boundsmith/bounds.hpp"
#include "boundsmith/circuit.hpp"
#include "boundsmith/model.hpp"

namespace boundsmith {

using Clause = std::vector<int>;

/// CNF produced for one (command, size): primary variables 1..numPrimary are the
/// tuple variables of `symbols`, auxiliaries follow.
struct CnfDocument {
  int numVars = 0;
  int numPrimary = 0;
  std::vector<Clause> clauses;
  Universe universe;
  TupleTable symbols;
  /// Retractable clause groups enforcing `#S = k` for abstract signatures.
  std::map<std::string, std::vector<Clause>> sizeFacts;

  bool trivially_unsat() const;
  /// DIMACS text with `c primary` and `c var` comment lines.
  std::string to_dimacs() const;
};

/// Clause-level cardinality constraint over literals. `=` emits both bounds; <=1 is
/// pairwise, larger bounds use a sequential counter. Auxiliary variables are taken
/// from `numVars` upward. An unsatisfiable request yields a single empty clause.
std::vector<Clause> encode_cardinality(std::span<const int> literals, CmpOp op, int bound,
                                       int& numVars);

/// Plain Tseitin: each reachable gate gets a variable with both implication directions.
class TseitinEncoder {
 public:
  TseitinEncoder(const Circuit& circuit, int firstAux)
      : circuit_(circuit), numVars_(firstAux - 1) {}

  /// CNF literal for a non-constant node, emitting gate definitions into `out`.
  int literal(int node, std::vector<Clause>& out);
  /// Emits clauses that force `node` true. Top-level conjunctions are split and
  /// top-level disjunctions become a single clause.
  void assert_true(int node, std::vector<Clause>& out);

  int& num_vars() { return numVars_; }

 private:
  const Circuit& circuit_;
  int numVars_;
  std::map<int, int> gateVar_;
};

}  // namespace boundsmith
