#pragma once

#include <string>
#include <vector>

#include "boundsmith/cnf.hpp"
#include "boundsmith/model.hpp"

namespace boundsmith {

struct TranslateOptions {
  /// Abstract signatures whose `#S = k` fact is encoded as a separate clause group.
  std::vector<std::string> sizeFactSigs;
};

/// Grounds `command`'s body together with all facts, typing, multiplicity and
/// inheritance constraints over the universe bounded at `size`.
CnfDocument translate(const Model& m, const Command& command, int size,
                      const TranslateOptions& options = {});

/// Field typing: `f in Owner -> Target` for every field.
std::vector<Formula> typing_facts(const Model& m);

/// Field multiplicities, then `#S = 1` per `one` signature, then inheritance facts
/// (extension in parent, siblings disjoint, abstract parent = union of extensions).
std::vector<Formula> implicit_facts(const Model& m);

/// Resolves a formula built against `m` (names only) so it can be grounded.
Formula resolve_formula(const Model& m, Formula f);

}  // namespace boundsmith
