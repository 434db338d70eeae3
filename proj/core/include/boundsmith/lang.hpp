#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "boundsmith/model.hpp"

namespace boundsmith {

/// Parses model text into an unresolved syntax tree. Throws ModelError (Lex/Parse)
/// with the position of the offending token and the set of tokens that would have
/// been accepted there.
Model parse_model(std::string_view source);

/// Binds every name, computes and checks arities, validates quantifier scoping and
/// the inheritance forest. Idempotent on an already-resolved model.
Model resolve_model(Model model);

/// parse_model followed by resolve_model.
Model load_model(std::string_view source);

/// Phase order for staged enumeration: declaration order, `one` signatures excluded.
std::vector<std::string> signature_order(const Model& model);

std::string print_expr(const Expr& e);
std::string print_formula(const Formula& f);
/// Renders a model back to source text that parses to a structurally identical tree.
std::string print_model(const Model& model);

bool structurally_equal(const Expr& a, const Expr& b);
bool structurally_equal(const Formula& a, const Formula& b);
bool structurally_equal(const Model& a, const Model& b);

}  // namespace boundsmith
