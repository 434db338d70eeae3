#include "boundsmith/model.hpp"

#include <sstream>

namespace boundsmith {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Lex: return "lex-error";
    case ErrorKind::Parse: return "parse-error";
    case ErrorKind::UnknownName: return "unknown-name";
    case ErrorKind::ArityMismatch: return "arity-mismatch";
    case ErrorKind::CyclicExtends: return "cyclic-extends";
    case ErrorKind::DuplicateName: return "duplicate-name";
    case ErrorKind::Invalid: return "invalid";
  }
  return "error";
}

namespace {
std::string render(ErrorKind kind, SourcePos pos, const std::string& message) {
  std::ostringstream out;
  out << pos.line << ':' << pos.column << ": " << to_string(kind) << ": " << message;
  return out.str();
}
}  // namespace

ModelError::ModelError(ErrorKind kind, SourcePos pos, const std::string& message)
    : std::runtime_error(render(kind, pos, message)), kind_(kind), pos_(pos), message_(message) {}

const char* to_string(Mult mult) {
  switch (mult) {
    case Mult::Lone: return "lone";
    case Mult::One: return "one";
    case Mult::Some: return "some";
    case Mult::Set: return "set";
  }
  return "set";
}

const char* to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Le: return "<=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Lt: return "<";
    case CmpOp::Gt: return ">";
  }
  return "=";
}

Expr Expr::ref(ExprKind kind, std::string name, SourcePos pos) {
  Expr e;
  e.kind = kind;
  e.name = std::move(name);
  e.pos = pos;
  return e;
}

Expr Expr::unary(ExprKind kind, Expr operand, SourcePos pos) {
  Expr e;
  e.kind = kind;
  e.pos = pos;
  e.kids.push_back(std::move(operand));
  return e;
}

Expr Expr::binary(ExprKind kind, Expr lhs, Expr rhs, SourcePos pos) {
  Expr e;
  e.kind = kind;
  e.pos = pos;
  e.kids.push_back(std::move(lhs));
  e.kids.push_back(std::move(rhs));
  return e;
}

Formula Formula::truth() { return Formula{}; }

Formula Formula::conj(std::vector<Formula> parts) {
  Formula f;
  f.kind = FormulaKind::And;
  f.subs = std::move(parts);
  return f;
}

Formula Formula::disj(std::vector<Formula> parts) {
  if (parts.size() == 1) return std::move(parts.front());
  Formula f;
  f.kind = FormulaKind::Or;
  f.subs = std::move(parts);
  return f;
}

Formula Formula::negate(Formula inner) {
  Formula f;
  f.kind = FormulaKind::Not;
  f.pos = inner.pos;
  f.subs.push_back(std::move(inner));
  return f;
}

Formula Formula::compare(FormulaKind kind, Expr lhs, Expr rhs, SourcePos pos) {
  Formula f;
  f.kind = kind;
  f.pos = pos;
  f.exprs.push_back(std::move(lhs));
  f.exprs.push_back(std::move(rhs));
  return f;
}

Formula Formula::card(Expr e, CmpOp op, int constant, SourcePos pos) {
  Formula f;
  f.kind = FormulaKind::CardCmp;
  f.pos = pos;
  f.cmp = op;
  f.constant = constant;
  f.exprs.push_back(std::move(e));
  return f;
}

Formula Formula::quant(FormulaKind kind, std::string var, Expr domain, Formula body,
                       SourcePos pos) {
  Formula f;
  f.kind = kind;
  f.pos = pos;
  f.name = std::move(var);
  f.exprs.push_back(std::move(domain));
  f.subs.push_back(std::move(body));
  return f;
}

Formula Formula::call(std::string pred, SourcePos pos) {
  Formula f;
  f.kind = FormulaKind::PredCall;
  f.name = std::move(pred);
  f.pos = pos;
  return f;
}

const SigDecl* Model::find_sig(const std::string& name) const {
  for (const auto& s : sigs)
    if (s.name == name) return &s;
  return nullptr;
}

int Model::sig_index(const std::string& name) const {
  for (std::size_t i = 0; i < sigs.size(); ++i)
    if (sigs[i].name == name) return static_cast<int>(i);
  return -1;
}

const PredDecl* Model::find_pred(const std::string& name) const {
  for (const auto& p : preds)
    if (p.name == name) return &p;
  return nullptr;
}

const Command* Model::find_command(const std::string& name) const {
  for (const auto& c : commands)
    if (c.name == name) return &c;
  return nullptr;
}

const FieldDecl& Model::field(int flatIndex) const {
  const auto& ref = fieldIndex.at(static_cast<std::size_t>(flatIndex));
  return sigs.at(static_cast<std::size_t>(ref.sig)).fields.at(static_cast<std::size_t>(ref.field));
}

int Model::root_of(int sig) const {
  int cur = sig;
  // Resolution guarantees the parent chain is acyclic.
  while (sigs.at(static_cast<std::size_t>(cur)).parentIndex >= 0)
    cur = sigs[static_cast<std::size_t>(cur)].parentIndex;
  return cur;
}

std::vector<int> Model::children_of(int sig) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < sigs.size(); ++i)
    if (sigs[i].parentIndex == sig) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace boundsmith
