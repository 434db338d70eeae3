#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace boundsmith {

struct SourcePos {
  int line = 0;
  int column = 0;
};

enum class ErrorKind {
  Lex,
  Parse,
  UnknownName,
  ArityMismatch,
  CyclicExtends,
  DuplicateName,
  Invalid,
};

const char* to_string(ErrorKind kind);

/// Any problem with model text: lexing, parsing or name/arity resolution.
/// what() renders as "line:column: kind: message".
class ModelError : public std::runtime_error {
 public:
  ModelError(ErrorKind kind, SourcePos pos, const std::string& message);

  ErrorKind kind() const { return kind_; }
  SourcePos pos() const { return pos_; }
  const std::string& message() const { return message_; }

 private:
  ErrorKind kind_;
  SourcePos pos_;
  std::string message_;
};

enum class Mult { Lone, One, Some, Set };
const char* to_string(Mult mult);

enum class ExprKind {
  Name,  // unresolved identifier
  SigRef,
  FieldRef,
  VarRef,
  Union,
  Intersect,
  Difference,
  Join,
  Product,
  Transpose,
  Closure,
  ReflexiveClosure,
  None,
};

struct Expr {
  ExprKind kind = ExprKind::None;
  std::string name;
  std::vector<Expr> kids;
  SourcePos pos;
  // Filled by resolution: sig index, field index or quantifier depth.
  int index = -1;
  int arity = 0;

  static Expr ref(ExprKind kind, std::string name, SourcePos pos = {});
  static Expr unary(ExprKind kind, Expr operand, SourcePos pos = {});
  static Expr binary(ExprKind kind, Expr lhs, Expr rhs, SourcePos pos = {});
};

enum class FormulaKind {
  And,  // zero conjuncts is true
  Or,   // zero disjuncts is false
  Not,
  Implies,
  Iff,
  All,
  Some,
  No,
  In,
  NotIn,
  Equal,
  NotEqual,
  CardCmp,
  PredCall,
};

enum class CmpOp { Eq, Le, Ge, Lt, Gt };
const char* to_string(CmpOp op);

struct Formula {
  FormulaKind kind = FormulaKind::And;
  std::vector<Formula> subs;
  std::vector<Expr> exprs;
  std::string name;  // bound variable or predicate name
  CmpOp cmp = CmpOp::Eq;
  int constant = 0;
  SourcePos pos;
  int predIndex = -1;

  static Formula truth();
  static Formula conj(std::vector<Formula> parts);
  static Formula disj(std::vector<Formula> parts);
  static Formula negate(Formula f);
  static Formula compare(FormulaKind kind, Expr lhs, Expr rhs, SourcePos pos = {});
  static Formula card(Expr e, CmpOp op, int constant, SourcePos pos = {});
  static Formula quant(FormulaKind kind, std::string var, Expr domain, Formula body,
                       SourcePos pos = {});
  static Formula call(std::string pred, SourcePos pos = {});

  bool is_quantifier() const {
    return kind == FormulaKind::All || kind == FormulaKind::Some || kind == FormulaKind::No;
  }
};

struct FieldDecl {
  std::string name;
  Mult mult = Mult::Set;
  std::string target;
  SourcePos pos;
  int targetSig = -1;
  int ownerSig = -1;
};

struct SigDecl {
  std::string name;
  bool isAbstract = false;
  bool isOne = false;
  std::optional<std::string> parent;
  std::vector<FieldDecl> fields;
  int declIndex = 0;
  SourcePos pos;
  int parentIndex = -1;

  bool top_level() const { return !parent.has_value(); }
};

struct PredDecl {
  std::string name;
  Formula body;
  SourcePos pos;
};

struct Command {
  std::string name;
  Formula body;
  int scope = 1;
  SourcePos pos;
  // Byte range of the scope literal in the source text; used for scope-insensitive hashing.
  std::size_t scopeOffset = 0;
  std::size_t scopeLength = 0;
};

/// A field reference resolved to its declaring signature.
struct FieldRefInfo {
  int sig = -1;
  int field = -1;
};

struct Model {
  std::vector<SigDecl> sigs;
  std::vector<PredDecl> preds;
  std::vector<Formula> facts;
  std::vector<Command> commands;
  std::string source;
  bool resolved = false;

  // Flattened field list (sig declaration order, then field order); valid once resolved.
  std::vector<FieldRefInfo> fieldIndex;

  const SigDecl* find_sig(const std::string& name) const;
  int sig_index(const std::string& name) const;
  const PredDecl* find_pred(const std::string& name) const;
  const Command* find_command(const std::string& name) const;
  const FieldDecl& field(int flatIndex) const;
  int field_count() const { return static_cast<int>(fieldIndex.size()); }
  int root_of(int sig) const;
  std::vector<int> children_of(int sig) const;
};

}  // namespace boundsmith
