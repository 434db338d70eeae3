#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "boundsmith/lang.hpp"

namespace boundsmith {

// ---------------------------------------------------------------------------
// Resolution

namespace {

class Resolver {
 public:
  explicit Resolver(Model& m) : m_(m) {}

  void run() {
    check_sigs();
    check_inheritance();
    check_fields();
    check_preds();
    for (auto& p : m_.preds) resolve_formula(p.body);
    for (auto& f : m_.facts) resolve_formula(f);
    std::set<std::string> commandNames;
    for (auto& c : m_.commands) {
      if (c.scope < 1) throw ModelError(ErrorKind::Invalid, c.pos, "scope must be at least 1");
      if (!commandNames.insert(c.name).second)
        throw ModelError(ErrorKind::DuplicateName, c.pos, "duplicate command '" + c.name + "'");
      resolve_formula(c.body);
    }
    check_pred_recursion();
    m_.resolved = true;
  }

 private:
  void check_sigs() {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < m_.sigs.size(); ++i) {
      auto& s = m_.sigs[i];
      s.declIndex = static_cast<int>(i);
      if (!seen.insert(s.name).second)
        throw ModelError(ErrorKind::DuplicateName, s.pos, "duplicate signature '" + s.name + "'");
      if (s.isAbstract && s.isOne)
        throw ModelError(ErrorKind::Invalid, s.pos, "a signature cannot be both abstract and one");
    }
  }

  void check_inheritance() {
    for (auto& s : m_.sigs) {
      s.parentIndex = -1;
      if (!s.parent) continue;
      int p = m_.sig_index(*s.parent);
      if (p < 0)
        throw ModelError(ErrorKind::UnknownName, s.pos, "unknown signature '" + *s.parent + "'");
      s.parentIndex = p;
    }
    for (const auto& s : m_.sigs) {
      std::set<int> visited;
      int cur = s.declIndex;
      while (cur >= 0) {
        if (!visited.insert(cur).second)
          throw ModelError(ErrorKind::CyclicExtends, s.pos,
                           "signature '" + s.name + "' extends itself transitively");
        cur = m_.sigs[static_cast<std::size_t>(cur)].parentIndex;
      }
    }
  }

  void check_fields() {
    std::set<std::string> names;
    for (const auto& s : m_.sigs) names.insert(s.name);
    m_.fieldIndex.clear();
    for (std::size_t si = 0; si < m_.sigs.size(); ++si) {
      auto& s = m_.sigs[si];
      for (std::size_t fi = 0; fi < s.fields.size(); ++fi) {
        auto& f = s.fields[fi];
        if (!names.insert(f.name).second)
          throw ModelError(ErrorKind::DuplicateName, f.pos, "duplicate name '" + f.name + "'");
        f.targetSig = m_.sig_index(f.target);
        if (f.targetSig < 0)
          throw ModelError(ErrorKind::UnknownName, f.pos, "unknown signature '" + f.target + "'");
        f.ownerSig = static_cast<int>(si);
        m_.fieldIndex.push_back({static_cast<int>(si), static_cast<int>(fi)});
      }
    }
  }

  void check_preds() {
    std::set<std::string> seen;
    for (const auto& p : m_.preds)
      if (!seen.insert(p.name).second)
        throw ModelError(ErrorKind::DuplicateName, p.pos, "duplicate predicate '" + p.name + "'");
  }

  void collect_calls(const Formula& f, std::set<int>& out) {
    if (f.kind == FormulaKind::PredCall) out.insert(f.predIndex);
    for (const auto& s : f.subs) collect_calls(s, out);
  }

  void check_pred_recursion() {
    std::vector<std::set<int>> calls(m_.preds.size());
    for (std::size_t i = 0; i < m_.preds.size(); ++i) collect_calls(m_.preds[i].body, calls[i]);
    // 0 = unvisited, 1 = on stack, 2 = done
    std::vector<int> state(m_.preds.size(), 0);
    std::function<void(int)> visit = [&](int p) {
      state[static_cast<std::size_t>(p)] = 1;
      for (int q : calls[static_cast<std::size_t>(p)]) {
        if (state[static_cast<std::size_t>(q)] == 1)
          throw ModelError(ErrorKind::Invalid, m_.preds[static_cast<std::size_t>(q)].pos,
                           "recursive predicate '" + m_.preds[static_cast<std::size_t>(q)].name +
                               "'");
        if (state[static_cast<std::size_t>(q)] == 0) visit(q);
      }
      state[static_cast<std::size_t>(p)] = 2;
    };
    for (std::size_t i = 0; i < m_.preds.size(); ++i)
      if (state[i] == 0) visit(static_cast<int>(i));
  }

  void resolve_formula(Formula& f) {
    switch (f.kind) {
      case FormulaKind::And:
      case FormulaKind::Or:
      case FormulaKind::Not:
      case FormulaKind::Implies:
      case FormulaKind::Iff:
        for (auto& s : f.subs) resolve_formula(s);
        return;
      case FormulaKind::All:
      case FormulaKind::Some:
      case FormulaKind::No: {
        resolve_expr(f.exprs.at(0));
        if (f.exprs[0].arity != 1)
          throw ModelError(ErrorKind::ArityMismatch, f.exprs[0].pos,
                           "quantifier domain must be a set (arity 1), got arity " +
                               std::to_string(f.exprs[0].arity));
        scope_.push_back(f.name);
        resolve_formula(f.subs.at(0));
        scope_.pop_back();
        return;
      }
      case FormulaKind::In:
      case FormulaKind::NotIn:
      case FormulaKind::Equal:
      case FormulaKind::NotEqual:
        resolve_expr(f.exprs.at(0));
        resolve_expr(f.exprs.at(1));
        if (f.exprs[0].arity != f.exprs[1].arity)
          throw ModelError(ErrorKind::ArityMismatch, f.pos,
                           "comparison between arity " + std::to_string(f.exprs[0].arity) +
                               " and arity " + std::to_string(f.exprs[1].arity));
        return;
      case FormulaKind::CardCmp:
        resolve_expr(f.exprs.at(0));
        if (f.constant < 0)
          throw ModelError(ErrorKind::Invalid, f.pos, "cardinality bound must be nonnegative");
        return;
      case FormulaKind::PredCall: {
        int idx = -1;
        for (std::size_t i = 0; i < m_.preds.size(); ++i)
          if (m_.preds[i].name == f.name) idx = static_cast<int>(i);
        if (idx < 0)
          throw ModelError(ErrorKind::UnknownName, f.pos, "unknown predicate '" + f.name + "'");
        f.predIndex = idx;
        return;
      }
    }
  }

  void resolve_expr(Expr& e) {
    switch (e.kind) {
      case ExprKind::Name:
      case ExprKind::SigRef:
      case ExprKind::FieldRef:
      case ExprKind::VarRef: {
        for (std::size_t d = scope_.size(); d-- > 0;) {
          if (scope_[d] == e.name) {
            e.kind = ExprKind::VarRef;
            e.index = static_cast<int>(d);
            e.arity = 1;
            return;
          }
        }
        if (int s = m_.sig_index(e.name); s >= 0) {
          e.kind = ExprKind::SigRef;
          e.index = s;
          e.arity = 1;
          return;
        }
        for (int i = 0; i < m_.field_count(); ++i) {
          if (m_.field(i).name == e.name) {
            e.kind = ExprKind::FieldRef;
            e.index = i;
            e.arity = 2;
            return;
          }
        }
        throw ModelError(ErrorKind::UnknownName, e.pos, "unknown name '" + e.name + "'");
      }
      case ExprKind::None:
        e.arity = 1;
        return;
      case ExprKind::Union:
      case ExprKind::Intersect:
      case ExprKind::Difference:
        resolve_expr(e.kids.at(0));
        resolve_expr(e.kids.at(1));
        if (e.kids[0].arity != e.kids[1].arity)
          throw ModelError(ErrorKind::ArityMismatch, e.pos,
                           "operands have arity " + std::to_string(e.kids[0].arity) + " and " +
                               std::to_string(e.kids[1].arity));
        e.arity = e.kids[0].arity;
        return;
      case ExprKind::Join:
        resolve_expr(e.kids.at(0));
        resolve_expr(e.kids.at(1));
        e.arity = e.kids[0].arity + e.kids[1].arity - 2;
        if (e.arity < 1)
          throw ModelError(ErrorKind::ArityMismatch, e.pos, "join of two sets has arity 0");
        return;
      case ExprKind::Product:
        resolve_expr(e.kids.at(0));
        resolve_expr(e.kids.at(1));
        e.arity = e.kids[0].arity + e.kids[1].arity;
        return;
      case ExprKind::Transpose:
      case ExprKind::Closure:
      case ExprKind::ReflexiveClosure:
        resolve_expr(e.kids.at(0));
        if (e.kids[0].arity != 2)
          throw ModelError(ErrorKind::ArityMismatch, e.pos,
                           "operator needs a binary relation, got arity " +
                               std::to_string(e.kids[0].arity));
        e.arity = 2;
        return;
    }
  }

  Model& m_;
  std::vector<std::string> scope_;
};

}  // namespace

Model resolve_model(Model model) {
  Resolver(model).run();
  return model;
}

std::vector<std::string> signature_order(const Model& model) {
  std::vector<std::string> out;
  for (const auto& s : model.sigs)
    if (!s.isOne) out.push_back(s.name);
  return out;
}

// ---------------------------------------------------------------------------
// Printing

std::string print_expr(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Name:
    case ExprKind::SigRef:
    case ExprKind::FieldRef:
    case ExprKind::VarRef:
      return e.name;
    case ExprKind::None: return "none";
    case ExprKind::Transpose: return "~" + print_expr(e.kids[0]);
    case ExprKind::Closure: return "^" + print_expr(e.kids[0]);
    case ExprKind::ReflexiveClosure: return "*" + print_expr(e.kids[0]);
    default: break;
  }
  const char* op = "";
  switch (e.kind) {
    case ExprKind::Union: op = " + "; break;
    case ExprKind::Intersect: op = " & "; break;
    case ExprKind::Difference: op = " - "; break;
    case ExprKind::Join: op = "."; break;
    case ExprKind::Product: op = " -> "; break;
    default: break;
  }
  return "(" + print_expr(e.kids[0]) + op + print_expr(e.kids[1]) + ")";
}

namespace {

std::string print_block(const Formula& f, const std::string& indent) {
  std::string out = "{\n";
  for (const auto& s : f.subs) out += indent + "  " + print_formula(s) + "\n";
  out += indent + "}";
  return out;
}

std::string join_formulas(const std::vector<Formula>& parts, const char* sep) {
  std::string out = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += print_formula(parts[i]);
  }
  return out + ")";
}

}  // namespace

std::string print_formula(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::And:
      if (f.subs.size() < 2) {
        std::string out = "{";
        for (const auto& s : f.subs) out += " " + print_formula(s);
        return out + " }";
      }
      return join_formulas(f.subs, " and ");
    case FormulaKind::Or:
      if (f.subs.empty()) return "(not { })";
      if (f.subs.size() == 1) return print_formula(f.subs[0]);
      return join_formulas(f.subs, " or ");
    case FormulaKind::Not: return "(not " + print_formula(f.subs[0]) + ")";
    case FormulaKind::Implies: return join_formulas(f.subs, " implies ");
    case FormulaKind::Iff: return join_formulas(f.subs, " iff ");
    case FormulaKind::All:
    case FormulaKind::Some:
    case FormulaKind::No: {
      const char* q = f.kind == FormulaKind::All ? "all" : f.kind == FormulaKind::Some ? "some" : "no";
      return std::string("(") + q + " " + f.name + ": " + print_expr(f.exprs[0]) + " | " +
             print_formula(f.subs[0]) + ")";
    }
    case FormulaKind::In: return "(" + print_expr(f.exprs[0]) + " in " + print_expr(f.exprs[1]) + ")";
    case FormulaKind::NotIn:
      return "(" + print_expr(f.exprs[0]) + " !in " + print_expr(f.exprs[1]) + ")";
    case FormulaKind::Equal: return "(" + print_expr(f.exprs[0]) + " = " + print_expr(f.exprs[1]) + ")";
    case FormulaKind::NotEqual:
      return "(" + print_expr(f.exprs[0]) + " != " + print_expr(f.exprs[1]) + ")";
    case FormulaKind::CardCmp:
      return "(#" + print_expr(f.exprs[0]) + " " + to_string(f.cmp) + " " +
             std::to_string(f.constant) + ")";
    case FormulaKind::PredCall: return f.name;
  }
  return "";
}

std::string print_model(const Model& model) {
  std::ostringstream out;
  for (const auto& s : model.sigs) {
    if (s.isAbstract) out << "abstract ";
    if (s.isOne) out << "one ";
    out << "sig " << s.name;
    if (s.parent) out << " extends " << *s.parent;
    out << " {";
    for (std::size_t i = 0; i < s.fields.size(); ++i) {
      out << (i ? ", " : " ") << s.fields[i].name << ": " << to_string(s.fields[i].mult) << ' '
          << s.fields[i].target;
    }
    out << (s.fields.empty() ? "}" : " }") << '\n';
  }
  for (const auto& p : model.preds) {
    const Formula& body = p.body;
    out << "pred " << p.name << ' ';
    if (body.kind == FormulaKind::And) out << print_block(body, "");
    else out << "{\n  " << print_formula(body) << "\n}";
    out << '\n';
  }
  for (const auto& f : model.facts) {
    out << "fact ";
    if (f.kind == FormulaKind::And) out << print_block(f, "");
    else out << "{\n  " << print_formula(f) << "\n}";
    out << '\n';
  }
  for (const auto& c : model.commands) {
    out << "run ";
    if (c.body.kind == FormulaKind::PredCall && c.body.name == c.name) {
      out << c.name;
    } else {
      if (c.name.rfind("run$", 0) != 0) out << c.name << ' ';
      if (c.body.kind == FormulaKind::And) out << print_block(c.body, "");
      else out << "{ " << print_formula(c.body) << " }";
    }
    out << " for " << c.scope << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Structural equality (ignores positions and resolution annotations)

bool structurally_equal(const Expr& a, const Expr& b) {
  auto refKind = [](ExprKind k) {
    return k == ExprKind::Name || k == ExprKind::SigRef || k == ExprKind::FieldRef ||
           k == ExprKind::VarRef;
  };
  if (refKind(a.kind) || refKind(b.kind)) return refKind(a.kind) && refKind(b.kind) && a.name == b.name;
  if (a.kind != b.kind || a.kids.size() != b.kids.size()) return false;
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!structurally_equal(a.kids[i], b.kids[i])) return false;
  return true;
}

bool structurally_equal(const Formula& a, const Formula& b) {
  if (a.kind != b.kind || a.subs.size() != b.subs.size() || a.exprs.size() != b.exprs.size())
    return false;
  if (a.name != b.name) return false;
  if (a.kind == FormulaKind::CardCmp && (a.cmp != b.cmp || a.constant != b.constant)) return false;
  for (std::size_t i = 0; i < a.subs.size(); ++i)
    if (!structurally_equal(a.subs[i], b.subs[i])) return false;
  for (std::size_t i = 0; i < a.exprs.size(); ++i)
    if (!structurally_equal(a.exprs[i], b.exprs[i])) return false;
  return true;
}

bool structurally_equal(const Model& a, const Model& b) {
  if (a.sigs.size() != b.sigs.size() || a.preds.size() != b.preds.size() ||
      a.facts.size() != b.facts.size() || a.commands.size() != b.commands.size())
    return false;
  for (std::size_t i = 0; i < a.sigs.size(); ++i) {
    const auto& x = a.sigs[i];
    const auto& y = b.sigs[i];
    if (x.name != y.name || x.isAbstract != y.isAbstract || x.isOne != y.isOne ||
        x.parent != y.parent || x.fields.size() != y.fields.size())
      return false;
    for (std::size_t j = 0; j < x.fields.size(); ++j)
      if (x.fields[j].name != y.fields[j].name || x.fields[j].mult != y.fields[j].mult ||
          x.fields[j].target != y.fields[j].target)
        return false;
  }
  for (std::size_t i = 0; i < a.preds.size(); ++i)
    if (a.preds[i].name != b.preds[i].name || !structurally_equal(a.preds[i].body, b.preds[i].body))
      return false;
  for (std::size_t i = 0; i < a.facts.size(); ++i)
    if (!structurally_equal(a.facts[i], b.facts[i])) return false;
  for (std::size_t i = 0; i < a.commands.size(); ++i)
    if (a.commands[i].name != b.commands[i].name || a.commands[i].scope != b.commands[i].scope ||
        !structurally_equal(a.commands[i].body, b.commands[i].body))
      return false;
  return true;
}

}  // namespace boundsmith
