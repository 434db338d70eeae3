#include "boundsmith/translator.hpp"

#include <cctype>
#include <stdexcept>

#include "boundsmith/lang.hpp"

namespace boundsmith {

namespace {

/// Dense relation over the whole universe: cell index is the tuple read as a base-N number.
struct BoolMatrix {
  int arity = 1;
  int n = 0;
  std::vector<int> cells;

  BoolMatrix(int arity_, int n_) : arity(arity_), n(n_) {
    std::size_t count = 1;
    for (int i = 0; i < arity; ++i) count *= static_cast<std::size_t>(n);
    cells.assign(count, Circuit::kFalse);
  }
  std::size_t stride(int dims) const {
    std::size_t s = 1;
    for (int i = 0; i < dims; ++i) s *= static_cast<std::size_t>(n);
    return s;
  }
  std::size_t index(const std::vector<int>& tuple) const {
    std::size_t idx = 0;
    for (int a : tuple) idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(a);
    return idx;
  }
};

class Grounder {
 public:
  Grounder(const Model& m, const Universe& u, const TupleTable& t)
      : m_(m), u_(u), t_(t), circuit_(t.num_primary()), n_(u.atom_count()) {}

  Circuit& circuit() { return circuit_; }

  int formula(const Formula& f) {
    switch (f.kind) {
      case FormulaKind::And: {
        std::vector<int> parts;
        for (const auto& s : f.subs) parts.push_back(formula(s));
        return circuit_.and_of(std::move(parts));
      }
      case FormulaKind::Or: {
        std::vector<int> parts;
        for (const auto& s : f.subs) parts.push_back(formula(s));
        return circuit_.or_of(std::move(parts));
      }
      case FormulaKind::Not: return -formula(f.subs.at(0));
      case FormulaKind::Implies: return circuit_.implies(formula(f.subs.at(0)), formula(f.subs.at(1)));
      case FormulaKind::Iff: return circuit_.iff(formula(f.subs.at(0)), formula(f.subs.at(1)));
      case FormulaKind::All:
      case FormulaKind::Some:
      case FormulaKind::No: {
        BoolMatrix domain = expr(f.exprs.at(0));
        std::vector<int> parts;
        for (int a = 0; a < n_; ++a) {
          int member = domain.cells[static_cast<std::size_t>(a)];
          if (member == Circuit::kFalse) continue;
          env_.push_back(a);
          int body = formula(f.subs.at(0));
          env_.pop_back();
          parts.push_back(f.kind == FormulaKind::All ? circuit_.implies(member, body)
                                                     : circuit_.and2(member, body));
        }
        if (f.kind == FormulaKind::All) return circuit_.and_of(std::move(parts));
        int some = circuit_.or_of(std::move(parts));
        return f.kind == FormulaKind::Some ? some : -some;
      }
      case FormulaKind::In:
      case FormulaKind::NotIn: {
        int in = subset(expr(f.exprs.at(0)), expr(f.exprs.at(1)));
        return f.kind == FormulaKind::In ? in : -in;
      }
      case FormulaKind::Equal:
      case FormulaKind::NotEqual: {
        BoolMatrix a = expr(f.exprs.at(0));
        BoolMatrix b = expr(f.exprs.at(1));
        int eq = circuit_.and2(subset(a, b), subset(b, a));
        return f.kind == FormulaKind::Equal ? eq : -eq;
      }
      case FormulaKind::CardCmp: {
        BoolMatrix e = expr(f.exprs.at(0));
        return cardinality(e.cells, f.cmp, f.constant);
      }
      case FormulaKind::PredCall: {
        // Predicates take no parameters, so their bodies see an empty environment.
        std::vector<int> saved;
        saved.swap(env_);
        int r = formula(m_.preds.at(static_cast<std::size_t>(f.predIndex)).body);
        env_.swap(saved);
        return r;
      }
    }
    throw std::logic_error("unhandled formula kind");
  }

  int cardinality(const std::vector<int>& cells, CmpOp op, int k) {
    switch (op) {
      case CmpOp::Eq: return circuit_.and2(circuit_.at_least(cells, k), circuit_.at_most(cells, k));
      case CmpOp::Le: return circuit_.at_most(cells, k);
      case CmpOp::Lt: return circuit_.at_most(cells, k - 1);
      case CmpOp::Ge: return circuit_.at_least(cells, k);
      case CmpOp::Gt: return circuit_.at_least(cells, k + 1);
    }
    return Circuit::kFalse;
  }

  BoolMatrix expr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::SigRef: return sig(e.index);
      case ExprKind::FieldRef: return field(e.index);
      case ExprKind::VarRef: {
        BoolMatrix r(1, n_);
        r.cells[static_cast<std::size_t>(env_.at(static_cast<std::size_t>(e.index)))] = Circuit::kTrue;
        return r;
      }
      case ExprKind::None: return BoolMatrix(e.arity > 0 ? e.arity : 1, n_);
      case ExprKind::Union:
      case ExprKind::Intersect:
      case ExprKind::Difference: {
        BoolMatrix a = expr(e.kids.at(0));
        BoolMatrix b = expr(e.kids.at(1));
        for (std::size_t i = 0; i < a.cells.size(); ++i) {
          int x = a.cells[i];
          int y = b.cells[i];
          a.cells[i] = e.kind == ExprKind::Union       ? circuit_.or2(x, y)
                       : e.kind == ExprKind::Intersect ? circuit_.and2(x, y)
                                                       : circuit_.and2(x, -y);
        }
        return a;
      }
      case ExprKind::Join: return join(expr(e.kids.at(0)), expr(e.kids.at(1)));
      case ExprKind::Product: {
        BoolMatrix a = expr(e.kids.at(0));
        BoolMatrix b = expr(e.kids.at(1));
        BoolMatrix r(a.arity + b.arity, n_);
        const std::size_t bs = b.cells.size();
        for (std::size_t i = 0; i < a.cells.size(); ++i) {
          if (a.cells[i] == Circuit::kFalse) continue;
          for (std::size_t j = 0; j < bs; ++j) r.cells[i * bs + j] = circuit_.and2(a.cells[i], b.cells[j]);
        }
        return r;
      }
      case ExprKind::Transpose: {
        BoolMatrix a = expr(e.kids.at(0));
        BoolMatrix r(2, n_);
        for (int i = 0; i < n_; ++i)
          for (int j = 0; j < n_; ++j)
            r.cells[static_cast<std::size_t>(j * n_ + i)] = a.cells[static_cast<std::size_t>(i * n_ + j)];
        return r;
      }
      case ExprKind::Closure: return closure(expr(e.kids.at(0)));
      case ExprKind::ReflexiveClosure: {
        BoolMatrix r = closure(expr(e.kids.at(0)));
        // iden over the atoms present in the instance
        BoolMatrix univ = universe_set();
        for (int a = 0; a < n_; ++a) {
          auto& cell = r.cells[static_cast<std::size_t>(a * n_ + a)];
          cell = circuit_.or2(cell, univ.cells[static_cast<std::size_t>(a)]);
        }
        return r;
      }
      case ExprKind::Name: break;
    }
    throw std::logic_error("expression not resolved: " + e.name);
  }

  BoolMatrix sig(int s) {
    auto cached = sigCache_.find(s);
    if (cached != sigCache_.end()) return cached->second;
    const auto& decl = m_.sigs.at(static_cast<std::size_t>(s));
    BoolMatrix r(1, n_);
    if (decl.isOne) {
      int pin = u_.pinned_atom(s);
      if (pin >= 0) r.cells[static_cast<std::size_t>(pin)] = Circuit::kTrue;
    } else if (decl.isAbstract) {
      for (int child : m_.children_of(s)) {
        BoolMatrix c = sig(child);
        for (std::size_t i = 0; i < r.cells.size(); ++i) r.cells[i] = circuit_.or2(r.cells[i], c.cells[i]);
      }
    } else {
      for (int a : u_.upper_bound(s)) r.cells[static_cast<std::size_t>(a)] = t_.lookup(decl.name, {a});
    }
    sigCache_.emplace(s, r);
    return r;
  }

  BoolMatrix field(int f) {
    auto cached = fieldCache_.find(f);
    if (cached != fieldCache_.end()) return cached->second;
    const auto& fd = m_.field(f);
    BoolMatrix r(2, n_);
    for (int a : u_.upper_bound(fd.ownerSig))
      for (int b : u_.upper_bound(fd.targetSig))
        r.cells[r.index({a, b})] = t_.lookup(fd.name, {a, b});
    fieldCache_.emplace(f, r);
    return r;
  }

  BoolMatrix universe_set() {
    BoolMatrix r(1, n_);
    for (const auto& pool : u_.pools()) {
      BoolMatrix s = sig(pool.sig);
      for (std::size_t i = 0; i < r.cells.size(); ++i) r.cells[i] = circuit_.or2(r.cells[i], s.cells[i]);
    }
    return r;
  }

 private:
  int subset(const BoolMatrix& a, const BoolMatrix& b) {
    std::vector<int> parts;
    for (std::size_t i = 0; i < a.cells.size(); ++i) parts.push_back(circuit_.implies(a.cells[i], b.cells[i]));
    return circuit_.and_of(std::move(parts));
  }

  BoolMatrix join(const BoolMatrix& a, const BoolMatrix& b) {
    BoolMatrix r(a.arity + b.arity - 2, n_);
    const std::size_t bRow = b.stride(b.arity - 1);
    std::vector<std::vector<int>> acc(r.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
      int x = a.cells[i];
      if (x == Circuit::kFalse) continue;
      std::size_t prefix = i / static_cast<std::size_t>(n_);
      std::size_t mid = i % static_cast<std::size_t>(n_);
      for (std::size_t s = 0; s < bRow; ++s) {
        int y = b.cells[mid * bRow + s];
        if (y == Circuit::kFalse) continue;
        acc[prefix * bRow + s].push_back(circuit_.and2(x, y));
      }
    }
    for (std::size_t i = 0; i < acc.size(); ++i) r.cells[i] = circuit_.or_of(std::move(acc[i]));
    return r;
  }

  BoolMatrix closure(BoolMatrix r) {
    // Iterated squaring: after i rounds, paths of length up to 2^i are covered.
    for (int reach = 1; reach < n_; reach *= 2) {
      BoolMatrix sq = join(r, r);
      bool changed = false;
      for (std::size_t i = 0; i < r.cells.size(); ++i) {
        int next = circuit_.or2(r.cells[i], sq.cells[i]);
        if (next != r.cells[i]) changed = true;
        r.cells[i] = next;
      }
      if (!changed) break;
    }
    return r;
  }

  const Model& m_;
  const Universe& u_;
  const TupleTable& t_;
  Circuit circuit_;
  int n_;
  std::vector<int> env_;
  std::map<int, BoolMatrix> sigCache_;
  std::map<int, BoolMatrix> fieldCache_;
};

class Assembler {
 public:
  Assembler(Grounder& g, int numPrimary) : g_(g), enc_(g.circuit(), numPrimary + 1) {}

  void assert_formula(const Formula& f, std::vector<Clause>& out) {
    if (f.kind == FormulaKind::And) {
      for (const auto& s : f.subs) assert_formula(s, out);
      return;
    }
    if (f.kind == FormulaKind::CardCmp) {
      // Top-level cardinality goes straight to clauses.
      auto cells = g_.expr(f.exprs.at(0)).cells;
      std::vector<int> lits;
      int bound = f.constant;
      for (int c : cells) {
        if (c == Circuit::kTrue) --bound;
        else if (c != Circuit::kFalse) lits.push_back(enc_.literal(c, out));
      }
      auto clauses = encode_cardinality(lits, f.cmp, bound, enc_.num_vars());
      out.insert(out.end(), clauses.begin(), clauses.end());
      return;
    }
    enc_.assert_true(g_.formula(f), out);
  }

  int num_vars() { return enc_.num_vars(); }

 private:
  Grounder& g_;
  TseitinEncoder enc_;
};

std::string var_name_for(const SigDecl& s) {
  return std::string(1, static_cast<char>(std::tolower(static_cast<unsigned char>(s.name.front()))));
}

class FormulaResolver {
 public:
  // Resolving against a scratch model with the formula as its only fact reuses the
  // model resolver's scoping and arity rules.
  static Formula run(const Model& m, Formula f) {
    Model scratch;
    scratch.sigs = m.sigs;
    scratch.preds = m.preds;
    scratch.facts.push_back(std::move(f));
    scratch = resolve_model(std::move(scratch));
    return std::move(scratch.facts.front());
  }
};

}  // namespace

Formula resolve_formula(const Model& m, Formula f) { return FormulaResolver::run(m, std::move(f)); }

std::vector<Formula> typing_facts(const Model& m) {
  std::vector<Formula> out;
  for (int f = 0; f < m.field_count(); ++f) {
    const auto& fd = m.field(f);
    const auto& owner = m.sigs.at(static_cast<std::size_t>(fd.ownerSig));
    Formula fact = Formula::compare(
        FormulaKind::In, Expr::ref(ExprKind::Name, fd.name),
        Expr::binary(ExprKind::Product, Expr::ref(ExprKind::Name, owner.name),
                     Expr::ref(ExprKind::Name, fd.target)));
    out.push_back(resolve_formula(m, std::move(fact)));
  }
  return out;
}

std::vector<Formula> implicit_facts(const Model& m) {
  std::vector<Formula> out;
  for (int f = 0; f < m.field_count(); ++f) {
    const auto& fd = m.field(f);
    if (fd.mult == Mult::Set) continue;
    const auto& owner = m.sigs.at(static_cast<std::size_t>(fd.ownerSig));
    std::string var = var_name_for(owner);
    Expr image = Expr::binary(ExprKind::Join, Expr::ref(ExprKind::Name, var), Expr::ref(ExprKind::Name, fd.name));
    CmpOp op = fd.mult == Mult::Lone ? CmpOp::Le : fd.mult == Mult::One ? CmpOp::Eq : CmpOp::Ge;
    Formula body = Formula::card(std::move(image), op, 1);
    out.push_back(resolve_formula(
        m, Formula::quant(FormulaKind::All, var, Expr::ref(ExprKind::Name, owner.name), std::move(body))));
  }
  for (const auto& s : m.sigs)
    if (s.isOne) out.push_back(resolve_formula(m, Formula::card(Expr::ref(ExprKind::Name, s.name), CmpOp::Eq, 1)));
  for (const auto& parent : m.sigs) {
    auto children = m.children_of(parent.declIndex);
    if (children.empty()) continue;
    auto name = [&](int i) { return Expr::ref(ExprKind::Name, m.sigs[static_cast<std::size_t>(i)].name); };
    for (int c : children)
      out.push_back(resolve_formula(m, Formula::compare(FormulaKind::In, name(c), name(parent.declIndex))));
    for (std::size_t i = 0; i < children.size(); ++i)
      for (std::size_t j = i + 1; j < children.size(); ++j)
        out.push_back(resolve_formula(
            m, Formula::card(Expr::binary(ExprKind::Intersect, name(children[i]), name(children[j])), CmpOp::Eq, 0)));
    if (parent.isAbstract) {
      Expr all = name(children.front());
      for (std::size_t i = 1; i < children.size(); ++i)
        all = Expr::binary(ExprKind::Union, std::move(all), name(children[i]));
      out.push_back(resolve_formula(m, Formula::compare(FormulaKind::Equal, name(parent.declIndex), std::move(all))));
    }
  }
  return out;
}

CnfDocument translate(const Model& m, const Command& command, int size, const TranslateOptions& options) {
  if (!m.resolved) throw std::invalid_argument("translate: model is not resolved");
  CnfDocument doc;
  doc.universe = build_universe(m, size);
  doc.symbols = allocate_primary_vars(m, doc.universe);
  doc.numPrimary = doc.symbols.num_primary();

  Grounder grounder(m, doc.universe, doc.symbols);
  Assembler assembler(grounder, doc.numPrimary);
  if (!doc.universe.feasible()) doc.clauses.push_back({});
  for (const auto& f : typing_facts(m)) assembler.assert_formula(f, doc.clauses);
  for (const auto& f : implicit_facts(m)) assembler.assert_formula(f, doc.clauses);
  for (const auto& f : m.facts) assembler.assert_formula(f, doc.clauses);
  assembler.assert_formula(command.body, doc.clauses);

  for (const auto& name : options.sizeFactSigs) {
    Formula fact = resolve_formula(m, Formula::card(Expr::ref(ExprKind::Name, name), CmpOp::Eq, size));
    assembler.assert_formula(fact, doc.sizeFacts[name]);
  }
  doc.numVars = assembler.num_vars();
  return doc;
}

}  // namespace boundsmith
