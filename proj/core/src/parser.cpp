#include <algorithm>
#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "boundsmith/lang.hpp"

namespace boundsmith {
namespace {

enum class Tok { Ident, Int, Punct, End };

struct Token {
  Tok type = Tok::End;
  std::string text;
  SourcePos pos;
  std::size_t offset = 0;
};

// Longest match first.
constexpr std::string_view kPuncts[] = {
    "<=>", "->", "=>", "<=", "=<", ">=", "!=", "&&", "||", "{", "}", "(", ")", "[", "]",
    ":",   ",",  "|",  ".",  "+",  "&",  "-",  "~",  "^",  "*", "#", "=", "<", ">", "!",
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "//" || src.substr(i, 2) == "--") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (src.substr(i, 2) == "/*") {
      SourcePos start{line, col};
      advance(2);
      while (i < src.size() && src.substr(i, 2) != "*/") advance(1);
      if (i >= src.size()) throw ModelError(ErrorKind::Lex, start, "unterminated block comment");
      advance(2);
      continue;
    }
    Token t;
    t.pos = {line, col};
    t.offset = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                                src[j] == '_' || src[j] == '\'' || src[j] == '$'))
        ++j;
      t.type = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.type = Tok::Int;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    bool matched = false;
    for (auto p : kPuncts) {
      if (src.substr(i, p.size()) == p) {
        t.type = Tok::Punct;
        t.text = std::string(p);
        advance(p.size());
        out.push_back(std::move(t));
        matched = true;
        break;
      }
    }
    if (!matched)
      throw ModelError(ErrorKind::Lex, {line, col}, std::string("unexpected character '") + c + "'");
  }
  Token end;
  end.type = Tok::End;
  end.pos = {line, col};
  end.offset = src.size();
  out.push_back(end);
  return out;
}

const std::set<std::string>& keywords() {
  static const std::set<std::string> kw = {
      "sig", "abstract", "one", "lone", "some", "set", "extends", "pred", "fact", "run", "for",
      "all", "no",  "in",   "not", "and",  "or",  "implies", "iff", "none"};
  return kw;
}

// Thrown internally to unwind a speculative parse.
struct Backtrack {};

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src), toks_(lex(src)) {}

  Model parse() {
    Model m;
    m.source = std::string(src_);
    while (!at_end()) {
      if (is_kw("sig") || is_kw("abstract") || (is_kw("one") && peek_is(1, "sig"))) {
        parse_sig(m);
      } else if (is_kw("pred")) {
        parse_pred(m);
      } else if (is_kw("fact")) {
        parse_fact(m);
      } else if (is_kw("run")) {
        parse_run(m);
      } else {
        fail({"sig", "abstract", "one", "pred", "fact", "run"});
      }
    }
    return m;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& at(std::size_t ahead) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at_end() const { return cur().type == Tok::End; }
  bool is_kw(std::string_view kw) const { return cur().type == Tok::Ident && cur().text == kw; }
  bool is_punct(std::string_view p) const { return cur().type == Tok::Punct && cur().text == p; }
  bool peek_is(std::size_t ahead, std::string_view text) const {
    const auto& t = at(ahead);
    return t.type != Tok::End && t.text == text;
  }
  bool is_name() const {
    return cur().type == Tok::Ident && keywords().count(cur().text) == 0;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    if (speculating_ > 0) throw Backtrack{};
    std::string msg = "expected ";
    if (expected.size() > 1) msg += "one of ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += ", ";
      msg += "'" + expected[i] + "'";
    }
    msg += " but found ";
    msg += at_end() ? std::string("end of input") : "'" + cur().text + "'";
    throw ModelError(ErrorKind::Parse, cur().pos, msg);
  }

  Token take() { return toks_[pos_++]; }

  void expect_punct(std::string_view p) {
    if (!is_punct(p)) fail({std::string(p)});
    ++pos_;
  }
  void expect_kw(std::string_view kw) {
    if (!is_kw(kw)) fail({std::string(kw)});
    ++pos_;
  }
  Token expect_name() {
    if (!is_name()) fail({"identifier"});
    return take();
  }
  int expect_int() {
    if (cur().type != Tok::Int) fail({"integer"});
    return std::stoi(take().text);
  }

  void parse_sig(Model& m) {
    bool isAbstract = false;
    bool isOne = false;
    SourcePos start = cur().pos;
    while (is_kw("abstract") || is_kw("one")) {
      if (is_kw("abstract")) isAbstract = true;
      if (is_kw("one")) isOne = true;
      ++pos_;
    }
    if (isAbstract && isOne)
      throw ModelError(ErrorKind::Invalid, start, "a signature cannot be both abstract and one");
    expect_kw("sig");
    std::vector<Token> names{expect_name()};
    while (is_punct(",")) {
      ++pos_;
      names.push_back(expect_name());
    }
    std::optional<std::string> parent;
    if (is_kw("extends")) {
      ++pos_;
      parent = expect_name().text;
    }
    expect_punct("{");
    std::vector<FieldDecl> fields;
    if (!is_punct("}")) {
      for (;;) {
        std::vector<Token> fnames{expect_name()};
        while (is_punct(",")) {
          ++pos_;
          fnames.push_back(expect_name());
        }
        expect_punct(":");
        Mult mult = Mult::One;
        if (is_kw("lone")) mult = Mult::Lone;
        else if (is_kw("one")) mult = Mult::One;
        else if (is_kw("some")) mult = Mult::Some;
        else if (is_kw("set")) mult = Mult::Set;
        if (is_kw("lone") || is_kw("one") || is_kw("some") || is_kw("set")) ++pos_;
        if (!is_name()) fail({"identifier"});
        Token target = take();
        for (const auto& fn : fnames) {
          FieldDecl fd;
          fd.name = fn.text;
          fd.mult = mult;
          fd.target = target.text;
          fd.pos = fn.pos;
          fields.push_back(fd);
        }
        if (is_punct(",")) {
          ++pos_;
          continue;
        }
        break;
      }
    }
    expect_punct("}");
    for (std::size_t i = 0; i < names.size(); ++i) {
      SigDecl s;
      s.name = names[i].text;
      s.isAbstract = isAbstract;
      s.isOne = isOne;
      s.parent = parent;
      s.pos = names[i].pos;
      s.declIndex = static_cast<int>(m.sigs.size());
      s.fields = fields;
      m.sigs.push_back(std::move(s));
    }
  }

  void parse_pred(Model& m) {
    SourcePos start = cur().pos;
    expect_kw("pred");
    Token name = expect_name();
    if (is_punct("[")) {
      ++pos_;
      expect_punct("]");
    }
    PredDecl p;
    p.name = name.text;
    p.pos = start;
    p.body = parse_block();
    m.preds.push_back(std::move(p));
  }

  void parse_fact(Model& m) {
    expect_kw("fact");
    if (is_name()) ++pos_;
    m.facts.push_back(parse_block());
  }

  void parse_run(Model& m) {
    SourcePos start = cur().pos;
    expect_kw("run");
    Command c;
    c.pos = start;
    if (is_name() && !peek_is(1, "{")) {
      Token name = take();
      c.name = name.text;
      c.body = Formula::call(name.text, name.pos);
    } else {
      std::optional<std::string> label;
      if (is_name()) label = take().text;
      c.body = parse_block();
      if (label) {
        c.name = *label;
      } else if (c.body.subs.size() == 1 && c.body.subs[0].kind == FormulaKind::PredCall) {
        c.name = c.body.subs[0].name;
      } else {
        c.name = "run$" + std::to_string(m.commands.size() + 1);
      }
    }
    expect_kw("for");
    if (cur().type != Tok::Int) fail({"integer"});
    c.scopeOffset = cur().offset;
    c.scopeLength = cur().text.size();
    c.scope = expect_int();
    m.commands.push_back(std::move(c));
  }

  Formula parse_block() {
    SourcePos start = cur().pos;
    expect_punct("{");
    std::vector<Formula> parts;
    while (!is_punct("}")) {
      if (at_end()) fail({"}"});
      parts.push_back(parse_formula());
    }
    ++pos_;
    Formula f = Formula::conj(std::move(parts));
    f.pos = start;
    return f;
  }

  bool starts_quantifier() const {
    if (!(is_kw("all") || is_kw("some") || is_kw("no"))) return false;
    const auto& name = at(1);
    if (name.type != Tok::Ident || keywords().count(name.text)) return false;
    return peek_is(2, ":") || peek_is(2, ",");
  }

  Formula parse_formula() {
    if (starts_quantifier()) return parse_quantifier();
    return parse_or();
  }

  Formula parse_quantifier() {
    Token q = take();
    FormulaKind kind = q.text == "all" ? FormulaKind::All
                       : q.text == "some" ? FormulaKind::Some
                                          : FormulaKind::No;
    // Groups of "a, b: expr" separated by commas.
    std::vector<std::pair<Token, Expr>> decls;
    for (;;) {
      std::vector<Token> names{expect_name()};
      while (is_punct(",")) {
        ++pos_;
        names.push_back(expect_name());
      }
      expect_punct(":");
      Expr domain = parse_expr();
      for (auto& n : names) decls.emplace_back(n, domain);
      if (is_punct(",")) {
        ++pos_;
        continue;
      }
      break;
    }
    Formula body;
    if (is_punct("|")) {
      ++pos_;
      body = parse_formula();
    } else if (is_punct("{")) {
      body = parse_block();
    } else {
      fail({"|", "{"});
    }
    // "all a, b: X | F" nests as all a | all b | F; "no a, b" as no a | some b | F.
    for (std::size_t i = decls.size(); i-- > 0;) {
      FormulaKind k = (i > 0 && kind == FormulaKind::No) ? FormulaKind::Some : kind;
      body = Formula::quant(k, decls[i].first.text, decls[i].second, std::move(body),
                            decls[i].first.pos);
    }
    body.pos = q.pos;
    return body;
  }

  Formula parse_or() {
    Formula lhs = parse_iff();
    if (!(is_kw("or") || is_punct("||"))) return lhs;
    std::vector<Formula> parts{std::move(lhs)};
    while (is_kw("or") || is_punct("||")) {
      ++pos_;
      parts.push_back(parse_iff());
    }
    Formula f;
    f.kind = FormulaKind::Or;
    f.pos = parts.front().pos;
    f.subs = std::move(parts);
    return f;
  }

  Formula parse_iff() {
    Formula lhs = parse_implies();
    while (is_kw("iff") || is_punct("<=>")) {
      SourcePos p = cur().pos;
      ++pos_;
      Formula rhs = parse_implies();
      Formula f;
      f.kind = FormulaKind::Iff;
      f.pos = p;
      f.subs.push_back(std::move(lhs));
      f.subs.push_back(std::move(rhs));
      lhs = std::move(f);
    }
    return lhs;
  }

  Formula parse_implies() {
    Formula lhs = parse_and();
    if (is_kw("implies") || is_punct("=>")) {
      SourcePos p = cur().pos;
      ++pos_;
      Formula rhs = starts_quantifier() ? parse_quantifier() : parse_implies();
      Formula f;
      f.kind = FormulaKind::Implies;
      f.pos = p;
      f.subs.push_back(std::move(lhs));
      f.subs.push_back(std::move(rhs));
      return f;
    }
    return lhs;
  }

  Formula parse_and() {
    Formula lhs = parse_unary();
    if (!(is_kw("and") || is_punct("&&"))) return lhs;
    std::vector<Formula> parts{std::move(lhs)};
    while (is_kw("and") || is_punct("&&")) {
      ++pos_;
      parts.push_back(starts_quantifier() ? parse_quantifier() : parse_unary());
    }
    Formula f;
    f.kind = FormulaKind::And;
    f.pos = parts.front().pos;
    f.subs = std::move(parts);
    return f;
  }

  bool at_expr_continuation() const {
    static const std::set<std::string> ops = {".", "+", "-", "&", "->", "=", "!=", "!",
                                              "<", ">", "<=", "=<", ">="};
    if (cur().type == Tok::Punct) return ops.count(cur().text) > 0;
    return is_kw("in") || is_kw("not");
  }

  Formula parse_unary() {
    SourcePos start = cur().pos;
    if (is_kw("not") || (is_punct("!") && !peek_is(1, "in"))) {
      ++pos_;
      Formula inner = starts_quantifier() ? parse_quantifier() : parse_unary();
      Formula f = Formula::negate(std::move(inner));
      f.pos = start;
      return f;
    }
    if (starts_quantifier()) return parse_quantifier();
    if (is_punct("{")) return parse_block();
    if (is_kw("no") || is_kw("some") || is_kw("lone") || is_kw("one")) {
      std::string m = take().text;
      Expr e = parse_expr();
      if (m == "no") return Formula::card(std::move(e), CmpOp::Eq, 0, start);
      if (m == "some") return Formula::card(std::move(e), CmpOp::Ge, 1, start);
      if (m == "lone") return Formula::card(std::move(e), CmpOp::Le, 1, start);
      return Formula::card(std::move(e), CmpOp::Eq, 1, start);
    }
    if (is_punct("(")) {
      std::size_t save = pos_;
      ++speculating_;
      try {
        ++pos_;
        Formula inner = parse_formula();
        expect_punct(")");
        if (at_expr_continuation()) throw Backtrack{};
        --speculating_;
        return inner;
      } catch (const Backtrack&) {
        --speculating_;
        pos_ = save;
      } catch (const ModelError&) {
        --speculating_;
        pos_ = save;
      }
    }
    return parse_comparison();
  }

  Formula parse_comparison() {
    SourcePos start = cur().pos;
    if (is_punct("#")) {
      ++pos_;
      Expr e = parse_unary_expr();
      // "#a.b" counts the join: '#' binds looser than '.'.
      while (is_punct(".")) {
        SourcePos p = cur().pos;
        ++pos_;
        e = Expr::binary(ExprKind::Join, std::move(e), parse_unary_expr(), p);
      }
      CmpOp op;
      if (is_punct("=")) op = CmpOp::Eq;
      else if (is_punct("<=") || is_punct("=<")) op = CmpOp::Le;
      else if (is_punct(">=")) op = CmpOp::Ge;
      else if (is_punct("<")) op = CmpOp::Lt;
      else if (is_punct(">")) op = CmpOp::Gt;
      else fail({"=", "<=", ">=", "<", ">"});
      ++pos_;
      int k = expect_int();
      return Formula::card(std::move(e), op, k, start);
    }
    Expr lhs = parse_expr();
    if (is_kw("in")) {
      ++pos_;
      return Formula::compare(FormulaKind::In, std::move(lhs), parse_expr(), start);
    }
    if ((is_punct("!") || is_kw("not")) && peek_is(1, "in")) {
      pos_ += 2;
      return Formula::compare(FormulaKind::NotIn, std::move(lhs), parse_expr(), start);
    }
    if ((is_punct("!") || is_kw("not")) && peek_is(1, "=")) {
      pos_ += 2;
      return Formula::compare(FormulaKind::NotEqual, std::move(lhs), parse_expr(), start);
    }
    if (is_punct("=")) {
      ++pos_;
      return Formula::compare(FormulaKind::Equal, std::move(lhs), parse_expr(), start);
    }
    if (is_punct("!=")) {
      ++pos_;
      return Formula::compare(FormulaKind::NotEqual, std::move(lhs), parse_expr(), start);
    }
    if (lhs.kind == ExprKind::Name) {
      if (is_punct("[")) {
        ++pos_;
        expect_punct("]");
      }
      return Formula::call(lhs.name, lhs.pos);
    }
    fail({"in", "=", "!=", "!in"});
  }

  Expr parse_expr() {
    Expr lhs = parse_intersect();
    while (is_punct("+") || is_punct("-")) {
      ExprKind k = is_punct("+") ? ExprKind::Union : ExprKind::Difference;
      SourcePos p = cur().pos;
      ++pos_;
      lhs = Expr::binary(k, std::move(lhs), parse_intersect(), p);
    }
    return lhs;
  }

  Expr parse_intersect() {
    Expr lhs = parse_arrow();
    while (is_punct("&")) {
      SourcePos p = cur().pos;
      ++pos_;
      lhs = Expr::binary(ExprKind::Intersect, std::move(lhs), parse_arrow(), p);
    }
    return lhs;
  }

  Expr parse_arrow() {
    Expr lhs = parse_join();
    while (is_punct("->")) {
      SourcePos p = cur().pos;
      ++pos_;
      lhs = Expr::binary(ExprKind::Product, std::move(lhs), parse_join(), p);
    }
    return lhs;
  }

  Expr parse_join() {
    Expr lhs = parse_unary_expr();
    while (is_punct(".")) {
      SourcePos p = cur().pos;
      ++pos_;
      lhs = Expr::binary(ExprKind::Join, std::move(lhs), parse_unary_expr(), p);
    }
    return lhs;
  }

  Expr parse_unary_expr() {
    SourcePos p = cur().pos;
    if (is_punct("~")) {
      ++pos_;
      return Expr::unary(ExprKind::Transpose, parse_unary_expr(), p);
    }
    if (is_punct("^")) {
      ++pos_;
      return Expr::unary(ExprKind::Closure, parse_unary_expr(), p);
    }
    if (is_punct("*")) {
      ++pos_;
      return Expr::unary(ExprKind::ReflexiveClosure, parse_unary_expr(), p);
    }
    if (is_kw("none")) {
      ++pos_;
      return Expr::ref(ExprKind::None, "none", p);
    }
    if (is_punct("(")) {
      ++pos_;
      Expr e = parse_expr();
      expect_punct(")");
      return e;
    }
    if (is_name()) return Expr::ref(ExprKind::Name, take().text, p);
    fail({"identifier", "(", "~", "^", "*", "none"});
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int speculating_ = 0;
};

}  // namespace

Model parse_model(std::string_view source) { return Parser(source).parse(); }

Model load_model(std::string_view source) { return resolve_model(parse_model(source)); }

}  // namespace boundsmith
