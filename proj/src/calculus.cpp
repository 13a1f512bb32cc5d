#include "catq/calculus.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "catq/errors.hpp"

namespace catq {

RangeExpr RangeExpr::of(std::string object) {
  RangeExpr r;
  r.kind = Kind::object;
  r.object = std::move(object);
  return r;
}

RangeExpr RangeExpr::combine(Kind kind, RangeExpr lhs, RangeExpr rhs) {
  RangeExpr r;
  r.kind = kind;
  r.operands.push_back(std::move(lhs));
  r.operands.push_back(std::move(rhs));
  return r;
}

std::vector<std::string> RangeExpr::objects() const {
  if (kind == Kind::object) return {object};
  auto out = operands[0].objects();
  auto rest = operands[1].objects();
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

namespace {

char range_symbol(RangeExpr::Kind kind) {
  switch (kind) {
    case RangeExpr::Kind::union_of: return '|';
    case RangeExpr::Kind::intersect_of: return '&';
    case RangeExpr::Kind::difference_of: return '-';
    default: return '?';
  }
}

}  // namespace

std::string to_string(const RangeExpr& range) {
  if (range.kind == RangeExpr::Kind::object) return range.object;
  std::string rhs = to_string(range.operands[1]);
  if (range.operands[1].kind != RangeExpr::Kind::object) rhs = "(" + rhs + ")";
  return to_string(range.operands[0]) + " " + range_symbol(range.kind) + " " + rhs;
}

std::string_view axis_name(TreeAxis axis) {
  switch (axis) {
    case TreeAxis::parent: return "isParent";
    case TreeAxis::ancestor: return "isAncestor";
    case TreeAxis::sibling: return "isSibling";
  }
  return "?";
}

bool Formula::is_atom() const {
  switch (kind) {
    case FormulaKind::truth:
    case FormulaKind::falsity:
    case FormulaKind::compare:
    case FormulaKind::morph_eq:
    case FormulaKind::tree:
    case FormulaKind::reach:
    case FormulaKind::nhop:
    case FormulaKind::is_null:
    case FormulaKind::range_test:
    case FormulaKind::membership:
      return true;
    default:
      return false;
  }
}

namespace {

std::shared_ptr<Formula> node(FormulaKind kind) {
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  return f;
}

}  // namespace

FormulaPtr make_true() {
  static const FormulaPtr t = node(FormulaKind::truth);
  return t;
}

FormulaPtr make_false() {
  static const FormulaPtr f = node(FormulaKind::falsity);
  return f;
}

FormulaPtr make_compare(SelectTerm lhs, CmpOp op, SelectTerm rhs) {
  auto f = node(FormulaKind::compare);
  f->lhs = std::move(lhs);
  f->op = op;
  f->rhs = std::move(rhs);
  return f;
}

FormulaPtr make_morph_eq(std::string morphism, std::string x, std::string y) {
  auto f = node(FormulaKind::morph_eq);
  f->name = std::move(morphism);
  f->vars = {std::move(x), std::move(y)};
  return f;
}

FormulaPtr make_tree(TreeAxis axis, std::string x, std::string y) {
  auto f = node(FormulaKind::tree);
  f->axis = axis;
  f->vars = {std::move(x), std::move(y)};
  return f;
}

FormulaPtr make_reach(std::string x, std::string y, std::string edges) {
  auto f = node(FormulaKind::reach);
  f->name = std::move(edges);
  f->vars = {std::move(x), std::move(y)};
  return f;
}

FormulaPtr make_nhop(int n, std::string x, std::string y, std::string edges) {
  auto f = node(FormulaKind::nhop);
  f->hops = n;
  f->name = std::move(edges);
  f->vars = {std::move(x), std::move(y)};
  return f;
}

FormulaPtr make_is_null(std::string v) {
  auto f = node(FormulaKind::is_null);
  f->vars = {std::move(v)};
  return f;
}

FormulaPtr make_not(FormulaPtr child) {
  auto f = node(FormulaKind::negation);
  f->children = {std::move(child)};
  return f;
}

FormulaPtr make_and(FormulaPtr a, FormulaPtr b) {
  auto f = node(FormulaKind::conjunction);
  f->children = {std::move(a), std::move(b)};
  return f;
}

FormulaPtr make_or(FormulaPtr a, FormulaPtr b) {
  auto f = node(FormulaKind::disjunction);
  f->children = {std::move(a), std::move(b)};
  return f;
}

FormulaPtr make_quant(FormulaKind kind, std::string var, RangeExpr range, FormulaPtr body,
                      bool pointed) {
  if (kind != FormulaKind::forall && kind != FormulaKind::exists) {
    throw std::invalid_argument("make_quant needs forall or exists");
  }
  auto f = node(kind);
  f->vars = {std::move(var)};
  f->range = std::move(range);
  f->children = {std::move(body)};
  f->pointed = pointed;
  return f;
}

FormulaPtr make_all(const std::vector<FormulaPtr>& parts) {
  if (parts.empty()) return make_true();
  FormulaPtr acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) acc = make_and(acc, parts[i]);
  return acc;
}

FormulaPtr make_any(const std::vector<FormulaPtr>& parts) {
  if (parts.empty()) return make_false();
  FormulaPtr acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) acc = make_or(acc, parts[i]);
  return acc;
}

bool structurally_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case FormulaKind::compare:
      if (!(a->lhs == b->lhs && a->op == b->op && a->rhs == b->rhs)) return false;
      break;
    case FormulaKind::tree:
      if (a->axis != b->axis) return false;
      break;
    case FormulaKind::nhop:
      if (a->hops != b->hops) return false;
      break;
    case FormulaKind::forall:
    case FormulaKind::exists:
    case FormulaKind::range_test:
      if (!(a->range == b->range) || a->pointed != b->pointed) return false;
      break;
    default:
      break;
  }
  if (a->name != b->name || a->vars != b->vars) return false;
  if (a->children.size() != b->children.size()) return false;
  for (std::size_t i = 0; i < a->children.size(); ++i) {
    if (!structurally_equal(a->children[i], b->children[i])) return false;
  }
  return true;
}

namespace {

void collect_free(const FormulaPtr& f, std::vector<std::string>& bound,
                  std::vector<std::string>& out) {
  auto note = [&](const std::string& v) {
    if (std::find(bound.begin(), bound.end(), v) != bound.end()) return;
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  switch (f->kind) {
    case FormulaKind::compare:
      for (const auto* t : {&f->lhs, &f->rhs}) {
        if (const auto* a = std::get_if<AttributeTerm>(t)) note(a->column);
      }
      return;
    case FormulaKind::forall:
    case FormulaKind::exists:
      bound.push_back(f->vars[0]);
      collect_free(f->children[0], bound, out);
      bound.pop_back();
      return;
    default:
      for (const auto& v : f->vars) note(v);
      for (const auto& c : f->children) collect_free(c, bound, out);
  }
}

}  // namespace

std::vector<std::string> free_variables(const FormulaPtr& f) {
  std::vector<std::string> bound, out;
  collect_free(f, bound, out);
  return out;
}

bool structurally_equal(const CalculusQuery& a, const CalculusQuery& b) {
  return a.targets == b.targets && a.ranges == b.ranges && a.memberships == b.memberships &&
         structurally_equal(a.matrix, b.matrix);
}

// ---------------------------------------------------------------------------
// Lexer and parser

namespace {

enum class Tok {
  ident, integer, decimal, text, lbrace, rbrace, lparen, rparen, comma, bar, oror, amp, andand,
  bang, ne, eq, lt, le, gt, ge, minus, colon, dot, question, end
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

std::string_view describe(Tok t) {
  switch (t) {
    case Tok::ident: return "identifier";
    case Tok::integer: return "integer";
    case Tok::decimal: return "decimal";
    case Tok::text: return "string";
    case Tok::lbrace: return "'{'";
    case Tok::rbrace: return "'}'";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::comma: return "','";
    case Tok::bar: return "'|'";
    case Tok::oror: return "'||'";
    case Tok::amp: return "'&'";
    case Tok::andand: return "'&&'";
    case Tok::bang: return "'!'";
    case Tok::ne: return "'!='";
    case Tok::eq: return "'='";
    case Tok::lt: return "'<'";
    case Tok::le: return "'<='";
    case Tok::gt: return "'>'";
    case Tok::ge: return "'>='";
    case Tok::minus: return "'-'";
    case Tok::colon: return "':'";
    case Tok::dot: return "'.'";
    case Tok::question: return "'?'";
    case Tok::end: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {  // comment to end of line
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t{Tok::end, "", line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::integer;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        t.kind = Tok::decimal;
      }
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (c == '"') {
      std::string s;
      advance(1);
      bool closed = false;
      while (i < src.size()) {
        char d = src[i];
        if (d == '"') {
          advance(1);
          closed = true;
          break;
        }
        if (d == '\\' && i + 1 < src.size()) {
          char e = src[i + 1];
          switch (e) {
            case 'n': s += '\n'; break;
            case 't': s += '\t'; break;
            case '"': s += '"'; break;
            case '\\': s += '\\'; break;
            default: throw ParseError(std::string("unknown escape \\") + e, line, col);
          }
          advance(2);
          continue;
        }
        s += d;
        advance(1);
      }
      if (!closed) throw ParseError("unterminated string", t.line, t.column);
      t.kind = Tok::text;
      t.text = std::move(s);
    } else {
      auto two = src.substr(i, 2);
      struct Punct { std::string_view s; Tok k; };
      static const Punct puncts[] = {
          {"||", Tok::oror}, {"&&", Tok::andand}, {"!=", Tok::ne}, {"<=", Tok::le},
          {">=", Tok::ge},   {"{", Tok::lbrace},  {"}", Tok::rbrace}, {"(", Tok::lparen},
          {")", Tok::rparen}, {",", Tok::comma},  {"|", Tok::bar},   {"&", Tok::amp},
          {"!", Tok::bang},  {"=", Tok::eq},      {"<", Tok::lt},    {">", Tok::gt},
          {"-", Tok::minus}, {":", Tok::colon},   {".", Tok::dot},   {"?", Tok::question},
      };
      bool matched = false;
      for (const auto& p : puncts) {
        if ((p.s.size() == 2 && two == p.s) || (p.s.size() == 1 && c == p.s[0])) {
          t.kind = p.k;
          t.text = std::string(p.s);
          advance(p.s.size());
          matched = true;
          break;
        }
      }
      if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    out.push_back(std::move(t));
  }
  out.push_back({Tok::end, "", line, col});
  return out;
}

std::optional<CmpOp> cmp_of(Tok t) {
  switch (t) {
    case Tok::eq: return CmpOp::eq;
    case Tok::ne: return CmpOp::ne;
    case Tok::lt: return CmpOp::lt;
    case Tok::le: return CmpOp::le;
    case Tok::gt: return CmpOp::gt;
    case Tok::ge: return CmpOp::ge;
    default: return std::nullopt;
  }
}

bool is_keyword(const std::string& s) {
  static const std::set<std::string> words = {"in",     "forall",   "exists",     "true",
                                              "false",  "reach",    "nhop",       "isParent",
                                              "isAncestor", "isSibling", "null",   "decimal",
                                              "dewey"};
  return words.count(s) != 0;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  CalculusQuery query() {
    expect(Tok::lbrace);
    CalculusQuery q;
    q.targets.push_back(name("target variable"));
    while (accept(Tok::comma)) q.targets.push_back(name("target variable"));
    expect(Tok::bar);
    auto conjuncts = top_conjuncts();
    expect(Tok::rbrace);
    expect(Tok::end);
    lift(conjuncts, q);
    return q;
  }

  FormulaPtr formula_only() {
    auto f = formula();
    expect(Tok::end);
    reject_range_nodes(f);
    return f;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at(Tok t) const { return peek().kind == t; }
  bool at_word(std::string_view w) const { return at(Tok::ident) && peek().text == w; }
  bool accept(Tok t) {
    if (!at(t)) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const std::string& msg, const Token& at) const {
    throw ParseError(msg, at.line, at.column);
  }
  [[noreturn]] void unexpected(std::string_view wanted) const {
    const auto& t = peek();
    std::string got = t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
    fail("expected " + std::string(wanted) + ", found " + got, t);
  }
  const Token& expect(Tok t) {
    if (!at(t)) unexpected(describe(t));
    return toks_[pos_++];
  }
  void expect_word(std::string_view w) {
    if (!at_word(w)) unexpected("'" + std::string(w) + "'");
    ++pos_;
  }
  std::string name(std::string_view what) {
    if (!at(Tok::ident) || is_keyword(peek().text)) unexpected(what);
    return toks_[pos_++].text;
  }

  // Top level: conjuncts split on unparenthesized &&. A top-level || makes
  // the whole qualification a single disjunctive conjunct.
  std::vector<FormulaPtr> top_conjuncts() {
    std::vector<FormulaPtr> items{unary()};
    while (accept(Tok::andand)) items.push_back(unary());
    if (!at(Tok::oror)) return items;
    FormulaPtr acc = make_all(items);
    while (accept(Tok::oror)) acc = make_or(acc, conjunction());
    return {acc};
  }

  FormulaPtr formula() {
    FormulaPtr acc = conjunction();
    while (accept(Tok::oror)) acc = make_or(acc, conjunction());
    return acc;
  }

  FormulaPtr conjunction() {
    FormulaPtr acc = unary();
    while (accept(Tok::andand)) acc = make_and(acc, unary());
    return acc;
  }

  FormulaPtr unary() {
    if (accept(Tok::bang)) return make_not(unary());
    if (at_word("forall") || at_word("exists")) return quantifier();
    return primary();
  }

  FormulaPtr quantifier() {
    auto kind = peek().text == "forall" ? FormulaKind::forall : FormulaKind::exists;
    ++pos_;
    auto var = name("quantified variable");
    expect_word("in");
    auto range = object_expr();
    bool pointed = accept(Tok::question);
    expect(Tok::colon);
    auto body = formula();
    return make_quant(kind, std::move(var), std::move(range), std::move(body), pointed);
  }

  RangeExpr object_term() {
    if (accept(Tok::lparen)) {
      auto r = object_expr();
      expect(Tok::rparen);
      return r;
    }
    return RangeExpr::of(name("object name"));
  }

  RangeExpr object_expr() {
    RangeExpr acc = object_term();
    for (;;) {
      RangeExpr::Kind kind;
      if (at(Tok::bar)) {
        kind = RangeExpr::Kind::union_of;
      } else if (at(Tok::amp)) {
        kind = RangeExpr::Kind::intersect_of;
      } else if (at(Tok::minus)) {
        kind = RangeExpr::Kind::difference_of;
      } else {
        return acc;
      }
      ++pos_;
      acc = RangeExpr::combine(kind, std::move(acc), object_term());
    }
  }

  std::pair<std::string, std::string> two_vars() {
    expect(Tok::lparen);
    auto x = name("variable");
    expect(Tok::comma);
    auto y = name("variable");
    return {x, y};
  }

  FormulaPtr primary() {
    if (accept(Tok::lparen)) {
      auto f = formula();
      expect(Tok::rparen);
      return f;
    }
    const Token& t = peek();
    if (t.kind == Tok::ident) {
      const bool call = peek(1).kind == Tok::lparen;
      if (call && t.text == "reach") {
        ++pos_;
        auto [x, y] = two_vars();
        expect(Tok::comma);
        auto e = name("edge set name");
        expect(Tok::rparen);
        return make_reach(x, y, e);
      }
      if (call && t.text == "nhop") {
        ++pos_;
        expect(Tok::lparen);
        const auto& n = expect(Tok::integer);
        int hops = 0;
        try {
          hops = std::stoi(n.text);
        } catch (const std::exception&) {
          fail("hop count out of range", n);
        }
        if (hops < 1) fail("hop count must be at least 1", n);
        expect(Tok::comma);
        auto x = name("variable");
        expect(Tok::comma);
        auto y = name("variable");
        expect(Tok::comma);
        auto e = name("edge set name");
        expect(Tok::rparen);
        return make_nhop(hops, x, y, e);
      }
      if (call && (t.text == "isParent" || t.text == "isAncestor" || t.text == "isSibling")) {
        auto axis = t.text == "isParent"     ? TreeAxis::parent
                    : t.text == "isAncestor" ? TreeAxis::ancestor
                                             : TreeAxis::sibling;
        ++pos_;
        auto [x, y] = two_vars();
        expect(Tok::rparen);
        return make_tree(axis, x, y);
      }
      if (call && t.text == "null") {
        pos_ += 2;
        auto v = name("variable");
        expect(Tok::rparen);
        return make_is_null(v);
      }
      if ((t.text == "true" || t.text == "false") && !cmp_of(peek(1).kind)) {
        ++pos_;
        return t.text == "true" ? make_true() : make_false();
      }
      if (call && !is_keyword(t.text)) {
        // f(x) = y
        auto f = name("morphism name");
        expect(Tok::lparen);
        auto x = name("variable");
        expect(Tok::rparen);
        bool negated = false;
        if (accept(Tok::ne)) {
          negated = true;
        } else {
          expect(Tok::eq);
        }
        auto y = name("variable");
        auto m = make_morph_eq(f, x, y);
        return negated ? make_not(m) : m;
      }
      if (!is_keyword(t.text) && peek(1).kind == Tok::ident && peek(1).text == "in") {
        auto v = name("variable");
        pos_ += 1;
        auto f = std::make_shared<Formula>();
        f->kind = FormulaKind::range_test;
        f->vars = {v};
        f->range = object_expr();
        return f;
      }
      if (!is_keyword(t.text) && peek(1).kind == Tok::eq && peek(2).kind == Tok::lparen) {
        auto r = name("relationship variable");
        expect(Tok::eq);
        expect(Tok::lparen);
        auto f = std::make_shared<Formula>();
        f->kind = FormulaKind::membership;
        f->vars = {r, name("variable")};
        while (accept(Tok::comma)) f->vars.push_back(name("variable"));
        expect(Tok::rparen);
        expect_word("in");
        f->name = name("relationship object");
        return f;
      }
    }
    return comparison();
  }

  // term op term; `x.f = y` with a bare variable on the right is a morphism
  // equation.
  FormulaPtr comparison() {
    auto lhs = term();
    auto op_tok = peek();
    auto op = cmp_of(op_tok.kind);
    if (!op) unexpected("comparison operator");
    ++pos_;
    if (const auto* a = std::get_if<AttributeTerm>(&lhs);
        a && (*op == CmpOp::eq || *op == CmpOp::ne) && at(Tok::ident) &&
        !is_keyword(peek().text) && peek(1).kind != Tok::dot) {
      auto y = name("variable");
      auto m = make_morph_eq(a->attribute, a->column, y);
      return *op == CmpOp::eq ? m : make_not(m);
    }
    auto rhs = term();
    return make_compare(std::move(lhs), *op, std::move(rhs));
  }

  SelectTerm term() {
    const Token& t = peek();
    if (t.kind == Tok::ident && !is_keyword(t.text)) {
      auto v = name("variable");
      expect(Tok::dot);
      auto a = name("attribute name");
      return AttributeTerm{v, a};
    }
    return literal();
  }

  Value literal() {
    const Token& t = peek();
    bool negative = false;
    if (t.kind == Tok::minus) {
      negative = true;
      ++pos_;
    }
    const Token& u = peek();
    if (u.kind == Tok::integer) {
      ++pos_;
      try {
        std::int64_t v = std::stoll((negative ? "-" : "") + u.text);
        return Value(v);
      } catch (const std::exception&) {
        fail("integer literal out of range", u);
      }
    }
    if (u.kind == Tok::decimal) {
      ++pos_;
      try {
        return Value(Decimal::parse((negative ? "-" : "") + u.text));
      } catch (const std::exception& e) {
        fail(e.what(), u);
      }
    }
    if (negative) unexpected("number");
    if (u.kind == Tok::text) {
      ++pos_;
      return Value(u.text);
    }
    if (u.kind == Tok::ident && (u.text == "true" || u.text == "false")) {
      ++pos_;
      return Value(u.text == "true");
    }
    if (u.kind == Tok::ident && (u.text == "decimal" || u.text == "dewey") &&
        peek(1).kind == Tok::lparen) {
      const bool dec = u.text == "decimal";
      pos_ += 2;
      const auto& s = expect(Tok::text);
      expect(Tok::rparen);
      try {
        return dec ? Value(Decimal::parse(s.text)) : Value(DeweyCode::parse(s.text));
      } catch (const std::exception& e) {
        fail(e.what(), s);
      }
    }
    unexpected("attribute term or literal");
  }

  void reject_range_nodes(const FormulaPtr& f) const {
    if (f->kind == FormulaKind::range_test) {
      throw ParseError("range term '" + f->vars[0] + " in " + to_string(f->range) +
                           "' must be a top-level conjunct of the qualification",
                       1, 1);
    }
    if (f->kind == FormulaKind::membership) {
      throw ParseError("relationship membership for '" + f->vars[0] +
                           "' must be a top-level conjunct of the qualification",
                       1, 1);
    }
    for (const auto& c : f->children) reject_range_nodes(c);
  }

  // Range-only conjunct: range tests on a single variable combined with
  // ||, && and !. Returns the variable, or empty when f has another shape.
  static bool range_only(const FormulaPtr& f, std::string& var) {
    switch (f->kind) {
      case FormulaKind::range_test:
        if (var.empty()) var = f->vars[0];
        return var == f->vars[0];
      case FormulaKind::negation:
      case FormulaKind::conjunction:
      case FormulaKind::disjunction:
        for (const auto& c : f->children) {
          if (!range_only(c, var)) return false;
        }
        return true;
      default:
        return false;
    }
  }

  static RangeExpr to_range(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaKind::range_test:
        return f->range;
      case FormulaKind::disjunction:
        return RangeExpr::combine(RangeExpr::Kind::union_of, to_range(f->children[0]),
                                  to_range(f->children[1]));
      case FormulaKind::conjunction: {
        const auto& b = f->children[1];
        if (b->kind == FormulaKind::negation) {
          return RangeExpr::combine(RangeExpr::Kind::difference_of, to_range(f->children[0]),
                                    to_range(b->children[0]));
        }
        return RangeExpr::combine(RangeExpr::Kind::intersect_of, to_range(f->children[0]),
                                  to_range(b));
      }
      default:
        throw ParseError("negated range term for '" + f->vars.at(0) +
                             "' needs a positive range to subtract from",
                         1, 1);
    }
  }

  void lift(const std::vector<FormulaPtr>& conjuncts, CalculusQuery& q) const {
    std::vector<std::string> order;
    std::map<std::string, std::vector<RangeExpr>> positive, negative;
    std::vector<FormulaPtr> matrix;
    for (const auto& c : conjuncts) {
      std::string var;
      if (range_only(c, var)) {
        if (std::find(order.begin(), order.end(), var) == order.end()) order.push_back(var);
        if (c->kind == FormulaKind::negation) {
          negative[var].push_back(to_range(c->children[0]));
        } else {
          positive[var].push_back(to_range(c));
        }
        continue;
      }
      if (c->kind == FormulaKind::membership) {
        q.memberships.push_back(
            {c->vars[0], std::vector<std::string>(c->vars.begin() + 1, c->vars.end()), c->name});
        continue;
      }
      reject_range_nodes(c);
      matrix.push_back(c);
    }
    for (const auto& var : order) {
      auto& pos = positive[var];
      if (pos.empty()) {
        throw ParseError("variable '" + var + "' has only negated range terms", 1, 1);
      }
      RangeExpr r = pos[0];
      for (std::size_t i = 1; i < pos.size(); ++i) {
        r = RangeExpr::combine(RangeExpr::Kind::intersect_of, std::move(r), pos[i]);
      }
      for (auto& n : negative[var]) {
        r = RangeExpr::combine(RangeExpr::Kind::difference_of, std::move(r), n);
      }
      q.ranges.push_back({var, std::move(r)});
    }
    q.matrix = make_all(matrix);
  }
};

// ---------------------------------------------------------------------------
// Printer

std::string term_text(const SelectTerm& t) {
  if (const auto* a = std::get_if<AttributeTerm>(&t)) return a->column + "." + a->attribute;
  return std::get<Value>(t).to_literal();
}

int precedence(const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::disjunction: return 1;
    case FormulaKind::conjunction: return 2;
    case FormulaKind::negation: return 3;
    case FormulaKind::forall:
    case FormulaKind::exists: return 0;
    default: return 4;
  }
}

std::string print(const FormulaPtr& f);

std::string print_child(const FormulaPtr& f, int min_prec) {
  auto s = print(f);
  int p = precedence(f);
  if (p == 0 || p < min_prec) return "(" + s + ")";
  return s;
}

std::string print(const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::truth: return "true";
    case FormulaKind::falsity: return "false";
    case FormulaKind::compare:
      return term_text(f->lhs) + " " + std::string(op_symbol(f->op)) + " " + term_text(f->rhs);
    case FormulaKind::morph_eq: return f->name + "(" + f->vars[0] + ") = " + f->vars[1];
    case FormulaKind::tree:
      return std::string(axis_name(f->axis)) + "(" + f->vars[0] + ", " + f->vars[1] + ")";
    case FormulaKind::reach: return "reach(" + f->vars[0] + ", " + f->vars[1] + ", " + f->name + ")";
    case FormulaKind::nhop:
      return "nhop(" + std::to_string(f->hops) + ", " + f->vars[0] + ", " + f->vars[1] + ", " +
             f->name + ")";
    case FormulaKind::is_null: return "null(" + f->vars[0] + ")";
    case FormulaKind::negation: {
      const auto& c = f->children[0];
      if (c->is_atom()) return "!(" + print(c) + ")";
      return "!" + print_child(c, 4);
    }
    case FormulaKind::conjunction:
      return print_child(f->children[0], 2) + " && " + print_child(f->children[1], 3);
    case FormulaKind::disjunction:
      return print_child(f->children[0], 1) + " || " + print_child(f->children[1], 2);
    case FormulaKind::forall:
    case FormulaKind::exists: {
      std::string range = to_string(f->range);
      if (f->pointed) {
        if (f->range.kind != RangeExpr::Kind::object) range = "(" + range + ")";
        range += "?";
      }
      return std::string(f->kind == FormulaKind::forall ? "forall " : "exists ") + f->vars[0] +
             " in " + range + " : " + print(f->children[0]);
    }
    case FormulaKind::range_test: return f->vars[0] + " in " + to_string(f->range);
    case FormulaKind::membership: {
      std::string s = f->vars[0] + " = (";
      for (std::size_t i = 1; i < f->vars.size(); ++i) s += (i > 1 ? ", " : "") + f->vars[i];
      return s + ") in " + f->name;
    }
  }
  return "?";
}

}  // namespace

CalculusQuery parse_query(std::string_view text) { return Parser(text).query(); }

FormulaPtr parse_formula(std::string_view text) { return Parser(text).formula_only(); }

std::string to_string(const FormulaPtr& f) { return print(f); }

std::string to_string(const CalculusQuery& q) {
  std::string out = "{ ";
  for (std::size_t i = 0; i < q.targets.size(); ++i) out += (i ? ", " : "") + q.targets[i];
  out += " | ";
  std::vector<std::string> parts;
  for (const auto& r : q.ranges) parts.push_back(r.var + " in " + to_string(r.range));
  for (const auto& m : q.memberships) {
    std::string s = m.var + " = (";
    for (std::size_t i = 0; i < m.components.size(); ++i) s += (i ? ", " : "") + m.components[i];
    parts.push_back(s + ") in " + m.relationship);
  }
  // Left spine of the matrix's && chain, one conjunct each.
  std::vector<FormulaPtr> conj;
  FormulaPtr cur = q.matrix;
  while (cur->kind == FormulaKind::conjunction) {
    conj.push_back(cur->children[1]);
    cur = cur->children[0];
  }
  conj.push_back(cur);
  std::reverse(conj.begin(), conj.end());
  const bool omit_true = conj.size() == 1 && conj[0]->kind == FormulaKind::truth && !parts.empty();
  if (!omit_true) {
    for (const auto& c : conj) parts.push_back(print_child(c, 3));
  }
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? " && " : "") + parts[i];
  return out + " }";
}

// ---------------------------------------------------------------------------
// Safety

std::string range_carrier(const RangeExpr& range, const InstanceCategory& cat) {
  std::string carrier;
  for (const auto& name : range.objects()) {
    const auto* obj = cat.find_object(name);
    if (!obj) throw SafetyError("unknown object '" + name + "'");
    if (carrier.empty()) {
      carrier = obj->carrier;
    } else if (carrier != obj->carrier) {
      throw SafetyError("range '" + to_string(range) + "' is not union-compatible: '" + name +
                        "' does not share the carrier '" + carrier + "'");
    }
  }
  return carrier;
}

std::vector<FreeVariable> free_variables(const CalculusQuery& q, const InstanceCategory& cat) {
  std::vector<FreeVariable> out;
  auto has = [&](const std::string& v) {
    return std::any_of(out.begin(), out.end(), [&](const FreeVariable& f) { return f.name == v; });
  };
  for (const auto& r : q.ranges) {
    if (!has(r.var)) out.push_back({r.var, r.range});
  }
  for (const auto& m : q.memberships) {
    if (!has(m.var)) out.push_back({m.var, RangeExpr::of(m.relationship)});
  }
  for (const auto& m : q.memberships) {
    const auto* rel = cat.find_object(m.relationship);
    for (std::size_t i = 0; i < m.components.size(); ++i) {
      if (has(m.components[i])) continue;
      if (!rel || i >= rel->components.size()) {
        throw SafetyError("cannot type component '" + m.components[i] + "' of membership in '" +
                          m.relationship + "'");
      }
      out.push_back({m.components[i], RangeExpr::of(rel->components[i].object)});
    }
  }
  return out;
}

namespace {

class SafetyChecker {
 public:
  SafetyChecker(const CalculusQuery& q, const InstanceCategory& cat) : q_(q), cat_(cat) {}

  std::vector<std::string> run() {
    check_ranges_and_memberships();
    std::set<std::string> seen;
    for (const auto& t : q_.targets) {
      if (!seen.insert(t).second) report("target '" + t + "' is listed twice");
      if (!scope_.count(t)) {
        report("target '" + t + "' has no range term or relationship membership");
      }
    }
    check(q_.matrix);
    return std::move(violations_);
  }

 private:
  const CalculusQuery& q_;
  const InstanceCategory& cat_;
  std::vector<std::string> violations_;
  // variable -> carrier ("" when unknown because of an earlier violation)
  std::map<std::string, std::string> scope_;

  void report(std::string msg) { violations_.push_back(std::move(msg)); }

  std::string carrier_or_report(const RangeExpr& r) {
    try {
      return range_carrier(r, cat_);
    } catch (const SafetyError& e) {
      report(e.what());
      return {};
    }
  }

  void check_ranges_and_memberships() {
    for (const auto& r : q_.ranges) {
      if (scope_.count(r.var)) {
        report("variable '" + r.var + "' has more than one range term");
        continue;
      }
      scope_[r.var] = carrier_or_report(r.range);
    }
    std::set<std::string> rel_vars;
    for (const auto& m : q_.memberships) {
      if (scope_.count(m.var) || !rel_vars.insert(m.var).second) {
        report("relationship variable '" + m.var + "' is bound more than once");
      }
      const auto* rel = cat_.find_object(m.relationship);
      if (!rel) {
        report("unknown relationship object '" + m.relationship + "'");
        scope_[m.var] = "";
        for (const auto& c : m.components) scope_.emplace(c, "");
        continue;
      }
      scope_[m.var] = rel->carrier;
      if (rel->kind != ObjectKind::relationship) {
        report("'" + m.relationship + "' is not a relationship object");
        for (const auto& c : m.components) scope_.emplace(c, "");
        continue;
      }
      if (rel->components.size() != m.components.size()) {
        report("membership '" + m.var + "' lists " + std::to_string(m.components.size()) +
               " components but '" + m.relationship + "' has " +
               std::to_string(rel->components.size()));
      }
      for (std::size_t i = 0; i < m.components.size(); ++i) {
        const auto& c = m.components[i];
        if (rel_vars.count(c)) report("'" + c + "' is used both as a relationship variable and a component");
        if (i >= rel->components.size()) {
          scope_.emplace(c, "");
          continue;
        }
        const auto& comp_carrier = cat_.carrier_of(rel->components[i].object);
        auto it = scope_.find(c);
        if (it == scope_.end()) {
          scope_[c] = comp_carrier;
        } else if (!it->second.empty() && it->second != comp_carrier) {
          report("component '" + c + "' of '" + m.var + "' ranges over '" + it->second +
                 "' but '" + m.relationship + "' expects '" + comp_carrier + "'");
        }
      }
    }
  }

  bool in_scope(const std::string& v) {
    if (scope_.count(v)) return true;
    report("variable '" + v + "' is not range-coupled (no range term, membership or quantifier)");
    return false;
  }

  // Kind of attribute `attr` on every element of `carrier`; reports when the
  // attribute is missing somewhere. nullopt: unknown (empty carrier or error).
  std::optional<ValueKind> attribute_kind(const std::string& var, const std::string& carrier,
                                          const std::string& attr) {
    if (carrier.empty()) return std::nullopt;
    const auto& obj = cat_.object(carrier);
    std::optional<ValueKind> kind;
    bool mixed = false;
    for (const auto& id : obj.members) {
      auto v = cat_.try_attribute_of(id, attr);
      if (!v) {
        report("attribute '" + attr + "' of '" + var + "' is not defined on element '" +
               cat_.key_of(id) + "' of '" + carrier + "'");
        return std::nullopt;
      }
      if (!kind) {
        kind = v->kind();
      } else if (*kind != v->kind()) {
        mixed = true;
      }
    }
    if (mixed) {
      report("attribute '" + attr + "' on '" + carrier + "' mixes value kinds");
      return std::nullopt;
    }
    return kind;
  }

  std::optional<ValueKind> term_kind(const SelectTerm& t, bool& ok) {
    if (const auto* v = std::get_if<Value>(&t)) return v->kind();
    const auto& a = std::get<AttributeTerm>(t);
    if (!in_scope(a.column)) {
      ok = false;
      return std::nullopt;
    }
    return attribute_kind(a.column, scope_[a.column], a.attribute);
  }

  bool dewey_valued(const std::string& var) {
    const auto& carrier = scope_[var];
    if (carrier.empty()) return true;
    for (const auto& id : cat_.object(carrier).members) {
      if (!dewey_of(cat_, id)) {
        report("'" + var + "' ranges over '" + carrier + "' whose element '" + cat_.key_of(id) +
               "' has no dewey code");
        return false;
      }
    }
    return true;
  }

  void check(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaKind::truth:
      case FormulaKind::falsity:
        return;
      case FormulaKind::compare: {
        bool ok = true;
        auto l = term_kind(f->lhs, ok);
        auto r = term_kind(f->rhs, ok);
        if (ok && l && r && *l != *r) {
          report("comparison '" + to_string(f) + "' mixes " + std::string(kind_name(*l)) +
                 " and " + std::string(kind_name(*r)));
        }
        return;
      }
      case FormulaKind::morph_eq: {
        const auto* m = cat_.find_morphism(f->name);
        bool ok = in_scope(f->vars[0]) & in_scope(f->vars[1]);
        if (!m) {
          report("unknown morphism '" + f->name + "'");
          return;
        }
        if (!ok) return;
        const auto& xc = scope_[f->vars[0]];
        const auto& yc = scope_[f->vars[1]];
        if (!xc.empty() && cat_.carrier_of(m->domain) != xc) {
          report("morphism '" + f->name + "' has domain '" + m->domain + "' but '" + f->vars[0] +
                 "' ranges over '" + xc + "'");
        }
        if (!yc.empty() && cat_.carrier_of(m->codomain) != yc) {
          report("morphism '" + f->name + "' has codomain '" + m->codomain + "' but '" +
                 f->vars[1] + "' ranges over '" + yc + "'");
        }
        return;
      }
      case FormulaKind::tree:
        if (in_scope(f->vars[0]) & in_scope(f->vars[1])) {
          dewey_valued(f->vars[0]);
          dewey_valued(f->vars[1]);
        }
        return;
      case FormulaKind::reach:
      case FormulaKind::nhop: {
        bool ok = in_scope(f->vars[0]) & in_scope(f->vars[1]);
        if (f->kind == FormulaKind::nhop && f->hops < 1) report("nhop needs a hop count >= 1");
        const auto* e = cat_.find_object(f->name);
        if (!e) {
          report("unknown edge set '" + f->name + "'");
          return;
        }
        if (e->kind != ObjectKind::relationship || e->components.size() != 2) {
          report("'" + f->name + "' is not a binary relationship usable as an edge set");
          return;
        }
        const auto& node = cat_.carrier_of(e->components[0].object);
        if (cat_.carrier_of(e->components[1].object) != node) {
          report("edge set '" + f->name + "' connects different node objects");
          return;
        }
        if (!ok) return;
        for (const auto& v : f->vars) {
          if (!scope_[v].empty() && scope_[v] != node) {
            report("'" + v + "' ranges over '" + scope_[v] + "' but edge set '" + f->name +
                   "' connects '" + node + "'");
          }
        }
        return;
      }
      case FormulaKind::is_null:
        in_scope(f->vars[0]);
        return;
      case FormulaKind::negation:
      case FormulaKind::conjunction:
      case FormulaKind::disjunction:
        for (const auto& c : f->children) check(c);
        return;
      case FormulaKind::forall:
      case FormulaKind::exists: {
        const auto& v = f->vars[0];
        if (scope_.count(v)) {
          report("quantified variable '" + v + "' shadows another variable of the same name");
          check(f->children[0]);
          return;
        }
        scope_[v] = carrier_or_report(f->range);
        check(f->children[0]);
        scope_.erase(v);
        return;
      }
      case FormulaKind::range_test:
      case FormulaKind::membership:
        report("range term or membership for '" + f->vars[0] + "' nested inside the matrix");
        return;
    }
  }
};

}  // namespace

std::vector<std::string> check_safety(const CalculusQuery& q, const InstanceCategory& cat) {
  return SafetyChecker(q, cat).run();
}

void require_safe(const CalculusQuery& q, const InstanceCategory& cat) {
  auto v = check_safety(q, cat);
  if (v.empty()) return;
  std::string msg = "unsafe query:";
  for (const auto& s : v) msg += "\n  " + s;
  throw SafetyError(msg);
}

}  // namespace catq
