/* SPDX-License-Identifier: Apache-2.0 */

#include <cctype>
#include <set>
#include <utility>
#include <vector>

#include "iml/syntax.hpp"

namespace iml {

namespace {

enum class Tok {
  Eof, Int, LIdent, UIdent, QIdent, TyVar, Keyword, Sym, AttrOpen
};

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  Span span;
};

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {
      "type", "of", "let", "rec", "and", "in", "fun", "function", "match", "with",
      "if", "then", "else", "theorem", "lemma", "verify", "instance", "upto", "true",
      "false", "not"};
  return k;
}

// Longest-match symbol table.
const std::vector<std::string>& symbols() {
  static const std::vector<std::string> s = {
      "==>", "->", "<=", ">=", "<>", "&&", "||", "::", "<<", "(", ")", "[", "]", ",",
      ";",   "|",  "=",  "<",  ">",  "+",  "-",  "*",  "@",  ":", ".", "_"};
  return s;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      Token t;
      t.span = here();
      if (pos_ >= src_.size()) {
        t.kind = Tok::Eof;
        out.push_back(t);
        return out;
      }
      lex_one(t);
      t.span.end = static_cast<std::uint32_t>(pos_);
      out.push_back(std::move(t));
    }
  }

 private:
  Span here() const {
    Span s;
    s.begin = s.end = static_cast<std::uint32_t>(pos_);
    s.line = line_;
    s.col = col_;
    return s;
  }

  char peek(std::size_t k = 0) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_trivia() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(peek()))) advance();
      if (peek() == '(' && peek(1) == '*' && peek(2) != ')') {
        Span start = here();
        int depth = 0;
        do {
          if (pos_ >= src_.size()) throw ParseError(start, "unterminated comment at end of input");
          if (peek() == '(' && peek(1) == '*') {
            ++depth;
            advance();
            advance();
          } else if (peek() == '*' && peek(1) == ')') {
            --depth;
            advance();
            advance();
          } else {
            advance();
          }
        } while (depth > 0);
        continue;
      }
      return;
    }
  }

  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }

  std::string take_ident() {
    std::string s;
    while (pos_ < src_.size() && ident_char(peek())) {
      s += peek();
      advance();
    }
    return s;
  }

  void lex_one(Token& t) {
    char c = peek();
    unsigned char uc = static_cast<unsigned char>(c);
    if (std::isdigit(uc)) {
      t.kind = Tok::Int;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        t.text += peek();
        advance();
      }
      // a leading zero would read as octal
      t.text.erase(0, std::min(t.text.find_first_not_of('0'), t.text.size() - 1));
      return;
    }
    if (c == '\'' && std::isalpha(static_cast<unsigned char>(peek(1)))) {
      advance();
      t.kind = Tok::TyVar;
      t.text = "'" + take_ident();
      return;
    }
    if (std::islower(uc) || (c == '_' && ident_char(peek(1)))) {
      t.text = take_ident();
      t.kind = keywords().count(t.text) ? Tok::Keyword : Tok::LIdent;
      return;
    }
    if (std::isupper(uc)) {
      t.text = take_ident();
      t.kind = Tok::UIdent;
      // `Mod.name` is one qualified token; `Mod.(` stays split for local opens.
      if (peek() == '.' && std::islower(static_cast<unsigned char>(peek(1)))) {
        advance();
        t.text += "." + take_ident();
        t.kind = Tok::QIdent;
      } else if (peek() == '.' && peek(1) == 't' && !ident_char(peek(2))) {
        advance();
        advance();
        t.text += ".t";
        t.kind = Tok::QIdent;
      }
      return;
    }
    if (c == '[' && peek(1) == '@' && peek(2) == '@') {
      advance();
      advance();
      advance();
      t.kind = Tok::AttrOpen;
      t.text = "[@@";
      return;
    }
    for (const auto& s : symbols()) {
      if (src_.substr(pos_, s.size()) == s) {
        for (std::size_t i = 0; i < s.size(); ++i) advance();
        t.kind = Tok::Sym;
        t.text = s;
        return;
      }
    }
    Span sp = here();
    std::string shown = (uc >= 32 && uc < 127) ? std::string(1, c) : "byte " + std::to_string(uc);
    throw ParseError(sp, "unexpected character '" + shown + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
};

const std::set<std::string>& builtin_qualified() {
  static const std::set<std::string> s = {
      "Ordinal.of_int", "Ordinal.pair", "Ordinal.plus", "Ordinal.lt", "Ordinal.t",
      "List.length",    "List.map",     "List.rev",     "List.fold_left", "List.append"};
  return s;
}

constexpr int kMaxDepth = 400;

class Parser {
 public:
  Parser(std::vector<Token> toks, const ParseOptions& opts) : toks_(std::move(toks)), opts_(opts) {}

  SourceModule module() {
    SourceModule m;
    while (!at_eof()) m.decls.push_back(decl());
    return m;
  }

  ExprPtr lone_expr() {
    auto e = expr();
    if (!at_eof()) fail("end of input");
    return e;
  }

 private:
  // -- token helpers ---------------------------------------------------------
  const Token& cur() const { return toks_[pos_]; }
  const Token& ahead(std::size_t k) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at_eof() const { return cur().kind == Tok::Eof; }
  bool is_sym(const char* s) const { return cur().kind == Tok::Sym && cur().text == s; }
  bool is_kw(const char* s) const { return cur().kind == Tok::Keyword && cur().text == s; }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  static void distinct(const std::vector<std::string>& names, const char* what, const Span& at) {
    std::set<std::string> seen;
    for (const auto& n : names)
      if (n != "_" && !seen.insert(n).second) throw ParseError(at, std::string(what) + " " + n + " is bound twice");
  }

  [[noreturn]] void fail(const std::string& expected) const {
    std::string found = at_eof() ? "end of input" : "'" + cur().text + "'";
    throw ParseError(cur().span, "expected " + expected + " but found " + found);
  }

  void expect_sym(const char* s) {
    if (!is_sym(s)) fail(std::string("'") + s + "'");
    next();
  }
  void expect_kw(const char* s) {
    if (!is_kw(s)) fail(std::string("'") + s + "'");
    next();
  }
  bool accept_sym(const char* s) {
    if (!is_sym(s)) return false;
    next();
    return true;
  }
  bool accept_kw(const char* s) {
    if (!is_kw(s)) return false;
    next();
    return true;
  }

  std::string lident(const char* what) {
    if (cur().kind != Tok::LIdent) fail(what);
    return next().text;
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p_(p) {
      if (++p_.depth_ > kMaxDepth) throw ParseError(p_.cur().span, "nesting too deep");
    }
    ~DepthGuard() { --p_.depth_; }
    Parser& p_;
  };

  Span span_from(const Span& start) const {
    Span s = start;
    const Token& prev = toks_[pos_ > 0 ? pos_ - 1 : 0];
    s.end = std::max(prev.span.end, start.begin);
    return s;
  }

  ExprPtr at(ExprPtr e, const Span& start) {
    std::const_pointer_cast<Expr>(e)->span = span_from(start);
    return e;
  }
  PatternPtr at(PatternPtr p, const Span& start) {
    std::const_pointer_cast<Pattern>(p)->span = span_from(start);
    return p;
  }

  std::string qualify(const std::string& name) const {
    for (auto it = opens_.rbegin(); it != opens_.rend(); ++it) {
      auto q = *it + "." + name;
      if (builtin_qualified().count(q)) return q;
    }
    return name;
  }

  // -- declarations ----------------------------------------------------------
  Decl decl() {
    Span start = cur().span;
    Decl d;
    if (accept_kw("type")) {
      d.kind = Decl::Kind::Type;
      d.type = type_decl();
    } else if (accept_kw("let")) {
      d.kind = Decl::Kind::Fun;
      bool rec = accept_kw("rec");
      d.funs.push_back(fun_decl(rec));
      if (rec && accept_kw("and")) d.funs.push_back(fun_decl(true));
    } else if (accept_kw("theorem") || accept_kw("lemma")) {
      d.kind = Decl::Kind::Theorem;
      d.funs.push_back(fun_decl(false));
    } else if (is_kw("verify") || is_kw("instance")) {
      d.kind = next().text == "verify" ? Decl::Kind::Verify : Decl::Kind::Instance;
      if (accept_kw("upto")) {
        if (cur().kind != Tok::Int) fail("a bound after 'upto'");
        auto text = next().text;
        if (text.size() > 18) throw ParseError(toks_[pos_ - 1].span, "bound too large");
        d.bound = std::stoull(text);
      }
      d.goal = expr();
      d.annotations = attributes({});
    } else {
      fail("a declaration ('type', 'let', 'theorem', 'verify' or 'instance')");
    }
    accept_sym(";");
    d.span = span_from(start);
    return d;
  }

  TypeDecl type_decl() {
    TypeDecl t;
    if (cur().kind == Tok::TyVar) {
      t.params.push_back(next().text);
    } else if (is_sym("(") && ahead(1).kind == Tok::TyVar) {
      next();
      t.params.push_back(next().text);
      while (accept_sym(",")) {
        if (cur().kind != Tok::TyVar) fail("a type variable");
        t.params.push_back(next().text);
      }
      expect_sym(")");
    }
    t.name = lident("a type name");
    expect_sym("=");
    accept_sym("|");
    do {
      Constructor c;
      if (cur().kind != Tok::UIdent) fail("a constructor name");
      c.name = next().text;
      if (accept_kw("of")) {
        auto ty = type_expr();
        if (ty->kind == Type::Kind::Tuple && !last_type_parenthesized_)
          c.args = ty->args;
        else
          c.args = {ty};
      }
      for (const auto& prev : t.ctors)
        if (prev.name == c.name) throw ParseError(cur().span, "constructor " + c.name + " is declared twice");
      t.ctors.push_back(std::move(c));
    } while (accept_sym("|"));
    return t;
  }

  std::string def_name() {
    if (cur().kind == Tok::QIdent && opts_.allow_qualified_definitions) return next().text;
    return lident("a function name");
  }

  FunDecl fun_decl(bool rec) {
    FunDecl f;
    f.span = cur().span;
    f.recursive = rec;
    f.name = def_name();
    f.params = params();
    if (accept_sym(":")) f.ret_annot = type_expr();
    expect_sym("=");
    f.body = expr();
    // `let f x = fun y -> e` and `function` bodies become extra parameters.
    while (f.body->kind == Expr::Kind::Lambda) {
      for (std::size_t i = 0; i < f.body->params.size(); ++i)
        f.params.push_back(Param{f.body->params[i], f.body->param_types[i]});
      f.body = f.body->args[0];
    }
    std::vector<std::string> names;
    for (const auto& p : f.params) names.push_back(p.name);
    distinct(names, "parameter", f.span);
    f.annotations = attributes(f.params);
    f.span = span_from(f.span);
    return f;
  }

  std::vector<Param> params() {
    std::vector<Param> ps;
    for (;;) {
      if (cur().kind == Tok::LIdent) {
        ps.push_back(Param{next().text, nullptr});
      } else if (is_sym("(") && ahead(1).kind == Tok::LIdent && ahead(2).kind == Tok::Sym &&
                 ahead(2).text == ":") {
        next();
        Param p{next().text, nullptr};
        next();
        p.annot = type_expr();
        expect_sym(")");
        ps.push_back(std::move(p));
      } else if (is_sym("_")) {
        next();
        ps.push_back(Param{"_", nullptr});
      } else {
        return ps;
      }
    }
  }

  std::vector<Annotation> attributes(const std::vector<Param>&) {
    std::vector<Annotation> out;
    while (cur().kind == Tok::AttrOpen) {
      next();
      Annotation a;
      if (cur().kind != Tok::LIdent) fail("an attribute name");
      auto name = next().text;
      if (name == "adm") {
        a.kind = Annotation::Kind::Adm;
        do {
          a.names.push_back(lident("a parameter name"));
        } while (accept_sym(","));
      } else if (name == "measure") {
        a.kind = Annotation::Kind::Measure;
        a.measure = expr();
      } else if (name == "auto") {
        a.kind = Annotation::Kind::Auto;
      } else if (name == "rewrite") {
        a.kind = Annotation::Kind::Rewrite;
      } else {
        throw ParseError(toks_[pos_ - 1].span, "unknown attribute '" + name + "'");
      }
      expect_sym("]");
      out.push_back(std::move(a));
    }
    return out;
  }

  // -- types -----------------------------------------------------------------
  bool last_type_parenthesized_ = false;

  TypePtr type_expr() {
    DepthGuard g(*this);
    auto t = type_tuple();
    if (accept_sym("->")) {
      auto r = type_expr();
      last_type_parenthesized_ = false;
      return tarrow(t, r);
    }
    return t;
  }

  TypePtr type_tuple() {
    std::vector<TypePtr> elems{type_app()};
    while (accept_sym("*")) elems.push_back(type_app());
    if (elems.size() == 1) return elems[0];
    last_type_parenthesized_ = false;
    return ttuple(std::move(elems));
  }

  TypePtr type_app() {
    bool paren = false;
    std::vector<TypePtr> args;
    TypePtr t;
    if (cur().kind == Tok::TyVar) {
      t = tvar(next().text);
    } else if (cur().kind == Tok::LIdent) {
      t = tcon(next().text);
    } else if (cur().kind == Tok::QIdent) {
      t = tcon(next().text);
    } else if (accept_sym("(")) {
      args.push_back(type_expr());
      while (accept_sym(",")) args.push_back(type_expr());
      expect_sym(")");
      if (args.size() > 1) {
        if (cur().kind != Tok::LIdent) fail("a type constructor after a type argument list");
        t = tcon(next().text, args);
      } else {
        t = args[0];
        paren = true;
      }
    } else {
      fail("a type");
    }
    while (cur().kind == Tok::LIdent || cur().kind == Tok::QIdent) {
      t = tcon(next().text, {t});
      paren = false;
    }
    last_type_parenthesized_ = paren;
    return t;
  }

  // -- expressions -----------------------------------------------------------
  ExprPtr expr() {
    DepthGuard g(*this);
    Span start = cur().span;
    auto first = expr_nc();
    if (!is_sym(",")) return first;
    std::vector<ExprPtr> elems{first};
    while (accept_sym(",")) elems.push_back(expr_nc());
    return at(mk_tuple(std::move(elems)), start);
  }

  ExprPtr expr_nc() {
    DepthGuard g(*this);
    Span start = cur().span;
    if (accept_kw("fun")) {
      auto ps = params();
      if (ps.empty()) fail("a parameter");
      std::vector<std::string> names;
      for (const auto& p : ps) names.push_back(p.name);
      distinct(names, "parameter", start);
      expect_sym("->");
      auto body = expr();
      auto lam = mk_lambda({}, body);
      auto l = std::const_pointer_cast<Expr>(lam);
      for (auto& p : ps) {
        l->params.push_back(p.name);
        l->param_types.push_back(p.annot);
      }
      return at(lam, start);
    }
    if (accept_kw("function")) {
      auto cases = match_cases();
      std::set<std::string> avoid;
      for (const auto& c : cases) {
        auto fv = free_vars(c.body);
        avoid.insert(fv.begin(), fv.end());
        std::vector<std::string> pv;
        pattern_vars(c.pattern, pv);
        avoid.insert(pv.begin(), pv.end());
      }
      auto x = fresh_name("x", avoid);
      auto m = at(mk_match(at(mk_var(x), start), std::move(cases)), start);
      return at(mk_lambda({x}, m), start);
    }
    if (accept_kw("let")) {
      if (is_kw("rec")) fail("a non-recursive local binding ('let rec' is top-level only)");
      auto name = lident("a variable name");
      auto ps = params();
      expect_sym("=");
      auto bound = expr();
      expect_kw("in");
      auto body = expr();
      if (!ps.empty()) {
        std::vector<std::string> names;
        for (auto& p : ps) names.push_back(p.name);
        bound = at(mk_lambda(names, bound), start);
      }
      return at(mk_let(name, bound, body), start);
    }
    if (accept_kw("if")) {
      auto c = expr();
      expect_kw("then");
      auto t = expr_nc();
      expect_kw("else");
      auto e = expr_nc();
      return at(mk_if(c, t, e), start);
    }
    if (accept_kw("match")) {
      auto s = expr();
      expect_kw("with");
      return at(mk_match(s, match_cases()), start);
    }
    return implies();
  }

  std::vector<MatchCase> match_cases() {
    std::vector<MatchCase> cases;
    accept_sym("|");
    do {
      Span ps = cur().span;
      auto p = pattern();
      std::vector<std::string> names;
      pattern_vars(p, names);
      distinct(names, "pattern variable", ps);
      expect_sym("->");
      auto body = expr();
      cases.push_back(MatchCase{p, body});
    } while (accept_sym("|"));
    return cases;
  }

  ExprPtr implies() {
    Span start = cur().span;
    auto lhs = or_expr();
    if (accept_sym("==>")) {
      auto rhs = is_open_construct() ? expr_nc() : implies();
      return at(mk_bin(BinOp::Or, at(mk_not(lhs), start), rhs), start);
    }
    return lhs;
  }

  bool is_open_construct() const {
    return is_kw("fun") || is_kw("function") || is_kw("let") || is_kw("if") || is_kw("match");
  }

  ExprPtr or_expr() {
    Span start = cur().span;
    auto lhs = and_expr();
    while (accept_sym("||")) lhs = at(mk_bin(BinOp::Or, lhs, and_expr()), start);
    return lhs;
  }

  ExprPtr and_expr() {
    Span start = cur().span;
    auto lhs = cmp_expr();
    while (accept_sym("&&")) lhs = at(mk_bin(BinOp::And, lhs, cmp_expr()), start);
    return lhs;
  }

  ExprPtr cmp_expr() {
    Span start = cur().span;
    auto lhs = cons_expr();
    if (cur().kind != Tok::Sym) return lhs;
    const auto& s = cur().text;
    std::optional<BinOp> op;
    if (s == "=") op = BinOp::Eq;
    else if (s == "<") op = BinOp::Lt;
    else if (s == "<=") op = BinOp::Le;
    else if (s == ">") op = BinOp::Gt;
    else if (s == ">=") op = BinOp::Ge;
    if (op) {
      next();
      return at(mk_bin(*op, lhs, cons_expr()), start);
    }
    if (s == "<>") {
      next();
      return at(mk_not(at(mk_bin(BinOp::Eq, lhs, cons_expr()), start)), start);
    }
    if (s == "<<") {
      next();
      return at(mk_call("Ordinal.lt", {lhs, cons_expr()}), start);
    }
    return lhs;
  }

  ExprPtr cons_expr() {
    Span start = cur().span;
    auto lhs = add_expr();
    if (accept_sym("::")) return at(mk_construct("Cons", {lhs, cons_expr()}), start);
    if (accept_sym("@")) return at(mk_call("List.append", {lhs, cons_expr()}), start);
    return lhs;
  }

  ExprPtr add_expr() {
    Span start = cur().span;
    auto lhs = mul_expr();
    for (;;) {
      if (accept_sym("+")) lhs = at(mk_bin(BinOp::Add, lhs, mul_expr()), start);
      else if (accept_sym("-")) lhs = at(mk_bin(BinOp::Sub, lhs, mul_expr()), start);
      else return lhs;
    }
  }

  ExprPtr mul_expr() {
    Span start = cur().span;
    auto lhs = unary_expr();
    while (accept_sym("*")) lhs = at(mk_bin(BinOp::Mul, lhs, unary_expr()), start);
    return lhs;
  }

  ExprPtr unary_expr() {
    DepthGuard g(*this);
    Span start = cur().span;
    if (accept_sym("-")) {
      if (cur().kind == Tok::Int) {
        BigInt v(next().text);
        return at(mk_int(-v), start);
      }
      return at(mk_bin(BinOp::Sub, at(mk_int(0), start), unary_expr()), start);
    }
    if (accept_kw("not")) return at(mk_not(unary_expr()), start);
    return app_expr();
  }

  bool starts_atom() const {
    switch (cur().kind) {
      case Tok::Int:
      case Tok::LIdent:
      case Tok::UIdent:
      case Tok::QIdent:
        return true;
      case Tok::Keyword:
        return cur().text == "true" || cur().text == "false";
      case Tok::Sym:
        return cur().text == "(" || cur().text == "[";
      default:
        return false;
    }
  }

  ExprPtr app_expr() {
    Span start = cur().span;
    if (cur().kind == Tok::UIdent && !(ahead(1).kind == Tok::Sym && ahead(1).text == ".")) {
      auto ctor = next().text;
      std::vector<ExprPtr> args;
      if (starts_atom()) {
        auto a = atom();
        if (a->kind == Expr::Kind::Tuple && !last_atom_was_nested_tuple_)
          args = a->args;
        else
          args = {a};
      }
      return at(mk_construct(ctor, std::move(args)), start);
    }
    auto fn = atom();
    if (!starts_atom()) return fn;
    std::vector<ExprPtr> args;
    while (starts_atom()) args.push_back(atom());
    return at(mk_app(fn, std::move(args)), start);
  }

  bool last_atom_was_nested_tuple_ = false;

  ExprPtr operator_section(const Span& start) {
    static const std::vector<std::pair<std::string, BinOp>> ops = {
        {"+", BinOp::Add}, {"-", BinOp::Sub}, {"*", BinOp::Mul}, {"=", BinOp::Eq},
        {"<", BinOp::Lt},  {"<=", BinOp::Le}, {">", BinOp::Gt},  {">=", BinOp::Ge},
        {"&&", BinOp::And}, {"||", BinOp::Or}};
    for (const auto& [sym, op] : ops) {
      if (is_sym(sym.c_str()) && ahead(1).kind == Tok::Sym && ahead(1).text == ")") {
        next();
        next();
        auto body = at(mk_bin(op, at(mk_var("a"), start), at(mk_var("b"), start)), start);
        return at(mk_lambda({"a", "b"}, body), start);
      }
    }
    return nullptr;
  }

  ExprPtr atom() {
    DepthGuard g(*this);
    Span start = cur().span;
    last_atom_was_nested_tuple_ = false;
    switch (cur().kind) {
      case Tok::Int:
        return at(mk_int(BigInt(next().text)), start);
      case Tok::LIdent:
        return at(mk_var(qualify(next().text)), start);
      case Tok::QIdent:
        return at(mk_var(next().text), start);
      case Tok::UIdent: {
        auto mod = next().text;
        expect_sym(".");
        expect_sym("(");
        opens_.push_back(mod);
        auto e = expr();
        opens_.pop_back();
        expect_sym(")");
        return e;
      }
      case Tok::Keyword:
        if (accept_kw("true")) return at(mk_bool(true), start);
        if (accept_kw("false")) return at(mk_bool(false), start);
        break;
      case Tok::Sym:
        if (accept_sym("(")) {
          if (auto sec = operator_section(start)) return sec;
          auto e = expr();
          expect_sym(")");
          // `((a, b))` is one tuple argument, not an argument list.
          last_atom_was_nested_tuple_ = paren_tuples_.count(e.get()) > 0;
          if (e->kind == Expr::Kind::Tuple) paren_tuples_.insert(e.get());
          return e;
        }
        if (accept_sym("[")) {
          std::vector<ExprPtr> elems;
          if (!is_sym("]")) {
            elems.push_back(expr_nc());
            while (accept_sym(";")) {
              if (is_sym("]")) break;
              elems.push_back(expr_nc());
            }
          }
          expect_sym("]");
          ExprPtr lst = at(mk_construct("Nil", {}), start);
          for (auto it = elems.rbegin(); it != elems.rend(); ++it)
            lst = at(mk_construct("Cons", {*it, lst}), start);
          return lst;
        }
        break;
      default:
        break;
    }
    fail("an expression");
  }

  std::set<const Expr*> paren_tuples_;

  // -- patterns --------------------------------------------------------------
  PatternPtr pattern() {
    DepthGuard g(*this);
    Span start = cur().span;
    auto first = pattern_cons();
    if (!is_sym(",")) return first;
    std::vector<PatternPtr> elems{first};
    while (accept_sym(",")) elems.push_back(pattern_cons());
    return at(ptuple(std::move(elems)), start);
  }

  PatternPtr pattern_cons() {
    Span start = cur().span;
    auto lhs = pattern_app();
    if (accept_sym("::")) return at(pconstruct("Cons", {lhs, pattern_cons()}), start);
    return lhs;
  }

  PatternPtr pattern_app() {
    Span start = cur().span;
    if (cur().kind == Tok::UIdent) {
      auto ctor = next().text;
      std::vector<PatternPtr> args;
      if (starts_pattern_atom()) {
        bool paren_tuple = is_sym("(") && ahead(1).kind == Tok::Sym && ahead(1).text == "(";
        auto a = pattern_atom();
        if (a->kind == Pattern::Kind::Tuple && !paren_tuple)
          args = a->args;
        else
          args = {a};
      }
      return at(pconstruct(ctor, std::move(args)), start);
    }
    return pattern_atom();
  }

  bool starts_pattern_atom() const {
    switch (cur().kind) {
      case Tok::Int:
      case Tok::LIdent:
      case Tok::UIdent:
        return true;
      case Tok::Keyword:
        return cur().text == "true" || cur().text == "false";
      case Tok::Sym:
        return cur().text == "(" || cur().text == "[" || cur().text == "_" || cur().text == "-";
      default:
        return false;
    }
  }

  PatternPtr pattern_atom() {
    DepthGuard g(*this);
    Span start = cur().span;
    switch (cur().kind) {
      case Tok::Int:
        return at(pint(BigInt(next().text)), start);
      case Tok::LIdent:
        return at(pvar(next().text), start);
      case Tok::UIdent:
        return at(pconstruct(next().text, {}), start);
      case Tok::Keyword:
        if (accept_kw("true")) return at(pbool(true), start);
        if (accept_kw("false")) return at(pbool(false), start);
        break;
      case Tok::Sym:
        if (accept_sym("_")) return at(pwild(), start);
        if (accept_sym("-")) {
          if (cur().kind != Tok::Int) fail("an integer literal");
          BigInt v(next().text);
          return at(pint(-v), start);
        }
        if (accept_sym("(")) {
          auto p = pattern();
          expect_sym(")");
          return p;
        }
        if (accept_sym("[")) {
          std::vector<PatternPtr> elems;
          if (!is_sym("]")) {
            elems.push_back(pattern_cons());
            while (accept_sym(";")) {
              if (is_sym("]")) break;
              elems.push_back(pattern_cons());
            }
          }
          expect_sym("]");
          PatternPtr lst = at(pconstruct("Nil", {}), start);
          for (auto it = elems.rbegin(); it != elems.rend(); ++it)
            lst = at(pconstruct("Cons", {*it, lst}), start);
          return lst;
        }
        break;
      default:
        break;
    }
    fail("a pattern");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  ParseOptions opts_;
  std::vector<std::string> opens_;
};

}  // namespace

bool is_builtin_qualified(const std::string& name) { return builtin_qualified().count(name) > 0; }

SourceModule parse_module(std::string_view text, const ParseOptions& opts) {
  Parser p(Lexer(text).run(), opts);
  return p.module();
}

ExprPtr parse_expr(std::string_view text) {
  Parser p(Lexer(text).run(), {});
  return p.lone_expr();
}

}  // namespace iml
