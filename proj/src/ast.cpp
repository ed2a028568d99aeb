/* SPDX-License-Identifier: Apache-2.0 */

#include "iml/ast.hpp"

#include <algorithm>
#include <utility>

namespace iml {

// ---------------------------------------------------------------------------
// Types

TypePtr tvar(std::string name) {
  auto t = std::make_shared<Type>();
  t->kind = Type::Kind::Var;
  t->name = std::move(name);
  return t;
}

TypePtr tcon(std::string name, std::vector<TypePtr> args) {
  auto t = std::make_shared<Type>();
  t->kind = Type::Kind::Con;
  t->name = std::move(name);
  t->args = std::move(args);
  return t;
}

TypePtr ttuple(std::vector<TypePtr> elems) {
  auto t = std::make_shared<Type>();
  t->kind = Type::Kind::Tuple;
  t->args = std::move(elems);
  return t;
}

TypePtr tarrow(TypePtr from, TypePtr to) {
  auto t = std::make_shared<Type>();
  t->kind = Type::Kind::Arrow;
  t->args = {std::move(from), std::move(to)};
  return t;
}

TypePtr tarrows(const std::vector<TypePtr>& from, TypePtr to) {
  TypePtr r = std::move(to);
  for (auto it = from.rbegin(); it != from.rend(); ++it) r = tarrow(*it, r);
  return r;
}

TypePtr tint() {
  static const TypePtr t = tcon("int");
  return t;
}
TypePtr tbool() {
  static const TypePtr t = tcon("bool");
  return t;
}
TypePtr tordinal() {
  static const TypePtr t = tcon("Ordinal.t");
  return t;
}

bool type_equal(const TypePtr& a, const TypePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->name != b->name || a->args.size() != b->args.size())
    return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!type_equal(a->args[i], b->args[i])) return false;
  return true;
}

namespace {

// prec: 0 = arrow context, 1 = tuple element, 2 = constructor argument
void print_type(const TypePtr& t, int prec, std::string& out) {
  if (!t) {
    out += "?";
    return;
  }
  switch (t->kind) {
    case Type::Kind::Var:
      out += t->name;
      return;
    case Type::Kind::Con:
      if (t->args.size() == 1) {
        print_type(t->args[0], 2, out);
        out += " ";
      } else if (t->args.size() > 1) {
        out += "(";
        for (std::size_t i = 0; i < t->args.size(); ++i) {
          if (i) out += ", ";
          print_type(t->args[i], 0, out);
        }
        out += ") ";
      }
      out += t->name;
      return;
    case Type::Kind::Tuple: {
      if (prec >= 1) out += "(";
      for (std::size_t i = 0; i < t->args.size(); ++i) {
        if (i) out += " * ";
        print_type(t->args[i], 2, out);
      }
      if (prec >= 1) out += ")";
      return;
    }
    case Type::Kind::Arrow:
      if (prec >= 1) out += "(";
      print_type(t->args[0], 1, out);
      out += " -> ";
      print_type(t->args[1], 0, out);
      if (prec >= 1) out += ")";
      return;
  }
}

}  // namespace

std::string type_to_string(const TypePtr& t) {
  std::string out;
  print_type(t, 0, out);
  return out;
}

void type_vars(const TypePtr& t, std::set<std::string>& out) {
  if (!t) return;
  if (t->kind == Type::Kind::Var) {
    out.insert(t->name);
    return;
  }
  for (const auto& a : t->args) type_vars(a, out);
}

bool is_ground_type(const TypePtr& t) {
  std::set<std::string> vs;
  type_vars(t, vs);
  return t && vs.empty();
}

// ---------------------------------------------------------------------------
// Patterns

PatternPtr pvar(std::string name) {
  auto p = std::make_shared<Pattern>();
  p->kind = Pattern::Kind::Var;
  p->name = std::move(name);
  return p;
}
PatternPtr pwild() {
  auto p = std::make_shared<Pattern>();
  p->kind = Pattern::Kind::Wildcard;
  return p;
}
PatternPtr pconstruct(std::string ctor, std::vector<PatternPtr> args) {
  auto p = std::make_shared<Pattern>();
  p->kind = Pattern::Kind::Construct;
  p->name = std::move(ctor);
  p->args = std::move(args);
  return p;
}
PatternPtr ptuple(std::vector<PatternPtr> elems) {
  auto p = std::make_shared<Pattern>();
  p->kind = Pattern::Kind::Tuple;
  p->args = std::move(elems);
  return p;
}
PatternPtr pint(BigInt v) {
  auto p = std::make_shared<Pattern>();
  p->kind = Pattern::Kind::Int;
  p->ival = std::move(v);
  return p;
}
PatternPtr pbool(bool v) {
  auto p = std::make_shared<Pattern>();
  p->kind = Pattern::Kind::Bool;
  p->bval = v;
  return p;
}

void pattern_vars(const PatternPtr& p, std::vector<std::string>& out) {
  if (p->kind == Pattern::Kind::Var) out.push_back(p->name);
  for (const auto& a : p->args) pattern_vars(a, out);
}

const char* binop_symbol(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Eq: return "=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
  }
  return "?";
}

bool is_comparison(BinOp op) {
  return op == BinOp::Eq || op == BinOp::Lt || op == BinOp::Le || op == BinOp::Gt ||
         op == BinOp::Ge;
}

bool is_arith(BinOp op) { return op == BinOp::Add || op == BinOp::Sub || op == BinOp::Mul; }

// ---------------------------------------------------------------------------
// Expression constructors

namespace {

std::shared_ptr<Expr> node(Expr::Kind k) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  return e;
}

}  // namespace

ExprPtr mk_int(BigInt v) {
  auto e = node(Expr::Kind::Int);
  e->ival = std::move(v);
  e->type = tint();
  return e;
}

ExprPtr mk_bool(bool v) {
  auto e = node(Expr::Kind::Bool);
  e->bval = v;
  e->type = tbool();
  return e;
}

ExprPtr mk_var(std::string name, TypePtr type) {
  auto e = node(Expr::Kind::Var);
  e->name = std::move(name);
  e->type = std::move(type);
  return e;
}

ExprPtr mk_app(ExprPtr fn, std::vector<ExprPtr> args) {
  auto e = node(Expr::Kind::App);
  e->args.reserve(args.size() + 1);
  e->args.push_back(std::move(fn));
  for (auto& a : args) e->args.push_back(std::move(a));
  return e;
}

ExprPtr mk_call(std::string fn, std::vector<ExprPtr> args, TypePtr type) {
  auto e = std::const_pointer_cast<Expr>(mk_app(mk_var(std::move(fn)), std::move(args)));
  e->type = std::move(type);
  return e;
}

ExprPtr mk_lambda(std::vector<std::string> params, ExprPtr body) {
  auto e = node(Expr::Kind::Lambda);
  e->params = std::move(params);
  e->param_types.resize(e->params.size());
  e->args = {std::move(body)};
  return e;
}

ExprPtr mk_let(std::string name, ExprPtr bound, ExprPtr body) {
  auto e = node(Expr::Kind::Let);
  e->name = std::move(name);
  e->type = body->type;
  e->args = {std::move(bound), std::move(body)};
  return e;
}

ExprPtr mk_if(ExprPtr c, ExprPtr t, ExprPtr f) {
  auto e = node(Expr::Kind::If);
  e->type = t->type ? t->type : f->type;
  e->args = {std::move(c), std::move(t), std::move(f)};
  return e;
}

ExprPtr mk_match(ExprPtr scrutinee, std::vector<MatchCase> cases) {
  auto e = node(Expr::Kind::Match);
  if (!cases.empty()) e->type = cases.front().body->type;
  e->args = {std::move(scrutinee)};
  e->cases = std::move(cases);
  return e;
}

ExprPtr mk_construct(std::string ctor, std::vector<ExprPtr> args, TypePtr type) {
  auto e = node(Expr::Kind::Construct);
  e->name = std::move(ctor);
  e->args = std::move(args);
  e->type = std::move(type);
  return e;
}

ExprPtr mk_tuple(std::vector<ExprPtr> elems) {
  auto e = node(Expr::Kind::Tuple);
  std::vector<TypePtr> ts;
  bool typed = true;
  for (const auto& x : elems) {
    if (!x->type) typed = false;
    ts.push_back(x->type);
  }
  if (typed) e->type = ttuple(std::move(ts));
  e->args = std::move(elems);
  return e;
}

ExprPtr mk_bin(BinOp op, ExprPtr lhs, ExprPtr rhs) {
  auto e = node(Expr::Kind::Bin);
  e->op = op;
  e->type = is_arith(op) ? tint() : tbool();
  e->args = {std::move(lhs), std::move(rhs)};
  return e;
}

ExprPtr mk_not(ExprPtr a) {
  auto e = node(Expr::Kind::Not);
  e->type = tbool();
  e->args = {std::move(a)};
  return e;
}

ExprPtr mk_isa(std::string ctor, ExprPtr arg) {
  auto e = node(Expr::Kind::IsA);
  e->name = std::move(ctor);
  e->type = tbool();
  e->args = {std::move(arg)};
  return e;
}

ExprPtr mk_select(std::string ctor, std::size_t index, ExprPtr arg, TypePtr type) {
  auto e = node(Expr::Kind::Select);
  e->name = std::move(ctor);
  e->index = index;
  e->type = std::move(type);
  e->args = {std::move(arg)};
  return e;
}

ExprPtr mk_proj(std::size_t index, ExprPtr arg, TypePtr type) {
  auto e = node(Expr::Kind::Proj);
  e->index = index;
  e->type = std::move(type);
  e->args = {std::move(arg)};
  return e;
}

ExprPtr with_type(const ExprPtr& e, TypePtr type) {
  auto c = std::make_shared<Expr>(*e);
  c->type = std::move(type);
  return c;
}

std::vector<ExprPtr> children_of(const ExprPtr& e) {
  std::vector<ExprPtr> out = e->args;
  for (const auto& c : e->cases) out.push_back(c.body);
  return out;
}

ExprPtr with_children(const ExprPtr& e, std::vector<ExprPtr> children) {
  auto c = std::make_shared<Expr>(*e);
  std::size_t n = e->args.size();
  c->args.assign(children.begin(), children.begin() + static_cast<std::ptrdiff_t>(n));
  for (std::size_t i = 0; i < c->cases.size(); ++i) c->cases[i].body = children[n + i];
  return c;
}

std::string call_name(const ExprPtr& e) {
  if (e->kind == Expr::Kind::App && e->args.front()->kind == Expr::Kind::Var)
    return e->args.front()->name;
  return {};
}

// ---------------------------------------------------------------------------
// Free variables and substitution

namespace {

void collect_free(const ExprPtr& e, std::vector<std::string>& bound, std::set<std::string>& out) {
  switch (e->kind) {
    case Expr::Kind::Var:
      if (std::find(bound.begin(), bound.end(), e->name) == bound.end()) out.insert(e->name);
      return;
    case Expr::Kind::Lambda: {
      auto n = bound.size();
      bound.insert(bound.end(), e->params.begin(), e->params.end());
      collect_free(e->args[0], bound, out);
      bound.resize(n);
      return;
    }
    case Expr::Kind::Let: {
      collect_free(e->args[0], bound, out);
      bound.push_back(e->name);
      collect_free(e->args[1], bound, out);
      bound.pop_back();
      return;
    }
    case Expr::Kind::Match: {
      collect_free(e->args[0], bound, out);
      for (const auto& c : e->cases) {
        auto n = bound.size();
        pattern_vars(c.pattern, bound);
        collect_free(c.body, bound, out);
        bound.resize(n);
      }
      return;
    }
    default:
      for (const auto& a : e->args) collect_free(a, bound, out);
  }
}

using Sub = std::vector<std::pair<std::string, ExprPtr>>;

Sub drop(const Sub& s, const std::vector<std::string>& names) {
  Sub r;
  for (const auto& kv : s)
    if (std::find(names.begin(), names.end(), kv.first) == names.end()) r.push_back(kv);
  return r;
}

std::set<std::string> range_free(const Sub& s) {
  std::set<std::string> out;
  for (const auto& kv : s) {
    auto f = free_vars(kv.second);
    out.insert(f.begin(), f.end());
  }
  return out;
}

PatternPtr rename_pattern(const PatternPtr& p, const std::string& from, const std::string& to) {
  if (p->kind == Pattern::Kind::Var && p->name == from) {
    auto c = std::make_shared<Pattern>(*p);
    c->name = to;
    return c;
  }
  if (p->args.empty()) return p;
  auto c = std::make_shared<Pattern>(*p);
  for (auto& a : c->args) a = rename_pattern(a, from, to);
  return c;
}

ExprPtr subst(const ExprPtr& e, const Sub& s);

// Renames binders that would capture a variable free in the substitution.
std::vector<std::string> avoid_capture(std::vector<std::string> binders, const Sub& s,
                                       const ExprPtr& body, Sub& rename) {
  if (s.empty()) return binders;
  auto danger = range_free(s);
  std::set<std::string> avoid = danger;
  auto fb = free_vars(body);
  avoid.insert(fb.begin(), fb.end());
  avoid.insert(binders.begin(), binders.end());
  for (auto& b : binders) {
    if (danger.count(b)) {
      auto nb = fresh_name(b, avoid);
      avoid.insert(nb);
      rename.emplace_back(b, mk_var(nb));
      b = nb;
    }
  }
  return binders;
}

ExprPtr subst(const ExprPtr& e, const Sub& s) {
  if (s.empty()) return e;
  switch (e->kind) {
    case Expr::Kind::Var:
      for (const auto& kv : s)
        if (kv.first == e->name) {
          if (e->type && !kv.second->type) return with_type(kv.second, e->type);
          return kv.second;
        }
      return e;
    case Expr::Kind::Int:
    case Expr::Kind::Bool:
      return e;
    case Expr::Kind::Lambda: {
      Sub inner = drop(s, e->params);
      Sub rename;
      auto params = avoid_capture(e->params, inner, e->args[0], rename);
      auto body = subst(e->args[0], rename);
      body = subst(body, inner);
      auto c = std::make_shared<Expr>(*e);
      c->params = params;
      c->args = {body};
      return c;
    }
    case Expr::Kind::Let: {
      auto bound = subst(e->args[0], s);
      Sub inner = drop(s, {e->name});
      Sub rename;
      auto names = avoid_capture({e->name}, inner, e->args[1], rename);
      auto body = subst(subst(e->args[1], rename), inner);
      auto c = std::make_shared<Expr>(*e);
      c->name = names[0];
      c->args = {bound, body};
      return c;
    }
    case Expr::Kind::Match: {
      auto c = std::make_shared<Expr>(*e);
      c->args = {subst(e->args[0], s)};
      for (auto& mc : c->cases) {
        std::vector<std::string> pv;
        pattern_vars(mc.pattern, pv);
        Sub inner = drop(s, pv);
        Sub rename;
        auto renamed = avoid_capture(pv, inner, mc.body, rename);
        for (std::size_t i = 0; i < pv.size(); ++i)
          if (renamed[i] != pv[i]) mc.pattern = rename_pattern(mc.pattern, pv[i], renamed[i]);
        mc.body = subst(subst(mc.body, rename), inner);
      }
      return c;
    }
    default: {
      auto c = std::make_shared<Expr>(*e);
      for (auto& a : c->args) a = subst(a, s);
      return c;
    }
  }
}

}  // namespace

std::set<std::string> free_vars(const ExprPtr& e) {
  std::vector<std::string> bound;
  std::set<std::string> out;
  collect_free(e, bound, out);
  return out;
}

ExprPtr substitute(const ExprPtr& e, const std::vector<std::pair<std::string, ExprPtr>>& sub) {
  return subst(e, sub);
}

std::size_t expr_size(const ExprPtr& e) {
  std::size_t n = 1;
  for (const auto& c : children_of(e)) n += expr_size(c);
  return n;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  for (std::size_t i = 1;; ++i) {
    auto cand = base + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

// ---------------------------------------------------------------------------
// Equality

namespace {

using Env = std::vector<std::pair<std::string, std::string>>;

bool pattern_alpha(const PatternPtr& a, const PatternPtr& b, Env& env) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Pattern::Kind::Var:
      env.emplace_back(a->name, b->name);
      return true;
    case Pattern::Kind::Wildcard:
      return true;
    case Pattern::Kind::Int:
      return a->ival == b->ival;
    case Pattern::Kind::Bool:
      return a->bval == b->bval;
    case Pattern::Kind::Construct:
      if (a->name != b->name) return false;
      [[fallthrough]];
    case Pattern::Kind::Tuple:
      if (a->args.size() != b->args.size()) return false;
      for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!pattern_alpha(a->args[i], b->args[i], env)) return false;
      return true;
  }
  return false;
}

bool alpha(const ExprPtr& a, const ExprPtr& b, Env& env, bool rename) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::Int:
      return a->ival == b->ival;
    case Expr::Kind::Bool:
      return a->bval == b->bval;
    case Expr::Kind::Var: {
      if (!rename) return a->name == b->name;
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        bool ma = it->first == a->name, mb = it->second == b->name;
        if (ma || mb) return ma && mb;
      }
      return a->name == b->name;
    }
    case Expr::Kind::Lambda: {
      if (a->params.size() != b->params.size()) return false;
      if (!rename) {
        if (a->params != b->params) return false;
        return alpha(a->args[0], b->args[0], env, rename);
      }
      auto n = env.size();
      for (std::size_t i = 0; i < a->params.size(); ++i) env.emplace_back(a->params[i], b->params[i]);
      bool ok = alpha(a->args[0], b->args[0], env, rename);
      env.resize(n);
      return ok;
    }
    case Expr::Kind::Let: {
      if (!rename && a->name != b->name) return false;
      if (!alpha(a->args[0], b->args[0], env, rename)) return false;
      env.emplace_back(a->name, b->name);
      bool ok = alpha(a->args[1], b->args[1], env, rename);
      env.pop_back();
      return ok;
    }
    case Expr::Kind::Match: {
      if (a->cases.size() != b->cases.size()) return false;
      if (!alpha(a->args[0], b->args[0], env, rename)) return false;
      for (std::size_t i = 0; i < a->cases.size(); ++i) {
        auto n = env.size();
        if (!pattern_alpha(a->cases[i].pattern, b->cases[i].pattern, env)) return false;
        if (!rename) {
          for (std::size_t k = n; k < env.size(); ++k)
            if (env[k].first != env[k].second) return false;
        }
        bool ok = alpha(a->cases[i].body, b->cases[i].body, env, rename);
        env.resize(n);
        if (!ok) return false;
      }
      return true;
    }
    default:
      if (a->name != b->name || a->op != b->op || a->index != b->index ||
          a->args.size() != b->args.size())
        return false;
      for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!alpha(a->args[i], b->args[i], env, rename)) return false;
      return true;
  }
}

}  // namespace

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  Env env;
  return alpha(a, b, env, false);
}

bool alpha_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  Env env;
  return alpha(a, b, env, true);
}

bool FunDecl::has(Annotation::Kind k) const { return find(k) != nullptr; }

const Annotation* FunDecl::find(Annotation::Kind k) const {
  for (const auto& a : annotations)
    if (a.kind == k) return &a;
  return nullptr;
}

namespace {

bool opt_type_equal(const TypePtr& a, const TypePtr& b) {
  if (!a || !b) return !a && !b;
  return type_equal(a, b);
}

bool annotations_alpha(const std::vector<Annotation>& a, const std::vector<Annotation>& b,
                       Env& env) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].kind != b[i].kind) return false;
    if (a[i].kind == Annotation::Kind::Adm) {
      if (a[i].names.size() != b[i].names.size()) return false;
      for (std::size_t k = 0; k < a[i].names.size(); ++k) {
        auto va = mk_var(a[i].names[k]), vb = mk_var(b[i].names[k]);
        if (!alpha(va, vb, env, true)) return false;
      }
    }
    if (a[i].kind == Annotation::Kind::Measure && !alpha(a[i].measure, b[i].measure, env, true))
      return false;
  }
  return true;
}

bool fun_alpha(const FunDecl& a, const FunDecl& b) {
  if (a.name != b.name || a.recursive != b.recursive || a.params.size() != b.params.size())
    return false;
  if (!opt_type_equal(a.ret_annot, b.ret_annot)) return false;
  Env env;
  for (std::size_t i = 0; i < a.params.size(); ++i) {
    if (!opt_type_equal(a.params[i].annot, b.params[i].annot)) return false;
    env.emplace_back(a.params[i].name, b.params[i].name);
  }
  return alpha(a.body, b.body, env, true) && annotations_alpha(a.annotations, b.annotations, env);
}

}  // namespace

bool alpha_equal(const Decl& a, const Decl& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Decl::Kind::Type: {
      const auto &ta = a.type, &tb = b.type;
      if (ta.name != tb.name || ta.params != tb.params || ta.ctors.size() != tb.ctors.size())
        return false;
      for (std::size_t i = 0; i < ta.ctors.size(); ++i) {
        if (ta.ctors[i].name != tb.ctors[i].name ||
            ta.ctors[i].args.size() != tb.ctors[i].args.size())
          return false;
        for (std::size_t k = 0; k < ta.ctors[i].args.size(); ++k)
          if (!type_equal(ta.ctors[i].args[k], tb.ctors[i].args[k])) return false;
      }
      return true;
    }
    case Decl::Kind::Fun:
    case Decl::Kind::Theorem:
      if (a.funs.size() != b.funs.size()) return false;
      for (std::size_t i = 0; i < a.funs.size(); ++i)
        if (!fun_alpha(a.funs[i], b.funs[i])) return false;
      return true;
    case Decl::Kind::Verify:
    case Decl::Kind::Instance: {
      if (a.bound != b.bound) return false;
      Env env;
      return alpha_equal(a.goal, b.goal) && annotations_alpha(a.annotations, b.annotations, env);
    }
  }
  return false;
}

}  // namespace iml
