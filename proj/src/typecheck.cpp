/* SPDX-License-Identifier: Apache-2.0 */

#include "iml/typecheck.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "iml/syntax.hpp"

namespace iml {

// ---------------------------------------------------------------------------
// Environment

TypeEnv TypeEnv::builtin() {
  TypeEnv env;
  auto ord = tordinal();
  env.values["Ordinal.of_int"] = Scheme{{}, tarrow(tint(), ord)};
  env.values["Ordinal.pair"] = Scheme{{}, tarrows({ord, ord}, ord)};
  env.values["Ordinal.plus"] = Scheme{{}, tarrows({ord, ord}, ord)};
  env.values["Ordinal.lt"] = Scheme{{}, tarrows({ord, ord}, tbool())};
  return env;
}

void TypeEnv::add_type(const TypeDecl& t) {
  types[t.name] = t;
  for (std::size_t i = 0; i < t.ctors.size(); ++i) {
    CtorSig sig;
    sig.name = t.ctors[i].name;
    sig.type_name = t.name;
    sig.type_params = t.params;
    sig.args = t.ctors[i].args;
    sig.index = i;
    ctors[sig.name] = sig;
  }
}

bool TypeEnv::knows_type(const std::string& name, std::size_t arity) const {
  if (name == "int" || name == "bool" || name == "Ordinal.t") return arity == 0;
  auto it = types.find(name);
  return it != types.end() && it->second.params.size() == arity;
}

AdmissibilityError::AdmissibilityError(Kind kind, std::string name, const std::string& explanation)
    : Error(std::string(iml::to_string(kind)) + " (" + name + "): " + explanation),
      kind_(kind),
      name_(std::move(name)) {}

const char* to_string(AdmissibilityError::Kind k) {
  switch (k) {
    case AdmissibilityError::Kind::NotWellFounded: return "NotWellFounded";
    case AdmissibilityError::Kind::HigherOrderData: return "HigherOrderData";
    case AdmissibilityError::Kind::NonUniformRecursion: return "NonUniformRecursion";
    case AdmissibilityError::Kind::NonSpecializable: return "NonSpecializable";
    case AdmissibilityError::Kind::Redefinition: return "Redefinition";
  }
  return "?";
}

TypePtr subst_type(const TypePtr& t, const std::map<std::string, TypePtr>& sub) {
  if (!t) return t;
  if (t->kind == Type::Kind::Var) {
    auto it = sub.find(t->name);
    return it == sub.end() ? t : it->second;
  }
  if (t->args.empty()) return t;
  auto c = std::make_shared<Type>(*t);
  for (auto& a : c->args) a = subst_type(a, sub);
  return c;
}

namespace {

bool mentions_type(const TypePtr& t, const std::string& name) {
  if (t->kind == Type::Kind::Con && t->name == name) return true;
  for (const auto& a : t->args)
    if (mentions_type(a, name)) return true;
  return false;
}

bool has_arrow(const TypePtr& t) {
  if (t->kind == Type::Kind::Arrow) return true;
  for (const auto& a : t->args)
    if (has_arrow(a)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Exhaustiveness (pattern-matrix usefulness)

class Exhaustiveness {
 public:
  explicit Exhaustiveness(const TypeEnv& env) : env_(env) {}

  bool exhaustive(const std::vector<PatternPtr>& arms, const TypePtr& t) {
    std::vector<std::vector<PatternPtr>> rows;
    for (const auto& p : arms) rows.push_back({p});
    return !useful(rows, {pwild()}, {t});
  }

 private:
  struct Head {
    std::string key;
    std::vector<TypePtr> arg_types;
  };

  static bool is_wild(const PatternPtr& p) {
    return p->kind == Pattern::Kind::Wildcard || p->kind == Pattern::Kind::Var;
  }

  std::optional<Head> head_of(const PatternPtr& p, const TypePtr& t) const {
    switch (p->kind) {
      case Pattern::Kind::Construct: {
        Head h{"C:" + p->name, {}};
        auto it = env_.ctors.find(p->name);
        if (it != env_.ctors.end()) h.arg_types = ctor_args(it->second, t);
        h.arg_types.resize(p->args.size(), tint());
        return h;
      }
      case Pattern::Kind::Tuple:
        return Head{"T", t && t->kind == Type::Kind::Tuple ? t->args
                                                          : std::vector<TypePtr>(p->args.size(), tint())};
      case Pattern::Kind::Int:
        return Head{"I:" + p->ival.str(), {}};
      case Pattern::Kind::Bool:
        return Head{p->bval ? "B:true" : "B:false", {}};
      default:
        return std::nullopt;
    }
  }

  std::vector<TypePtr> ctor_args(const CtorSig& sig, const TypePtr& t) const {
    std::map<std::string, TypePtr> sub;
    if (t && t->kind == Type::Kind::Con)
      for (std::size_t i = 0; i < sig.type_params.size() && i < t->args.size(); ++i)
        sub[sig.type_params[i]] = t->args[i];
    std::vector<TypePtr> out;
    for (const auto& a : sig.args) out.push_back(subst_type(a, sub));
    return out;
  }

  // All heads of a type when its signature is finite.
  std::optional<std::vector<Head>> all_heads(const TypePtr& t) const {
    if (!t) return std::nullopt;
    if (t->kind == Type::Kind::Tuple) return std::vector<Head>{Head{"T", t->args}};
    if (t->kind != Type::Kind::Con) return std::nullopt;
    if (t->name == "bool") return std::vector<Head>{Head{"B:true", {}}, Head{"B:false", {}}};
    auto it = env_.types.find(t->name);
    if (it == env_.types.end()) return std::nullopt;
    std::vector<Head> hs;
    for (const auto& c : it->second.ctors) hs.push_back(Head{"C:" + c.name, ctor_args(env_.ctors.at(c.name), t)});
    return hs;
  }

  static std::vector<std::vector<PatternPtr>> specialize(const std::vector<std::vector<PatternPtr>>& rows,
                                                         const std::string& key, std::size_t arity,
                                                         const std::function<std::string(const PatternPtr&)>& key_of) {
    std::vector<std::vector<PatternPtr>> out;
    for (const auto& r : rows) {
      const auto& h = r.front();
      std::vector<PatternPtr> nr;
      if (is_wild(h)) {
        nr.assign(arity, pwild());
      } else if (key_of(h) == key) {
        nr = h->args;
        nr.resize(arity, pwild());
      } else {
        continue;
      }
      nr.insert(nr.end(), r.begin() + 1, r.end());
      out.push_back(std::move(nr));
    }
    return out;
  }

  bool useful(const std::vector<std::vector<PatternPtr>>& rows, const std::vector<PatternPtr>& q,
              const std::vector<TypePtr>& types) {
    if (q.empty()) return rows.empty();
    auto key_of = [&](const PatternPtr& p) {
      auto h = head_of(p, types[0]);
      return h ? h->key : std::string();
    };
    std::vector<TypePtr> rest_types(types.begin() + 1, types.end());
    std::vector<PatternPtr> rest_q(q.begin() + 1, q.end());
    if (!is_wild(q[0])) {
      auto h = *head_of(q[0], types[0]);
      auto nq = q[0]->args;
      nq.insert(nq.end(), rest_q.begin(), rest_q.end());
      auto nt = h.arg_types;
      nt.insert(nt.end(), rest_types.begin(), rest_types.end());
      return useful(specialize(rows, h.key, h.arg_types.size(), key_of), nq, nt);
    }
    std::set<std::string> seen;
    for (const auto& r : rows)
      if (!is_wild(r.front())) seen.insert(key_of(r.front()));
    auto heads = all_heads(types[0]);
    bool complete = heads && !heads->empty() &&
                    std::all_of(heads->begin(), heads->end(),
                                [&](const Head& h) { return seen.count(h.key) > 0; });
    if (complete) {
      for (const auto& h : *heads) {
        std::vector<PatternPtr> nq(h.arg_types.size(), pwild());
        nq.insert(nq.end(), rest_q.begin(), rest_q.end());
        auto nt = h.arg_types;
        nt.insert(nt.end(), rest_types.begin(), rest_types.end());
        if (useful(specialize(rows, h.key, h.arg_types.size(), key_of), nq, nt)) return true;
      }
      return false;
    }
    std::vector<std::vector<PatternPtr>> dflt;
    for (const auto& r : rows)
      if (is_wild(r.front())) dflt.emplace_back(r.begin() + 1, r.end());
    return useful(dflt, rest_q, rest_types);
  }

  const TypeEnv& env_;
};

// ---------------------------------------------------------------------------
// Inference

class Infer {
 public:
  explicit Infer(const TypeEnv& env) : env_(env) {}

  TypePtr fresh() { return tvar("'_" + std::to_string(counter_++)); }

  TypePtr resolve(TypePtr t) const {
    while (t->kind == Type::Kind::Var) {
      auto it = subst_.find(t->name);
      if (it == subst_.end()) break;
      t = it->second;
    }
    return t;
  }

  TypePtr zonk(const TypePtr& t) const {
    if (!t) return t;
    auto r = resolve(t);
    if (r->kind == Type::Kind::Var) return default_int_ ? tint() : r;
    if (r->args.empty()) return r;
    auto c = std::make_shared<Type>(*r);
    for (auto& a : c->args) a = zonk(a);
    return c;
  }

  bool occurs(const std::string& v, const TypePtr& t) const {
    auto r = resolve(t);
    if (r->kind == Type::Kind::Var) return r->name == v;
    for (const auto& a : r->args)
      if (occurs(v, a)) return true;
    return false;
  }

  void unify(const TypePtr& a, const TypePtr& b, const Span& span) {
    auto x = resolve(a), y = resolve(b);
    if (x->kind == Type::Kind::Var && y->kind == Type::Kind::Var && x->name == y->name) return;
    if (x->kind == Type::Kind::Var) return bind(x->name, y, span);
    if (y->kind == Type::Kind::Var) return bind(y->name, x, span);
    if (x->kind != y->kind || x->name != y->name || x->args.size() != y->args.size())
      mismatch(x, y, span);
    for (std::size_t i = 0; i < x->args.size(); ++i) unify(x->args[i], y->args[i], span);
  }

  [[noreturn]] void mismatch(const TypePtr& x, const TypePtr& y, const Span& span) const {
    throw TypeError(span, "type mismatch: " + type_to_string(zonk(x)) + " vs " +
                              type_to_string(zonk(y)));
  }

  void bind(const std::string& v, const TypePtr& t, const Span& span) {
    if (occurs(v, t)) throw TypeError(span, "recursive type: " + v + " occurs in " + type_to_string(zonk(t)));
    subst_[v] = t;
  }

  TypePtr instantiate(const Scheme& s) {
    std::map<std::string, TypePtr> sub;
    for (const auto& v : s.vars) sub[v] = fresh();
    return subst_type(s.body, sub);
  }

  // Annotation type variables ('a) are flexible and shared within a declaration.
  TypePtr from_annot(const TypePtr& t, const Span& span) {
    if (!t) return fresh();
    check_wellformed(t, span);
    std::set<std::string> vs;
    type_vars(t, vs);
    std::map<std::string, TypePtr> sub;
    for (const auto& v : vs) {
      auto it = annot_vars_.find(v);
      if (it == annot_vars_.end()) it = annot_vars_.emplace(v, fresh()).first;
      sub[v] = it->second;
    }
    return subst_type(t, sub);
  }

  void check_wellformed(const TypePtr& t, const Span& span) const {
    if (t->kind == Type::Kind::Con && !env_.knows_type(t->name, t->args.size()))
      throw TypeError(span, "unknown type " + type_to_string(t));
    for (const auto& a : t->args) check_wellformed(a, span);
  }

  void reset_annotations() { annot_vars_.clear(); }
  void set_default_int(bool v) { default_int_ = v; }

  // -- locals ----------------------------------------------------------------
  void push_local(const std::string& name, TypePtr t) { locals_.emplace_back(name, std::move(t)); }
  std::size_t mark() const { return locals_.size(); }
  void pop_to(std::size_t m) { locals_.resize(m); }

  std::optional<TypePtr> lookup_local(const std::string& name) const {
    for (auto it = locals_.rbegin(); it != locals_.rend(); ++it)
      if (it->first == name) return it->second;
    return std::nullopt;
  }

  // -- patterns --------------------------------------------------------------
  PatternPtr pattern(const PatternPtr& p, const TypePtr& t, std::vector<std::string>& bound) {
    switch (p->kind) {
      case Pattern::Kind::Var:
        if (std::find(bound.begin(), bound.end(), p->name) != bound.end())
          throw TypeError(p->span, "variable " + p->name + " bound twice in pattern");
        bound.push_back(p->name);
        push_local(p->name, t);
        return p;
      case Pattern::Kind::Wildcard:
        return p;
      case Pattern::Kind::Int:
        unify(t, tint(), p->span);
        return p;
      case Pattern::Kind::Bool:
        unify(t, tbool(), p->span);
        return p;
      case Pattern::Kind::Tuple: {
        std::vector<TypePtr> ts;
        for (std::size_t i = 0; i < p->args.size(); ++i) ts.push_back(fresh());
        unify(t, ttuple(ts), p->span);
        auto c = std::make_shared<Pattern>(*p);
        for (std::size_t i = 0; i < p->args.size(); ++i) c->args[i] = pattern(p->args[i], ts[i], bound);
        return c;
      }
      case Pattern::Kind::Construct: {
        auto it = env_.ctors.find(p->name);
        if (it == env_.ctors.end()) throw TypeError(p->span, "unknown constructor " + p->name);
        const auto& sig = it->second;
        auto args = p->args;
        if (sig.args.size() == 1 && args.size() > 1) {
          auto tup = std::make_shared<Pattern>(*p);
          tup->kind = Pattern::Kind::Tuple;
          tup->name.clear();
          args = {tup};
        } else if (sig.args.size() > 1 && args.size() == 1 && args[0]->kind == Pattern::Kind::Tuple &&
                   args[0]->args.size() == sig.args.size()) {
          args = args[0]->args;
        } else if (sig.args.size() > 0 && args.size() == 1 && args[0]->kind == Pattern::Kind::Wildcard &&
                   sig.args.size() > 1) {
          args.assign(sig.args.size(), pwild());
        }
        if (args.size() != sig.args.size())
          throw TypeError(p->span, "constructor " + p->name + " expects " +
                                       std::to_string(sig.args.size()) + " argument(s)");
        auto [self, fields] = ctor_instance(sig);
        unify(t, self, p->span);
        auto c = std::make_shared<Pattern>(*p);
        c->args = args;
        for (std::size_t i = 0; i < args.size(); ++i) c->args[i] = pattern(args[i], fields[i], bound);
        return c;
      }
    }
    return p;
  }

  std::pair<TypePtr, std::vector<TypePtr>> ctor_instance(const CtorSig& sig) {
    std::map<std::string, TypePtr> sub;
    std::vector<TypePtr> targs;
    for (const auto& v : sig.type_params) {
      auto f = fresh();
      sub[v] = f;
      targs.push_back(f);
    }
    std::vector<TypePtr> fields;
    for (const auto& a : sig.args) fields.push_back(subst_type(a, sub));
    return {tcon(sig.type_name, targs), fields};
  }

  // -- expressions -----------------------------------------------------------
  ExprPtr expr(const ExprPtr& e) {
    auto typed = [&](std::shared_ptr<Expr> c, TypePtr t) -> ExprPtr {
      c->type = std::move(t);
      return c;
    };
    auto copy = [&]() { return std::make_shared<Expr>(*e); };
    switch (e->kind) {
      case Expr::Kind::Int:
        return typed(copy(), tint());
      case Expr::Kind::Bool:
        return typed(copy(), tbool());
      case Expr::Kind::Var: {
        if (auto t = lookup_local(e->name)) return typed(copy(), *t);
        auto it = env_.values.find(e->name);
        if (it != env_.values.end()) return typed(copy(), instantiate(it->second));
        throw TypeError(e->span, "unbound identifier " + e->name);
      }
      case Expr::Kind::App: {
        auto c = copy();
        for (auto& a : c->args) a = expr(a);
        auto res = fresh();
        std::vector<TypePtr> argts;
        for (std::size_t i = 1; i < c->args.size(); ++i) argts.push_back(c->args[i]->type);
        unify(c->args[0]->type, tarrows(argts, res), e->span);
        return typed(c, res);
      }
      case Expr::Kind::Lambda: {
        auto c = copy();
        auto m = mark();
        std::vector<TypePtr> pts;
        for (std::size_t i = 0; i < e->params.size(); ++i) {
          auto annot = i < e->param_types.size() ? e->param_types[i] : nullptr;
          auto t = from_annot(annot, e->span);
          pts.push_back(t);
          push_local(e->params[i], t);
        }
        c->args[0] = expr(e->args[0]);
        pop_to(m);
        return typed(c, tarrows(pts, c->args[0]->type));
      }
      case Expr::Kind::Let: {
        auto c = copy();
        c->args[0] = expr(e->args[0]);
        auto m = mark();
        push_local(e->name, c->args[0]->type);
        c->args[1] = expr(e->args[1]);
        pop_to(m);
        return typed(c, c->args[1]->type);
      }
      case Expr::Kind::If: {
        auto c = copy();
        for (auto& a : c->args) a = expr(a);
        unify(c->args[0]->type, tbool(), e->args[0]->span);
        unify(c->args[1]->type, c->args[2]->type, e->span);
        return typed(c, c->args[1]->type);
      }
      case Expr::Kind::Match: {
        auto c = copy();
        c->args[0] = expr(e->args[0]);
        auto res = fresh();
        if (e->cases.empty()) throw TypeError(e->span, "match with no branches");
        for (auto& mc : c->cases) {
          auto m = mark();
          std::vector<std::string> bound;
          mc.pattern = pattern(mc.pattern, c->args[0]->type, bound);
          mc.body = expr(mc.body);
          unify(mc.body->type, res, mc.body->span);
          pop_to(m);
        }
        matches_.push_back(c);
        return typed(c, res);
      }
      case Expr::Kind::Construct: {
        auto it = env_.ctors.find(e->name);
        if (it == env_.ctors.end()) throw TypeError(e->span, "unknown constructor " + e->name);
        const auto& sig = it->second;
        auto c = copy();
        if (sig.args.size() == 1 && c->args.size() > 1) {
          c->args = {mk_tuple(c->args)};
        } else if (sig.args.size() > 1 && c->args.size() == 1 &&
                   c->args[0]->kind == Expr::Kind::Tuple && c->args[0]->args.size() == sig.args.size()) {
          c->args = c->args[0]->args;
        }
        if (c->args.size() != sig.args.size())
          throw TypeError(e->span, "constructor " + e->name + " expects " +
                                       std::to_string(sig.args.size()) + " argument(s)");
        auto [self, fields] = ctor_instance(sig);
        for (std::size_t i = 0; i < c->args.size(); ++i) {
          c->args[i] = expr(c->args[i]);
          unify(c->args[i]->type, fields[i], c->args[i]->span);
        }
        return typed(c, self);
      }
      case Expr::Kind::Tuple: {
        auto c = copy();
        std::vector<TypePtr> ts;
        for (auto& a : c->args) {
          a = expr(a);
          ts.push_back(a->type);
        }
        return typed(c, ttuple(ts));
      }
      case Expr::Kind::Bin: {
        auto c = copy();
        for (auto& a : c->args) a = expr(a);
        switch (e->op) {
          case BinOp::Add:
          case BinOp::Sub:
          case BinOp::Mul:
            unify(c->args[0]->type, tint(), e->args[0]->span);
            unify(c->args[1]->type, tint(), e->args[1]->span);
            return typed(c, tint());
          case BinOp::Eq:
            unify(c->args[0]->type, c->args[1]->type, e->span);
            equalities_.push_back(c);
            return typed(c, tbool());
          case BinOp::And:
          case BinOp::Or:
            unify(c->args[0]->type, tbool(), e->args[0]->span);
            unify(c->args[1]->type, tbool(), e->args[1]->span);
            return typed(c, tbool());
          default:
            unify(c->args[0]->type, tint(), e->args[0]->span);
            unify(c->args[1]->type, tint(), e->args[1]->span);
            return typed(c, tbool());
        }
      }
      case Expr::Kind::Not: {
        auto c = copy();
        c->args[0] = expr(e->args[0]);
        unify(c->args[0]->type, tbool(), e->args[0]->span);
        return typed(c, tbool());
      }
      case Expr::Kind::IsA:
      case Expr::Kind::Select: {
        auto it = env_.ctors.find(e->name);
        if (it == env_.ctors.end()) throw TypeError(e->span, "unknown constructor " + e->name);
        auto c = copy();
        c->args[0] = expr(e->args[0]);
        auto [self, fields] = ctor_instance(it->second);
        unify(c->args[0]->type, self, e->span);
        if (e->kind == Expr::Kind::IsA) return typed(c, tbool());
        if (e->index >= fields.size()) throw TypeError(e->span, "selector index out of range");
        return typed(c, fields[e->index]);
      }
      case Expr::Kind::Proj: {
        auto c = copy();
        c->args[0] = expr(e->args[0]);
        auto t = resolve(c->args[0]->type);
        if (t->kind != Type::Kind::Tuple || e->index >= t->args.size())
          throw TypeError(e->span, "projection from a non-tuple");
        return typed(c, t->args[e->index]);
      }
    }
    return e;
  }

  ExprPtr zonk_expr(const ExprPtr& e) const {
    auto c = std::make_shared<Expr>(*e);
    c->type = zonk(e->type);
    for (auto& t : c->param_types) t = t ? zonk(t) : t;
    for (auto& a : c->args) a = zonk_expr(a);
    for (auto& mc : c->cases) mc.body = zonk_expr(mc.body);
    return c;
  }

  // Post-zonk checks: exhaustive matches, no equality on functions.
  void final_checks() const {
    Exhaustiveness ex(env_);
    for (const auto& m : matches_) {
      std::vector<PatternPtr> arms;
      for (const auto& c : m->cases) arms.push_back(c.pattern);
      if (!ex.exhaustive(arms, zonk(m->args[0]->type)))
        throw TypeError(m->span, "non-exhaustive match");
    }
    for (const auto& eq : equalities_)
      if (has_arrow(zonk(eq->args[0]->type)))
        throw TypeError(eq->span, "equality on functional values");
  }

  void clear_checks() {
    matches_.clear();
    equalities_.clear();
  }

 private:
  const TypeEnv& env_;
  std::map<std::string, TypePtr> subst_;
  std::map<std::string, TypePtr> annot_vars_;
  std::vector<std::pair<std::string, TypePtr>> locals_;
  std::vector<std::shared_ptr<Expr>> matches_;
  std::vector<std::shared_ptr<Expr>> equalities_;
  int counter_ = 0;
  bool default_int_ = false;
};

Scheme generalize(const TypePtr& t) {
  std::set<std::string> vs;
  type_vars(t, vs);
  // Canonical names 'a, 'b, ... in order of first occurrence.
  std::vector<std::string> order;
  std::function<void(const TypePtr&)> walk = [&](const TypePtr& x) {
    if (x->kind == Type::Kind::Var) {
      if (std::find(order.begin(), order.end(), x->name) == order.end()) order.push_back(x->name);
      return;
    }
    for (const auto& a : x->args) walk(a);
  };
  walk(t);
  std::map<std::string, TypePtr> sub;
  Scheme s;
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::string name = "'";
    if (i < 26)
      name += static_cast<char>('a' + i);
    else
      name += "t" + std::to_string(i);
    sub[order[i]] = tvar(name);
    s.vars.push_back(name);
  }
  s.body = subst_type(t, sub);
  return s;
}

ExprPtr rename_type_vars(const ExprPtr& e, const std::map<std::string, TypePtr>& sub) {
  auto c = std::make_shared<Expr>(*e);
  c->type = subst_type(e->type, sub);
  for (auto& t : c->param_types) t = subst_type(t, sub);
  for (auto& a : c->args) a = rename_type_vars(a, sub);
  for (auto& mc : c->cases) mc.body = rename_type_vars(mc.body, sub);
  return c;
}

void check_distinct_params(const FunDecl& f) {
  std::set<std::string> seen;
  for (const auto& p : f.params) {
    if (p.name == "_") continue;
    if (!seen.insert(p.name).second)
      throw TypeError(f.span, "parameter " + p.name + " repeated in " + f.name);
  }
}

TypedDecl infer_funs(const Decl& d, const TypeEnv& env) {
  Infer inf(env);
  TypedDecl out;
  out.decl = d;
  std::vector<TypePtr> fun_types;
  for (const auto& f : d.funs) {
    check_distinct_params(f);
    if (env.values.count(f.name))
      throw AdmissibilityError(AdmissibilityError::Kind::Redefinition, f.name,
                               "name already defined");
  }
  std::vector<std::vector<TypePtr>> param_types(d.funs.size());
  std::vector<TypePtr> ret_types(d.funs.size());
  for (std::size_t k = 0; k < d.funs.size(); ++k) {
    for (const auto& p : d.funs[k].params) param_types[k].push_back(inf.from_annot(p.annot, d.funs[k].span));
    ret_types[k] = inf.from_annot(d.funs[k].ret_annot, d.funs[k].span);
    fun_types.push_back(tarrows(param_types[k], ret_types[k]));
  }
  for (std::size_t k = 0; k < d.funs.size(); ++k) {
    const auto& f = d.funs[k];
    auto m = inf.mark();
    if (f.recursive || d.funs.size() > 1)
      for (std::size_t j = 0; j < d.funs.size(); ++j) inf.push_local(d.funs[j].name, fun_types[j]);
    for (std::size_t i = 0; i < f.params.size(); ++i) inf.push_local(f.params[i].name, param_types[k][i]);
    auto body = inf.expr(f.body);
    inf.unify(body->type, ret_types[k], f.body->span);
    if (d.kind == Decl::Kind::Theorem) inf.unify(body->type, tbool(), f.body->span);
    out.decl.funs[k].body = body;
    for (auto& a : out.decl.funs[k].annotations) {
      if (a.kind == Annotation::Kind::Measure) {
        a.measure = inf.expr(a.measure);
        inf.unify(a.measure->type, tordinal(), a.measure->span);
      }
      if (a.kind == Annotation::Kind::Adm) {
        for (const auto& n : a.names) {
          auto it = std::find_if(f.params.begin(), f.params.end(),
                                 [&](const Param& p) { return p.name == n; });
          if (it == f.params.end())
            throw TypeError(f.span, "@@adm names " + n + ", which is not a parameter of " + f.name);
          inf.unify(param_types[k][static_cast<std::size_t>(it - f.params.begin())], tint(), f.span);
        }
      }
    }
    inf.pop_to(m);
  }
  inf.final_checks();
  for (std::size_t k = 0; k < d.funs.size(); ++k) {
    auto full = inf.zonk(fun_types[k]);
    Scheme s = generalize(full);
    // Rename inference variables in the body to the scheme's canonical names.
    std::map<std::string, TypePtr> ren;
    {
      std::vector<std::string> order;
      std::function<void(const TypePtr&)> walk = [&](const TypePtr& x) {
        if (x->kind == Type::Kind::Var) {
          if (std::find(order.begin(), order.end(), x->name) == order.end()) order.push_back(x->name);
          return;
        }
        for (const auto& a : x->args) walk(a);
      };
      walk(full);
      for (std::size_t i = 0; i < order.size(); ++i) ren[order[i]] = tvar(s.vars[i]);
    }
    auto& fd = out.decl.funs[k];
    fd.body = rename_type_vars(inf.zonk_expr(fd.body), ren);
    for (auto& a : fd.annotations)
      if (a.kind == Annotation::Kind::Measure) a.measure = rename_type_vars(inf.zonk_expr(a.measure), ren);
    for (std::size_t i = 0; i < fd.params.size(); ++i)
      fd.params[i].annot = subst_type(inf.zonk(param_types[k][i]), ren);
    fd.ret_annot = subst_type(inf.zonk(ret_types[k]), ren);
    out.schemes.push_back(s);
  }
  return out;
}

TypedDecl infer_goal(const Decl& d, const TypeEnv& env) {
  TypedDecl out;
  out.decl = d;
  Infer inf(env);
  auto g = inf.expr(d.goal);
  if (d.goal->kind == Expr::Kind::Lambda) {
    // The lambda's final result must be bool.
    TypePtr r = g->type;
    for (std::size_t i = 0; i < d.goal->params.size(); ++i) {
      auto rr = inf.resolve(r);
      r = rr->args[1];
    }
    inf.unify(r, tbool(), d.goal->span);
  } else {
    inf.unify(g->type, tbool(), d.goal->span);
  }
  inf.final_checks();
  inf.set_default_int(true);
  out.decl.goal = inf.zonk_expr(g);
  if (d.goal->kind == Expr::Kind::Lambda) {
    out.goal_params = d.goal->params;
    TypePtr t = out.decl.goal->type;
    for (std::size_t i = 0; i < d.goal->params.size(); ++i) {
      out.goal_param_types.push_back(t->args[0]);
      t = t->args[1];
    }
  }
  return out;
}

}  // namespace

TypedDecl infer_decl(const Decl& d, const TypeEnv& env) {
  switch (d.kind) {
    case Decl::Kind::Type: {
      check_type_admissible(d.type, env);
      TypedDecl out;
      out.decl = d;
      return out;
    }
    case Decl::Kind::Fun:
    case Decl::Kind::Theorem:
      return infer_funs(d, env);
    case Decl::Kind::Verify:
    case Decl::Kind::Instance:
      return infer_goal(d, env);
  }
  return {};
}

TypedModule infer(const SourceModule& m, const TypeEnv& env) {
  TypeEnv cur = env;
  TypedModule out;
  for (const auto& d : m.decls) {
    auto td = infer_decl(d, cur);
    if (d.kind == Decl::Kind::Type) cur.add_type(d.type);
    if (d.kind == Decl::Kind::Fun)
      for (std::size_t k = 0; k < d.funs.size(); ++k) cur.values[d.funs[k].name] = td.schemes[k];
    out.decls.push_back(std::move(td));
  }
  return out;
}

ExprPtr infer_expr(const ExprPtr& e, const TypeEnv& env, const std::map<std::string, TypePtr>& locals) {
  Infer inf(env);
  for (const auto& [n, t] : locals) inf.push_local(n, t);
  auto g = inf.expr(e);
  inf.final_checks();
  inf.set_default_int(true);
  return inf.zonk_expr(g);
}

std::vector<TypePtr> match_scheme(const Scheme& scheme, const TypePtr& instance) {
  std::map<std::string, TypePtr> binding;
  std::function<void(const TypePtr&, const TypePtr&)> walk = [&](const TypePtr& pat, const TypePtr& t) {
    if (!pat || !t) return;
    if (pat->kind == Type::Kind::Var) {
      if (!binding.count(pat->name)) binding[pat->name] = t;
      return;
    }
    if (pat->kind != t->kind || pat->args.size() != t->args.size()) return;
    for (std::size_t i = 0; i < pat->args.size(); ++i) walk(pat->args[i], t->args[i]);
  };
  walk(scheme.body, instance);
  std::vector<TypePtr> out;
  for (const auto& v : scheme.vars) {
    auto it = binding.find(v);
    out.push_back(it == binding.end() ? tint() : it->second);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Admissibility

void check_type_admissible(const TypeDecl& t, const TypeEnv& env) {
  using K = AdmissibilityError::Kind;
  if (env.types.count(t.name) || t.name == "int" || t.name == "bool")
    throw AdmissibilityError(K::Redefinition, t.name, "type already defined");
  std::set<std::string> names;
  for (const auto& c : t.ctors) {
    if (!names.insert(c.name).second)
      throw TypeError({}, "constructor " + c.name + " repeated in type " + t.name);
    if (env.ctors.count(c.name))
      throw AdmissibilityError(K::Redefinition, c.name, "constructor already defined");
  }
  std::set<std::string> params(t.params.begin(), t.params.end());
  if (params.size() != t.params.size()) throw TypeError({}, "repeated type parameter in " + t.name);
  std::function<void(const TypePtr&)> wf = [&](const TypePtr& ty) {
    if (ty->kind == Type::Kind::Var && !params.count(ty->name))
      throw TypeError({}, "unbound type variable " + ty->name + " in type " + t.name);
    if (ty->kind == Type::Kind::Con && ty->name != t.name && !env.knows_type(ty->name, ty->args.size()))
      throw TypeError({}, "unknown type " + type_to_string(ty) + " in type " + t.name);
    if (ty->kind == Type::Kind::Con && ty->name == t.name && ty->args.size() != t.params.size())
      throw TypeError({}, "type " + t.name + " applied to the wrong number of arguments");
    for (const auto& a : ty->args) wf(a);
  };
  for (const auto& c : t.ctors)
    for (const auto& a : c.args) {
      wf(a);
      if (has_arrow(a))
        throw AdmissibilityError(K::HigherOrderData, t.name,
                                 "constructor " + c.name + " has a function-typed argument");
    }
  // Uniformity: every recursive occurrence is applied to exactly the parameters.
  std::function<void(const TypePtr&, const std::string&)> uniform = [&](const TypePtr& ty,
                                                                        const std::string& ctor) {
    if (ty->kind == Type::Kind::Con && ty->name == t.name) {
      for (std::size_t i = 0; i < ty->args.size(); ++i)
        if (ty->args[i]->kind != Type::Kind::Var || ty->args[i]->name != t.params[i])
          throw AdmissibilityError(K::NonUniformRecursion, t.name,
                                   "constructor " + ctor + " uses " + type_to_string(ty) +
                                       " instead of the declared parameters");
    }
    for (const auto& a : ty->args) uniform(a, ctor);
  };
  for (const auto& c : t.ctors)
    for (const auto& a : c.args) uniform(a, c.name);
  bool base = std::any_of(t.ctors.begin(), t.ctors.end(), [&](const Constructor& c) {
    return std::none_of(c.args.begin(), c.args.end(),
                        [&](const TypePtr& a) { return mentions_type(a, t.name); });
  });
  if (!base)
    throw AdmissibilityError(K::NotWellFounded, t.name, "every constructor is recursive");
}

namespace {

void collect_calls(const ExprPtr& e, const std::string& callee, std::vector<ExprPtr>& out) {
  if (e->kind == Expr::Kind::App && call_name(e) == callee) out.push_back(e);
  for (const auto& c : children_of(e)) collect_calls(c, callee, out);
}

std::vector<std::size_t> functional_positions(const Scheme& s, std::size_t arity) {
  std::vector<std::size_t> out;
  TypePtr t = s.body;
  for (std::size_t i = 0; i < arity && t && t->kind == Type::Kind::Arrow; ++i) {
    if (t->args[0]->kind == Type::Kind::Arrow) out.push_back(i);
    t = t->args[1];
  }
  return out;
}

}  // namespace

void check_fun_admissible(const FunDecl& f, const std::vector<FunDecl>& clique,
                          const std::vector<Scheme>& clique_schemes) {
  for (std::size_t gi = 0; gi < clique.size(); ++gi) {
    const auto& g = clique[gi];
    auto fpos = functional_positions(clique_schemes[gi], g.params.size());
    if (fpos.empty()) continue;
    const ExprPtr* first_foreign = nullptr;
    std::vector<ExprPtr> foreign_sites;
    for (const auto& host : clique) {
      std::vector<ExprPtr> sites;
      collect_calls(host.body, g.name, sites);
      for (const auto& site : sites) {
        for (auto i : fpos) {
          if (i + 1 >= site->args.size()) continue;
          const auto& arg = site->args[i + 1];
          if (host.name == g.name) {
            if (arg->kind != Expr::Kind::Var || arg->name != g.params[i].name)
              throw AdmissibilityError(
                  AdmissibilityError::Kind::NonSpecializable, f.name,
                  "recursive call `" + pretty(site) + "` changes functional argument " +
                      g.params[i].name + " of " + g.name);
          }
        }
        if (host.name != g.name) foreign_sites.push_back(site);
      }
    }
    for (const auto& site : foreign_sites) {
      if (!first_foreign) {
        first_foreign = &site;
        continue;
      }
      for (auto i : fpos) {
        if (i + 1 >= site->args.size() || i + 1 >= (*first_foreign)->args.size()) continue;
        if (!alpha_equal(site->args[i + 1], (*first_foreign)->args[i + 1]))
          throw AdmissibilityError(AdmissibilityError::Kind::NonSpecializable, f.name,
                                   "call sites `" + pretty(*first_foreign) + "` and `" +
                                       pretty(site) + "` pass different functional arguments to " +
                                       g.name);
      }
    }
  }
}

}  // namespace iml
