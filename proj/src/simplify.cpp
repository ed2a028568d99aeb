/* SPDX-License-Identifier: Apache-2.0 */

#include <algorithm>
#include <set>
#include <sstream>

#include "iml/syntax.hpp"
#include "iml/waterfall.hpp"

namespace iml {

TypePtr default_type_vars(const TypePtr& t) {
  if (!t) return t;
  if (t->kind == Type::Kind::Var) return tint();
  if (t->args.empty()) return t;
  auto c = std::make_shared<Type>(*t);
  for (auto& a : c->args) a = default_type_vars(a);
  return c;
}

ExprPtr default_type_vars(const ExprPtr& e) {
  auto kids = children_of(e);
  for (auto& k : kids) k = default_type_vars(k);
  auto c = std::make_shared<Expr>(*(kids.empty() ? e : with_children(e, kids)));
  c->type = default_type_vars(c->type);
  for (auto& t : c->param_types) t = default_type_vars(t);
  return c;
}

namespace {

ExprPtr tru() { return with_type(mk_bool(true), tbool()); }
ExprPtr fls() { return with_type(mk_bool(false), tbool()); }
bool is_lit(const ExprPtr& e, bool v) { return e->kind == Expr::Kind::Bool && e->bval == v; }

ExprPtr negation(const ExprPtr& e) {
  if (e->kind == Expr::Kind::Not) return e->args[0];
  if (e->kind == Expr::Kind::Bool) return e->bval ? fls() : tru();
  return with_type(mk_not(e), tbool());
}

void split_conj(const ExprPtr& e, std::vector<ExprPtr>& out) {
  if (e->kind == Expr::Kind::Bin && e->op == BinOp::And) {
    split_conj(e->args[0], out);
    split_conj(e->args[1], out);
  } else if (!is_lit(e, true)) {
    out.push_back(e);
  }
}

// Moves `h ==> c` (parsed as `not h || c`) hypotheses out of a conclusion.
void split_implications(Goal& g) {
  while (g.concl->kind == Expr::Kind::Bin && g.concl->op == BinOp::Or && g.concl->args[0]->kind == Expr::Kind::Not) {
    split_conj(g.concl->args[0]->args[0], g.hyps);
    g.concl = g.concl->args[1];
  }
}

bool is_value_like(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Int:
    case Expr::Kind::Bool:
      return true;
    case Expr::Kind::Construct:
    case Expr::Kind::Tuple:
      return std::all_of(e->args.begin(), e->args.end(), is_value_like);
    default:
      return false;
  }
}

enum class Static { Yes, No, Unknown };

Static static_match(const PatternPtr& p, const ExprPtr& s, std::vector<std::pair<std::string, ExprPtr>>& b) {
  switch (p->kind) {
    case Pattern::Kind::Wildcard:
      return Static::Yes;
    case Pattern::Kind::Var:
      b.emplace_back(p->name, s);
      return Static::Yes;
    case Pattern::Kind::Int:
      if (s->kind != Expr::Kind::Int) return Static::Unknown;
      return s->ival == p->ival ? Static::Yes : Static::No;
    case Pattern::Kind::Bool:
      if (s->kind != Expr::Kind::Bool) return Static::Unknown;
      return s->bval == p->bval ? Static::Yes : Static::No;
    case Pattern::Kind::Construct:
      if (s->kind != Expr::Kind::Construct) return Static::Unknown;
      if (s->name != p->name) return Static::No;
      [[fallthrough]];
    case Pattern::Kind::Tuple: {
      if (p->kind == Pattern::Kind::Tuple && s->kind != Expr::Kind::Tuple) return Static::Unknown;
      if (s->args.size() != p->args.size()) return Static::Unknown;
      Static r = Static::Yes;
      for (std::size_t i = 0; i < p->args.size(); ++i) {
        Static x = static_match(p->args[i], s->args[i], b);
        if (x == Static::No) return Static::No;
        if (x == Static::Unknown) r = Static::Unknown;
      }
      return r;
    }
  }
  return Static::Unknown;
}

class Simplifier {
 public:
  Simplifier(const World& w, const WaterfallConfig& cfg, std::vector<ExprPtr> facts, std::vector<Rule> local)
      : w_(w), cfg_(cfg), facts_(std::move(facts)), local_(std::move(local)) {}

  ExprPtr simp(const ExprPtr& e) {
    ExprPtr r = step(e);
    if (auto k = known(r)) return *k ? tru() : fls();
    return r;
  }

 private:
  std::optional<bool> known(const ExprPtr& e) const {
    if (e->kind == Expr::Kind::Bool) return std::nullopt;
    for (const auto& f : facts_) {
      if (expr_equal(f, e)) return true;
      if (f->kind == Expr::Kind::Not && expr_equal(f->args[0], e)) return false;
      if (e->kind == Expr::Kind::Not && expr_equal(f, e->args[0])) return false;
    }
    return std::nullopt;
  }

  template <class F>
  ExprPtr assuming(const ExprPtr& fact, F&& body) {
    facts_.push_back(fact);
    ExprPtr r = body();
    facts_.pop_back();
    return r;
  }

  bool budget() { return steps_ < cfg_.rewrite_limit; }

  ExprPtr step(const ExprPtr& e) {
    switch (e->kind) {
      case Expr::Kind::Int:
      case Expr::Kind::Bool:
      case Expr::Kind::Var:
      case Expr::Kind::Lambda:
        return e;
      case Expr::Kind::Let:
        return simp(substitute(e->args[1], {{e->name, e->args[0]}}));
      case Expr::Kind::If: {
        ExprPtr c = simp(e->args[0]);
        if (c->kind == Expr::Kind::Bool) return simp(c->bval ? e->args[1] : e->args[2]);
        ExprPtr t = assuming(c, [&] { return simp(e->args[1]); });
        ExprPtr f = assuming(negation(c), [&] { return simp(e->args[2]); });
        if (expr_equal(t, f)) return t;
        if (is_lit(t, true) && is_lit(f, false)) return c;
        if (is_lit(t, false) && is_lit(f, true)) return negation(c);
        return with_children(e, {c, t, f});
      }
      case Expr::Kind::Match: {
        ExprPtr s = simp(e->args[0]);
        for (const auto& c : e->cases) {
          std::vector<std::pair<std::string, ExprPtr>> b;
          Static m = static_match(c.pattern, s, b);
          if (m == Static::No) continue;
          if (m == Static::Yes) return simp(substitute(c.body, b));
          break;
        }
        auto kids = children_of(e);
        kids[0] = s;
        return with_children(e, kids);
      }
      case Expr::Kind::Not: {
        ExprPtr a = simp(e->args[0]);
        return negation(a);
      }
      case Expr::Kind::Bin:
        return bin(e);
      case Expr::Kind::App:
        return app(e);
      case Expr::Kind::IsA: {
        ExprPtr a = simp(e->args[0]);
        if (a->kind == Expr::Kind::Construct) return a->name == e->name ? tru() : fls();
        return with_children(e, {a});
      }
      case Expr::Kind::Select: {
        ExprPtr a = simp(e->args[0]);
        if (a->kind == Expr::Kind::Construct && a->name == e->name && e->index < a->args.size())
          return a->args[e->index];
        return with_children(e, {a});
      }
      case Expr::Kind::Proj: {
        ExprPtr a = simp(e->args[0]);
        if (a->kind == Expr::Kind::Tuple && e->index < a->args.size()) return a->args[e->index];
        return with_children(e, {a});
      }
      case Expr::Kind::Construct:
      case Expr::Kind::Tuple: {
        auto kids = children_of(e);
        for (auto& k : kids) k = simp(k);
        return with_children(e, kids);
      }
    }
    return e;
  }

  ExprPtr equality(const ExprPtr& e, const ExprPtr& a, const ExprPtr& b) {
    if (expr_equal(a, b)) return tru();
    if (a->kind == Expr::Kind::Int && b->kind == Expr::Kind::Int) return a->ival == b->ival ? tru() : fls();
    if (a->kind == Expr::Kind::Bool && b->kind == Expr::Kind::Bool) return a->bval == b->bval ? tru() : fls();
    if (is_lit(b, true)) return a;
    if (is_lit(a, true)) return b;
    if (is_lit(b, false)) return negation(a);
    if (is_lit(a, false)) return negation(b);
    bool ca = a->kind == Expr::Kind::Construct || a->kind == Expr::Kind::Tuple;
    bool cb = b->kind == Expr::Kind::Construct || b->kind == Expr::Kind::Tuple;
    if (ca && cb) {
      if (a->kind != b->kind || a->name != b->name || a->args.size() != b->args.size()) return fls();
      ExprPtr out;
      for (std::size_t i = 0; i < a->args.size(); ++i) {
        ExprPtr eq = simp(with_type(mk_bin(BinOp::Eq, a->args[i], b->args[i]), tbool()));
        if (is_lit(eq, false)) return fls();
        if (is_lit(eq, true)) continue;
        out = out ? with_type(mk_bin(BinOp::And, out, eq), tbool()) : eq;
      }
      return out ? out : tru();
    }
    return with_children(e, {a, b});
  }

  ExprPtr bin(const ExprPtr& e) {
    if (e->op == BinOp::And || e->op == BinOp::Or) {
      const bool conj = e->op == BinOp::And;
      ExprPtr a = simp(e->args[0]);
      if (is_lit(a, !conj)) return a;
      if (is_lit(a, conj)) return simp(e->args[1]);
      ExprPtr b = assuming(conj ? a : negation(a), [&] { return simp(e->args[1]); });
      if (is_lit(b, conj)) return a;
      if (is_lit(b, !conj)) return b;
      return with_children(e, {a, b});
    }
    ExprPtr a = simp(e->args[0]);
    ExprPtr b = simp(e->args[1]);
    if (e->op == BinOp::Eq) return equality(e, a, b);
    if (a->kind == Expr::Kind::Int && b->kind == Expr::Kind::Int) {
      const BigInt& x = a->ival;
      const BigInt& y = b->ival;
      switch (e->op) {
        case BinOp::Add: return with_type(mk_int(x + y), tint());
        case BinOp::Sub: return with_type(mk_int(x - y), tint());
        case BinOp::Mul: return with_type(mk_int(x * y), tint());
        case BinOp::Lt: return x < y ? tru() : fls();
        case BinOp::Le: return x <= y ? tru() : fls();
        case BinOp::Gt: return x > y ? tru() : fls();
        case BinOp::Ge: return x >= y ? tru() : fls();
        default: break;
      }
    }
    if ((e->op == BinOp::Le || e->op == BinOp::Ge) && expr_equal(a, b)) return tru();
    if ((e->op == BinOp::Lt || e->op == BinOp::Gt) && expr_equal(a, b)) return fls();
    return with_children(e, {a, b});
  }

  ExprPtr app(const ExprPtr& e) {
    auto kids = children_of(e);
    for (std::size_t i = 1; i < kids.size(); ++i) kids[i] = simp(kids[i]);
    ExprPtr head = kids[0];
    if (head->kind == Expr::Kind::Lambda && head->params.size() == kids.size() - 1) {
      std::vector<std::pair<std::string, ExprPtr>> sub;
      for (std::size_t i = 0; i < head->params.size(); ++i) sub.emplace_back(head->params[i], kids[i + 1]);
      return simp(substitute(head->args[0], sub));
    }
    ExprPtr r = with_children(e, kids);
    if (head->kind != Expr::Kind::Var) return r;
    if (auto v = evaluate(r)) return *v;
    if (!budget()) return r;
    if (auto v = rewrite(r)) return *v;
    if (auto v = unfold(r)) return *v;
    return r;
  }

  std::optional<ExprPtr> evaluate(const ExprPtr& e) {
    for (const auto& v : free_vars(e))
      if (!w_.table.count(v)) return std::nullopt;
    for (std::size_t i = 1; i < e->args.size(); ++i)
      if (!is_value_like(e->args[i])) return std::nullopt;
    try {
      Evaluator ev(w_.table, 100'000);
      ValuePtr v = ev.eval(e);
      if (v->kind == Value::Kind::Closure || v->kind == Value::Kind::Ordinal) return std::nullopt;
      return with_type(value_to_expr(v), e->type);
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  std::optional<ExprPtr> try_rule(const Rule& r, const ExprPtr& e) {
    std::vector<std::pair<std::string, ExprPtr>> sub;
    if (!match_term(r.lhs, e, r.vars, sub)) return std::nullopt;
    for (const auto& h : r.hyps) {
      ExprPtr hv = simp(substitute(h, sub));
      if (!is_lit(hv, true)) return std::nullopt;
    }
    ++steps_;
    ++r.hits;
    return simp(substitute(r.rhs, sub));
  }

  std::optional<ExprPtr> rewrite(const ExprPtr& e) {
    for (const auto& r : local_)
      if (auto v = try_rule(r, e)) return v;
    for (const auto& r : w_.rules)
      if (auto v = try_rule(*r, e)) return v;
    return std::nullopt;
  }

  // True when the outermost case split of `body` is decided under the current facts.
  bool opens(ExprPtr body) {
    while (body->kind == Expr::Kind::Let) body = substitute(body->args[1], {{body->name, body->args[0]}});
    if (body->kind == Expr::Kind::If) {
      ExprPtr c = simp(body->args[0]);
      return c->kind == Expr::Kind::Bool;
    }
    if (body->kind == Expr::Kind::Match) {
      ExprPtr s = simp(body->args[0]);
      for (const auto& c : body->cases) {
        std::vector<std::pair<std::string, ExprPtr>> b;
        Static m = static_match(c.pattern, s, b);
        if (m == Static::Yes) return true;
        if (m == Static::Unknown) return false;
      }
      return false;
    }
    return true;
  }

  std::optional<ExprPtr> unfold(const ExprPtr& e) {
    const FunDef* f = w_.find_fun(call_name(e));
    if (!f || !f->decl.body || f->decl.params.size() != e->args.size() - 1) return std::nullopt;
    std::vector<std::pair<std::string, ExprPtr>> sub;
    for (std::size_t i = 0; i < f->decl.params.size(); ++i) sub.emplace_back(f->decl.params[i].name, e->args[i + 1]);
    ExprPtr body = substitute(f->decl.body, sub);
    if (!f->clique.empty() && (unfolding_.count(f->decl.name) || !opens(body))) return std::nullopt;
    ++steps_;
    // one layer per round for recursive definitions
    for (const auto& n : f->clique) unfolding_.insert(n);
    ExprPtr r = simp(body);
    for (const auto& n : f->clique) unfolding_.erase(n);
    return r;
  }

  const World& w_;
  const WaterfallConfig& cfg_;
  std::vector<ExprPtr> facts_;
  std::vector<Rule> local_;
  std::size_t steps_ = 0;
  std::set<std::string> unfolding_;
};

}  // namespace

bool match_term(const ExprPtr& p, const ExprPtr& t, const std::vector<std::string>& vars,
                std::vector<std::pair<std::string, ExprPtr>>& sub) {
  if (p->kind == Expr::Kind::Var && std::find(vars.begin(), vars.end(), p->name) != vars.end()) {
    for (const auto& [n, v] : sub)
      if (n == p->name) return expr_equal(v, t);
    sub.emplace_back(p->name, t);
    return true;
  }
  if (p->kind != t->kind) return false;
  switch (p->kind) {
    case Expr::Kind::Int: return p->ival == t->ival;
    case Expr::Kind::Bool: return p->bval == t->bval;
    case Expr::Kind::Var: return p->name == t->name;
    case Expr::Kind::Lambda:
    case Expr::Kind::Let:
    case Expr::Kind::Match:
      return expr_equal(p, t);
    default:
      break;
  }
  if (p->name != t->name || p->op != t->op || p->index != t->index) return false;
  auto pk = children_of(p);
  auto tk = children_of(t);
  if (pk.size() != tk.size()) return false;
  for (std::size_t i = 0; i < pk.size(); ++i)
    if (!match_term(pk[i], tk[i], vars, sub)) return false;
  return true;
}

std::optional<Rule> rule_of_fact(const ExprPtr& fact) {
  Rule r;
  r.name = "hyp";
  ExprPtr c = fact;
  while (c->kind == Expr::Kind::Bin && c->op == BinOp::Or && c->args[0]->kind == Expr::Kind::Not) {
    split_conj(c->args[0]->args[0], r.hyps);
    c = c->args[1];
  }
  auto rigid = [](const ExprPtr& e) {
    return e->kind == Expr::Kind::Var || e->kind == Expr::Kind::Int || e->kind == Expr::Kind::Bool;
  };
  if (c->kind == Expr::Kind::Bin && c->op == BinOp::Eq) {
    if (!rigid(c->args[0])) {
      r.lhs = c->args[0];
      r.rhs = c->args[1];
    } else if (!rigid(c->args[1])) {
      r.lhs = c->args[1];
      r.rhs = c->args[0];
    } else {
      return std::nullopt;
    }
  } else {
    if (rigid(c)) return std::nullopt;
    r.lhs = c;
    r.rhs = tru();
  }
  return r;
}

std::string to_string(const Goal& g) {
  std::ostringstream os;
  for (std::size_t i = 0; i < g.hyps.size(); ++i) os << (i ? "; " : "") << pretty(g.hyps[i]);
  os << (g.hyps.empty() ? "|- " : " |- ") << pretty(g.concl);
  return os.str();
}

Goal make_goal(const ExprPtr& typed_goal) {
  Goal g;
  ExprPtr e = default_type_vars(typed_goal);
  if (e->kind == Expr::Kind::Lambda) {
    TypePtr t = e->type;
    for (std::size_t i = 0; i < e->params.size(); ++i) {
      TypePtr pt = i < e->param_types.size() ? e->param_types[i] : nullptr;
      if (!pt && t && t->kind == Type::Kind::Arrow) pt = t->args[0];
      if (t && t->kind == Type::Kind::Arrow) t = t->args[1];
      g.vars.emplace_back(e->params[i], pt ? pt : tint());
    }
    e = e->args[0];
  }
  g.concl = e;
  split_implications(g);
  return g;
}

ExprPtr close_goal(const Goal& g, const World& w) {
  ExprPtr body = g.concl;
  if (!g.hyps.empty()) {
    ExprPtr h;
    for (const auto& x : g.hyps) h = h ? mk_bin(BinOp::And, h, x) : x;
    body = mk_bin(BinOp::Or, mk_not(h), body);
  }
  if (g.vars.empty()) return infer_expr(body, w.env);
  std::vector<std::string> names;
  std::vector<TypePtr> types;
  for (const auto& [n, t] : g.vars) {
    names.push_back(n);
    types.push_back(t);
  }
  auto lam = std::make_shared<Expr>(*mk_lambda(names, body));
  lam->param_types = types;
  return infer_expr(lam, w.env);
}

void retype(Goal& g, const World& w) {
  std::map<std::string, TypePtr> locals(g.vars.begin(), g.vars.end());
  for (auto& h : g.hyps) h = infer_expr(h, w.env, locals);
  g.concl = infer_expr(g.concl, w.env, locals);
}

ExprPtr simplify_expr(const ExprPtr& e, const World& w, const std::vector<ExprPtr>& facts,
                      const WaterfallConfig& cfg) {
  std::vector<Rule> local;
  for (const auto& f : facts)
    if (auto r = rule_of_fact(f)) local.push_back(*r);
  return Simplifier(w, cfg, facts, std::move(local)).simp(e);
}

Goal simplify(const Goal& g0, const World& w, const WaterfallConfig& cfg) {
  Goal g = g0;
  for (int round = 0; round < 4; ++round) {
    std::vector<ExprPtr> hyps;
    for (const auto& h : g.hyps) split_conj(Simplifier(w, cfg, {}, {}).simp(h), hyps);
    g.hyps.clear();
    for (const auto& h : hyps) {
      if (is_lit(h, false)) {
        g.hyps = {h};
        g.concl = tru();
        return g;
      }
      bool dup = std::any_of(g.hyps.begin(), g.hyps.end(), [&](const ExprPtr& x) { return expr_equal(x, h); });
      if (!dup) g.hyps.push_back(h);
    }
    ExprPtr before = g.concl;
    g.concl = simplify_expr(g.concl, w, g.hyps, cfg);
    std::size_t nh = g.hyps.size();
    split_implications(g);
    if (expr_equal(before, g.concl) && nh == g.hyps.size()) break;
  }
  return g;
}

}  // namespace iml
