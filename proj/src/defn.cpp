/* SPDX-License-Identifier: Apache-2.0 */

#include "iml/defn.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "iml/prelude.hpp"
#include "iml/syntax.hpp"

namespace iml {

const char* to_string(AdmissionError::Kind k) {
  switch (k) {
    case AdmissionError::Kind::TerminationUnproved: return "TerminationUnproved";
    case AdmissionError::Kind::NoMeasure: return "NoMeasure";
    case AdmissionError::Kind::Redefinition: return "Redefinition";
    case AdmissionError::Kind::Invalid: return "Invalid";
  }
  return "?";
}

std::string to_string(const TerminationVC& vc) {
  std::string s = "{ ";
  for (std::size_t i = 0; i < vc.hyps.size(); ++i) s += (i ? ", " : "") + pretty(vc.hyps[i]);
  s += vc.hyps.empty() ? "}" : " }";
  s += " |- ";
  if (vc.certificate == "structural")
    return s + "size(" + pretty(vc.lhs) + ") < size(" + pretty(vc.rhs) + ")";
  return s + pretty(vc.lhs) + " << " + pretty(vc.rhs);
}

const FunDef* World::find_fun(const std::string& name) const {
  auto it = funs.find(name);
  return it == funs.end() ? nullptr : it->second.get();
}

// ---------------------------------------------------------------------------
// Recursive calls

namespace {

class CallCollector {
 public:
  CallCollector(const std::vector<std::string>& clique, std::set<std::string> avoid)
      : clique_(clique), avoid_(std::move(avoid)) {}

  std::vector<RecCall> calls;

  void walk(const ExprPtr& e, const std::vector<ExprPtr>& g) {
    switch (e->kind) {
      case Expr::Kind::App: {
        for (const auto& a : e->args) walk(a, g);
        auto name = call_name(e);
        if (std::find(clique_.begin(), clique_.end(), name) != clique_.end()) {
          RecCall rc;
          rc.callee = name;
          rc.args.assign(e->args.begin() + 1, e->args.end());
          rc.guard = g;
          rc.call = e;
          calls.push_back(std::move(rc));
        }
        return;
      }
      case Expr::Kind::If:
        walk(e->args[0], g);
        walk(e->args[1], plus(g, e->args[0]));
        walk(e->args[2], plus(g, mk_not(e->args[0])));
        return;
      case Expr::Kind::Match:
        walk(e->args[0], g);
        for (const auto& c : e->cases)
          walk(c.body, plus(g, mk_bin(BinOp::Eq, e->args[0], pattern_term(c.pattern))));
        return;
      case Expr::Kind::Let:
        walk(e->args[0], g);
        walk(e->args[1], plus(g, mk_bin(BinOp::Eq, mk_var(e->name, e->args[0]->type), e->args[0])));
        return;
      case Expr::Kind::Bin:
        if (e->op == BinOp::And || e->op == BinOp::Or) {
          walk(e->args[0], g);
          walk(e->args[1], plus(g, e->op == BinOp::And ? e->args[0] : mk_not(e->args[0])));
          return;
        }
        break;
      default:
        break;
    }
    for (const auto& c : children_of(e)) walk(c, g);
  }

  ExprPtr pattern_term(const PatternPtr& p) {
    switch (p->kind) {
      case Pattern::Kind::Var: return mk_var(p->name);
      case Pattern::Kind::Wildcard: {
        auto n = fresh_name("_w", avoid_);
        avoid_.insert(n);
        return mk_var(n);
      }
      case Pattern::Kind::Int: return mk_int(p->ival);
      case Pattern::Kind::Bool: return mk_bool(p->bval);
      case Pattern::Kind::Tuple:
      case Pattern::Kind::Construct: {
        std::vector<ExprPtr> args;
        for (const auto& a : p->args) args.push_back(pattern_term(a));
        if (p->kind == Pattern::Kind::Tuple) return mk_tuple(std::move(args));
        return mk_construct(p->name, std::move(args));
      }
    }
    return mk_bool(true);
  }

 private:
  static std::vector<ExprPtr> plus(std::vector<ExprPtr> g, ExprPtr c) {
    g.push_back(std::move(c));
    return g;
  }

  const std::vector<std::string>& clique_;
  std::set<std::string> avoid_;
};

void all_names(const ExprPtr& e, std::set<std::string>& out) {
  if (e->kind == Expr::Kind::Var || e->kind == Expr::Kind::Let) out.insert(e->name);
  for (const auto& p : e->params) out.insert(p);
  for (const auto& c : e->cases) {
    std::vector<std::string> vs;
    pattern_vars(c.pattern, vs);
    out.insert(vs.begin(), vs.end());
  }
  for (const auto& c : children_of(e)) all_names(c, out);
}

// A clique member must only appear fully applied in head position.
void check_value_uses(const ExprPtr& e, const std::map<std::string, std::size_t>& arity,
                      const std::string& host) {
  if (e->kind == Expr::Kind::App && e->args[0]->kind == Expr::Kind::Var) {
    auto it = arity.find(e->args[0]->name);
    if (it != arity.end() && e->args.size() - 1 < it->second)
      throw AdmissionError(AdmissionError::Kind::TerminationUnproved, host,
                           "recursive function " + it->first + " is partially applied in " + host);
    for (std::size_t i = 1; i < e->args.size(); ++i) check_value_uses(e->args[i], arity, host);
    return;
  }
  if (e->kind == Expr::Kind::Var && arity.count(e->name))
    throw AdmissionError(AdmissionError::Kind::TerminationUnproved, host,
                         "recursive function " + e->name + " is used as a value in " + host);
  for (const auto& c : children_of(e)) check_value_uses(c, arity, host);
}

}  // namespace

std::vector<RecCall> collect_rec_calls(const FunDecl& f, const std::vector<std::string>& clique) {
  std::set<std::string> avoid;
  all_names(f.body, avoid);
  for (const auto& p : f.params) avoid.insert(p.name);
  CallCollector cc(clique, std::move(avoid));
  cc.walk(f.body, {});
  return std::move(cc.calls);
}

// ---------------------------------------------------------------------------
// Measures

namespace {

bool is_datatype(const TypePtr& t, const TypeEnv& env) {
  return t && t->kind == Type::Kind::Con && env.types.count(t->name);
}

std::vector<TypePtr> param_types_of(const Scheme& s, std::size_t n) {
  std::vector<TypePtr> out;
  TypePtr t = s.body;
  for (std::size_t i = 0; i < n && t && t->kind == Type::Kind::Arrow; ++i) {
    out.push_back(t->args[0]);
    t = t->args[1];
  }
  return out;
}

bool contains_expr(const std::vector<ExprPtr>& set, const ExprPtr& e) {
  return std::any_of(set.begin(), set.end(), [&](const ExprPtr& x) { return expr_equal(x, e); });
}

void proper_var_subterms(const ExprPtr& e, bool root, std::vector<ExprPtr>& out) {
  if (!root && e->kind == Expr::Kind::Var) out.push_back(e);
  for (const auto& c : children_of(e)) proper_var_subterms(c, false, out);
}

// Is `arg` a strict subterm of the formal `param` under the guard equations?
bool strict_subterm(const ExprPtr& arg, const std::string& param, const std::vector<ExprPtr>& raw_guard) {
  // `(a, b) = (p, q)` from tuple scrutinees splits componentwise
  std::vector<ExprPtr> guard;
  std::function<void(const ExprPtr&)> split = [&](const ExprPtr& g) {
    if (g->kind == Expr::Kind::Bin && g->op == BinOp::Eq && g->args[0]->kind == Expr::Kind::Tuple &&
        g->args[1]->kind == Expr::Kind::Tuple && g->args[0]->args.size() == g->args[1]->args.size()) {
      for (std::size_t i = 0; i < g->args[0]->args.size(); ++i)
        split(mk_bin(BinOp::Eq, g->args[0]->args[i], g->args[1]->args[i]));
      return;
    }
    guard.push_back(g);
  };
  for (const auto& g : raw_guard) split(g);
  std::vector<ExprPtr> equal{mk_var(param)};
  std::vector<ExprPtr> strict;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& g : guard) {
      if (g->kind != Expr::Kind::Bin || g->op != BinOp::Eq) continue;
      for (int dir = 0; dir < 2; ++dir) {
        const auto& l = g->args[dir];
        const auto& r = g->args[1 - dir];
        bool l_eq = contains_expr(equal, l), l_st = contains_expr(strict, l);
        if (!l_eq && !l_st) continue;
        if (r->kind == Expr::Kind::Var) {
          auto& target = l_st ? strict : equal;
          if (!contains_expr(target, r)) {
            target.push_back(r);
            changed = true;
          }
        }
        if (dir == 1) continue;  // subterm extraction only from pattern-side right operands
        std::vector<ExprPtr> subs;
        proper_var_subterms(r, true, subs);
        for (const auto& s : subs)
          if (!contains_expr(strict, s)) {
            strict.push_back(s);
            changed = true;
          }
      }
    }
  }
  return contains_expr(strict, arg);
}

ExprPtr ordinal_call(const std::string& op, std::vector<ExprPtr> args) {
  return mk_call("Ordinal." + op, std::move(args), op == "lt" ? tbool() : tordinal());
}

ExprPtr adm_measure(const std::vector<std::string>& names) {
  std::vector<ExprPtr> parts;
  for (const auto& n : names) parts.push_back(ordinal_call("of_int", {mk_var(n, tint())}));
  // Left-nested so that three or more components stay lexicographic.
  ExprPtr m = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) m = ordinal_call("pair", {m, parts[i]});
  return m;
}

}  // namespace

std::optional<MeasureSpec> elaborate_measure(const FunDecl& f, const std::vector<FunDecl>& clique,
                                             const std::vector<Scheme>& schemes, const TypeEnv& env) {
  if (const auto* a = f.find(Annotation::Kind::Adm)) {
    MeasureSpec m;
    m.kind = MeasureSpec::Kind::AdmLex;
    m.names = a->names;
    m.expr = adm_measure(a->names);
    return m;
  }
  if (const auto* a = f.find(Annotation::Kind::Measure)) {
    MeasureSpec m;
    m.kind = MeasureSpec::Kind::Explicit;
    m.expr = a->measure;
    return m;
  }
  // Structural inference: choose one datatype parameter per clique member such
  // that every call passes a strict subterm of the caller's chosen parameter.
  std::vector<std::string> names;
  for (const auto& g : clique) names.push_back(g.name);
  std::vector<std::vector<RecCall>> calls;
  std::vector<std::vector<std::size_t>> candidates;
  for (std::size_t k = 0; k < clique.size(); ++k) {
    calls.push_back(collect_rec_calls(clique[k], names));
    auto pts = param_types_of(schemes[k], clique[k].params.size());
    std::vector<std::size_t> c;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (is_datatype(pts[i], env)) c.push_back(i);
    candidates.push_back(std::move(c));
  }
  std::vector<std::size_t> choice(clique.size(), 0);
  std::function<bool(std::size_t)> search = [&](std::size_t k) -> bool {
    if (k == clique.size()) {
      for (std::size_t h = 0; h < clique.size(); ++h)
        for (const auto& rc : calls[h]) {
          auto callee = static_cast<std::size_t>(std::find(names.begin(), names.end(), rc.callee) - names.begin());
          std::size_t ci = choice[callee];
          if (ci >= rc.args.size() || !strict_subterm(rc.args[ci], clique[h].params[choice[h]].name, rc.guard))
            return false;
        }
      return true;
    }
    for (auto i : candidates[k]) {
      choice[k] = i;
      if (search(k + 1)) return true;
    }
    return false;
  };
  if (!search(0)) return std::nullopt;
  auto self = static_cast<std::size_t>(std::find(names.begin(), names.end(), f.name) - names.begin());
  MeasureSpec m;
  m.kind = MeasureSpec::Kind::Structural;
  m.param_index = choice[self];
  return m;
}

std::vector<TerminationVC> gen_termination_vcs(const FunDecl& f,
                                               const std::map<std::string, MeasureSpec>& measures,
                                               const std::map<std::string, FunDecl>& clique) {
  std::vector<std::string> names;
  for (const auto& [n, _] : clique) names.push_back(n);
  std::vector<TerminationVC> out;
  const auto& mf = measures.at(f.name);
  for (const auto& rc : collect_rec_calls(f, names)) {
    const auto& mc = measures.at(rc.callee);
    const auto& callee = clique.at(rc.callee);
    TerminationVC vc;
    vc.caller = f.name;
    vc.callee = rc.callee;
    vc.hyps = rc.guard;
    if (mc.kind == MeasureSpec::Kind::Structural) {
      vc.lhs = rc.args.at(mc.param_index);
      vc.rhs = mk_var(f.params.at(mf.param_index).name);
      vc.certificate = "structural";
      out.push_back(std::move(vc));
      continue;
    }
    std::vector<std::pair<std::string, ExprPtr>> sub;
    for (std::size_t i = 0; i < callee.params.size() && i < rc.args.size(); ++i)
      sub.emplace_back(callee.params[i].name, rc.args[i]);
    vc.lhs = substitute(mc.expr, sub);
    vc.rhs = mf.expr;
    ExprPtr concl = ordinal_call("lt", {vc.lhs, vc.rhs});
    ExprPtr body = concl;
    if (!vc.hyps.empty()) {
      ExprPtr h = vc.hyps[0];
      for (std::size_t i = 1; i < vc.hyps.size(); ++i) h = mk_bin(BinOp::And, h, vc.hyps[i]);
      body = mk_bin(BinOp::Or, mk_not(h), concl);
    }
    vc.goal = body;  // closed over its free variables by the caller
    out.push_back(std::move(vc));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ordinal encoding

namespace {

bool is_ordinal_app(const ExprPtr& e, const char* op) {
  return e->kind == Expr::Kind::App && call_name(e) == std::string("Ordinal.") + op;
}

bool is_ordinal_term(const ExprPtr& e) {
  if (is_ordinal_app(e, "of_int") || is_ordinal_app(e, "pair") || is_ordinal_app(e, "plus")) return true;
  if (e->kind == Expr::Kind::If) return is_ordinal_term(e->args[1]) || is_ordinal_term(e->args[2]);
  if (e->kind == Expr::Kind::Let) return is_ordinal_term(e->args[1]);
  return e->type && e->type->kind == Type::Kind::Con && e->type->name == "Ordinal.t";
}

std::size_t degree(const ExprPtr& e) {
  if (is_ordinal_app(e, "of_int")) return 1;
  if (is_ordinal_app(e, "pair")) return std::max(degree(e->args[1]) + 1, degree(e->args[2]));
  if (is_ordinal_app(e, "plus")) return std::max(degree(e->args[1]), degree(e->args[2]));
  if (e->kind == Expr::Kind::If) return std::max(degree(e->args[1]), degree(e->args[2]));
  if (e->kind == Expr::Kind::Let) return degree(substitute(e->args[1], {{e->name, e->args[0]}}));
  throw Error("unsupported ordinal expression: " + pretty(e));
}

ExprPtr encode(const ExprPtr& e);

std::vector<ExprPtr> coeffs(const ExprPtr& e, std::size_t k) {
  std::vector<ExprPtr> v(k, mk_int(0));
  if (is_ordinal_app(e, "of_int")) {
    auto x = encode(e->args[1]);
    v[0] = mk_if(mk_bin(BinOp::Ge, x, mk_int(0)), x, mk_int(0));
    return v;
  }
  if (is_ordinal_app(e, "pair") || is_ordinal_app(e, "plus")) {
    auto x = coeffs(e->args[1], k);
    auto y = coeffs(e->args[2], k);
    if (is_ordinal_app(e, "pair")) {
      x.insert(x.begin(), mk_int(0));
      x.pop_back();
    }
    for (std::size_t i = 0; i < k; ++i) {
      ExprPtr higher;
      for (std::size_t j = i + 1; j < k; ++j) {
        auto pos = mk_bin(BinOp::Gt, y[j], mk_int(0));
        higher = higher ? mk_bin(BinOp::Or, higher, pos) : pos;
      }
      auto sum = mk_bin(BinOp::Add, x[i], y[i]);
      v[i] = higher ? mk_if(higher, y[i], sum) : sum;
    }
    return v;
  }
  if (e->kind == Expr::Kind::If) {
    auto c = encode(e->args[0]);
    auto t = coeffs(e->args[1], k);
    auto f = coeffs(e->args[2], k);
    for (std::size_t i = 0; i < k; ++i) v[i] = mk_if(c, t[i], f[i]);
    return v;
  }
  if (e->kind == Expr::Kind::Let) return coeffs(substitute(e->args[1], {{e->name, e->args[0]}}), k);
  throw Error("unsupported ordinal expression: " + pretty(e));
}

ExprPtr encode(const ExprPtr& e) {
  if (is_ordinal_app(e, "lt") && e->args.size() == 3) {
    std::size_t k = std::max(degree(e->args[1]), degree(e->args[2]));
    auto x = coeffs(e->args[1], k);
    auto y = coeffs(e->args[2], k);
    ExprPtr acc = mk_bin(BinOp::Lt, x[0], y[0]);
    for (std::size_t i = 1; i < k; ++i)
      acc = mk_bin(BinOp::Or, mk_bin(BinOp::Lt, x[i], y[i]),
                   mk_bin(BinOp::And, mk_bin(BinOp::Eq, x[i], y[i]), acc));
    return acc;
  }
  if (e->kind == Expr::Kind::Bin && e->op == BinOp::Eq &&
      (is_ordinal_term(e->args[0]) || is_ordinal_term(e->args[1]))) {
    std::size_t k = std::max(degree(e->args[0]), degree(e->args[1]));
    auto x = coeffs(e->args[0], k);
    auto y = coeffs(e->args[1], k);
    ExprPtr acc = mk_bin(BinOp::Eq, x[0], y[0]);
    for (std::size_t i = 1; i < k; ++i) acc = mk_bin(BinOp::And, acc, mk_bin(BinOp::Eq, x[i], y[i]));
    return acc;
  }
  auto kids = children_of(e);
  if (kids.empty()) return e;
  std::vector<ExprPtr> nk;
  bool changed = false;
  for (const auto& k : kids) {
    nk.push_back(encode(k));
    changed = changed || nk.back() != k;
  }
  return changed ? with_children(e, std::move(nk)) : e;
}

}  // namespace

ExprPtr encode_ordinals(const ExprPtr& e) { return encode(e); }

// ---------------------------------------------------------------------------
// Admission

namespace {

std::shared_ptr<const FunctionDef> executable(const FunDecl& f) {
  auto d = std::make_shared<FunctionDef>();
  d->name = f.name;
  for (const auto& p : f.params) d->params.push_back(p.name);
  d->body = f.body;
  return d;
}

// Free variables of a VC body in a stable order: formals first.
std::vector<std::string> vc_vars(const ExprPtr& body, const FunDecl& f, const World& w,
                                 const std::vector<std::string>& clique) {
  auto fv = free_vars(body);
  std::vector<std::string> out;
  for (const auto& p : f.params)
    if (fv.erase(p.name)) out.push_back(p.name);
  for (const auto& v : fv) {
    if (w.env.values.count(v) || std::find(clique.begin(), clique.end(), v) != clique.end()) continue;
    out.push_back(v);
  }
  return out;
}

bool discharge(TerminationVC& vc, const FunDecl& f, const World& opaque, const std::vector<std::string>& clique,
               const AdmitConfig& cfg, std::string* why) {
  if (vc.certificate == "structural") return true;
  auto vars = vc_vars(vc.goal, f, opaque, clique);
  ExprPtr goal = encode_ordinals(vc.goal);
  if (!vars.empty()) goal = mk_lambda(vars, goal);
  Decl d;
  d.kind = Decl::Kind::Verify;
  d.goal = goal;
  auto typed = infer_decl(d, opaque.env);
  vc.goal = typed.decl.goal;
  if (!cfg.prover) {
    if (why) *why = "no prover configured";
    return false;
  }
  if (!cfg.prover(opaque, vc.goal, why)) return false;
  vc.certificate = "proved";
  return true;
}

[[noreturn]] void unproved(const std::string& name, const TerminationVC& vc, const std::string& why) {
  throw AdmissionError(AdmissionError::Kind::TerminationUnproved, name,
                       "cannot prove termination of " + name + ": " + to_string(vc) +
                           (why.empty() ? "" : " (" + why + ")"));
}

World admit_funs(const Decl& d, const World& w, const AdmitConfig& cfg) {
  for (const auto& f : d.funs)
    if (w.theorems.count(f.name))
      throw AdmissionError(AdmissionError::Kind::Redefinition, f.name, f.name + " is already defined");
  TypedDecl td = infer_decl(d, w.env);
  const auto& funs = td.decl.funs;
  bool recursive = funs.size() > 1 || funs[0].recursive;
  std::vector<std::string> clique;
  if (recursive)
    for (const auto& f : funs) clique.push_back(f.name);
  for (const auto& f : funs) check_fun_admissible(f, funs, td.schemes);

  std::map<std::string, MeasureSpec> measures;
  std::map<std::string, FunDecl> by_name;
  std::vector<std::vector<RecCall>> calls(funs.size());
  bool any_calls = false;
  if (recursive) {
    std::map<std::string, std::size_t> arity;
    for (const auto& f : funs) arity[f.name] = f.params.size();
    for (const auto& f : funs) check_value_uses(f.body, arity, f.name);
    for (std::size_t k = 0; k < funs.size(); ++k) {
      by_name[funs[k].name] = funs[k];
      calls[k] = collect_rec_calls(funs[k], clique);
      any_calls = any_calls || !calls[k].empty();
    }
  }

  World opaque = w;
  for (std::size_t k = 0; k < funs.size(); ++k) opaque.env.values[funs[k].name] = td.schemes[k];

  std::map<std::string, std::vector<TerminationVC>> vcs;
  if (recursive && any_calls) {
    bool annotated = false;
    for (const auto& f : funs) {
      if (f.find(Annotation::Kind::Adm) && f.find(Annotation::Kind::Measure))
        throw AdmissionError(AdmissionError::Kind::Invalid, f.name, f.name + " has both @@adm and @@measure");
      annotated = annotated || f.find(Annotation::Kind::Adm) || f.find(Annotation::Kind::Measure);
    }
    std::string why;
    auto try_measures = [&](const std::map<std::string, MeasureSpec>& ms, TerminationVC* failed) {
      std::map<std::string, std::vector<TerminationVC>> out;
      for (const auto& f : funs) {
        auto list = gen_termination_vcs(f, ms, by_name);
        for (auto& vc : list) {
          if (!discharge(vc, f, opaque, clique, cfg, &why)) {
            if (failed) *failed = vc;
            return false;
          }
        }
        out[f.name] = std::move(list);
      }
      vcs = std::move(out);
      return true;
    };
    if (annotated) {
      for (std::size_t k = 0; k < funs.size(); ++k) {
        auto m = elaborate_measure(funs[k], funs, td.schemes, w.env);
        if (!m || m->kind == MeasureSpec::Kind::Structural)
          throw AdmissionError(AdmissionError::Kind::NoMeasure, funs[k].name,
                               "every member of a recursive pair needs a measure annotation");
        measures[funs[k].name] = *m;
      }
      TerminationVC failed;
      if (!try_measures(measures, &failed)) unproved(funs[0].name, failed, why);
    } else {
      auto m0 = elaborate_measure(funs[0], funs, td.schemes, w.env);
      if (m0) {
        for (const auto& f : funs) measures[f.name] = *elaborate_measure(f, funs, td.schemes, w.env);
        try_measures(measures, nullptr);
      } else {
        // Fallback for a single function: `of_int p` on one integer parameter.
        bool found = false;
        TerminationVC last;
        if (funs.size() == 1 && cfg.prover) {
          auto pts = param_types_of(td.schemes[0], funs[0].params.size());
          for (std::size_t i = 0; i < pts.size() && !found; ++i) {
            if (!type_equal(pts[i], tint())) continue;
            MeasureSpec m;
            m.kind = MeasureSpec::Kind::AdmLex;
            m.names = {funs[0].params[i].name};
            m.expr = adm_measure(m.names);
            measures = {{funs[0].name, m}};
            found = try_measures(measures, &last);
          }
        }
        if (!found) {
          if (!last.lhs) {
            last.caller = funs[0].name;
            last.hyps = calls[0].empty() ? std::vector<ExprPtr>{} : calls[0][0].guard;
            last.lhs = calls[0].empty() ? mk_var("?") : calls[0][0].call;
            last.rhs = mk_var("?");
          }
          throw AdmissionError(AdmissionError::Kind::TerminationUnproved, funs[0].name,
                               "cannot prove termination of " + funs[0].name +
                                   ": no structural measure applies and no measure annotation was given" +
                                   (last.goal ? "; last attempt " + to_string(last) : std::string()));
        }
      }
    }
  }

  World out = w;
  for (std::size_t k = 0; k < funs.size(); ++k) {
    auto def = std::make_shared<FunDef>();
    def->decl = funs[k];
    def->scheme = td.schemes[k];
    def->clique = clique;
    if (recursive) {
      def->rec_calls = calls[k];
      if (measures.count(funs[k].name)) def->measure = measures[funs[k].name];
      def->vcs = vcs[funs[k].name];
    }
    out.env.values[funs[k].name] = td.schemes[k];
    out.table[funs[k].name] = executable(funs[k]);
    out.funs[funs[k].name] = def;
    out.order.push_back(funs[k].name);
  }
  return out;
}

}  // namespace

World admit(const Decl& d, const World& w, const AdmitConfig& cfg) {
  switch (d.kind) {
    case Decl::Kind::Type: {
      infer_decl(d, w.env);
      World out = w;
      out.env.add_type(d.type);
      out.order.push_back(d.type.name);
      return out;
    }
    case Decl::Kind::Fun:
      return admit_funs(d, w, cfg);
    case Decl::Kind::Theorem: {
      const auto& name = d.funs[0].name;
      if (w.theorems.count(name) || w.env.values.count(name))
        throw AdmissionError(AdmissionError::Kind::Redefinition, name, name + " is already defined");
      auto td = infer_decl(d, w.env);
      auto thm = std::make_shared<TheoremDef>();
      thm->decl = td.decl.funs[0];
      thm->scheme = td.schemes[0];
      World out = w;
      out.theorems[name] = thm;
      out.order.push_back(name);
      return out;
    }
    case Decl::Kind::Verify:
    case Decl::Kind::Instance:
      break;
  }
  throw AdmissionError(AdmissionError::Kind::Invalid, "", "directives are not admitted");
}

const World& World::initial() {
  static const World w = [] {
    World x;
    x.env = TypeEnv::builtin();
    for (const auto& d : prelude_module().decls) x = admit(d, x);
    x.order.clear();
    return x;
  }();
  return w;
}

// ---------------------------------------------------------------------------
// Rules

Rule rule_of_theorem(const FunDecl& thm) {
  Rule r;
  r.name = thm.name;
  for (const auto& p : thm.params) r.vars.push_back(p.name);
  ExprPtr c = thm.body;
  // `h ==> c` is parsed as `not h || c`.
  while (c->kind == Expr::Kind::Bin && c->op == BinOp::Or && c->args[0]->kind == Expr::Kind::Not) {
    r.hyps.push_back(c->args[0]->args[0]);
    c = c->args[1];
  }
  if (c->kind == Expr::Kind::Bin && c->op == BinOp::Eq) {
    r.lhs = c->args[0];
    r.rhs = c->args[1];
  } else {
    r.lhs = c;
    r.rhs = mk_bool(true);
  }
  if (r.lhs->kind == Expr::Kind::Var || r.lhs->kind == Expr::Kind::Int || r.lhs->kind == Expr::Kind::Bool)
    throw AdmissionError(AdmissionError::Kind::Invalid, thm.name,
                         "rewrite rule " + thm.name + " has a variable or literal left-hand side");
  auto lv = free_vars(r.lhs);
  auto check = [&](const ExprPtr& e) {
    for (const auto& v : free_vars(e))
      if (std::find(r.vars.begin(), r.vars.end(), v) != r.vars.end() && !lv.count(v))
        throw AdmissionError(AdmissionError::Kind::Invalid, thm.name,
                             "rewrite rule " + thm.name + ": variable " + v + " does not occur on the left");
  };
  check(r.rhs);
  for (const auto& h : r.hyps) check(h);
  return r;
}

World install_rule(const World& w, const std::string& theorem) {
  auto it = w.theorems.find(theorem);
  if (it == w.theorems.end())
    throw AdmissionError(AdmissionError::Kind::Invalid, theorem, "unknown theorem " + theorem);
  World out = w;
  auto proved = std::make_shared<TheoremDef>(*it->second);
  proved->proved = true;
  out.theorems[theorem] = proved;
  out.rules.push_back(std::make_shared<Rule>(rule_of_theorem(it->second->decl)));
  return out;
}

}  // namespace iml
