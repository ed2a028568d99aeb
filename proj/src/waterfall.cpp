/* SPDX-License-Identifier: Apache-2.0 */

#include "iml/waterfall.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "iml/syntax.hpp"

namespace iml {

namespace {

bool is_lit(const ExprPtr& e, bool v) { return e->kind == Expr::Kind::Bool && e->bval == v; }

ExprPtr implication(const std::vector<ExprPtr>& hyps, const ExprPtr& concl) {
  if (hyps.empty()) return concl;
  ExprPtr h;
  for (const auto& x : hyps) h = h ? with_type(mk_bin(BinOp::And, h, x), tbool()) : x;
  return with_type(mk_bin(BinOp::Or, with_type(mk_not(h), tbool()), concl), tbool());
}

void split_hyp(const ExprPtr& e, std::vector<ExprPtr>& out) {
  if (is_lit(e, true)) return;
  if (e->kind == Expr::Kind::Bin && e->op == BinOp::And) {
    split_hyp(e->args[0], out);
    split_hyp(e->args[1], out);
    return;
  }
  if (e->kind == Expr::Kind::Not && e->args[0]->kind == Expr::Kind::Bin && e->args[0]->op == BinOp::Or) {
    split_hyp(with_type(mk_not(e->args[0]->args[0]), tbool()), out);
    split_hyp(with_type(mk_not(e->args[0]->args[1]), tbool()), out);
    return;
  }
  if (e->kind == Expr::Kind::Not && e->args[0]->kind == Expr::Kind::Not) {
    split_hyp(e->args[0]->args[0], out);
    return;
  }
  out.push_back(e);
}

void collect_calls(const ExprPtr& e, std::vector<ExprPtr>& out) {
  if (e->kind == Expr::Kind::App && !call_name(e).empty()) out.push_back(e);
  for (const auto& c : children_of(e)) collect_calls(c, out);
}

// Pattern variable names used for constructor `ctor` in `body`, if any.
std::vector<std::string> pattern_names(const ExprPtr& body, const std::string& ctor) {
  std::vector<std::string> found;
  std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& e) {
    if (!found.empty()) return;
    if (e->kind == Expr::Kind::Match)
      for (const auto& c : e->cases)
        if (c.pattern->kind == Pattern::Kind::Construct && c.pattern->name == ctor) {
          for (const auto& a : c.pattern->args) found.push_back(a->kind == Pattern::Kind::Var ? a->name : "");
          return;
        }
    for (const auto& c : children_of(e)) walk(c);
  };
  walk(body);
  return found;
}

struct Candidate {
  const FunDef* fun = nullptr;
  ExprPtr call;
  Template tpl;
  std::vector<std::size_t> changed;
  std::vector<std::string> vars;
  std::size_t score = 0;
};

std::optional<Candidate> candidate_for(const ExprPtr& call, const World& w, const Goal& g) {
  const FunDef* f = w.find_fun(call_name(call));
  if (!f || f->clique.empty() || !f->decl.body) return std::nullopt;
  if (f->decl.params.size() != call->args.size() - 1) return std::nullopt;
  Candidate c;
  c.fun = f;
  c.call = call;
  c.tpl = template_of(f->decl);
  std::erase_if(c.tpl.entries, [&](const TemplateEntry& t) { return t.callee != f->decl.name; });
  if (c.tpl.entries.empty()) return std::nullopt;
  for (std::size_t j = 0; j < c.tpl.formals.size(); ++j) {
    bool same = std::all_of(c.tpl.entries.begin(), c.tpl.entries.end(), [&](const TemplateEntry& t) {
      return t.args[j]->kind == Expr::Kind::Var && t.args[j]->name == c.tpl.formals[j];
    });
    if (!same) c.changed.push_back(j);
  }
  if (c.changed.empty()) return std::nullopt;
  for (std::size_t j : c.changed) {
    const auto& a = call->args[j + 1];
    if (a->kind != Expr::Kind::Var) return std::nullopt;
    bool is_goal_var = std::any_of(g.vars.begin(), g.vars.end(), [&](const auto& v) { return v.first == a->name; });
    if (!is_goal_var || std::find(c.vars.begin(), c.vars.end(), a->name) != c.vars.end()) return std::nullopt;
    c.vars.push_back(a->name);
  }
  for (std::size_t j = 0; j < c.tpl.formals.size(); ++j) {
    if (std::find(c.changed.begin(), c.changed.end(), j) != c.changed.end()) continue;
    auto fv = free_vars(call->args[j + 1]);
    for (const auto& v : c.vars)
      if (fv.count(v)) return std::nullopt;
  }
  return c;
}

struct CaseBuilder {
  CaseBuilder(const World& w, const Candidate& cand) : w_(w), cand_(cand) {}

  // Splits constructor tests on goal variables into substitutions; false when the case is vacuous.
  bool normalize(InductionCase& c) {
    for (bool changed = true; changed;) {
      changed = false;
      std::vector<ExprPtr> hyps;
      for (const auto& h : c.hyps) split_hyp(fold_constants(h), hyps);
      c.hyps.clear();
      for (const auto& h : hyps) {
        if (is_lit(h, false)) return false;
        if (!is_lit(h, true)) c.hyps.push_back(h);
      }
      for (std::size_t i = 0; i < c.hyps.size() && !changed; ++i) {
        const auto& h = c.hyps[i];
        bool neg = h->kind == Expr::Kind::Not;
        const auto& t = neg ? h->args[0] : h;
        if (t->kind != Expr::Kind::IsA || t->args[0]->kind != Expr::Kind::Var) continue;
        std::string ctor = t->name;
        if (neg) {
          auto other = other_ctor(c, t->args[0]->name, ctor);
          if (!other) continue;
          ctor = *other;
        }
        if (instantiate(c, t->args[0]->name, ctor)) changed = true;
      }
    }
    return true;
  }

  const TypePtr* var_type(const InductionCase& c, const std::string& v) const {
    for (const auto& [n, t] : c.vars)
      if (n == v) return &t;
    return nullptr;
  }

  std::optional<std::string> other_ctor(const InductionCase& c, const std::string& v, const std::string& ctor) const {
    const TypePtr* t = var_type(c, v);
    if (!t || (*t)->kind != Type::Kind::Con) return std::nullopt;
    auto it = w_.env.types.find((*t)->name);
    if (it == w_.env.types.end() || it->second.ctors.size() != 2) return std::nullopt;
    const auto& cs = it->second.ctors;
    if (cs[0].name == ctor) return cs[1].name;
    if (cs[1].name == ctor) return cs[0].name;
    return std::nullopt;
  }

  /// Constructor names of the type of goal variable `v`, empty when it is not a datatype.
  std::vector<std::string> ctors_of(const InductionCase& c, const std::string& v) const {
    std::vector<std::string> out;
    const TypePtr* t = var_type(c, v);
    if (!t || (*t)->kind != Type::Kind::Con) return out;
    auto it = w_.env.types.find((*t)->name);
    if (it == w_.env.types.end()) return out;
    for (const auto& k : it->second.ctors) out.push_back(k.name);
    return out;
  }

  bool instantiate(InductionCase& c, const std::string& v, const std::string& ctor) {
    const TypePtr* tp = var_type(c, v);
    auto sig = w_.env.ctors.find(ctor);
    if (!tp || sig == w_.env.ctors.end() || (*tp)->kind != Type::Kind::Con) return false;
    TypePtr t = *tp;
    std::map<std::string, TypePtr> targs;
    for (std::size_t i = 0; i < sig->second.type_params.size() && i < t->args.size(); ++i)
      targs[sig->second.type_params[i]] = t->args[i];

    std::set<std::string> avoid;
    for (const auto& [n, _] : c.vars) avoid.insert(n);
    auto add_fv = [&](const ExprPtr& e) {
      for (const auto& x : free_vars(e)) avoid.insert(x);
    };
    add_fv(c.concl);
    for (const auto& h : c.hyps) add_fv(h);
    for (const auto& h : c.ihs) add_fv(h);
    for (const auto& [n, _] : w_.env.values) avoid.insert(n);

    auto names = pattern_names(cand_.fun->decl.body, ctor);
    std::vector<ExprPtr> fields;
    std::vector<std::pair<std::string, TypePtr>> fresh;
    for (std::size_t i = 0; i < sig->second.args.size(); ++i) {
      std::string base = i < names.size() && !names[i].empty() ? names[i] : v + std::to_string(i);
      std::string n = fresh_name(base, avoid);
      avoid.insert(n);
      TypePtr ft = subst_type(sig->second.args[i], targs);
      fresh.emplace_back(n, ft);
      fields.push_back(mk_var(n, ft));
    }
    ExprPtr term = mk_construct(ctor, fields, t);
    std::vector<std::pair<std::string, ExprPtr>> sub = {{v, term}};
    for (auto& h : c.hyps) h = fold_constants(substitute(h, sub));
    for (auto& h : c.ihs) h = fold_constants(substitute(h, sub));
    c.concl = fold_constants(substitute(c.concl, sub));
    std::vector<std::pair<std::string, TypePtr>> vars;
    for (const auto& x : c.vars) {
      if (x.first == v)
        vars.insert(vars.end(), fresh.begin(), fresh.end());
      else
        vars.push_back(x);
    }
    c.vars = std::move(vars);
    return true;
  }

  const World& w_;
  const Candidate& cand_;
};

}  // namespace

std::string to_string(const InductionScheme& s) {
  std::ostringstream os;
  os << "induction on " << pretty(s.call) << " (" << s.cases.size() << " cases)";
  for (std::size_t i = 0; i < s.cases.size(); ++i) {
    const auto& c = s.cases[i];
    os << "\n  case " << i + 1 << ": ";
    std::vector<ExprPtr> all = c.hyps;
    all.insert(all.end(), c.ihs.begin(), c.ihs.end());
    for (std::size_t k = 0; k < all.size(); ++k) os << (k ? "; " : "") << pretty(all[k]);
    os << (all.empty() ? "|- " : " |- ") << pretty(c.concl);
  }
  return os.str();
}

std::optional<InductionScheme> synthesize_induction(const Goal& g, const World& w) {
  std::vector<ExprPtr> calls;
  collect_calls(g.concl, calls);
  for (const auto& h : g.hyps) collect_calls(h, calls);

  std::optional<Candidate> best;
  for (const auto& call : calls) {
    auto c = candidate_for(call, w, g);
    if (!c) continue;
    for (const auto& other : calls)
      for (std::size_t i = 1; i < other->args.size(); ++i)
        if (other->args[i]->kind == Expr::Kind::Var &&
            std::find(c->vars.begin(), c->vars.end(), other->args[i]->name) != c->vars.end()) {
          ++c->score;
          break;
        }
    if (!best || c->score > best->score) best = std::move(c);
  }
  if (!best) return std::nullopt;

  const Candidate& cand = *best;
  std::vector<std::pair<std::string, ExprPtr>> actuals;
  for (std::size_t i = 0; i < cand.tpl.formals.size(); ++i)
    actuals.emplace_back(cand.tpl.formals[i], cand.call->args[i + 1]);
  const ExprPtr goal_formula = implication(g.hyps, g.concl);

  InductionScheme s;
  s.fun = cand.fun->decl.name;
  s.call = cand.call;
  s.induction_vars = cand.vars;

  // Entries with the same path form one case with several hypotheses.
  std::vector<std::pair<ExprPtr, std::vector<const TemplateEntry*>>> groups;
  for (const auto& e : cand.tpl.entries) {
    ExprPtr p = conjoin(e.path);
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& gr) { return expr_equal(gr.first, p); });
    if (it == groups.end())
      groups.push_back({p, {&e}});
    else
      it->second.push_back(&e);
  }

  CaseBuilder builder(w, cand);
  ExprPtr any_step;
  for (const auto& [path, entries] : groups) {
    InductionCase c;
    c.vars = g.vars;
    c.concl = g.concl;
    ExprPtr p = substitute(path, actuals);
    any_step = any_step ? with_type(mk_bin(BinOp::Or, any_step, p), tbool()) : p;
    c.hyps.push_back(p);
    c.hyps.insert(c.hyps.end(), g.hyps.begin(), g.hyps.end());
    for (const auto* e : entries) {
      std::vector<std::pair<std::string, ExprPtr>> sigma;
      for (std::size_t k = 0; k < cand.changed.size(); ++k)
        sigma.emplace_back(cand.vars[k], substitute(e->args[cand.changed[k]], actuals));
      c.ihs.push_back(substitute(goal_formula, sigma));
    }
    if (builder.normalize(c)) s.cases.push_back(std::move(c));
  }
  InductionCase base;
  base.vars = g.vars;
  base.concl = g.concl;
  base.hyps.push_back(with_type(mk_not(any_step), tbool()));
  base.hyps.insert(base.hyps.end(), g.hyps.begin(), g.hyps.end());
  // A base case over a tested datatype variable splits by constructor.
  std::string tested;
  std::function<void(const ExprPtr&)> find_test = [&](const ExprPtr& e) {
    if (!tested.empty()) return;
    if (e->kind == Expr::Kind::IsA && e->args[0]->kind == Expr::Kind::Var &&
        std::find(cand.vars.begin(), cand.vars.end(), e->args[0]->name) != cand.vars.end()) {
      tested = e->args[0]->name;
      return;
    }
    for (const auto& c : children_of(e)) find_test(c);
  };
  find_test(any_step);
  std::vector<InductionCase> bases;
  auto ctors = tested.empty() ? std::vector<std::string>{} : builder.ctors_of(base, tested);
  if (ctors.empty()) {
    if (builder.normalize(base)) bases.push_back(std::move(base));
  } else {
    for (const auto& k : ctors) {
      InductionCase c = base;
      if (builder.instantiate(c, tested, k) && builder.normalize(c)) bases.push_back(std::move(c));
    }
  }
  s.cases.insert(s.cases.begin(), std::make_move_iterator(bases.begin()), std::make_move_iterator(bases.end()));
  for (auto& c : s.cases)
    for (auto& ih : c.ihs) ih = fold_constants(ih);
  return s;
}

namespace {

void subterms(const ExprPtr& e, std::vector<ExprPtr>& out) {
  out.push_back(e);
  if (e->kind == Expr::Kind::Lambda) return;
  for (const auto& c : children_of(e)) subterms(c, out);
}

ExprPtr replace_term(const ExprPtr& e, const ExprPtr& t, const ExprPtr& v) {
  if (expr_equal(e, t)) return v;
  if (e->kind == Expr::Kind::Lambda) return e;
  auto kids = children_of(e);
  if (kids.empty()) return e;
  for (auto& k : kids) k = replace_term(k, t, v);
  return with_children(e, kids);
}

bool contains_term(const ExprPtr& outer, const ExprPtr& inner) {
  if (expr_equal(outer, inner)) return true;
  for (const auto& c : children_of(outer))
    if (contains_term(c, inner)) return true;
  return false;
}

}  // namespace

Goal generalize(const Goal& g0, const World& w, const WaterfallConfig& cfg) {
  Goal g = g0;
  try {
    retype(g, w);
  } catch (const Error&) {
    return g0;
  }
  std::set<std::string> goal_vars;
  for (const auto& [n, _] : g.vars) goal_vars.insert(n);

  std::vector<ExprPtr> all;
  subterms(g.concl, all);
  for (const auto& h : g.hyps) subterms(h, all);
  std::vector<ExprPtr> repeated;
  for (const auto& t : all) {
    if (t->kind != Expr::Kind::App || !t->type || t->type->kind == Type::Kind::Arrow) continue;
    auto fv = free_vars(t);
    if (std::none_of(fv.begin(), fv.end(), [&](const std::string& v) { return goal_vars.count(v) > 0; })) continue;
    auto n = std::count_if(all.begin(), all.end(), [&](const ExprPtr& x) { return expr_equal(x, t); });
    if (n < 2) continue;
    if (std::none_of(repeated.begin(), repeated.end(), [&](const ExprPtr& x) { return expr_equal(x, t); }))
      repeated.push_back(t);
  }
  std::vector<ExprPtr> maximal;
  for (const auto& t : repeated) {
    bool inside = std::any_of(repeated.begin(), repeated.end(),
                              [&](const ExprPtr& o) { return !expr_equal(o, t) && contains_term(o, t); });
    if (!inside) maximal.push_back(t);
  }
  if (maximal.empty()) return g0;

  std::set<std::string> avoid = goal_vars;
  for (const auto& t : all)
    for (const auto& v : free_vars(t)) avoid.insert(v);
  auto apply = [&](const std::vector<ExprPtr>& terms) {
    Goal c = g;
    auto av = avoid;
    for (const auto& t : terms) {
      std::string n = fresh_name("gen", av);
      av.insert(n);
      ExprPtr v = mk_var(n, t->type);
      for (auto& h : c.hyps) h = replace_term(h, t, v);
      c.concl = replace_term(c.concl, t, v);
      c.vars.emplace_back(n, t->type);
    }
    // drop variables that no longer occur
    std::set<std::string> used = free_vars(c.concl);
    for (const auto& h : c.hyps)
      for (const auto& x : free_vars(h)) used.insert(x);
    std::erase_if(c.vars, [&](const auto& v) { return !used.count(v.first); });
    return c;
  };
  auto survives = [&](const Goal& c) {
    UnrollOptions o;
    o.budget = cfg.cx_budget;
    o.solver = cfg.solver;
    try {
      return verify(w, close_goal(c, w), o).kind != Verdict::Kind::Refuted;
    } catch (const Error&) {
      return false;
    }
  };
  std::vector<std::vector<ExprPtr>> attempts = {maximal};
  if (maximal.size() > 1)
    for (const auto& t : maximal) attempts.push_back({t});
  for (const auto& terms : attempts) {
    Goal c = apply(terms);
    if (survives(c)) {
      c.history.push_back("generalize");
      return c;
    }
  }
  return g0;
}

const char* to_string(ProofResult::Kind k) {
  switch (k) {
    case ProofResult::Kind::Proved: return "proved";
    case ProofResult::Kind::Refuted: return "refuted";
    case ProofResult::Kind::GaveUp: return "gave up";
  }
  return "?";
}

namespace {

class Waterfall {
 public:
  Waterfall(const World& w, const WaterfallConfig& cfg) : w_(w), cfg_(cfg) {}

  ProofResult run(const ExprPtr& goal) {
    Goal g = make_goal(goal);
    original_ = goal;
    ProofResult r = attempt(g, true);
    r.trace = std::move(trace_);
    r.expansions = expansions_;
    return r;
  }

 private:
  void note(std::size_t depth, const std::string& s) {
    std::string line = std::string(depth * 2, ' ') + s;
    trace_.push_back(line);
    if (cfg_.trace) cfg_.trace(line);
  }

  ProofResult gave_up(std::string why) {
    ProofResult r;
    r.kind = ProofResult::Kind::GaveUp;
    r.reason = std::move(why);
    return r;
  }

  ProofResult attempt(Goal g, bool top) {
    const std::size_t d = g.depth;
    if (top && g.hyps.empty() && is_lit(g.concl, true)) return proved();
    note(d, "goal: " + to_string(g));
    Goal s = simplify(g, w_, cfg_);
    if (!expr_equal(s.concl, g.concl) || s.hyps.size() != g.hyps.size()) note(d, "simplify: " + to_string(s));
    if (is_lit(s.concl, true)) {
      note(d, "proved by simplification");
      return proved();
    }

    UnrollOptions o;
    o.budget = cfg_.unroll_budget;
    o.solver = cfg_.solver;
    o.trace = cfg_.trace_unroll;
    Verdict v;
    try {
      v = verify(w_, close_goal(s, w_), o);
    } catch (const Error& e) {
      note(d, std::string("decide: skipped (") + e.what() + ")");
      v.kind = Verdict::Kind::Unknown;
    }
    expansions_ += v.steps;
    if (v.kind == Verdict::Kind::Proved) {
      note(d, "decide: proved by unrolling (" + std::to_string(v.steps) + " expansions)");
      return proved();
    }
    if (v.kind == Verdict::Kind::Refuted) {
      note(d, "decide: counterexample found");
      if (top) {
        ProofResult r;
        r.kind = ProofResult::Kind::Refuted;
        r.cx = v.cx;
        std::string why;
        if (check_cx(w_.table, original_, r.cx, Polarity::Falsifies, &why)) return r;
        return gave_up("unconfirmed counterexample" + (why.empty() ? std::string() : ": " + why));
      }
      return gave_up("subgoal is false: " + to_string(s));
    }
    if (d >= cfg_.induct_depth) {
      note(d, "stop: induction depth " + std::to_string(cfg_.induct_depth) + " reached");
      return gave_up("maximum induction depth reached on " + to_string(s));
    }

    Goal gen = generalize(s, w_, cfg_);
    if (gen.vars.size() != s.vars.size() || !expr_equal(gen.concl, s.concl)) note(d, "generalize: " + to_string(gen));

    auto scheme = synthesize_induction(gen, w_);
    if (!scheme) {
      note(d, "stop: no induction scheme");
      return gave_up("no induction scheme for " + to_string(gen));
    }
    note(d, to_string(*scheme));
    for (std::size_t i = 0; i < scheme->cases.size(); ++i) {
      const auto& c = scheme->cases[i];
      Goal sub;
      sub.vars = c.vars;
      sub.hyps = c.hyps;
      sub.hyps.insert(sub.hyps.end(), c.ihs.begin(), c.ihs.end());
      sub.concl = c.concl;
      sub.depth = d + 1;
      ProofResult r = attempt(sub, false);
      if (r.kind != ProofResult::Kind::Proved) {
        r.kind = ProofResult::Kind::GaveUp;
        r.reason = "case " + std::to_string(i + 1) + " of " + scheme->fun + ": " + r.reason;
        return r;
      }
    }
    return proved();
  }

  static ProofResult proved() {
    ProofResult r;
    r.kind = ProofResult::Kind::Proved;
    return r;
  }

  const World& w_;
  const WaterfallConfig& cfg_;
  ExprPtr original_;
  std::vector<std::string> trace_;
  std::size_t expansions_ = 0;
};

}  // namespace

ProofResult prove(const ExprPtr& goal, const World& w, const WaterfallConfig& cfg) {
  return Waterfall(w, cfg).run(goal);
}

ExprPtr theorem_goal(const TheoremDef& t) {
  const FunDecl& d = t.decl;
  ExprPtr body = default_type_vars(d.body);
  if (d.params.empty()) return body;
  std::vector<std::string> names;
  std::vector<TypePtr> types;
  for (const auto& p : d.params) {
    names.push_back(p.name);
    types.push_back(default_type_vars(p.annot ? p.annot : tint()));
  }
  auto lam = std::make_shared<Expr>(*mk_lambda(names, body));
  lam->param_types = types;
  lam->type = tarrows(types, tbool());
  return lam;
}

VcProver make_vc_prover(const WaterfallConfig& cfg) {
  return [cfg](const World& w, const ExprPtr& goal, std::string* why) {
    ProofResult r = prove(goal, w, cfg);
    if (r.kind == ProofResult::Kind::Proved) return true;
    if (why) *why = r.kind == ProofResult::Kind::Refuted ? "counterexample found" : r.reason;
    return false;
  };
}

}  // namespace iml
