/* SPDX-License-Identifier: Apache-2.0 */

#include "iml/unroll.hpp"

#include <algorithm>
#include <sstream>

#include "iml/syntax.hpp"

namespace iml {

const ReachLit& pick_from(const std::vector<const ReachLit*>& core, PickPolicy policy) {
  if (core.empty()) throw Error("pick_from on an empty core");
  const ReachLit* best = core.front();
  for (const ReachLit* l : core) {
    bool earlier = policy == PickPolicy::Fifo ? l->stamp < best->stamp : l->stamp > best->stamp;
    if (earlier || (l->stamp == best->stamp && l->printed < best->printed)) best = l;
  }
  return *best;
}

const char* to_string(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::Proved: return "proved";
    case Verdict::Kind::Refuted: return "refuted";
    case Verdict::Kind::Instance: return "instance";
    case Verdict::Kind::NoInstance: return "no instance";
    case Verdict::Kind::Unknown: return "unknown";
  }
  return "?";
}

Counterexample reflect(SolverSession& s, const SmtEncoding& enc, const GroundProgram& gp,
                       std::map<std::string, SExpr>* raw) {
  Counterexample cx;
  if (gp.vars.empty()) return cx;
  auto model = s.get_model();
  for (const auto& [name, type] : gp.vars) {
    std::string sym = enc.symbol(name);
    auto it = model.find(sym);
    SExpr v = it != model.end() ? it->second : s.get_value({sym}).front();
    auto value = enc.decode(v);
    if (!value) {
      v = s.get_value({sym}).front();
      value = enc.decode(v);
    }
    if (!value) throw ReflectError("cannot reflect value of " + name + ": " + to_string(v));
    if (raw) (*raw)[name] = v;
    cx.bindings.emplace_back(name, *value);
  }
  return cx;
}

namespace {

class Engine {
 public:
  Engine(const UnrollProblem& p, const UnrollOptions& opts) : p_(p), opts_(opts), s_(opts.solver) {}

  UnrollOutcome run() {
    declare();
    s_.assert_formula(p_.enc->term(p_.goal));
    for (const auto& c : calls_of_term(p_.goal, p_.recursive)) {
      std::size_t i = lit_for(c, 0);
      queue_.push_back(i);
      s_.assert_formula(lits_[i].atom);
    }
    for (;;) {
      std::vector<std::string> assumptions;
      std::map<std::string, std::size_t> by_atom;
      for (std::size_t i : queue_) {
        assumptions.push_back("(not " + lits_[i].atom + ")");
        by_atom[lits_[i].atom] = i;
      }
      SolverVerdict v = s_.check_sat_assuming(assumptions);
      if (v.kind == SolverVerdict::Kind::Sat) {
        trace("sat", 0, nullptr);
        out_.kind = UnrollOutcome::Kind::Sat;
        out_.model = reflect(s_, *p_.enc, p_.gp, &out_.raw_model);
        return finish();
      }
      if (v.kind == SolverVerdict::Kind::Unknown) {
        trace("unknown", 0, nullptr);
        out_.kind = UnrollOutcome::Kind::BudgetExhausted;
        out_.diagnostic = "solver returned unknown (" + v.reason + ")";
        return finish();
      }
      std::vector<const ReachLit*> core;
      for (const auto& c : v.core) {
        SExpr a = parse_sexpr(c);
        std::string atom = a.head() == "not" && a.list.size() == 2 ? a.list[1].atom : a.atom;
        auto it = by_atom.find(atom);
        if (it == by_atom.end()) throw SolverError("unsat core mentions an unknown literal: " + c);
        core.push_back(&lits_[it->second]);
      }
      if (core.empty()) {
        trace("unsat", 0, nullptr);
        out_.kind = UnrollOutcome::Kind::UnsatEmptyCore;
        return finish();
      }
      out_.last_core.clear();
      for (const auto* l : core) out_.last_core.push_back(l->printed);
      if (expanded_.size() >= opts_.budget) {
        trace("unsat", core.size(), nullptr);
        out_.kind = UnrollOutcome::Kind::BudgetExhausted;
        out_.diagnostic = "budget of " + std::to_string(opts_.budget) + " expansions exhausted";
        return finish();
      }
      const ReachLit& pick = pick_from(core, opts_.pick);
      std::size_t index = static_cast<std::size_t>(&pick - lits_.data());
      queue_.erase(std::find(queue_.begin(), queue_.end(), index));
      trace("unsat", core.size(), &pick);
      expand(index);
    }
  }

 private:
  void declare() {
    const auto& enc = *p_.enc;
    if (auto d = enc.datatype_declarations(); !d.empty()) s_.command(d);
    for (const auto& f : p_.gp.funs) s_.command(enc.declare_fun(f));
    for (const auto& [name, type] : p_.gp.vars) s_.command(enc.declare_const(name, type));
  }

  std::size_t lit_for(const ExprPtr& call, std::size_t stamp) {
    std::string key = p_.key(call);
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    ReachLit l;
    l.atom = "b!" + std::to_string(lits_.size());
    l.call = call;
    l.key = key;
    l.printed = pretty(call);
    l.stamp = stamp;
    s_.command("(declare-const " + l.atom + " Bool)");
    index_[key] = lits_.size();
    lits_.push_back(std::move(l));
    return lits_.size() - 1;
  }

  void expand(std::size_t index) {
    // copies: lits_ may grow below
    const ExprPtr call = lits_[index].call;
    const std::string atom = lits_[index].atom;
    expanded_.insert(lits_[index].key);
    out_.expanded.push_back(call);
    ++out_.steps;

    const std::string f = call_name(call);
    const FunDecl* decl = p_.gp.find_fun(f);
    std::vector<std::pair<std::string, ExprPtr>> sub;
    for (std::size_t i = 0; i < decl->params.size(); ++i) sub.emplace_back(decl->params[i].name, call->args[i + 1]);
    ExprPtr body = fold_constants(substitute(p_.bodies.at(f), sub));
    const auto& enc = *p_.enc;
    s_.assert_formula("(and " + atom + " (= " + enc.term(call) + " " + enc.term(body) + "))");

    for (const auto& sc : subcalls_of_call(p_, call, expanded_)) {
      std::size_t j = lit_for(sc.call, out_.steps);
      if (std::find(queue_.begin(), queue_.end(), j) == queue_.end()) queue_.push_back(j);
      ExprPtr guard = sc.path->kind == Expr::Kind::Bool && sc.path->bval ? nullptr : sc.path;
      std::string lhs = guard ? "(and " + atom + " " + enc.term(guard) + ")" : atom;
      s_.assert_formula("(=> " + lhs + " " + lits_[j].atom + ")");
      out_.implications.push_back({call, sc.path, sc.call});
    }
  }

  void trace(const char* verdict, std::size_t core, const ReachLit* pick) {
    if (!opts_.trace) return;
    std::ostringstream os;
    os << "unroll step " << out_.steps << ": " << verdict;
    if (core) os << " core=" << core;
    if (pick) os << " pick=" << pick->printed;
    os << " queue=" << queue_.size();
    opts_.trace(os.str());
  }

  UnrollOutcome finish() {
    for (std::size_t i : queue_) out_.pending.push_back(lits_[i].call);
    return std::move(out_);
  }

  const UnrollProblem& p_;
  const UnrollOptions& opts_;
  SolverSession s_;
  std::vector<ReachLit> lits_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::size_t> queue_;
  std::set<std::string> expanded_;
  UnrollOutcome out_;
};

std::string unknown_reason(const UnrollOutcome& o) {
  return o.diagnostic.empty() ? "budget exhausted" : o.diagnostic;
}

}  // namespace

UnrollOutcome unroll(const UnrollProblem& p, const UnrollOptions& opts) { return Engine(p, opts).run(); }

Verdict verify(const World& w, const ExprPtr& goal, const UnrollOptions& opts) {
  GroundProgram gp = lower_goal(w, goal);
  Verdict v;
  v.lowered = gp;
  gp.goal = with_type(mk_not(gp.goal), tbool());
  UnrollProblem p(std::move(gp));
  UnrollOutcome o = unroll(p, opts);
  v.steps = o.steps;
  switch (o.kind) {
    case UnrollOutcome::Kind::UnsatEmptyCore:
      v.kind = Verdict::Kind::Proved;
      break;
    case UnrollOutcome::Kind::Sat: {
      v.cx = o.model;
      std::string why;
      if (check_cx(w.table, goal, v.cx, Polarity::Falsifies, &why)) {
        v.kind = Verdict::Kind::Refuted;
      } else {
        v.kind = Verdict::Kind::Unknown;
        v.reason = "model not confirmed by evaluation" + (why.empty() ? std::string() : ": " + why);
      }
      break;
    }
    case UnrollOutcome::Kind::BudgetExhausted:
      v.kind = Verdict::Kind::Unknown;
      v.reason = unknown_reason(o);
      break;
  }
  return v;
}

Verdict instance(const World& w, const ExprPtr& pred, const UnrollOptions& opts) {
  GroundProgram gp = lower_goal(w, pred);
  Verdict v;
  v.lowered = gp;
  UnrollProblem p(std::move(gp));
  UnrollOutcome o = unroll(p, opts);
  v.steps = o.steps;
  switch (o.kind) {
    case UnrollOutcome::Kind::UnsatEmptyCore:
      v.kind = Verdict::Kind::NoInstance;
      break;
    case UnrollOutcome::Kind::Sat: {
      v.cx = o.model;
      std::string why;
      if (check_cx(w.table, pred, v.cx, Polarity::Satisfies, &why)) {
        v.kind = Verdict::Kind::Instance;
      } else {
        v.kind = Verdict::Kind::Unknown;
        v.reason = "model not confirmed by evaluation" + (why.empty() ? std::string() : ": " + why);
      }
      break;
    }
    case UnrollOutcome::Kind::BudgetExhausted:
      v.kind = Verdict::Kind::Unknown;
      v.reason = unknown_reason(o);
      break;
  }
  return v;
}

}  // namespace iml
