/* SPDX-License-Identifier: Apache-2.0 */

#include <functional>

#include "iml/syntax.hpp"
#include "iml/unroll.hpp"

namespace iml {

namespace {

bool is_bool_lit(const ExprPtr& e, bool v) { return e->kind == Expr::Kind::Bool && e->bval == v; }

ExprPtr bool_lit(bool v) { return with_type(mk_bool(v), tbool()); }
ExprPtr int_lit(BigInt v) { return with_type(mk_int(std::move(v)), tint()); }

ExprPtr fold_bin(const ExprPtr& e, const ExprPtr& a, const ExprPtr& b) {
  const bool ints = a->kind == Expr::Kind::Int && b->kind == Expr::Kind::Int;
  switch (e->op) {
    case BinOp::Add:
      if (ints) return int_lit(a->ival + b->ival);
      if (a->kind == Expr::Kind::Int && a->ival == 0) return b;
      if (b->kind == Expr::Kind::Int && b->ival == 0) return a;
      break;
    case BinOp::Sub:
      if (ints) return int_lit(a->ival - b->ival);
      if (b->kind == Expr::Kind::Int && b->ival == 0) return a;
      break;
    case BinOp::Mul:
      if (ints) return int_lit(a->ival * b->ival);
      break;
    case BinOp::Lt: if (ints) return bool_lit(a->ival < b->ival); break;
    case BinOp::Le: if (ints) return bool_lit(a->ival <= b->ival); break;
    case BinOp::Gt: if (ints) return bool_lit(a->ival > b->ival); break;
    case BinOp::Ge: if (ints) return bool_lit(a->ival >= b->ival); break;
    case BinOp::Eq:
      if (ints) return bool_lit(a->ival == b->ival);
      if (a->kind == Expr::Kind::Bool && b->kind == Expr::Kind::Bool) return bool_lit(a->bval == b->bval);
      if (is_bool_lit(b, true)) return a;
      break;
    case BinOp::And:
      if (is_bool_lit(a, true)) return b;
      if (is_bool_lit(b, true)) return a;
      if (is_bool_lit(a, false) || is_bool_lit(b, false)) return bool_lit(false);
      break;
    case BinOp::Or:
      if (is_bool_lit(a, false)) return b;
      if (is_bool_lit(b, false)) return a;
      if (is_bool_lit(a, true) || is_bool_lit(b, true)) return bool_lit(true);
      break;
  }
  return nullptr;
}

}  // namespace

ExprPtr fold_constants(const ExprPtr& e) {
  auto kids = children_of(e);
  if (kids.empty()) return e;
  for (auto& k : kids) k = fold_constants(k);
  ExprPtr r = with_children(e, kids);
  switch (r->kind) {
    case Expr::Kind::Bin:
      if (auto f = fold_bin(r, r->args[0], r->args[1])) return f;
      return r;
    case Expr::Kind::Not:
      if (r->args[0]->kind == Expr::Kind::Bool) return bool_lit(!r->args[0]->bval);
      if (r->args[0]->kind == Expr::Kind::Not) return r->args[0]->args[0];
      return r;
    case Expr::Kind::If:
      if (r->args[0]->kind == Expr::Kind::Bool) return r->args[0]->bval ? r->args[1] : r->args[2];
      if (expr_equal(r->args[1], r->args[2])) return r->args[1];
      return r;
    case Expr::Kind::IsA:
      if (r->args[0]->kind == Expr::Kind::Construct) return bool_lit(r->args[0]->name == r->name);
      return r;
    case Expr::Kind::Select:
      if (r->args[0]->kind == Expr::Kind::Construct && r->args[0]->name == r->name &&
          r->index < r->args[0]->args.size())
        return r->args[0]->args[r->index];
      return r;
    case Expr::Kind::Proj:
      if (r->args[0]->kind == Expr::Kind::Tuple && r->index < r->args[0]->args.size())
        return r->args[0]->args[r->index];
      return r;
    default:
      return r;
  }
}

UnrollProblem::UnrollProblem(GroundProgram program) : gp(std::move(program)) {
  for (const auto& f : gp.funs)
    if (f.body && f.recursive) recursive.insert(f.name);

  for (const auto& f : gp.funs)
    if (f.body && !f.recursive) plain_[f.name] = &f;

  for (const auto& f : gp.funs) {
    if (!recursive.count(f.name)) continue;
    ExprPtr body = prepare(f.body);
    bodies[f.name] = body;
    FunDecl pf = f;
    pf.body = body;
    templates[f.name] = template_of(pf);
  }
  goal = prepare(gp.goal);
  enc = std::make_unique<SmtEncoding>(gp);
}

ExprPtr UnrollProblem::inline_plain(const ExprPtr& e) const {
  auto kids = children_of(e);
  for (auto& k : kids) k = inline_plain(k);
  ExprPtr r = kids.empty() ? e : with_children(e, kids);
  std::string f;
  std::vector<ExprPtr> args;
  if (r->kind == Expr::Kind::App) {
    f = call_name(r);
    args.assign(r->args.begin() + 1, r->args.end());
  } else if (r->kind == Expr::Kind::Var) {
    f = r->name;
  }
  auto it = plain_.find(f);
  if (f.empty() || it == plain_.end() || it->second->params.size() != args.size()) return r;
  std::vector<std::pair<std::string, ExprPtr>> sub;
  for (std::size_t i = 0; i < args.size(); ++i) sub.emplace_back(it->second->params[i].name, args[i]);
  // the call graph among non-recursive definitions is acyclic
  return inline_plain(substitute(desugar(it->second->body), sub));
}

ExprPtr UnrollProblem::prepare(const ExprPtr& e) const { return fold_constants(desugar(inline_plain(desugar(e)))); }

std::string UnrollProblem::key(const ExprPtr& call) const { return enc->term(call); }

std::vector<ExprPtr> calls_of_term(const ExprPtr& t, const std::set<std::string>& recursive) {
  std::vector<ExprPtr> out;
  std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& e) {
    for (const auto& c : children_of(e)) walk(c);
    if (e->kind != Expr::Kind::App || !recursive.count(call_name(e))) return;
    for (const auto& x : out)
      if (expr_equal(x, e)) return;
    out.push_back(e);
  };
  walk(t);
  return out;
}

std::vector<InstantiatedCall> subcalls_of_call(const UnrollProblem& p, const ExprPtr& call,
                                               const std::set<std::string>& expanded) {
  std::string f = call_name(call);
  auto it = p.templates.find(f);
  if (it == p.templates.end()) return {};
  std::vector<ExprPtr> actuals(call->args.begin() + 1, call->args.end());
  std::vector<InstantiatedCall> out;
  for (auto& ic : instantiate(it->second, actuals)) {
    if (!p.recursive.count(ic.callee)) continue;
    ic.call = fold_constants(ic.call);
    ic.path = fold_constants(ic.path);
    if (is_bool_lit(ic.path, false) || expanded.count(p.key(ic.call))) continue;
    out.push_back(std::move(ic));
  }
  return out;
}

FunctionTable ground_function_table(const GroundProgram& gp) {
  FunctionTable t;
  for (const auto& f : gp.funs) {
    if (!f.body) continue;
    auto d = std::make_shared<FunctionDef>();
    d->name = f.name;
    for (const auto& p : f.params) d->params.push_back(p.name);
    d->body = f.body;
    t[f.name] = d;
  }
  return t;
}

}  // namespace iml
