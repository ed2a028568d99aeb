/* SPDX-License-Identifier: Apache-2.0 */

#include "iml/template.hpp"

#include <algorithm>
#include <sstream>

#include "iml/syntax.hpp"

namespace iml {

namespace {

bool is_true(const ExprPtr& e) { return e->kind == Expr::Kind::Bool && e->bval; }
bool is_false(const ExprPtr& e) { return e->kind == Expr::Kind::Bool && !e->bval; }

ExprPtr typed_bool(ExprPtr e) { return with_type(e, tbool()); }

ExprPtr negate(const ExprPtr& c) {
  if (c->kind == Expr::Kind::Not) return c->args[0];
  if (c->kind == Expr::Kind::Bool) return typed_bool(mk_bool(!c->bval));
  return typed_bool(mk_not(c));
}

// Calls and variables read as `c = true` / `c = false`; other conditions as `c` / `not c`.
bool needs_equation(const ExprPtr& c) {
  switch (c->kind) {
    case Expr::Kind::App:
    case Expr::Kind::Var:
    case Expr::Kind::Select:
    case Expr::Kind::Proj:
      return true;
    default:
      return false;
  }
}

ExprPtr branch_condition(const ExprPtr& c, bool positive) {
  if (needs_equation(c)) return typed_bool(mk_bin(BinOp::Eq, c, typed_bool(mk_bool(positive))));
  return positive ? c : negate(c);
}

ExprPtr select(const std::string& ctor, std::size_t i, const ExprPtr& s) {
  if (s->kind == Expr::Kind::Construct && s->name == ctor && i < s->args.size()) return s->args[i];
  return mk_select(ctor, i, s);
}

ExprPtr project(std::size_t i, const ExprPtr& s) {
  if (s->kind == Expr::Kind::Tuple && i < s->args.size()) return s->args[i];
  TypePtr t;
  if (s->type && s->type->kind == Type::Kind::Tuple && i < s->type->args.size()) t = s->type->args[i];
  return mk_proj(i, s, t);
}

bool contains(const std::vector<ExprPtr>& xs, const ExprPtr& x) {
  return std::any_of(xs.begin(), xs.end(), [&](const ExprPtr& y) { return expr_equal(x, y); });
}

class Extractor {
 public:
  std::vector<TemplateEntry> entries;

  void walk(const ExprPtr& e, const std::vector<ExprPtr>& path) {
    switch (e->kind) {
      case Expr::Kind::Int:
      case Expr::Kind::Bool:
      case Expr::Kind::Var:
        return;
      case Expr::Kind::App: {
        std::string f = call_name(e);
        if (!f.empty()) add({f, {e->args.begin() + 1, e->args.end()}, path});
        for (std::size_t i = 1; i < e->args.size(); ++i) walk(e->args[i], path);
        return;
      }
      case Expr::Kind::If: {
        const auto& c = e->args[0];
        walk(c, path);
        walk(e->args[1], extend(path, branch_condition(c, true)));
        walk(e->args[2], extend(path, branch_condition(c, false)));
        return;
      }
      case Expr::Kind::Bin:
        if (e->op == BinOp::And || e->op == BinOp::Or) {
          const auto& a = e->args[0];
          walk(a, path);
          walk(e->args[1], extend(path, branch_condition(a, e->op == BinOp::And)));
          return;
        }
        break;
      case Expr::Kind::Let:
        walk(e->args[0], path);
        walk(substitute(e->args[1], {{e->name, e->args[0]}}), path);
        return;
      case Expr::Kind::Match: {
        const auto& s = e->args[0];
        walk(s, path);
        std::vector<ExprPtr> prefix = path;
        for (const auto& c : e->cases) {
          std::vector<std::pair<std::string, ExprPtr>> bindings;
          ExprPtr test = pattern_test(c.pattern, s, bindings);
          if (is_false(test)) continue;
          walk(substitute(c.body, bindings), is_true(test) ? prefix : extend(prefix, test));
          if (is_true(test)) return;  // later branches are unreachable
          prefix = extend(prefix, negate(test));
        }
        return;
      }
      default:
        break;
    }
    for (const auto& c : children_of(e)) walk(c, path);
  }

 private:
  static std::vector<ExprPtr> extend(const std::vector<ExprPtr>& path, const ExprPtr& c) {
    if (is_true(c) || contains(path, c)) return path;
    auto out = path;
    out.push_back(c);
    return out;
  }

  static bool same_call(const TemplateEntry& a, const TemplateEntry& b) {
    if (a.callee != b.callee || a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
      if (!expr_equal(a.args[i], b.args[i])) return false;
    return true;
  }

  static bool subsumes(const TemplateEntry& weaker, const TemplateEntry& stronger) {
    return std::all_of(weaker.path.begin(), weaker.path.end(),
                       [&](const ExprPtr& c) { return contains(stronger.path, c); });
  }

  void add(TemplateEntry t) {
    for (const auto& x : entries)
      if (same_call(x, t) && subsumes(x, t)) return;
    std::erase_if(entries, [&](const TemplateEntry& x) { return same_call(x, t) && subsumes(t, x); });
    entries.push_back(std::move(t));
  }
};

}  // namespace

ExprPtr conjoin(const std::vector<ExprPtr>& conjuncts) {
  ExprPtr out;
  for (const auto& c : conjuncts) {
    if (is_true(c)) continue;
    out = out ? typed_bool(mk_bin(BinOp::And, out, c)) : c;
  }
  return out ? out : typed_bool(mk_bool(true));
}

ExprPtr pattern_test(const PatternPtr& p, const ExprPtr& s, std::vector<std::pair<std::string, ExprPtr>>& bindings) {
  switch (p->kind) {
    case Pattern::Kind::Wildcard:
      return typed_bool(mk_bool(true));
    case Pattern::Kind::Var:
      bindings.emplace_back(p->name, s);
      return typed_bool(mk_bool(true));
    case Pattern::Kind::Int:
      return typed_bool(mk_bin(BinOp::Eq, s, with_type(mk_int(p->ival), tint())));
    case Pattern::Kind::Bool:
      return p->bval ? s : negate(s);
    case Pattern::Kind::Construct: {
      std::vector<ExprPtr> parts;
      if (s->kind == Expr::Kind::Construct) {
        if (s->name != p->name) return typed_bool(mk_bool(false));
      } else {
        parts.push_back(typed_bool(mk_isa(p->name, s)));
      }
      for (std::size_t i = 0; i < p->args.size(); ++i) {
        auto t = pattern_test(p->args[i], select(p->name, i, s), bindings);
        if (is_false(t)) return t;
        parts.push_back(t);
      }
      return conjoin(parts);
    }
    case Pattern::Kind::Tuple: {
      std::vector<ExprPtr> parts;
      for (std::size_t i = 0; i < p->args.size(); ++i) {
        auto t = pattern_test(p->args[i], project(i, s), bindings);
        if (is_false(t)) return t;
        parts.push_back(t);
      }
      return conjoin(parts);
    }
  }
  return typed_bool(mk_bool(true));
}

Template template_of(const FunDecl& f) {
  Template t;
  t.fun = f.name;
  for (const auto& p : f.params) t.formals.push_back(p.name);
  if (!f.body) return t;
  Extractor x;
  x.walk(f.body, {});
  t.entries = std::move(x.entries);
  return t;
}

std::vector<InstantiatedCall> instantiate(const Template& tpl, const std::vector<ExprPtr>& actuals) {
  if (actuals.size() != tpl.formals.size())
    throw Error("template of " + tpl.fun + " instantiated with " + std::to_string(actuals.size()) +
                " arguments, expected " + std::to_string(tpl.formals.size()));
  std::vector<std::pair<std::string, ExprPtr>> sub;
  for (std::size_t i = 0; i < actuals.size(); ++i) sub.emplace_back(tpl.formals[i], actuals[i]);
  std::vector<InstantiatedCall> out;
  for (const auto& e : tpl.entries) {
    std::vector<ExprPtr> args;
    for (const auto& a : e.args) args.push_back(substitute(a, sub));
    std::vector<ExprPtr> path;
    for (const auto& c : e.path) path.push_back(substitute(c, sub));
    out.push_back({e.callee, mk_call(e.callee, std::move(args)), conjoin(path)});
  }
  return out;
}

ExprPtr desugar(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Let:
      return desugar(substitute(e->args[1], {{e->name, e->args[0]}}));
    case Expr::Kind::Match: {
      ExprPtr s = desugar(e->args[0]);
      ExprPtr acc;
      for (std::size_t k = e->cases.size(); k-- > 0;) {
        const auto& c = e->cases[k];
        std::vector<std::pair<std::string, ExprPtr>> bindings;
        ExprPtr test = pattern_test(c.pattern, s, bindings);
        ExprPtr body = desugar(substitute(c.body, bindings));
        if (!acc || is_true(test)) {
          acc = body;
        } else if (!is_false(test)) {
          acc = with_type(mk_if(test, body, acc), e->type);
        }
      }
      if (!acc) throw Error("match without cases");
      return acc;
    }
    default: {
      auto kids = children_of(e);
      if (kids.empty()) return e;
      for (auto& k : kids) k = desugar(k);
      return with_children(e, std::move(kids));
    }
  }
}

std::string to_string(const TemplateEntry& e) {
  std::ostringstream os;
  os << "(" << e.callee << ", (";
  for (std::size_t i = 0; i < e.args.size(); ++i) os << (i ? ", " : "") << pretty(e.args[i]);
  os << "), " << pretty(conjoin(e.path)) << ")";
  return os.str();
}

std::string to_string(const Template& t) {
  std::ostringstream os;
  os << "template " << t.fun << " (";
  for (std::size_t i = 0; i < t.formals.size(); ++i) os << (i ? ", " : "") << t.formals[i];
  os << ")";
  if (t.entries.empty()) os << " = {}";
  for (const auto& e : t.entries) os << "\n  " << to_string(e);
  return os.str();
}

}  // namespace iml
