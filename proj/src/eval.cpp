/* SPDX-License-Identifier: Apache-2.0 */

#include "iml/eval.hpp"

#include <algorithm>
#include <sstream>

namespace iml {

struct EnvNode {
  std::string name;
  ValuePtr value;
  EnvPtr next;
};

namespace {

EnvPtr extend(EnvPtr env, std::string name, ValuePtr v) {
  return std::make_shared<const EnvNode>(EnvNode{std::move(name), std::move(v), std::move(env)});
}

const ValuePtr* lookup(const EnvPtr& env, const std::string& name) {
  for (const EnvNode* n = env.get(); n; n = n->next.get())
    if (n->name == name) return &n->value;
  return nullptr;
}

std::size_t primitive_arity(const std::string& name) {
  if (name == "Ordinal.of_int") return 1;
  if (name == "Ordinal.pair" || name == "Ordinal.plus" || name == "Ordinal.lt") return 2;
  return 0;
}

const BigInt& as_int(const ValuePtr& v) {
  if (v->kind != Value::Kind::Int) throw EvalError(EvalError::Kind::Invalid, "expected an integer");
  return v->i;
}

bool as_bool(const ValuePtr& v) {
  if (v->kind != Value::Kind::Bool) throw EvalError(EvalError::Kind::Invalid, "expected a boolean");
  return v->b;
}

const Ordinal& as_ord(const ValuePtr& v) {
  if (v->kind != Value::Kind::Ordinal) throw EvalError(EvalError::Kind::Invalid, "expected an ordinal");
  return v->ord;
}

ValuePtr primitive(const std::string& name, const std::vector<ValuePtr>& a) {
  if (name == "Ordinal.of_int") return ordinal_value(ordinal::of_int(as_int(a[0])));
  if (name == "Ordinal.pair") return ordinal_value(ordinal::pair(as_ord(a[0]), as_ord(a[1])));
  if (name == "Ordinal.plus") return ordinal_value(ordinal::plus(as_ord(a[0]), as_ord(a[1])));
  if (name == "Ordinal.lt") return bool_value(ordinal::lt(as_ord(a[0]), as_ord(a[1])));
  throw EvalError(EvalError::Kind::Unbound, "unknown primitive " + name);
}

bool is_list(const ValuePtr& v) {
  const Value* p = v.get();
  while (p->kind == Value::Kind::Construct && p->ctor == "Cons" && p->elems.size() == 2) p = p->elems[1].get();
  return p->kind == Value::Kind::Construct && p->ctor == "Nil" && p->elems.empty();
}

void print(std::ostream& os, const ValuePtr& v, bool atom) {
  switch (v->kind) {
    case Value::Kind::Int:
      if (atom && v->i < 0)
        os << "(" << v->i.str() << ")";
      else
        os << v->i.str();
      return;
    case Value::Kind::Bool:
      os << (v->b ? "true" : "false");
      return;
    case Value::Kind::Ordinal:
      os << (atom ? "(" : "") << v->ord.to_string() << (atom ? ")" : "");
      return;
    case Value::Kind::Closure:
      os << "<fun>";
      return;
    case Value::Kind::Tuple:
      os << "(";
      for (std::size_t i = 0; i < v->elems.size(); ++i) {
        if (i) os << ", ";
        print(os, v->elems[i], false);
      }
      os << ")";
      return;
    case Value::Kind::Construct:
      if (is_list(v)) {
        os << "[";
        const Value* p = v.get();
        bool first = true;
        while (p->ctor == "Cons") {
          if (!first) os << "; ";
          first = false;
          print(os, p->elems[0], false);
          p = p->elems[1].get();
        }
        os << "]";
        return;
      }
      if (v->elems.empty()) {
        os << v->ctor;
        return;
      }
      if (atom) os << "(";
      os << v->ctor << " ";
      if (v->elems.size() == 1 && v->elems[0]->kind != Value::Kind::Tuple) {
        print(os, v->elems[0], true);
      } else {
        os << "(";
        for (std::size_t i = 0; i < v->elems.size(); ++i) {
          if (i) os << ", ";
          print(os, v->elems[i], false);
        }
        os << ")";
      }
      if (atom) os << ")";
      return;
  }
}

}  // namespace

ValuePtr int_value(BigInt v) {
  auto p = std::make_shared<Value>();
  p->kind = Value::Kind::Int;
  p->i = std::move(v);
  return p;
}

ValuePtr bool_value(bool v) {
  static const ValuePtr t = [] {
    auto p = std::make_shared<Value>();
    p->kind = Value::Kind::Bool;
    p->b = true;
    return p;
  }();
  static const ValuePtr f = [] {
    auto p = std::make_shared<Value>();
    p->kind = Value::Kind::Bool;
    return p;
  }();
  return v ? t : f;
}

ValuePtr construct_value(std::string ctor, std::vector<ValuePtr> args) {
  auto p = std::make_shared<Value>();
  p->kind = Value::Kind::Construct;
  p->ctor = std::move(ctor);
  p->elems = std::move(args);
  return p;
}

ValuePtr tuple_value(std::vector<ValuePtr> elems) {
  auto p = std::make_shared<Value>();
  p->kind = Value::Kind::Tuple;
  p->elems = std::move(elems);
  return p;
}

ValuePtr ordinal_value(Ordinal o) {
  auto p = std::make_shared<Value>();
  p->kind = Value::Kind::Ordinal;
  p->ord = std::move(o);
  return p;
}

bool value_equal(const ValuePtr& a, const ValuePtr& b) {
  if (a == b) return true;
  if (a->kind == Value::Kind::Closure || b->kind == Value::Kind::Closure)
    throw EvalError(EvalError::Kind::Invalid, "equality on functional values");
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Value::Kind::Int: return a->i == b->i;
    case Value::Kind::Bool: return a->b == b->b;
    case Value::Kind::Ordinal: return a->ord == b->ord;
    case Value::Kind::Construct:
      if (a->ctor != b->ctor) return false;
      [[fallthrough]];
    case Value::Kind::Tuple:
      if (a->elems.size() != b->elems.size()) return false;
      for (std::size_t i = 0; i < a->elems.size(); ++i)
        if (!value_equal(a->elems[i], b->elems[i])) return false;
      return true;
    case Value::Kind::Closure: break;
  }
  return false;
}

std::string value_to_string(const ValuePtr& v) {
  std::ostringstream os;
  print(os, v, false);
  return os.str();
}

ExprPtr value_to_expr(const ValuePtr& v) {
  switch (v->kind) {
    case Value::Kind::Int: return mk_int(v->i);
    case Value::Kind::Bool: return mk_bool(v->b);
    case Value::Kind::Tuple: {
      std::vector<ExprPtr> es;
      for (const auto& e : v->elems) es.push_back(value_to_expr(e));
      return mk_tuple(std::move(es));
    }
    case Value::Kind::Construct: {
      std::vector<ExprPtr> es;
      for (const auto& e : v->elems) es.push_back(value_to_expr(e));
      return mk_construct(v->ctor, std::move(es));
    }
    case Value::Kind::Ordinal:
    case Value::Kind::Closure:
      break;
  }
  throw EvalError(EvalError::Kind::Invalid, "value has no expression form: " + value_to_string(v));
}

std::size_t value_size(const ValuePtr& v) {
  std::size_t n = v->kind == Value::Kind::Construct ? 1 : 0;
  for (const auto& e : v->elems) n += value_size(e);
  return n;
}

// ---------------------------------------------------------------------------

void Evaluator::tick() {
  ++calls_;
  if (fuel_ == 0) throw EvalError(EvalError::Kind::FuelExhausted, "evaluation fuel exhausted");
  --fuel_;
}

ValuePtr Evaluator::eval(const ExprPtr& e, const Bindings& env) {
  EnvPtr chain;
  for (const auto& [n, v] : env) chain = extend(chain, n, v);
  return eval(e, chain);
}

ValuePtr Evaluator::call(const std::string& fn, const std::vector<ValuePtr>& args) {
  if (auto arity = primitive_arity(fn)) {
    if (args.size() < arity) {
      auto c = std::make_shared<Closure>();
      c->fun = fn;
      c->applied = args;
      auto v = std::make_shared<Value>();
      v->kind = Value::Kind::Closure;
      v->closure = c;
      return v;
    }
    std::vector<ValuePtr> first(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(arity));
    auto r = primitive(fn, first);
    if (args.size() == arity) return r;
    return apply(r, {args.begin() + static_cast<std::ptrdiff_t>(arity), args.end()});
  }
  auto it = funs_.find(fn);
  if (it == funs_.end()) throw EvalError(EvalError::Kind::Unbound, "unknown function " + fn);
  const auto& def = *it->second;
  std::size_t arity = def.params.size();
  if (args.size() < arity || arity == 0) {
    if (arity == 0 && args.empty()) {
      tick();
      return eval(def.body, EnvPtr{});
    }
    if (arity == 0) {
      tick();
      return apply(eval(def.body, EnvPtr{}), args);
    }
    auto c = std::make_shared<Closure>();
    c->fun = fn;
    c->applied = args;
    auto v = std::make_shared<Value>();
    v->kind = Value::Kind::Closure;
    v->closure = c;
    return v;
  }
  tick();
  EnvPtr env;
  for (std::size_t i = 0; i < arity; ++i) env = extend(env, def.params[i], args[i]);
  auto r = eval(def.body, env);
  if (args.size() == arity) return r;
  return apply(r, {args.begin() + static_cast<std::ptrdiff_t>(arity), args.end()});
}

ValuePtr Evaluator::apply(const ValuePtr& fn, const std::vector<ValuePtr>& args) {
  if (args.empty()) return fn;
  if (fn->kind != Value::Kind::Closure) throw EvalError(EvalError::Kind::Invalid, "applying a non-function");
  const auto& c = *fn->closure;
  std::vector<ValuePtr> all = c.applied;
  all.insert(all.end(), args.begin(), args.end());
  if (!c.lambda) return call(c.fun, all);
  std::size_t arity = c.lambda->params.size();
  if (all.size() < arity) {
    auto nc = std::make_shared<Closure>(c);
    nc->applied = all;
    auto v = std::make_shared<Value>();
    v->kind = Value::Kind::Closure;
    v->closure = nc;
    return v;
  }
  tick();
  EnvPtr env = c.env;
  for (std::size_t i = 0; i < arity; ++i) env = extend(env, c.lambda->params[i], all[i]);
  auto r = eval(c.lambda->args[0], env);
  if (all.size() == arity) return r;
  return apply(r, {all.begin() + static_cast<std::ptrdiff_t>(arity), all.end()});
}

ValuePtr Evaluator::eval_app(const ExprPtr& e, const EnvPtr& env) {
  std::vector<ValuePtr> args;
  args.reserve(e->args.size() - 1);
  for (std::size_t i = 1; i < e->args.size(); ++i) args.push_back(eval(e->args[i], env));
  const auto& head = e->args[0];
  if (head->kind == Expr::Kind::Var && !lookup(env, head->name)) return call(head->name, args);
  return apply(eval(head, env), args);
}

bool Evaluator::match(const PatternPtr& p, const ValuePtr& v, EnvPtr& env) {
  switch (p->kind) {
    case Pattern::Kind::Wildcard: return true;
    case Pattern::Kind::Var:
      env = extend(env, p->name, v);
      return true;
    case Pattern::Kind::Int: return v->kind == Value::Kind::Int && v->i == p->ival;
    case Pattern::Kind::Bool: return v->kind == Value::Kind::Bool && v->b == p->bval;
    case Pattern::Kind::Construct:
      if (v->kind != Value::Kind::Construct || v->ctor != p->name) return false;
      [[fallthrough]];
    case Pattern::Kind::Tuple:
      if (v->elems.size() != p->args.size()) {
        // A single tuple argument may be matched component-wise.
        if (p->args.size() == 1 && p->args[0]->kind != Pattern::Kind::Construct) {
          return match(p->args[0], tuple_value(v->elems), env);
        }
        if (v->elems.size() == 1 && v->elems[0]->kind == Value::Kind::Tuple &&
            v->elems[0]->elems.size() == p->args.size()) {
          for (std::size_t i = 0; i < p->args.size(); ++i)
            if (!match(p->args[i], v->elems[0]->elems[i], env)) return false;
          return true;
        }
        return false;
      }
      for (std::size_t i = 0; i < p->args.size(); ++i)
        if (!match(p->args[i], v->elems[i], env)) return false;
      return true;
  }
  return false;
}

ValuePtr Evaluator::eval(const ExprPtr& e, const EnvPtr& env) {
  switch (e->kind) {
    case Expr::Kind::Int: return int_value(e->ival);
    case Expr::Kind::Bool: return bool_value(e->bval);
    case Expr::Kind::Var: {
      if (auto v = lookup(env, e->name)) return *v;
      if (primitive_arity(e->name) || funs_.count(e->name)) return call(e->name, {});
      throw EvalError(EvalError::Kind::Unbound, "unbound variable " + e->name);
    }
    case Expr::Kind::App: return eval_app(e, env);
    case Expr::Kind::Lambda: {
      auto c = std::make_shared<Closure>();
      c->lambda = e;
      c->env = env;
      auto v = std::make_shared<Value>();
      v->kind = Value::Kind::Closure;
      v->closure = c;
      return v;
    }
    case Expr::Kind::Let: return eval(e->args[1], extend(env, e->name, eval(e->args[0], env)));
    case Expr::Kind::If:
      return as_bool(eval(e->args[0], env)) ? eval(e->args[1], env) : eval(e->args[2], env);
    case Expr::Kind::Match: {
      auto v = eval(e->args[0], env);
      for (const auto& c : e->cases) {
        EnvPtr local = env;
        if (match(c.pattern, v, local)) return eval(c.body, local);
      }
      throw EvalError(EvalError::Kind::MatchFailure, "no branch matches " + value_to_string(v));
    }
    case Expr::Kind::Construct: {
      std::vector<ValuePtr> args;
      for (const auto& a : e->args) args.push_back(eval(a, env));
      return construct_value(e->name, std::move(args));
    }
    case Expr::Kind::Tuple: {
      std::vector<ValuePtr> args;
      for (const auto& a : e->args) args.push_back(eval(a, env));
      return tuple_value(std::move(args));
    }
    case Expr::Kind::Bin: {
      if (e->op == BinOp::And) return as_bool(eval(e->args[0], env)) ? eval(e->args[1], env) : bool_value(false);
      if (e->op == BinOp::Or) return as_bool(eval(e->args[0], env)) ? bool_value(true) : eval(e->args[1], env);
      auto l = eval(e->args[0], env);
      auto r = eval(e->args[1], env);
      switch (e->op) {
        case BinOp::Add: return int_value(as_int(l) + as_int(r));
        case BinOp::Sub: return int_value(as_int(l) - as_int(r));
        case BinOp::Mul: return int_value(as_int(l) * as_int(r));
        case BinOp::Eq: return bool_value(value_equal(l, r));
        case BinOp::Lt: return bool_value(as_int(l) < as_int(r));
        case BinOp::Le: return bool_value(as_int(l) <= as_int(r));
        case BinOp::Gt: return bool_value(as_int(l) > as_int(r));
        case BinOp::Ge: return bool_value(as_int(l) >= as_int(r));
        default: break;
      }
      throw EvalError(EvalError::Kind::Invalid, "bad operator");
    }
    case Expr::Kind::Not: return bool_value(!as_bool(eval(e->args[0], env)));
    case Expr::Kind::IsA: {
      auto v = eval(e->args[0], env);
      return bool_value(v->kind == Value::Kind::Construct && v->ctor == e->name);
    }
    case Expr::Kind::Select: {
      auto v = eval(e->args[0], env);
      if (v->kind != Value::Kind::Construct || v->ctor != e->name || e->index >= v->elems.size())
        throw EvalError(EvalError::Kind::MatchFailure, "selector " + e->name + " applied to " + value_to_string(v));
      return v->elems[e->index];
    }
    case Expr::Kind::Proj: {
      auto v = eval(e->args[0], env);
      if (v->kind != Value::Kind::Tuple || e->index >= v->elems.size())
        throw EvalError(EvalError::Kind::Invalid, "projection from a non-tuple");
      return v->elems[e->index];
    }
  }
  throw EvalError(EvalError::Kind::Invalid, "unknown expression");
}

bool check_cx(const FunctionTable& funs, const ExprPtr& goal, Counterexample& cx, Polarity polarity,
              std::string* diagnostic) {
  cx.confirmed = false;
  try {
    Evaluator ev(funs);
    ValuePtr result;
    if (goal->kind == Expr::Kind::Lambda) {
      std::vector<ValuePtr> args;
      for (const auto& p : goal->params) {
        auto it = std::find_if(cx.bindings.begin(), cx.bindings.end(),
                               [&](const auto& b) { return b.first == p; });
        if (it == cx.bindings.end()) throw EvalError(EvalError::Kind::Unbound, "counterexample lacks " + p);
        args.push_back(it->second);
      }
      result = ev.apply(ev.eval(goal, Bindings{}), args);
    } else {
      Bindings env(cx.bindings.begin(), cx.bindings.end());
      result = ev.eval(goal, env);
    }
    cx.confirmed = as_bool(result) == (polarity == Polarity::Satisfies);
    if (!cx.confirmed && diagnostic) *diagnostic = "evaluation does not confirm the counterexample";
  } catch (const EvalError& err) {
    if (diagnostic) *diagnostic = std::string("counterexample evaluation failed: ") + err.what();
  }
  return cx.confirmed;
}

}  // namespace iml
