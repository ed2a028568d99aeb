/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "iml/ast.hpp"
#include "iml/error.hpp"
#include "iml/ordinal.hpp"

namespace iml {

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

struct EnvNode;
using EnvPtr = std::shared_ptr<const EnvNode>;

/// A function value: a lambda with its environment, or a (partially applied)
/// named function. Only source-level higher-order goals produce these.
struct Closure {
  std::string fun;
  ExprPtr lambda;
  EnvPtr env;
  std::vector<ValuePtr> applied;
};

struct Value {
  enum class Kind { Int, Bool, Construct, Tuple, Ordinal, Closure };
  Kind kind = Kind::Int;
  BigInt i;
  bool b = false;
  std::string ctor;
  std::vector<ValuePtr> elems;
  Ordinal ord;
  std::shared_ptr<const Closure> closure;
};

ValuePtr int_value(BigInt v);
ValuePtr bool_value(bool v);
ValuePtr construct_value(std::string ctor, std::vector<ValuePtr> args);
ValuePtr tuple_value(std::vector<ValuePtr> elems);
ValuePtr ordinal_value(Ordinal o);

/// Structural equality. Throws EvalError on closures.
bool value_equal(const ValuePtr& a, const ValuePtr& b);
/// Surface syntax: `[0; 1]`, `(1, true)`, `Some (-3)`.
std::string value_to_string(const ValuePtr& v);
/// A closed expression denoting `v` (closures are not representable).
ExprPtr value_to_expr(const ValuePtr& v);
/// Number of constructor nodes, the size used by structural measures.
std::size_t value_size(const ValuePtr& v);

class EvalError : public Error {
 public:
  enum class Kind { FuelExhausted, MatchFailure, Unbound, Invalid };
  EvalError(Kind kind, const std::string& msg) : Error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct FunctionDef {
  std::string name;
  std::vector<std::string> params;
  ExprPtr body;
};

using FunctionTable = std::map<std::string, std::shared_ptr<const FunctionDef>>;
using Bindings = std::map<std::string, ValuePtr>;

inline constexpr std::uint64_t kDefaultFuel = 10'000'000;

class Evaluator {
 public:
  explicit Evaluator(const FunctionTable& funs, std::uint64_t fuel = kDefaultFuel)
      : funs_(funs), fuel_(fuel) {}

  ValuePtr eval(const ExprPtr& e, const Bindings& env = {});
  ValuePtr call(const std::string& fn, const std::vector<ValuePtr>& args);
  ValuePtr apply(const ValuePtr& fn, const std::vector<ValuePtr>& args);

  std::uint64_t fuel_left() const { return fuel_; }
  std::uint64_t calls() const { return calls_; }

 private:
  ValuePtr eval(const ExprPtr& e, const EnvPtr& env);
  ValuePtr eval_app(const ExprPtr& e, const EnvPtr& env);
  bool match(const PatternPtr& p, const ValuePtr& v, EnvPtr& env);
  void tick();

  const FunctionTable& funs_;
  std::uint64_t fuel_;
  std::uint64_t calls_ = 0;
};

enum class Polarity { Falsifies, Satisfies };

struct Counterexample {
  std::vector<std::pair<std::string, ValuePtr>> bindings;  // goal-variable order
  bool confirmed = false;
};

/// Evaluates `goal` (a lambda, or a bool expression over the bound names)
/// under `cx`. Confirmed iff the result is false (Falsifies) or true
/// (Satisfies). Evaluation errors leave the counterexample unconfirmed.
bool check_cx(const FunctionTable& funs, const ExprPtr& goal, Counterexample& cx, Polarity polarity,
              std::string* diagnostic = nullptr);

}  // namespace iml
