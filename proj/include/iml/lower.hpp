/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "iml/defn.hpp"

namespace iml {

/// Ground, monomorphic, first-order definitions plus a quantifier-free goal.
struct GroundProgram {
  std::vector<TypeDecl> types;  // no type parameters
  std::vector<FunDecl> funs;    // params annotated with ground types; `recursive` set per call-graph cycle
  std::set<std::string> opaque; // uninterpreted functions: entries of `funs` with a null body
  std::vector<std::pair<std::string, TypePtr>> vars;  // free goal variables
  ExprPtr goal;                 // bool over `vars`

  // Name manifest: generated name -> source name.
  std::map<std::string, std::string> fun_source;
  std::map<std::string, std::string> type_source;
  std::map<std::string, std::string> ctor_source;

  const FunDecl* find_fun(const std::string& name) const;
  const TypeDecl* find_type(const std::string& name) const;
  /// Constructor name -> (type, index within the type).
  std::pair<const TypeDecl*, std::size_t> find_ctor(const std::string& ctor) const;
};

std::string pretty(const GroundProgram& gp);

class LowerError : public Error {
 public:
  using Error::Error;
};

/// Deterministic injective allocator for generated names.
class NameMangler {
 public:
  /// Marks `name` as belonging to `owner`; later claims by other owners get a suffix.
  void reserve(const std::string& name, const std::string& owner);
  /// Returns `desired` if free (or already owned by `owner`), else `desired_k` for the first free k.
  std::string claim(const std::string& desired, const std::string& owner);
  bool owns(const std::string& name, const std::string& owner) const;

 private:
  std::map<std::string, std::string> owner_of_;
};

/// Result of lifting the anonymous functions out of one expression.
struct LiftResult {
  ExprPtr expr;
  std::vector<FunDecl> lifted;  // `<context>_lambda<k>` over captured variables, then lambda params
};

/// Replaces every lambda in `e` (typed) by a partial application of a new
/// top-level function over the lambda's captured variables. A lambda passed
/// to `g` is named `<g>_lambda<k>`, others `<context>_lambda<k>`; `counters`
/// numbers lambdas per base name. `is_global` tells function names apart from
/// captured variables.
LiftResult lambda_lift(const ExprPtr& e, const std::string& context, std::map<std::string, int>& counters,
                       const std::function<bool(const std::string&)>& is_global,
                       NameMangler* mangler = nullptr);

/// Lowers `goal` and its transitive dependencies: lambda lifting, then
/// specialization per functional-argument bundle, then monomorphization.
/// `goal` is a typed closed lambda or a bool expression over `vars`.
GroundProgram lower_goal(const World& w, const ExprPtr& goal,
                         const std::vector<std::pair<std::string, TypePtr>>& vars = {});

/// Mangled suffix of a ground source type: `int list` -> `int_list`.
std::string type_suffix(const TypePtr& t);

}  // namespace iml
