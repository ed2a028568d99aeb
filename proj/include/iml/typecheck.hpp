/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <map>
#include <string>
#include <vector>

#include "iml/ast.hpp"
#include "iml/error.hpp"

namespace iml {

struct Scheme {
  std::vector<std::string> vars;  // quantified type variables
  TypePtr body;
};

struct CtorSig {
  std::string name;
  std::string type_name;
  std::vector<std::string> type_params;
  std::vector<TypePtr> args;
  std::size_t index = 0;  // position within the type's constructor list
};

/// Everything inference needs to know about the logical world.
struct TypeEnv {
  std::map<std::string, TypeDecl> types;     // user and prelude datatypes
  std::map<std::string, CtorSig> ctors;
  std::map<std::string, Scheme> values;      // admitted functions and primitives

  /// Primitive types and the Ordinal operations.
  static TypeEnv builtin();
  void add_type(const TypeDecl& t);
  bool knows_type(const std::string& name, std::size_t arity) const;
};

struct TypedDecl {
  Decl decl;                   // every expression node carries its type
  std::vector<Scheme> schemes; // Fun/Theorem: one per entry of decl.funs
  std::vector<std::string> goal_params;      // Verify/Instance lambda parameters
  std::vector<TypePtr> goal_param_types;     // ground after defaulting
};

struct TypedModule {
  std::vector<TypedDecl> decls;
};

class AdmissibilityError : public Error {
 public:
  enum class Kind { NotWellFounded, HigherOrderData, NonUniformRecursion, NonSpecializable,
                    Redefinition };
  AdmissibilityError(Kind kind, std::string name, const std::string& explanation);
  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

 private:
  Kind kind_;
  std::string name_;
};

const char* to_string(AdmissibilityError::Kind k);

/// Type-checks one declaration against `env`. Throws TypeError.
TypedDecl infer_decl(const Decl& d, const TypeEnv& env);

/// Type-checks a module, threading definitions through a copy of `env`.
TypedModule infer(const SourceModule& m, const TypeEnv& env);

/// Infers a closed expression; remaining type variables default to int.
ExprPtr infer_expr(const ExprPtr& e, const TypeEnv& env,
                   const std::map<std::string, TypePtr>& locals = {});

/// Instantiates scheme variables so that `scheme.body` equals `instance`.
/// Returns the binding for each quantified variable (missing ones default to int).
std::vector<TypePtr> match_scheme(const Scheme& scheme, const TypePtr& instance);
TypePtr subst_type(const TypePtr& t, const std::map<std::string, TypePtr>& sub);

void check_type_admissible(const TypeDecl& t, const TypeEnv& env);

/// `clique` holds the typed declarations of a (mutually) recursive group.
void check_fun_admissible(const FunDecl& f, const std::vector<FunDecl>& clique,
                          const std::vector<Scheme>& clique_schemes);

}  // namespace iml
