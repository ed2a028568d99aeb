/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "iml/ast.hpp"
#include "iml/eval.hpp"
#include "iml/typecheck.hpp"

namespace iml {

struct RecCall {
  std::string callee;
  std::vector<ExprPtr> args;
  std::vector<ExprPtr> guard;  // conjunction; match constraints as `scrutinee = pattern-term`
  ExprPtr call;                // the call expression itself
};

struct MeasureSpec {
  enum class Kind { Structural, AdmLex, Explicit };
  Kind kind = Kind::Structural;
  std::size_t param_index = 0;      // Structural
  std::vector<std::string> names;   // AdmLex
  ExprPtr expr;                     // ordinal-valued expression over the params (AdmLex, Explicit)
};

struct TerminationVC {
  std::string caller;
  std::string callee;
  std::vector<ExprPtr> hyps;
  ExprPtr lhs;  // measure at the call's arguments (Structural: the argument)
  ExprPtr rhs;  // measure at the formals (Structural: the formal)
  std::string certificate;  // "structural", "proved", or empty while open
  /// Closed boolean goal `fun vars -> hyps ==> lhs << rhs` (non-structural only).
  ExprPtr goal;
};

std::string to_string(const TerminationVC& vc);

struct FunDef {
  FunDecl decl;  // typed body, params annotated with their types
  Scheme scheme;
  std::vector<std::string> clique;  // names of the recursive group, empty if non-recursive
  std::optional<MeasureSpec> measure;
  std::vector<RecCall> rec_calls;
  std::vector<TerminationVC> vcs;
};

struct TheoremDef {
  FunDecl decl;
  Scheme scheme;
  bool proved = false;
};

/// A conditional rewrite rule `hyps ==> lhs = rhs`, oriented left to right.
struct Rule {
  std::string name;
  std::vector<std::string> vars;
  std::vector<ExprPtr> hyps;
  ExprPtr lhs;
  ExprPtr rhs;
  mutable std::size_t hits = 0;
};

/// The logical world. Treated as an immutable value: admission returns a new World.
struct World {
  TypeEnv env;
  FunctionTable table;  // executable view for the evaluator
  std::map<std::string, std::shared_ptr<const FunDef>> funs;
  std::map<std::string, std::shared_ptr<const TheoremDef>> theorems;
  std::vector<std::shared_ptr<const Rule>> rules;
  std::vector<std::string> order;  // user-visible names in admission order

  /// Built-in types and the List prelude.
  static const World& initial();

  const FunDef* find_fun(const std::string& name) const;
};

class AdmissionError : public Error {
 public:
  enum class Kind { TerminationUnproved, NoMeasure, Redefinition, Invalid };
  AdmissionError(Kind kind, std::string name, const std::string& msg)
      : Error(msg), kind_(kind), name_(std::move(name)) {}
  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

 private:
  Kind kind_;
  std::string name_;
};

const char* to_string(AdmissionError::Kind k);

/// Proves a closed boolean goal against a world; used to discharge termination VCs.
/// Returns true on proof; `why` receives a short reason otherwise.
using VcProver = std::function<bool(const World&, const ExprPtr& goal, std::string* why)>;

struct AdmitConfig {
  VcProver prover;  // empty: only structural certificates are accepted
};

std::vector<RecCall> collect_rec_calls(const FunDecl& f, const std::vector<std::string>& clique);

/// Measure from annotations, or structural inference over the group.
/// Returns nullopt when no annotation is present and inference fails.
std::optional<MeasureSpec> elaborate_measure(const FunDecl& f, const std::vector<FunDecl>& clique,
                                             const std::vector<Scheme>& schemes, const TypeEnv& env);

/// One VC per recursive call of `f`. `measures` maps clique members to their measures.
std::vector<TerminationVC> gen_termination_vcs(const FunDecl& f,
                                               const std::map<std::string, MeasureSpec>& measures,
                                               const std::map<std::string, FunDecl>& clique);

/// Admits a type, function group or theorem. Directives are rejected.
World admit(const Decl& d, const World& w, const AdmitConfig& cfg = {});

/// Installs `thm` (already proved) as a rewrite rule. Throws AdmissionError(Invalid)
/// when the statement is not an equation usable left to right.
World install_rule(const World& w, const std::string& theorem);
Rule rule_of_theorem(const FunDecl& thm);

/// Rewrites `Ordinal.lt`/ordinal equality over of_int, pair, plus and if into
/// integer arithmetic on coefficient vectors (exact below w^w).
ExprPtr encode_ordinals(const ExprPtr& e);

}  // namespace iml
