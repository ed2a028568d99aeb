/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iml/defn.hpp"
#include "iml/unroll.hpp"

namespace iml {

struct WaterfallConfig {
  std::size_t unroll_budget = 50;  // ground decision step
  std::size_t cx_budget = 20;      // generalization filter
  std::size_t induct_depth = 3;
  std::size_t rewrite_limit = 512; // rewrite steps per simplify call
  SolverConfig solver;
  std::function<void(const std::string&)> trace;         // waterfall moves
  std::function<void(const std::string&)> trace_unroll;  // forwarded to the unroller
};

/// `hyps |- concl` over typed free variables.
struct Goal {
  std::vector<std::pair<std::string, TypePtr>> vars;
  std::vector<ExprPtr> hyps;
  ExprPtr concl;
  std::size_t depth = 0;
  std::vector<std::string> history;
};

std::string to_string(const Goal& g);

/// Goal for a typed closed lambda or bool expression; `h ==> c` moves `h` into the hypotheses.
Goal make_goal(const ExprPtr& typed_goal);
/// Closed typed lambda `fun vars -> hyps ==> concl`.
ExprPtr close_goal(const Goal& g, const World& w);
/// Re-infers the types of hypotheses and conclusion.
void retype(Goal& g, const World& w);

/// Rewrites with the world's rules and the goal's equational hypotheses,
/// unfolds definitions whose case split is decided, evaluates ground
/// subterms and normalizes boolean structure.
Goal simplify(const Goal& g, const World& w, const WaterfallConfig& cfg = {});
ExprPtr simplify_expr(const ExprPtr& e, const World& w, const std::vector<ExprPtr>& facts = {},
                      const WaterfallConfig& cfg = {});

/// A rule read off a hypothesis: `h1 ==> ... ==> l = r` rewrites `l` to `r`.
std::optional<Rule> rule_of_fact(const ExprPtr& fact);

/// First-order matching of `pattern` against `term`, binding `vars`.
bool match_term(const ExprPtr& pattern, const ExprPtr& term, const std::vector<std::string>& vars,
                std::vector<std::pair<std::string, ExprPtr>>& sub);

struct InductionCase {
  std::vector<std::pair<std::string, TypePtr>> vars;
  std::vector<ExprPtr> hyps;  // case conditions
  std::vector<ExprPtr> ihs;   // instances of the goal
  ExprPtr concl;
};

struct InductionScheme {
  std::string fun;             // function whose template drives the scheme
  ExprPtr call;                // the chosen call in the goal
  std::vector<std::string> induction_vars;
  std::vector<InductionCase> cases;
};

std::string to_string(const InductionScheme& s);

std::optional<InductionScheme> synthesize_induction(const Goal& g, const World& w);

/// Replaces maximal repeated non-variable subterms by fresh variables when a
/// bounded counterexample search finds no refutation; otherwise returns `g`.
Goal generalize(const Goal& g, const World& w, const WaterfallConfig& cfg = {});

struct ProofResult {
  enum class Kind { Proved, Refuted, GaveUp };
  Kind kind = Kind::GaveUp;
  Counterexample cx;
  std::string reason;
  std::vector<std::string> trace;
  std::size_t expansions = 0;
};

const char* to_string(ProofResult::Kind k);

/// The waterfall on a typed closed lambda or bool expression.
ProofResult prove(const ExprPtr& goal, const World& w, const WaterfallConfig& cfg = {});

/// Closed goal of an admitted theorem: parameters as lambda binders, type variables at int.
ExprPtr theorem_goal(const TheoremDef& t);

/// Termination VC discharge through the waterfall.
VcProver make_vc_prover(const WaterfallConfig& cfg = {});

/// Replaces every type variable in the types of `e` by int.
ExprPtr default_type_vars(const ExprPtr& e);
TypePtr default_type_vars(const TypePtr& t);

}  // namespace iml
