/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "iml/defn.hpp"
#include "iml/lower.hpp"
#include "iml/solver.hpp"
#include "iml/template.hpp"

namespace iml {

/// Reachability literal b[f(t)]: one boolean atom per distinct call term.
struct ReachLit {
  std::string atom;
  ExprPtr call;
  std::string key;        // SMT spelling of the call, the identity of the literal
  std::string printed;    // source spelling, used for tie-breaking and traces
  std::size_t stamp = 0;  // step at which the literal was enqueued
};

enum class PickPolicy { Fifo, Lifo };

/// Earliest-enqueued literal of `core` (ties: smallest printed call); Lifo picks the latest.
const ReachLit& pick_from(const std::vector<const ReachLit*>& core, PickPolicy policy = PickPolicy::Fifo);

struct UnrollOptions {
  std::size_t budget = 100;
  SolverConfig solver;
  PickPolicy pick = PickPolicy::Fifo;
  std::function<void(const std::string&)> trace;  // one line per iteration when set
};

/// Guard implication `b[caller] && path ==> b[callee]` asserted during expansion.
struct Implication {
  ExprPtr caller;
  ExprPtr path;
  ExprPtr callee;
};

struct UnrollOutcome {
  enum class Kind { Sat, UnsatEmptyCore, BudgetExhausted };
  Kind kind = Kind::BudgetExhausted;
  Counterexample model;                      // Sat: goal variables, source-level values
  std::map<std::string, SExpr> raw_model;    // Sat: solver spelling of the goal variables
  std::vector<std::string> last_core;        // printed calls of the last non-empty core
  std::vector<ExprPtr> expanded;             // in expansion order
  std::vector<ExprPtr> pending;              // unexpanded literals at exit
  std::vector<Implication> implications;
  std::size_t steps = 0;
  std::string diagnostic;
};

/// Preprocessed ground program: non-recursive definitions inlined, matches
/// and lets desugared, constants folded; templates for recursive functions.
struct UnrollProblem {
  GroundProgram gp;
  std::set<std::string> recursive;
  std::map<std::string, ExprPtr> bodies;  // recursive functions, preprocessed
  std::map<std::string, Template> templates;
  ExprPtr goal;                           // preprocessed

  std::unique_ptr<SmtEncoding> enc;

  explicit UnrollProblem(GroundProgram program);
  UnrollProblem(const UnrollProblem&) = delete;
  UnrollProblem& operator=(const UnrollProblem&) = delete;

  /// Inlines non-recursive calls, desugars and folds.
  ExprPtr prepare(const ExprPtr& e) const;
  /// Identity of a call term: its SMT spelling.
  std::string key(const ExprPtr& call) const;

 private:
  ExprPtr inline_plain(const ExprPtr& e) const;
  std::map<std::string, const FunDecl*> plain_;  // non-recursive definitions
};

/// Folds literal arithmetic, comparisons, conditionals and constructor tests.
ExprPtr fold_constants(const ExprPtr& e);

/// Distinct calls of recursive functions in `t`, innermost first.
std::vector<ExprPtr> calls_of_term(const ExprPtr& t, const std::set<std::string>& recursive);

/// Template entries of `call` instantiated at its arguments, restricted to
/// recursive callees and dropping calls whose key is in `expanded`.
std::vector<InstantiatedCall> subcalls_of_call(const UnrollProblem& p, const ExprPtr& call,
                                               const std::set<std::string>& expanded);

/// The unrolling loop on `p.goal`.
UnrollOutcome unroll(const UnrollProblem& p, const UnrollOptions& opts);

class ReflectError : public Error {
 public:
  using Error::Error;
};

/// Source-level values of the goal variables of `gp` in the current model of `s`.
Counterexample reflect(SolverSession& s, const SmtEncoding& enc, const GroundProgram& gp,
                       std::map<std::string, SExpr>* raw = nullptr);

struct Verdict {
  enum class Kind { Proved, Refuted, Instance, NoInstance, Unknown };
  Kind kind = Kind::Unknown;
  Counterexample cx;
  std::size_t steps = 0;
  std::string reason;  // Unknown: budget or solver diagnostic
  GroundProgram lowered;
};

const char* to_string(Verdict::Kind k);

/// Bounded verification of a typed goal (closed lambda or bool expression):
/// unrolls the negation; a model is reflected and confirmed by evaluation.
Verdict verify(const World& w, const ExprPtr& goal, const UnrollOptions& opts = {});
/// Searches for arguments satisfying `pred`.
Verdict instance(const World& w, const ExprPtr& pred, const UnrollOptions& opts = {});

/// Executable view of a ground program (lowered names).
FunctionTable ground_function_table(const GroundProgram& gp);

}  // namespace iml
