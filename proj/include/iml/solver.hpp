/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "iml/eval.hpp"
#include "iml/lower.hpp"
#include "iml/sexpr.hpp"

namespace iml {

/// `$MINI_IMANDRA_SOLVER`, or "z3 -in".
std::string default_solver_command();

struct SolverConfig {
  std::string command = default_solver_command();
  unsigned timeout_ms = 10'000;  // per query; 0 disables the limit
};

class SolverStartError : public Error {
 public:
  using Error::Error;
};

/// Protocol failure or timeout; the session is dead afterwards.
class SolverError : public Error {
 public:
  using Error::Error;
};

struct SolverVerdict {
  enum class Kind { Sat, Unsat, Unknown };
  Kind kind = Kind::Unknown;
  std::vector<std::string> core;  // Unsat: subset of the assumptions
  std::string reason;             // Unknown
};

/// A live SMT-LIB 2.6 solver process spoken to over its standard streams.
/// Every command is acknowledged (`:print-success`), so replies never desync.
class SolverSession {
 public:
  explicit SolverSession(SolverConfig config = {});
  ~SolverSession();
  SolverSession(const SolverSession&) = delete;
  SolverSession& operator=(const SolverSession&) = delete;

  /// Sends a command that answers `success`.
  void command(const std::string& cmd);
  /// Sends a command and returns its single reply.
  SExpr query(const std::string& cmd);

  void assert_formula(const std::string& term) { command("(assert " + term + ")"); }
  SolverVerdict check_sat_assuming(const std::vector<std::string>& assumptions);
  /// `name -> value` for nullary definitions in the current model.
  std::map<std::string, SExpr> get_model();
  std::vector<SExpr> get_value(const std::vector<std::string>& terms);

  /// Every command sent so far, one per line.
  const std::string& script() const { return script_; }
  const SolverConfig& config() const { return config_; }
  bool alive() const { return pid_ > 0; }

 private:
  void write(const std::string& text);
  SExpr read_reply();
  void kill_child();

  SolverConfig config_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::string script_;
};

/// Naming and translation between a GroundProgram and SMT-LIB terms.
/// Datatypes keep their lowered names; selectors are `C!i`, tuple sorts
/// `tup!...`, and names clashing with SMT-LIB keywords get a `!u` suffix.
class SmtEncoding {
 public:
  explicit SmtEncoding(const GroundProgram& gp);

  std::string symbol(const std::string& name) const;
  std::string sort(const TypePtr& t) const;
  /// Term for a ground expression without `match` or `let` (see `desugar`).
  std::string term(const ExprPtr& e) const;

  /// `declare-datatypes` for every lowered type and tuple sort, or empty.
  std::string datatype_declarations() const;
  std::string declare_const(const std::string& name, const TypePtr& t) const;
  /// Uninterpreted declaration of a ground function.
  std::string declare_fun(const FunDecl& f) const;

  /// Decodes a model value into a source-level Value, or nullopt when the
  /// value is not a constructor literal.
  std::optional<ValuePtr> decode(const SExpr& v) const;

 private:
  struct TupleSort {
    std::string name;
    std::vector<TypePtr> elems;
  };
  void collect_tuples(const TypePtr& t);
  void collect_tuples(const ExprPtr& e);
  const TupleSort& tuple_sort(const TypePtr& t) const;
  std::string tuple_key(const TypePtr& t) const;
  std::string term(const ExprPtr& e, const std::set<std::string>& bound) const;
  std::optional<ValuePtr> decode(const SExpr& v, const std::map<std::string, SExpr>& lets) const;

  const GroundProgram& gp_;
  std::vector<TupleSort> tuples_;
  std::map<std::string, std::size_t> tuple_index_;          // tuple_key -> tuples_ index
  std::map<std::string, std::size_t> tuple_ctor_;           // SMT constructor -> tuples_ index
  std::map<std::string, std::string> ctor_of_symbol_;       // SMT constructor -> lowered constructor
};

}  // namespace iml
