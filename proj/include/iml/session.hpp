/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "iml/defn.hpp"
#include "iml/lower.hpp"
#include "iml/waterfall.hpp"

namespace iml {

struct SessionConfig {
  std::string solver_cmd = default_solver_command();
  std::size_t unroll_limit = 100;
  std::size_t induct_depth = 3;
  unsigned timeout_ms = 10000;
  bool trace_unroll = false;
  bool trace_waterfall = false;
  bool machine = false;

  /// Throws Error when a budget or timeout is zero.
  void validate() const;
};

enum class Outcome { Proved, Refuted, Instance, NoInstance, Unknown, AdmissionError, TypeError, ParseError };

const char* to_string(Outcome o);

/// One per directive or failed declaration.
struct DirectiveRecord {
  std::string directive;
  Outcome verdict = Outcome::Unknown;
  std::vector<std::pair<std::string, std::string>> bindings;  // surface syntax
  std::size_t expansions = 0;
  double millis = 0;
  std::string detail;
  bool confirmed = false;  // bindings checked by evaluation
};

/// Line-delimited JSON; `with_timing` false drops `millis`.
std::string to_json(const DirectiveRecord& r, bool with_timing = true);

class Session {
 public:
  Session(SessionConfig cfg, std::ostream& out);

  /// Parses and processes a whole source text. Parse errors are recorded.
  void run_text(std::string_view text);
  void process(const Decl& d);

  /// REPL input: a `#` command, declarations, directives or an expression to
  /// evaluate. Returns false after `#quit`.
  bool command(const std::string& input);
  /// True when `input` is an unfinished phrase that needs more lines.
  static bool incomplete(const std::string& input);

  int exit_code() const;
  const World& world() const { return world_; }
  const std::vector<DirectiveRecord>& records() const { return records_; }
  const std::map<std::string, ExprPtr>& cx() const { return cx_; }
  const SessionConfig& config() const { return cfg_; }

  /// Replaces `CX.x` by the last counterexample's value of `x`.
  ExprPtr bind_cx(const ExprPtr& e) const;

 private:
  WaterfallConfig waterfall_config() const;
  UnrollOptions unroll_options(std::size_t budget) const;
  ExprPtr typed_goal(const Decl& d);
  void directive(const Decl& d);
  void theorem(const Decl& d);
  void record(DirectiveRecord r);
  void remember_cx(const Counterexample& cx);
  void evaluate(const std::string& text);
  void show(const std::string& name);
  void show_template(const std::string& name);
  void show_measure(const std::string& name);
  void show_lowered(const std::string& name);
  void show_config();

  SessionConfig cfg_;
  std::ostream& out_;
  World world_;
  std::vector<DirectiveRecord> records_;
  std::map<std::string, ExprPtr> cx_;
  std::map<std::string, GroundProgram> lowered_;  // by theorem name, and "it" for the last directive
  std::string last_input_;  // REPL declarations, for trailing annotations
  World last_world_;
  std::size_t last_records_ = 0;
};

/// Batch mode over a file; returns the exit code. Unreadable files exit 3.
int run_batch(const std::string& path, const SessionConfig& cfg, std::ostream& out);

}  // namespace iml
