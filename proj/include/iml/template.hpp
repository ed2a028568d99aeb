/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <string>
#include <vector>

#include "iml/ast.hpp"
#include "iml/lower.hpp"

namespace iml {

/// One call of a template: `callee(args)` is reached when every conjunct of `path` holds.
struct TemplateEntry {
  std::string callee;
  std::vector<ExprPtr> args;
  std::vector<ExprPtr> path;
};

struct Template {
  std::string fun;
  std::vector<std::string> formals;
  std::vector<TemplateEntry> entries;
};

/// Static call structure of a ground first-order definition. Lets are inlined,
/// `&&`/`||` read as nested conditionals, match branches contribute testers
/// and selectors, and identical entries collapse.
Template template_of(const FunDecl& f);

struct InstantiatedCall {
  std::string callee;
  ExprPtr call;
  ExprPtr path;  // conjunction, `true` when empty
};

/// Substitutes `actuals` for the formals throughout the template.
std::vector<InstantiatedCall> instantiate(const Template& tpl, const std::vector<ExprPtr>& actuals);

std::string to_string(const TemplateEntry& e);
std::string to_string(const Template& t);

/// Conjunction of `conjuncts`; `true` when empty.
ExprPtr conjoin(const std::vector<ExprPtr>& conjuncts);

/// Replaces `match` by conditionals over testers, selectors and projections,
/// and inlines `let`. The last branch of a match becomes the final `else`.
ExprPtr desugar(const ExprPtr& e);

/// Boolean test that `scrutinee` matches `p`, and the bindings of its variables.
ExprPtr pattern_test(const PatternPtr& p, const ExprPtr& scrutinee,
                     std::vector<std::pair<std::string, ExprPtr>>& bindings);

}  // namespace iml
