/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <string>
#include <string_view>

#include "iml/ast.hpp"
#include "iml/error.hpp"

namespace iml {

struct ParseOptions {
  /// Allow `let List.foo ...` definitions; only the prelude uses this.
  bool allow_qualified_definitions = false;
};

/// Parses a whole `.iml` source text. Throws ParseError.
SourceModule parse_module(std::string_view text, const ParseOptions& opts = {});

/// Parses a single expression (REPL input, tests). Throws ParseError.
ExprPtr parse_expr(std::string_view text);

std::string pretty(const Decl& d);
std::string pretty(const ExprPtr& e);
std::string pretty(const PatternPtr& p);
std::string pretty(const SourceModule& m);

/// Built-in qualified names resolvable through `M.(...)` local opens.
bool is_builtin_qualified(const std::string& name);

}  // namespace iml
