/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "iml/error.hpp"

namespace iml {

/// SMT-LIB S-expression. Atoms keep their source spelling, including
/// `|quoted|` symbols and `"string"` literals.
struct SExpr {
  std::string atom;
  std::vector<SExpr> list;
  bool is_list = false;

  static SExpr make_atom(std::string a);
  static SExpr make_list(std::vector<SExpr> xs);

  bool is_atom() const { return !is_list; }
  bool is_atom(std::string_view a) const { return !is_list && atom == a; }
  /// Head symbol of a non-empty list, else empty.
  const std::string& head() const;
};

class SExprError : public Error {
 public:
  using Error::Error;
};

std::vector<SExpr> parse_sexprs(std::string_view text);
SExpr parse_sexpr(std::string_view text);
std::string to_string(const SExpr& e);

/// Length of the first complete S-expression in `text` (after leading blanks
/// and comments), or 0 when more input is needed.
std::size_t complete_sexpr_length(std::string_view text);

/// `name` as an SMT-LIB symbol, `|quoted|` when it is not a simple symbol.
std::string smt_quote(const std::string& name);

}  // namespace iml
