/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <memory>
#include <string>

#include "iml/ast.hpp"

namespace iml {

/// Ordinal below epsilon-0 in Cantor normal form.
///
/// Either a natural number `Fin n`, or `coeff * w^exp + rest`. Values are
/// immutable and share structure.
class Ordinal {
 public:
  Ordinal() : Ordinal(BigInt(0)) {}
  static Ordinal fin(BigInt n);
  /// coeff * w^exp + rest. No normalisation is applied; see is_normal_form.
  static Ordinal cons(Ordinal exp, BigInt coeff, Ordinal rest);
  static Ordinal omega();

  bool is_fin() const { return node_->is_fin; }
  const BigInt& fin_value() const { return node_->n; }
  const Ordinal& exp() const { return *node_->exp; }
  const BigInt& coeff() const { return node_->n; }
  const Ordinal& rest() const { return *node_->rest; }

  std::string to_string() const;
  std::size_t depth() const;

  friend bool operator==(const Ordinal& a, const Ordinal& b);
  friend bool operator!=(const Ordinal& a, const Ordinal& b) { return !(a == b); }

 private:
  struct Node {
    bool is_fin = true;
    BigInt n;  // Fin value, or coefficient
    std::shared_ptr<const Ordinal> exp;
    std::shared_ptr<const Ordinal> rest;
  };
  explicit Ordinal(BigInt n);
  std::shared_ptr<const Node> node_;
};

namespace ordinal {

/// The well-founded strict order `<<`.
bool lt(const Ordinal& x, const Ordinal& y);
/// Negative inputs clamp to 0.
Ordinal of_int(const BigInt& n);
/// Ordinal addition with absorption of smaller left summands. Not commutative.
Ordinal plus(const Ordinal& x, const Ordinal& y);
/// Multiply by w (raise every exponent by one).
Ordinal shift(const Ordinal& x);
/// Lexicographic pairing: pair(x, y) = shift(x) + y, so pair(m, n) = m*w + n.
Ordinal pair(const Ordinal& x, const Ordinal& y);
bool is_normal_form(const Ordinal& x);

}  // namespace ordinal

}  // namespace iml
