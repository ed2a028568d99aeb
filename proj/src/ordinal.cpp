/* SPDX-License-Identifier: Apache-2.0 */

#include "iml/ordinal.hpp"

#include <algorithm>

namespace iml {

Ordinal::Ordinal(BigInt n) {
  auto node = std::make_shared<Node>();
  node->is_fin = true;
  node->n = std::move(n);
  node_ = std::move(node);
}

Ordinal Ordinal::fin(BigInt n) { return Ordinal(std::move(n)); }

Ordinal Ordinal::cons(Ordinal exp, BigInt coeff, Ordinal rest) {
  Ordinal o;
  auto node = std::make_shared<Node>();
  node->is_fin = false;
  node->n = std::move(coeff);
  node->exp = std::make_shared<const Ordinal>(std::move(exp));
  node->rest = std::make_shared<const Ordinal>(std::move(rest));
  o.node_ = std::move(node);
  return o;
}

Ordinal Ordinal::omega() { return cons(fin(1), 1, fin(0)); }

bool operator==(const Ordinal& a, const Ordinal& b) {
  if (a.node_ == b.node_) return true;
  if (a.is_fin() != b.is_fin()) return false;
  if (a.is_fin()) return a.fin_value() == b.fin_value();
  return a.coeff() == b.coeff() && a.exp() == b.exp() && a.rest() == b.rest();
}

std::string Ordinal::to_string() const {
  if (is_fin()) return fin_value().str();
  std::string term;
  if (exp() == fin(1))
    term = "w";
  else
    term = "w^(" + exp().to_string() + ")";
  if (coeff() != 1) term = coeff().str() + "*" + term;
  if (rest().is_fin() && rest().fin_value() == 0) return term;
  return term + " + " + rest().to_string();
}

std::size_t Ordinal::depth() const {
  if (is_fin()) return 0;
  return 1 + std::max(exp().depth(), rest().depth());
}

namespace ordinal {

bool lt(const Ordinal& x, const Ordinal& y) {
  if (x.is_fin() && y.is_fin()) return x.fin_value() < y.fin_value();
  if (x.is_fin()) return true;
  if (y.is_fin()) return false;
  if (lt(x.exp(), y.exp())) return true;
  if (x.exp() != y.exp()) return false;
  if (x.coeff() != y.coeff()) return x.coeff() < y.coeff();
  return lt(x.rest(), y.rest());
}

Ordinal of_int(const BigInt& n) { return Ordinal::fin(n < 0 ? BigInt(0) : n); }

Ordinal plus(const Ordinal& x, const Ordinal& y) {
  if (x.is_fin() && y.is_fin()) return Ordinal::fin(x.fin_value() + y.fin_value());
  if (x.is_fin()) return y;  // absorbed
  if (y.is_fin()) return Ordinal::cons(x.exp(), x.coeff(), plus(x.rest(), y));
  if (lt(x.exp(), y.exp())) return y;  // absorbed
  if (x.exp() == y.exp()) return Ordinal::cons(x.exp(), x.coeff() + y.coeff(), y.rest());
  return Ordinal::cons(x.exp(), x.coeff(), plus(x.rest(), y));
}

Ordinal shift(const Ordinal& x) {
  if (x.is_fin()) {
    if (x.fin_value() == 0) return x;
    return Ordinal::cons(Ordinal::fin(1), x.fin_value(), Ordinal::fin(0));
  }
  return Ordinal::cons(plus(x.exp(), Ordinal::fin(1)), x.coeff(), shift(x.rest()));
}

Ordinal pair(const Ordinal& x, const Ordinal& y) { return plus(shift(x), y); }

namespace {

// Leading exponent of a normal-form summand chain; Fin terms have exponent 0.
bool exponents_below(const Ordinal& rest, const Ordinal& bound) {
  if (rest.is_fin()) return true;  // exponent 0 is below any Cons exponent (>= 1)
  return lt(rest.exp(), bound);
}

}  // namespace

bool is_normal_form(const Ordinal& x) {
  if (x.is_fin()) return x.fin_value() >= 0;
  if (x.coeff() < 1) return false;
  if (!is_normal_form(x.exp()) || !is_normal_form(x.rest())) return false;
  // Exponent 0 belongs in Fin.
  if (x.exp().is_fin() && x.exp().fin_value() == 0) return false;
  return exponents_below(x.rest(), x.exp());
}

}  // namespace ordinal

}  // namespace iml
