/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <vector>

#include "iml/ordinal.hpp"

namespace iml::test {

inline Ordinal fin(long n) { return Ordinal::fin(BigInt(n)); }
inline Ordinal cons(Ordinal e, long c, Ordinal r) { return Ordinal::cons(std::move(e), BigInt(c), std::move(r)); }

/// Random normal-form ordinals, and random strictly smaller ones.
class OrdinalGen {
 public:
  explicit OrdinalGen(unsigned seed) : rng_(seed) {}

  Ordinal any(int depth) {
    if (depth == 0 || coin()) return fin(small(0, 6));
    int terms = small(1, 3);
    std::vector<Ordinal> exps;
    for (int i = 0; i < terms; ++i) {
      Ordinal e = any(depth - 1);
      if (e == fin(0)) e = fin(1);
      bool dup = false;
      for (const auto& x : exps) dup = dup || x == e;
      if (!dup) exps.push_back(e);
    }
    std::sort(exps.begin(), exps.end(), [](const Ordinal& a, const Ordinal& b) { return ordinal::lt(b, a); });
    Ordinal r = fin(small(0, 4));
    for (auto it = exps.rbegin(); it != exps.rend(); ++it) r = cons(*it, small(1, 3), r);
    return r;
  }

  // Some ordinal strictly below x, or nullopt for 0.
  std::optional<Ordinal> below(const Ordinal& x) {
    if (x.is_fin()) {
      if (x.fin_value() == 0) return std::nullopt;
      return fin(small(0, static_cast<int>(x.fin_value()) - 1));
    }
    switch (small(0, 2)) {
      case 0:
        if (auto r = below(x.rest())) return cons(x.exp(), static_cast<long>(x.coeff()), *r);
        [[fallthrough]];
      case 1:
        if (x.coeff() > 1) return cons(x.exp(), static_cast<long>(x.coeff()) - 1, lower_than_power(x.exp()));
        [[fallthrough]];
      default:
        return lower_than_power(x.exp());
    }
  }

  int small(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

 private:
  // Random ordinal below w^e.
  Ordinal lower_than_power(const Ordinal& e) {
    auto d = below(e);
    if (!d || *d == fin(0) || coin()) return fin(small(0, 5));
    return cons(*d, small(1, 3), fin(small(0, 5)));
  }

  bool coin() { return rng_() % 2 == 0; }
  std::mt19937 rng_;
};

}  // namespace iml::test
