/* SPDX-License-Identifier: Apache-2.0 */

#include <gtest/gtest.h>

#include <map>
#include <optional>
#include <random>

#include "iml/ordinal.hpp"
#include "ordinal_gen.hpp"

namespace iml {
namespace {

using ordinal::lt;
using ordinal::of_int;
using ordinal::pair;
using ordinal::plus;

using test::cons;
using test::fin;
using Gen = test::OrdinalGen;
const Ordinal w = cons(fin(1), 1, fin(0));

// Ordinals below w^w as {exponent -> coefficient}; comparison from the top exponent down.
using Poly = std::map<long, long, std::greater<>>;

std::optional<Poly> poly(const Ordinal& x) {
  Poly p;
  const Ordinal* cur = &x;
  while (!cur->is_fin()) {
    if (!cur->exp().is_fin()) return std::nullopt;
    p[static_cast<long>(cur->exp().fin_value())] += static_cast<long>(cur->coeff());
    cur = &cur->rest();
  }
  if (cur->fin_value() != 0) p[0] += static_cast<long>(cur->fin_value());
  return p;
}

bool poly_lt(const Poly& a, const Poly& b) {
  auto i = a.begin();
  auto j = b.begin();
  for (; i != a.end() && j != b.end(); ++i, ++j) {
    if (i->first != j->first) return i->first < j->first;
    if (i->second != j->second) return i->second < j->second;
  }
  return i == a.end() && j != b.end();
}

Poly poly_plus(const Poly& a, const Poly& b) {
  if (b.empty()) return a;
  long top = b.begin()->first;
  Poly r;
  for (const auto& [e, c] : a)
    if (e >= top) r[e] = c;
  for (const auto& [e, c] : b) r[e] += c;
  return r;
}

TEST(Ordinal, LtExamples) {
  EXPECT_TRUE(lt(fin(0), fin(1)));
  EXPECT_TRUE(lt(fin(5), w));
  EXPECT_TRUE(lt(cons(fin(1), 2, fin(0)), cons(fin(1), 2, fin(1))));
  EXPECT_FALSE(lt(w, fin(1000000)));
}

TEST(Ordinal, OfIntClamps) {
  EXPECT_EQ(of_int(3), fin(3));
  EXPECT_EQ(of_int(-2), fin(0));
  EXPECT_EQ(of_int(0), fin(0));
}

TEST(Ordinal, PlusExamples) {
  EXPECT_EQ(plus(fin(1), fin(2)), fin(3));
  EXPECT_EQ(plus(fin(1), w), w);
  EXPECT_EQ(plus(w, fin(1)), cons(fin(1), 1, fin(1)));
  EXPECT_NE(plus(w, fin(1)), w);
}

TEST(Ordinal, PairExamples) {
  EXPECT_EQ(pair(of_int(2), of_int(3)), cons(fin(1), 2, fin(3)));
  EXPECT_EQ(pair(of_int(0), of_int(5)), fin(5));
  EXPECT_TRUE(lt(pair(of_int(1), of_int(99)), pair(of_int(2), of_int(0))));
}

TEST(Ordinal, NormalFormExamples) {
  EXPECT_TRUE(ordinal::is_normal_form(fin(7)));
  EXPECT_FALSE(ordinal::is_normal_form(cons(fin(0), 1, fin(0))));
  EXPECT_TRUE(ordinal::is_normal_form(cons(fin(2), 1, cons(fin(1), 3, fin(0)))));
  EXPECT_FALSE(ordinal::is_normal_form(cons(fin(1), 1, cons(fin(2), 3, fin(0)))));
  EXPECT_FALSE(ordinal::is_normal_form(cons(fin(1), 0, fin(0))));
}

TEST(Ordinal, LtAgreesWithPolynomialOracle) {
  Gen g(1);
  for (int i = 0; i < 5000; ++i) {
    Ordinal a = g.any(2), b = g.any(2);
    auto pa = poly(a), pb = poly(b);
    if (!pa || !pb) continue;
    EXPECT_EQ(lt(a, b), poly_lt(*pa, *pb)) << a.to_string() << " vs " << b.to_string();
    EXPECT_EQ(poly(plus(a, b)), poly_plus(*pa, *pb)) << a.to_string() << " + " << b.to_string();
  }
}

TEST(Ordinal, StrictTotalOrderOnRandomNormalForms) {
  Gen g(2);
  for (int i = 0; i < 10000; ++i) {
    Ordinal x = g.any(3), y = g.any(3), z = g.any(3);
    ASSERT_TRUE(ordinal::is_normal_form(x)) << x.to_string();
    EXPECT_FALSE(lt(x, x));
    int holds = lt(x, y) + lt(y, x) + (x == y);
    EXPECT_EQ(holds, 1) << x.to_string() << " " << y.to_string();
    if (lt(x, y) && lt(y, z)) EXPECT_TRUE(lt(x, z));
  }
}

TEST(Ordinal, PlusLaws) {
  Gen g(3);
  for (int i = 0; i < 3000; ++i) {
    Ordinal x = g.any(3), y = g.any(3), z = g.any(3);
    EXPECT_TRUE(ordinal::is_normal_form(plus(x, y)));
    EXPECT_EQ(plus(plus(x, y), z), plus(x, plus(y, z)));
    EXPECT_EQ(plus(x, fin(0)), x);
    EXPECT_EQ(plus(fin(0), y), y);
  }
}

TEST(Ordinal, PairIsLexicographicOnFinitePairs) {
  for (int a = 0; a < 20; ++a)
    for (int b = 0; b < 20; ++b) {
      Ordinal p = pair(of_int(a), of_int(b));
      for (int c = 0; c < 20; ++c)
        for (int d = 0; d < 20; ++d) {
          bool lex = a < c || (a == c && b < d);
          ASSERT_EQ(lt(p, pair(of_int(c), of_int(d))), lex) << a << "," << b << " " << c << "," << d;
        }
    }
}

TEST(Ordinal, RandomDescentsTerminate) {
  Gen g(4);
  for (int walk = 0; walk < 1000; ++walk) {
    Ordinal x = g.any(3);
    std::size_t steps = 0;
    while (auto y = g.below(x)) {
      ASSERT_TRUE(ordinal::is_normal_form(*y)) << y->to_string();
      ASSERT_TRUE(lt(*y, x)) << y->to_string() << " !<< " << x.to_string();
      x = *y;
      ASSERT_LT(++steps, 1000000u);
    }
    EXPECT_EQ(x, fin(0));
  }
}

}  // namespace
}  // namespace iml
