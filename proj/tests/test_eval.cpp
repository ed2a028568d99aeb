/* SPDX-License-Identifier: Apache-2.0 */

#include <gtest/gtest.h>

#include "helpers.hpp"

namespace iml {
namespace {

ValuePtr list(std::vector<long> xs) {
  ValuePtr r = construct_value("Nil", {});
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) r = construct_value("Cons", {int_value(BigInt(*it)), r});
  return r;
}

ValuePtr i(long n) { return int_value(BigInt(n)); }

class EvalTest : public ::testing::Test {
 protected:
  World w = test::admit_all(std::string(test::kAck) + test::kLeftPad + test::kFact);
};

TEST_F(EvalTest, Ack) {
  Evaluator ev(w.table);
  EXPECT_TRUE(value_equal(ev.call("ack", {i(2), i(3)}), i(9)));
  EXPECT_TRUE(value_equal(ev.call("ack", {i(0), i(0)}), i(1)));
  EXPECT_TRUE(value_equal(ev.call("ack", {i(3), i(3)}), i(61)));
}

TEST_F(EvalTest, LeftPad) {
  Evaluator ev(w.table);
  ValuePtr r = ev.call("left_pad", {i(0), i(5), list({1, 2})});
  EXPECT_TRUE(value_equal(r, list({0, 0, 0, 1, 2})));
  EXPECT_EQ(value_to_string(r), "[0; 0; 0; 1; 2]");
  EXPECT_TRUE(value_equal(ev.call("left_pad", {i(0), i(1), list({1, 2})}), list({1, 2})));
}

TEST_F(EvalTest, FactBigIntegers) {
  Evaluator ev(w.table);
  EXPECT_EQ(value_to_string(ev.call("fact", {i(25)})), "15511210043330985984000000");
  EXPECT_TRUE(value_equal(ev.call("fact", {i(-3)}), i(1)));
}

TEST_F(EvalTest, FuelExhaustion) {
  Evaluator ev(w.table, 1000);
  try {
    ev.call("ack", {i(3), i(6)});
    FAIL();
  } catch (const EvalError& e) {
    EXPECT_EQ(e.kind(), EvalError::Kind::FuelExhausted);
  }
}

TEST_F(EvalTest, ValueExprRoundTrip) {
  Evaluator ev(w.table);
  for (const ValuePtr& v : {list({}), list({3, -1}), tuple_value({i(1), bool_value(true)})})
    EXPECT_TRUE(value_equal(ev.eval(value_to_expr(v)), v)) << value_to_string(v);
  EXPECT_EQ(value_size(list({1, 2, 3})), 4u);
}

TEST_F(EvalTest, CheckCxConfirmsFalsifyingAssignment) {
  ExprPtr g = test::goal(w, "fun l -> List.rev l = l");
  Counterexample cx{{{"l", list({2, 3})}}};
  EXPECT_TRUE(check_cx(w.table, g, cx, Polarity::Falsifies));
  EXPECT_TRUE(cx.confirmed);
}

TEST_F(EvalTest, CheckCxRejectsStaleAssignment) {
  ExprPtr g = test::goal(w, "fun l -> List.rev l = l");
  Counterexample cx{{{"l", list({7, 7})}}};
  std::string why;
  EXPECT_FALSE(check_cx(w.table, g, cx, Polarity::Falsifies, &why));
  EXPECT_FALSE(cx.confirmed);
}

TEST_F(EvalTest, CheckCxInstancePolarity) {
  ExprPtr g = test::goal(w, "fun x -> fact x = 120");
  Counterexample yes{{{"x", i(5)}}};
  Counterexample no{{{"x", i(4)}}};
  EXPECT_TRUE(check_cx(w.table, g, yes, Polarity::Satisfies));
  EXPECT_FALSE(check_cx(w.table, g, no, Polarity::Satisfies));
}

TEST_F(EvalTest, CheckCxMissingBindingIsUnconfirmed) {
  ExprPtr g = test::goal(w, "fun x y -> x = y");
  Counterexample cx{{{"x", i(1)}}};
  std::string why;
  EXPECT_FALSE(check_cx(w.table, g, cx, Polarity::Falsifies, &why));
  EXPECT_FALSE(why.empty());
}

}  // namespace
}  // namespace iml
