/* SPDX-License-Identifier: Apache-2.0 */

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "iml/ordinal.hpp"

namespace iml {
namespace {

const char* kLen = "let rec len l = match l with [] -> 0 | _ :: t -> 1 + len t\n";

class DefnTest : public ::testing::Test {
 protected:
  World w = test::admit_all(std::string(test::kAck) + test::kLeftPad + kLen);
};

TEST_F(DefnTest, AckCalls) {
  const FunDef& f = test::fun(w, "ack");
  ASSERT_EQ(f.rec_calls.size(), 3u);
  EXPECT_EQ(pretty(f.rec_calls[0].call), "ack (m - 1) 1");
  EXPECT_EQ(pretty(f.rec_calls[1].call), "ack m (n - 1)");
  EXPECT_EQ(pretty(f.rec_calls[2].call), "ack (m - 1) (ack m (n - 1))");
  ASSERT_EQ(f.rec_calls[0].guard.size(), 2u);
  EXPECT_EQ(pretty(f.rec_calls[0].guard[1]), "n <= 0");
}

TEST_F(DefnTest, LeftPadCallUnderNegatedTest) {
  const FunDef& f = test::fun(w, "left_pad");
  ASSERT_EQ(f.rec_calls.size(), 1u);
  ASSERT_EQ(f.rec_calls[0].guard.size(), 1u);
  EXPECT_EQ(pretty(f.rec_calls[0].guard[0]), "not (List.length xs >= n)");
}

TEST_F(DefnTest, Measures) {
  const FunDef& ack = test::fun(w, "ack");
  ASSERT_TRUE(ack.measure);
  EXPECT_EQ(ack.measure->kind, MeasureSpec::Kind::AdmLex);
  EXPECT_EQ(pretty(ack.measure->expr), "Ordinal.pair (Ordinal.of_int m) (Ordinal.of_int n)");
  EXPECT_EQ(test::fun(w, "left_pad").measure->kind, MeasureSpec::Kind::Explicit);
  const FunDef& len = test::fun(w, "len");
  EXPECT_EQ(len.measure->kind, MeasureSpec::Kind::Structural);
  EXPECT_EQ(len.measure->param_index, 0u);
}

TEST_F(DefnTest, EveryVcCertified) {
  for (const char* n : {"ack", "left_pad", "len"}) {
    const FunDef& f = test::fun(w, n);
    EXPECT_EQ(f.vcs.size(), f.rec_calls.size()) << n;
    for (const auto& vc : f.vcs) EXPECT_FALSE(vc.certificate.empty()) << to_string(vc);
  }
  EXPECT_EQ(test::fun(w, "len").vcs.at(0).certificate, "structural");
  EXPECT_EQ(test::fun(w, "ack").vcs.at(2).certificate, "proved");
}

TEST(Admission, LoopRejected) {
  try {
    test::admit_all("let rec loop x = loop x");
    FAIL();
  } catch (const AdmissionError& e) {
    EXPECT_EQ(e.kind(), AdmissionError::Kind::TerminationUnproved);
    EXPECT_EQ(e.name(), "loop");
  }
}

TEST(Admission, WrongMeasureRejected) {
  EXPECT_THROW(test::admit_all("let rec f x = if x <= 0 then 0 else f (x - 1)\n[@@measure Ordinal.of_int (0 - x)]"),
               AdmissionError);
  EXPECT_THROW(test::admit_all("let rec ack m n =\n  if m <= 0 then n + 1\n  else if n <= 0 then ack (m - 1) 1\n"
                               "  else ack (m - 1) (ack m (n - 1))\n[@@adm n, m]"),
               AdmissionError);
}

TEST(Admission, UnprovedVcsNeedAProver) {
  World w = World::initial();
  EXPECT_THROW(admit(parse_module(test::kAck).decls.at(0), w, AdmitConfig{}), AdmissionError);
  EXPECT_NO_THROW(admit(parse_module(kLen).decls.at(0), w, AdmitConfig{}));
}

TEST(Admission, WorldGrowsMonotonically) {
  World a = test::admit_all(test::kAck);
  World b = test::admit_all(std::string(test::kFact) + "let g x = ack 1 x", a);
  for (const auto& [name, f] : a.funs) {
    ASSERT_TRUE(b.funs.count(name)) << name;
    EXPECT_EQ(b.funs.at(name), f) << name;
  }
  ASSERT_GE(b.order.size(), a.order.size());
  EXPECT_TRUE(std::equal(a.order.begin(), a.order.end(), b.order.begin()));
  EXPECT_TRUE(a.find_fun("g") == nullptr);
  EXPECT_TRUE(b.find_fun("g") != nullptr);
}

TEST(Admission, FailedAdmissionLeavesWorldUnchanged) {
  World a = test::admit_all(test::kAck);
  try {
    test::admit_all("let rec loop x = loop x", a);
  } catch (const AdmissionError&) {
  }
  EXPECT_TRUE(a.find_fun("loop") == nullptr);
}

// At every reachable call the measure, evaluated directly as an ordinal, strictly drops.
TEST_F(DefnTest, MeasureDecreasesOnGroundCalls) {
  std::mt19937 rng(5);
  for (const char* n : {"ack", "left_pad"}) {
    const FunDef& f = test::fun(w, n);
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
      Evaluator ev(w.table);
      Bindings formals;
      TypePtr t = default_type_vars(f.scheme.body);
      for (const auto& p : f.decl.params) {
        formals[p.name] = test::random_value(t->args[0], w.env, rng, 3, 0, std::string(n) == "ack" ? 3 : 6);
        t = t->args[1];
      }
      ValuePtr here = ev.eval(f.measure->expr, formals);
      ASSERT_EQ(here->kind, Value::Kind::Ordinal);
      for (const auto& c : f.rec_calls) {
        bool guarded = true;
        for (const auto& g : c.guard) guarded = guarded && ev.eval(g, formals)->b;
        if (!guarded) continue;
        Bindings actuals;
        for (std::size_t k = 0; k < c.args.size(); ++k) actuals[f.decl.params[k].name] = ev.eval(c.args[k], formals);
        ValuePtr there = ev.eval(f.measure->expr, actuals);
        EXPECT_TRUE(ordinal::lt(there->ord, here->ord)) << pretty(c.call);
        ++checked;
      }
    }
    EXPECT_GT(checked, 50) << n;
  }
}

TEST(Rules, OrientationChecks) {
  Rule r = rule_of_theorem(parse_module("theorem t x = List.rev (List.rev x) = x").decls.at(0).funs.at(0));
  EXPECT_EQ(pretty(r.lhs), "List.rev (List.rev x)");
  EXPECT_EQ(pretty(r.rhs), "x");
  World w = test::admit_all("theorem u x = x = x\ntheorem v x y = x + 0 = y\ntheorem p l = List.length l >= 0");
  EXPECT_THROW(install_rule(w, "u"), AdmissionError);
  EXPECT_THROW(install_rule(w, "v"), AdmissionError);
  World after = install_rule(w, "p");
  ASSERT_EQ(after.rules.size(), w.rules.size() + 1);
  EXPECT_EQ(pretty(after.rules.back()->rhs), "true");
  EXPECT_TRUE(after.theorems.at("p")->proved);
  EXPECT_FALSE(w.theorems.at("p")->proved);
}

}  // namespace
}  // namespace iml
