/* SPDX-License-Identifier: Apache-2.0 */

#include <gtest/gtest.h>

#include "helpers.hpp"

namespace iml {
namespace {

World with_rev_rule() {
  World w = test::admit_all("theorem rev_rev x = List.rev (List.rev x) = x");
  return install_rule(w, "rev_rev");
}

TEST(Simplify, RuleRewritesTwice) {
  World w = with_rev_rule();
  Goal g = simplify(make_goal(test::goal(w, "fun (a : int list) -> List.rev (List.rev (List.rev a)) = List.rev a")), w);
  EXPECT_EQ(pretty(g.concl), "true");
  EXPECT_GE(w.rules.back()->hits, 1u);
}

TEST(Simplify, GroundSubtermsFold) {
  World w = test::admit_all(test::kAck);
  Goal g = simplify(make_goal(test::goal(w, "fun x -> ack 1 1 = x")), w);
  EXPECT_EQ(pretty(g.concl), "3 = x");
}

TEST(Simplify, TrueIsFixed) {
  const World& w = World::initial();
  EXPECT_EQ(pretty(simplify(make_goal(test::goal(w, "true")), w).concl), "true");
}

// Simplification preserves meaning: compare on random inputs.
TEST(Simplify, AgreesWithEvaluation) {
  World w = test::admit_all(std::string(test::kFact) + "let sq x = x * x\n", with_rev_rule());
  const std::vector<std::string> goals = {
      "fun (a : int list) b -> List.rev (List.rev a) = b || List.length a > 2",
      "fun x y -> if x > 2 then fact x > y else sq x = y",
      "fun (a : int list) x -> List.length (x :: a) = List.length a + 1 && sq x >= x",
  };
  std::mt19937 rng(21);
  for (const auto& text : goals) {
    ExprPtr before = test::goal(w, text);
    ExprPtr after = close_goal(simplify(make_goal(before), w), w);
    for (int i = 0; i < 100; ++i) {
      std::vector<ValuePtr> args;
      TypePtr t = before->type;
      while (t->kind == Type::Kind::Arrow) {
        args.push_back(test::random_value(t->args[0], w.env, rng, 3, -4, 4));
        t = t->args[1];
      }
      Evaluator ev(w.table);
      EXPECT_EQ(ev.apply(ev.eval(before), args)->b, ev.apply(ev.eval(after), args)->b) << text;
    }
  }
}

TEST(Matching, BindsVariables) {
  std::vector<std::pair<std::string, ExprPtr>> sub;
  EXPECT_TRUE(match_term(parse_expr("f (g x) y"), parse_expr("f (g (h 1)) 2"), {"x", "y"}, sub));
  ASSERT_EQ(sub.size(), 2u);
  sub.clear();
  EXPECT_FALSE(match_term(parse_expr("f x x"), parse_expr("f 1 2"), {"x"}, sub));
}

TEST(Induction, SameLen) {
  const World& w = World::initial();
  auto s = synthesize_induction(
      make_goal(test::goal(w, "fun l -> List.length (List.map (fun x -> x + 1) l) = List.length l")), w);
  ASSERT_TRUE(s);
  ASSERT_EQ(s->cases.size(), 2u);
  EXPECT_TRUE(s->cases[0].ihs.empty());
  EXPECT_NE(pretty(s->cases[0].concl).find("[]"), std::string::npos);
  ASSERT_EQ(s->cases[1].ihs.size(), 1u);
  EXPECT_NE(pretty(s->cases[1].ihs[0]).find("tl"), std::string::npos);
}

TEST(Induction, NoSchemeForBareInt) {
  const World& w = World::initial();
  EXPECT_FALSE(synthesize_induction(make_goal(test::goal(w, "fun x -> x + 1 > x")), w));
}

TEST(Induction, AckMirrorsTemplate) {
  World w = test::admit_all(test::kAck);
  auto s = synthesize_induction(make_goal(test::goal(w, "fun m n -> ack m n > n")), w);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->fun, "ack");
  ASSERT_EQ(s->cases.size(), 3u);
  std::size_t ihs = 0;
  for (const auto& c : s->cases) ihs += c.ihs.size();
  EXPECT_EQ(ihs, 3u);
  EXPECT_TRUE(s->cases[0].ihs.empty());
}

TEST(Induction, StructuralFallback) {
  const World& w = World::initial();
  auto s = synthesize_induction(make_goal(test::goal(w, "fun (l : int list) -> List.length l >= 0")), w);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->cases.size(), 2u);
}

TEST(Generalize, KeepsSoundGeneralization) {
  const World& w = World::initial();
  Goal g = generalize(make_goal(test::goal(w, "fun xs -> List.append (List.rev xs) [] = List.rev xs")), w);
  EXPECT_EQ(pretty(g.concl).find("List.rev"), std::string::npos);
}

TEST(Generalize, FilterRejectsFalseGeneralization) {
  World w = test::admit_all("let sq x = x * x\n");
  Goal g = make_goal(test::goal(w, "fun x -> sq x + sq x >= 0"));
  EXPECT_EQ(to_string(generalize(g, w)), to_string(g));
}

TEST(Generalize, NothingRepeated) {
  const World& w = World::initial();
  Goal g = make_goal(test::goal(w, "fun x y -> x + y = y + x"));
  EXPECT_EQ(to_string(generalize(g, w)), to_string(g));
}

TEST(Prove, SameLenByInduction) {
  const World& w = World::initial();
  auto r = prove(test::goal(w, "fun l -> List.length (List.map (fun x -> x + 1) l) = List.length l"), w);
  EXPECT_EQ(r.kind, ProofResult::Kind::Proved) << r.reason;
}

TEST(Prove, RevRefuted) {
  const World& w = World::initial();
  auto r = prove(test::goal(w, "fun l -> List.rev l = l"), w);
  ASSERT_EQ(r.kind, ProofResult::Kind::Refuted);
  EXPECT_TRUE(r.cx.confirmed);
}

TEST(Prove, TrueWithEmptyTrace) {
  const World& w = World::initial();
  auto r = prove(test::goal(w, "true"), w);
  EXPECT_EQ(r.kind, ProofResult::Kind::Proved);
  EXPECT_TRUE(r.trace.empty());
}

TEST(Prove, RevRevWithHelperLemma) {
  World w = test::admit_all(
      "theorem rev_append l x = List.rev (List.append l [x]) = x :: List.rev l\n");
  ASSERT_EQ(prove(theorem_goal(*w.theorems.at("rev_append")), w).kind, ProofResult::Kind::Proved);
  w = install_rule(w, "rev_append");
  EXPECT_EQ(prove(test::goal(w, "fun (l : int list) -> List.rev (List.rev l) = l"), w).kind, ProofResult::Kind::Proved);
}

TEST(Prove, DepthCapGivesUp) {
  World w = test::admit_all(std::string(test::kAck));
  WaterfallConfig cfg;
  cfg.induct_depth = 0;
  auto r = prove(test::goal(w, "fun m n -> ack m n > n"), w, cfg);
  EXPECT_EQ(r.kind, ProofResult::Kind::GaveUp);
}

}  // namespace
}  // namespace iml
