/* SPDX-License-Identifier: Apache-2.0 */

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "iml/lower.hpp"
#include "iml/unroll.hpp"

namespace iml {
namespace {

std::vector<std::string> printed(const std::vector<ExprPtr>& xs) {
  std::vector<std::string> out;
  for (const auto& x : xs) out.push_back(pretty(x));
  return out;
}

std::set<std::string> printed_set(const std::vector<ExprPtr>& xs) {
  auto v = printed(xs);
  return {v.begin(), v.end()};
}

TEST(Unroll, CallsOfSameLenGoal) {
  const World& w = World::initial();
  UnrollProblem p(lower_goal(w, test::goal(w, "fun l -> List.length (List.map (fun x -> x + 1) l) = List.length l")));
  auto calls = calls_of_term(p.goal, p.recursive);
  EXPECT_EQ(printed_set(calls), (std::set<std::string>{"map1 l", "length_int (map1 l)", "length_int l"}));
  auto v = printed(calls);
  EXPECT_LT(std::find(v.begin(), v.end(), "map1 l"), std::find(v.begin(), v.end(), "length_int (map1 l)"));
}

TEST(Unroll, CallsOfGroundTerms) {
  World w = test::admit_all(test::kFact);
  UnrollProblem p(lower_goal(w, test::goal(w, "fun k -> fact k = 120")));
  EXPECT_EQ(printed(calls_of_term(p.goal, p.recursive)), (std::vector<std::string>{"fact k"}));
  UnrollProblem q(lower_goal(w, test::goal(w, "fun x -> x + 1 > x")));
  EXPECT_TRUE(calls_of_term(q.goal, q.recursive).empty());
}

TEST(Unroll, SubcallsOfFact) {
  World w = test::admit_all(test::kFact);
  UnrollProblem p(lower_goal(w, test::goal(w, "fun k -> fact k = 120")));
  auto subs = subcalls_of_call(p, parse_expr("fact k"), {});
  ASSERT_EQ(subs.size(), 1u);
  EXPECT_EQ(pretty(subs[0].call), "fact (k - 1)");
  EXPECT_EQ(pretty(subs[0].path), "k > 1");
  EXPECT_TRUE(subcalls_of_call(p, parse_expr("fact k"), {p.key(parse_expr("fact (k - 1)"))}).empty());
}

ReachLit lit(const std::string& printed, std::size_t stamp) {
  ReachLit r;
  r.atom = "b_" + printed;
  r.key = printed;
  r.printed = printed;
  r.stamp = stamp;
  return r;
}

TEST(Unroll, PickFrom) {
  ReachLit b1 = lit("f x", 0), b2 = lit("g y", 3), b3 = lit("a z", 3);
  EXPECT_EQ(&pick_from({&b2, &b1}), &b1);
  EXPECT_EQ(&pick_from({&b2}), &b2);
  EXPECT_EQ(&pick_from({&b2, &b3}), &b3);
  EXPECT_EQ(pick_from({&b1, &b2, &b3}, PickPolicy::Lifo).stamp, 3u);
}

TEST(Unroll, NoCallsClosesImmediately) {
  World w = World::initial();
  UnrollProblem p(lower_goal(w, test::goal(w, "fun x -> not (x + 1 > x)")));
  auto out = unroll(p, {});
  EXPECT_EQ(out.kind, UnrollOutcome::Kind::UnsatEmptyCore);
  EXPECT_EQ(out.steps, 0u);
}

TEST(Unroll, FactFiveClosesWithinBudget) {
  World w = test::admit_all(test::kFact);
  UnrollProblem p(lower_goal(w, test::goal(w, "not (fact 5 = 120)")));
  UnrollOptions o;
  o.budget = 10;
  auto out = unroll(p, o);
  EXPECT_EQ(out.kind, UnrollOutcome::Kind::UnsatEmptyCore);
  EXPECT_GE(out.expanded.size(), 4u);
  EXPECT_LE(out.expanded.size(), 6u);
}

TEST(Unroll, LengthThreeInstance) {
  const World& w = World::initial();
  Verdict v = instance(w, test::goal(w, "fun l -> List.length l = 3"));
  ASSERT_EQ(v.kind, Verdict::Kind::Instance);
  EXPECT_TRUE(v.cx.confirmed);
  EXPECT_EQ(value_size(v.cx.bindings.at(0).second), 4u);
  EXPECT_GE(v.steps, 4u);
}

TEST(Unroll, ProgressIsMonotone) {
  World w = test::admit_all(test::kFact);
  UnrollProblem p(lower_goal(w, test::goal(w, "fun l k -> List.length (List.rev l) = k && fact k = 6")));
  std::vector<std::string> lines;
  UnrollOptions o;
  o.budget = 40;
  o.trace = [&](const std::string& l) { lines.push_back(l); };
  auto out = unroll(p, o);
  ASSERT_EQ(out.kind, UnrollOutcome::Kind::Sat);
  std::set<std::string> seen;
  for (const auto& e : out.expanded) EXPECT_TRUE(seen.insert(p.key(e)).second) << pretty(e);
  for (const auto& e : out.pending) EXPECT_FALSE(seen.count(p.key(e))) << pretty(e);
  EXPECT_EQ(out.steps, out.expanded.size());
  for (std::size_t i = 0; i < lines.size(); ++i)
    EXPECT_EQ(lines[i].rfind("unroll step " + std::to_string(i) + ":", 0), 0u) << lines[i];
}

TEST(Unroll, BudgetExhaustion) {
  const World& w = World::initial();
  UnrollOptions o;
  o.budget = 3;
  Verdict v = verify(w, test::goal(w, "fun l -> List.rev (List.rev l) = l"), o);
  EXPECT_EQ(v.kind, Verdict::Kind::Unknown);
  EXPECT_EQ(v.steps, 3u);
  EXPECT_FALSE(v.reason.empty());
}

TEST(Verify, Examples) {
  const World& w = World::initial();
  Verdict rev = verify(w, test::goal(w, "fun l -> List.rev l = l"));
  ASSERT_EQ(rev.kind, Verdict::Kind::Refuted);
  EXPECT_TRUE(rev.cx.confirmed);
  const ValuePtr& l = rev.cx.bindings.at(0).second;
  ASSERT_EQ(value_size(l), 3u);
  EXPECT_FALSE(value_equal(l->elems[0], l->elems[1]->elems[0]));
  EXPECT_EQ(verify(w, test::goal(w, "fun x -> x = x")).kind, Verdict::Kind::Proved);
  UnrollOptions small;
  small.budget = 5;
  EXPECT_EQ(verify(w, test::goal(w, "fun l -> List.length (List.map (fun x -> x + 1) l) = List.length l"), small).kind,
            Verdict::Kind::Unknown);
}

TEST(Instance, Examples) {
  const World& w = World::initial();
  Verdict sq = instance(w, test::goal(w, "fun x -> x * x = 49"));
  ASSERT_EQ(sq.kind, Verdict::Kind::Instance);
  BigInt x = sq.cx.bindings.at(0).second->i;
  EXPECT_TRUE(x == 7 || x == -7);
  EXPECT_EQ(instance(w, test::goal(w, "fun b -> b && not b")).kind, Verdict::Kind::NoInstance);
}

const char* kGate = R"(
let rec down x = if x <= 0 then 1 else down (x - 1)
let rec len l = match l with [] -> 0 | _ :: t -> 1 + len t
let rec gate n x l = if n <= 0 then down x = 0 || len l = 2 else gate (n - 1) x l
)";

TEST(Unroll, FifoIsFairWhereLifoStarves) {
  World w = test::admit_all(kGate);
  ExprPtr g = test::goal(w, "fun x l -> gate 0 x l");
  UnrollOptions fifo;
  fifo.budget = 30;
  Verdict a = instance(w, g, fifo);
  ASSERT_EQ(a.kind, Verdict::Kind::Instance);
  EXPECT_TRUE(a.cx.confirmed);
  UnrollOptions lifo = fifo;
  lifo.pick = PickPolicy::Lifo;
  EXPECT_EQ(instance(w, g, lifo).kind, Verdict::Kind::Unknown);
}

// Within a small domain, bounded verdicts never contradict exhaustive evaluation.
TEST(Verify, AgreesWithEnumeration) {
  World w = test::admit_all(test::kFact);
  const std::vector<std::string> goals = {
      "fun x -> fact x >= 1", "fun x -> fact x > x", "fun x y -> x * y = y * x", "fun x -> x * x <> 2",
      "fun x -> fact x <> 24", "fun x y -> x + y > x", "fun x -> (x > 2) ==> fact x > 2 * x",
  };
  for (const auto& text : goals) {
    ExprPtr g = test::goal(w, text);
    bool counter = false;
    Evaluator ev(w.table);
    ValuePtr fn = ev.eval(g);
    std::size_t arity = g->type->kind == Type::Kind::Arrow && g->type->args[1]->kind == Type::Kind::Arrow ? 2 : 1;
    for (int a = -6; a <= 6 && !counter; ++a)
      for (int b = -6; b <= (arity == 2 ? 6 : -6) && !counter; ++b) {
        std::vector<ValuePtr> args{int_value(a)};
        if (arity == 2) args.push_back(int_value(b));
        counter = !ev.apply(fn, args)->b;
      }
    UnrollOptions o;
    o.budget = 15;
    Verdict v = verify(w, g, o);
    if (counter) EXPECT_NE(v.kind, Verdict::Kind::Proved) << text;
    if (v.kind == Verdict::Kind::Refuted) EXPECT_TRUE(v.cx.confirmed) << text;
    if (!counter) EXPECT_NE(v.kind, Verdict::Kind::Refuted) << text;
  }
}

}  // namespace
}  // namespace iml
