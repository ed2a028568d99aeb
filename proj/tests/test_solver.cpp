/* SPDX-License-Identifier: Apache-2.0 */

#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "helpers.hpp"
#include "iml/lower.hpp"
#include "iml/sexpr.hpp"
#include "iml/solver.hpp"

namespace iml {
namespace {

TEST(SExprs, RoundTrip) {
  for (const char* s : {"(a b (c d) \"x y\" |q r|)", "()", "atom", "(model (define-fun x () Int (- 3)))"}) {
    SExpr e = parse_sexpr(s);
    EXPECT_EQ(to_string(parse_sexpr(to_string(e))), to_string(e)) << s;
  }
  EXPECT_EQ(parse_sexprs("a (b) c").size(), 3u);
  EXPECT_THROW(parse_sexpr("(a b"), SExprError);
  EXPECT_EQ(complete_sexpr_length("(a (b)) tail"), 7u);
  EXPECT_EQ(complete_sexpr_length("(a (b)"), 0u);
  EXPECT_EQ(smt_quote("a b"), "|a b|");
  EXPECT_EQ(smt_quote("List.map"), "List.map");
  EXPECT_EQ(smt_quote("x"), "x");
}

TEST(Solver, EmptyScriptIsSat) {
  SolverSession s;
  EXPECT_TRUE(s.alive());
  EXPECT_EQ(s.check_sat_assuming({}).kind, SolverVerdict::Kind::Sat);
}

TEST(Solver, BogusCommand) {
  EXPECT_THROW(SolverSession(SolverConfig{"/nonexistent/solver-binary --in", 1000}), SolverStartError);
}

TEST(Solver, IntegerGapUnsatWithEmptyCore) {
  SolverSession s;
  s.command("(declare-const x Int)");
  s.assert_formula("(> x 0)");
  s.assert_formula("(< x 1)");
  auto v = s.check_sat_assuming({});
  EXPECT_EQ(v.kind, SolverVerdict::Kind::Unsat);
  EXPECT_TRUE(v.core.empty());
}

TEST(Solver, AssumptionCore) {
  SolverSession s;
  s.command("(declare-const a Bool)");
  s.command("(declare-const b Bool)");
  s.assert_formula("(=> a false)");
  auto v = s.check_sat_assuming({"a", "b"});
  ASSERT_EQ(v.kind, SolverVerdict::Kind::Unsat);
  EXPECT_EQ(v.core, (std::vector<std::string>{"a"}));
  EXPECT_EQ(s.check_sat_assuming({"b"}).kind, SolverVerdict::Kind::Sat);
}

TEST(Solver, ModelValue) {
  SolverSession s;
  s.command("(declare-const x Int)");
  s.assert_formula("(>= x 3)");
  ASSERT_EQ(s.check_sat_assuming({}).kind, SolverVerdict::Kind::Sat);
  auto m = s.get_model();
  ASSERT_TRUE(m.count("x"));
  auto vals = s.get_value({"x"});
  ASSERT_EQ(vals.size(), 1u);
}

TEST(Solver, TimeoutGivesUnknown) {
  SolverSession s(SolverConfig{default_solver_command(), 300});
  s.command("(declare-const x Int)");
  s.command("(declare-const y Int)");
  s.command("(declare-const z Int)");
  s.assert_formula("(and (> x 1) (> y 1) (> z 1) (= (+ (* x x x) (* y y y)) (* z z z)))");
  auto t0 = std::chrono::steady_clock::now();
  auto v = s.check_sat_assuming({});
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(v.kind, SolverVerdict::Kind::Unknown);
  EXPECT_LT(ms, 5000);
}

// Every Unsat core, re-asserted on its own, is still Unsat.
TEST(Solver, CoresAreSound) {
  std::mt19937 rng(8);
  int unsat = 0;
  for (int round = 0; round < 40; ++round) {
    std::vector<std::string> clauses, lits;
    for (int i = 0; i < 6; ++i) lits.push_back("p" + std::to_string(i));
    for (int i = 0; i < 8; ++i) {
      std::string c = "(or";
      for (int k = 0; k < 2; ++k) {
        std::string l = lits[rng() % lits.size()];
        c += rng() % 2 ? " " + l : " (not " + l + ")";
      }
      clauses.push_back(c + ")");
    }
    std::vector<std::string> assumptions;
    for (const auto& l : lits)
      if (rng() % 2) assumptions.push_back(rng() % 2 ? l : "(not " + l + ")");
    std::vector<std::string> names;
    SolverSession s;
    for (const auto& l : lits) s.command("(declare-const " + l + " Bool)");
    for (const auto& c : clauses) s.assert_formula(c);
    for (std::size_t i = 0; i < assumptions.size(); ++i) {
      names.push_back("a" + std::to_string(i));
      s.command("(declare-const " + names.back() + " Bool)");
      s.assert_formula("(= " + names.back() + " " + assumptions[i] + ")");
    }
    auto v = s.check_sat_assuming(names);
    if (v.kind != SolverVerdict::Kind::Unsat) continue;
    ++unsat;
    for (const auto& c : v.core) EXPECT_NE(std::find(names.begin(), names.end(), c), names.end()) << c;
    SolverSession again;
    for (const auto& l : lits) again.command("(declare-const " + l + " Bool)");
    for (const auto& c : clauses) again.assert_formula(c);
    for (const auto& c : v.core) again.assert_formula(assumptions[std::stoul(c.substr(1))]);
    EXPECT_EQ(again.check_sat_assuming({}).kind, SolverVerdict::Kind::Unsat);
  }
  EXPECT_GT(unsat, 5);
}

TEST(Encoding, ListDatatypeAndDecode) {
  const World& w = World::initial();
  GroundProgram gp = lower_goal(w, test::goal(w, "fun l (p : int * bool) -> List.length l = 1 && (match p with (_, b) -> b)"));
  SmtEncoding enc(gp);
  std::string decls = enc.datatype_declarations();
  EXPECT_NE(decls.find("Nil_int"), std::string::npos);
  EXPECT_NE(decls.find("Cons_int"), std::string::npos);
  SolverSession s;
  s.command(decls);
  for (const auto& [name, t] : gp.vars) s.command(enc.declare_const(name, t));
  s.assert_formula("(= " + enc.symbol("l") + " (" + enc.symbol("Cons_int") + " 0 " + enc.symbol("Nil_int") + "))");
  ASSERT_EQ(s.check_sat_assuming({}).kind, SolverVerdict::Kind::Sat);
  auto model = s.get_model();
  auto l = enc.decode(model.at(enc.symbol("l")));
  ASSERT_TRUE(l);
  EXPECT_EQ(value_to_string(*l), "[0]");  // decoded back to source constructors
  auto p = enc.decode(model.at(enc.symbol("p")));
  ASSERT_TRUE(p);
  ASSERT_EQ((*p)->kind, Value::Kind::Tuple);
  EXPECT_EQ((*p)->elems.size(), 2u);
}

}  // namespace
}  // namespace iml
