/* SPDX-License-Identifier: Apache-2.0 */

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "iml/template.hpp"

namespace iml {
namespace {

using Triple = std::tuple<std::string, std::string, std::string>;

std::set<Triple> triples(const Template& t) {
  std::set<Triple> out;
  for (const auto& e : t.entries) {
    std::string args;
    for (const auto& a : e.args) args += (args.empty() ? "" : ", ") + pretty(a);
    out.emplace(e.callee, args, pretty(conjoin(e.path)));
  }
  return out;
}

FunDecl first_fun(const char* src) { return parse_module(src).decls.at(0).funs.at(0); }

TEST(Template, Fact) {
  EXPECT_EQ(triples(template_of(first_fun(test::kFact))), (std::set<Triple>{{"fact", "x - 1", "x > 1"}}));
}

TEST(Template, GuardedCallsOfF) {
  Template t = template_of(first_fun("let f x = 1 + (if g 0 then h (g x) else h 42)"));
  EXPECT_EQ(triples(t), (std::set<Triple>{{"g", "0", "true"},
                                          {"h", "g x", "g 0 = true"},
                                          {"g", "x", "g 0 = true"},
                                          {"h", "42", "g 0 = false"}}));
}

TEST(Template, NoCallsNoEntries) {
  EXPECT_TRUE(template_of(first_fun("let k x = x + 1")).entries.empty());
  EXPECT_TRUE(instantiate(template_of(first_fun("let k x = x + 1")), {mk_var("y")}).empty());
}

TEST(Template, ShortCircuitIsExact) {
  Template t = template_of(first_fun("let rec e x = if x > 0 && e (x - 1) then true else false"));
  EXPECT_EQ(triples(t), (std::set<Triple>{{"e", "x - 1", "x > 0"}}));
}

TEST(Template, InstantiateFact) {
  auto calls = instantiate(template_of(first_fun(test::kFact)), {mk_var("y")});
  ASSERT_EQ(calls.size(), 1u);
  EXPECT_EQ(pretty(calls[0].call), "fact (y - 1)");
  EXPECT_EQ(pretty(calls[0].path), "y > 1");
}

TEST(Template, InstantiateAck) {
  auto calls = instantiate(template_of(first_fun(test::kAck)), {mk_var("m0"), mk_var("n0")});
  ASSERT_EQ(calls.size(), 3u);
  std::set<std::string> got;
  for (const auto& c : calls) {
    got.insert(pretty(c.call));
    auto fv = free_vars(c.path);
    EXPECT_FALSE(fv.count("m") || fv.count("n"));
  }
  EXPECT_EQ(got, (std::set<std::string>{"ack (m0 - 1) 1", "ack m0 (n0 - 1)", "ack (m0 - 1) (ack m0 (n0 - 1))"}));
}

// Calls actually performed while evaluating a body once, with their argument values.
class Tracer {
 public:
  Tracer(const World& w, std::set<std::string> callees) : w_(w), callees_(std::move(callees)) {}

  std::set<std::string> executed;

  void run(const ExprPtr& e, const Bindings& env) {
    Evaluator ev(w_.table);
    switch (e->kind) {
      case Expr::Kind::If:
        run(e->args[0], env);
        run(ev.eval(e->args[0], env)->b ? e->args[1] : e->args[2], env);
        return;
      case Expr::Kind::Bin:
        if (e->op == BinOp::And || e->op == BinOp::Or) {
          run(e->args[0], env);
          bool l = ev.eval(e->args[0], env)->b;
          if (l == (e->op == BinOp::And)) run(e->args[1], env);
          return;
        }
        break;
      case Expr::Kind::Lambda:
        return;
      case Expr::Kind::App: {
        for (const auto& a : e->args) run(a, env);
        std::string name = e->args[0]->kind == Expr::Kind::Var ? e->args[0]->name : "";
        if (callees_.count(name)) {
          std::string key = name;
          for (std::size_t i = 1; i < e->args.size(); ++i) key += " " + value_to_string(ev.eval(e->args[i], env));
          executed.insert(key);
        }
        return;
      }
      default:
        break;
    }
    for (const auto& c : children_of(e)) run(c, env);
  }

 private:
  const World& w_;
  std::set<std::string> callees_;
};

TEST(Template, CoverageAndExactnessOnRandomInputs) {
  World w = test::admit_all(std::string(test::kAck) + test::kLeftPad + test::kFact +
                            "type tree = Leaf | Node of tree * int * tree\n"
                            "let rec size t = match t with Leaf -> 0 | Node (l, _, r) -> size l + 1 + size r\n"
                            "let rec sum_to n acc = let m = n - 1 in if n <= 0 || acc > 100 then acc else sum_to m (acc + n)\n");
  std::mt19937 rng(3);
  for (const char* name : {"ack", "left_pad", "fact", "size", "sum_to"}) {
    const FunDef& f = test::fun(w, name);
    Template t = template_of(f.decl);
    std::set<std::string> callees;
    for (const auto& e : t.entries) callees.insert(e.callee);
    ExprPtr body = desugar(f.decl.body);
    for (int i = 0; i < 500; ++i) {
      Bindings env;
      TypePtr ty = default_type_vars(f.scheme.body);
      for (const auto& p : f.decl.params) {
        env[p.name] = test::random_value(ty->args[0], w.env, rng, 3, -2, 3);
        ty = ty->args[1];
      }
      Tracer tr(w, callees);
      tr.run(body, env);
      std::set<std::string> predicted;
      Evaluator ev(w.table);
      for (const auto& e : t.entries) {
        if (!ev.eval(conjoin(e.path), env)->b) continue;
        std::string key = e.callee;
        for (const auto& a : e.args) key += " " + value_to_string(ev.eval(a, env));
        predicted.insert(key);
      }
      ASSERT_EQ(tr.executed, predicted) << name;
    }
  }
}

}  // namespace
}  // namespace iml
