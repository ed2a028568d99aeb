/* SPDX-License-Identifier: Apache-2.0 */

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "iml/lower.hpp"

namespace iml {
namespace {

const char* kSameLen = "fun l -> List.length (List.map (fun x -> x + 1) l) = List.length l";

std::string squash(const std::string& s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

TEST(Lower, SameLenGolden) {
  const World& w = World::initial();
  GroundProgram gp = lower_goal(w, test::goal(w, kSameLen));
  ASSERT_EQ(gp.types.size(), 1u);
  EXPECT_EQ(gp.types[0].name, "int_list");
  ASSERT_EQ(gp.types[0].ctors.size(), 2u);
  EXPECT_EQ(gp.types[0].ctors[0].name, "Nil_int");
  EXPECT_EQ(gp.types[0].ctors[1].name, "Cons_int");
  ASSERT_EQ(gp.funs.size(), 3u);
  EXPECT_EQ(gp.funs[0].name, "length_int");
  EXPECT_EQ(gp.funs[1].name, "map_lambda0");
  EXPECT_EQ(gp.funs[2].name, "map1");
  EXPECT_FALSE(gp.funs[1].recursive);
  EXPECT_TRUE(gp.funs[2].recursive);
  EXPECT_TRUE(alpha_equal(gp.funs[1].body, parse_expr("x + 1")));
  EXPECT_TRUE(alpha_equal(gp.funs[2].body,
                          parse_expr("match l with Nil_int -> Nil_int | Cons_int (x, tl) -> Cons_int (map_lambda0 x, map1 tl)")));
  EXPECT_TRUE(alpha_equal(gp.funs[0].body,
                          parse_expr("match l with Nil_int -> 0 | Cons_int (_, tl) -> 1 + length_int tl")));
  EXPECT_TRUE(alpha_equal(gp.goal, parse_expr("length_int (map1 l) = length_int l")));
  EXPECT_EQ(squash(pretty(gp)).substr(0, 52), "type int_list = Nil_int | Cons_int of int * int_list");
  EXPECT_EQ(gp.fun_source.at("map1"), "List.map");
  EXPECT_EQ(gp.type_source.at("int_list"), "list");
}

TEST(Lower, Deterministic) {
  const World& w = World::initial();
  EXPECT_EQ(pretty(lower_goal(w, test::goal(w, kSameLen))), pretty(lower_goal(w, test::goal(w, kSameLen))));
}

TEST(Lower, TwoListTypes) {
  const World& w = World::initial();
  GroundProgram gp = lower_goal(w, test::goal(w, "fun (a : int list) (b : bool list) -> List.length a = List.length b"));
  std::set<std::string> types, ctors;
  for (const auto& t : gp.types) {
    types.insert(t.name);
    for (const auto& c : t.ctors) EXPECT_TRUE(ctors.insert(c.name).second) << c.name;
  }
  EXPECT_EQ(types, (std::set<std::string>{"int_list", "bool_list"}));
  std::set<std::string> funs;
  for (const auto& f : gp.funs) EXPECT_TRUE(funs.insert(f.name).second) << f.name;
  EXPECT_EQ(funs.size(), 2u);
}

TEST(Lower, NoTypeParametersOrLambdasRemain) {
  World w = test::admit_all("let incr_all l = List.map (fun x -> x + 1) l\n"
                            "let total l = List.fold_left (fun a b -> a + b) 0 l\n");
  GroundProgram gp = lower_goal(w, test::goal(w, "fun l k -> total (incr_all l) = total l + k"));
  for (const auto& t : gp.types) EXPECT_TRUE(t.params.empty()) << t.name;
  std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& e) {
    EXPECT_NE(e->kind, Expr::Kind::Lambda) << pretty(e);
    for (const auto& c : children_of(e)) walk(c);
  };
  for (const auto& f : gp.funs)
    if (f.body) walk(f.body);
  walk(gp.goal);
}

// Translates a source value into the lowered constructors of ground type `t`.
ValuePtr lower_value(const GroundProgram& gp, const ValuePtr& v, const TypePtr& t) {
  if (v->kind == Value::Kind::Tuple) {
    std::vector<ValuePtr> xs;
    for (std::size_t i = 0; i < v->elems.size(); ++i) xs.push_back(lower_value(gp, v->elems[i], t->args[i]));
    return tuple_value(std::move(xs));
  }
  if (v->kind != Value::Kind::Construct) return v;
  const TypeDecl* d = gp.find_type(t->name);
  if (!d) throw Error("no lowered type " + t->name);
  for (const auto& c : d->ctors)
    if (gp.ctor_source.at(c.name) == v->ctor) {
      std::vector<ValuePtr> args;
      for (std::size_t i = 0; i < c.args.size(); ++i) args.push_back(lower_value(gp, v->elems[i], c.args[i]));
      return construct_value(c.name, std::move(args));
    }
  throw Error("no lowered constructor for " + v->ctor);
}

TEST(Lower, PreservesMeaningOnRandomInputs) {
  World w = test::admit_all(std::string(test::kFact) +
                            "type tree = Leaf | Node of tree * int * tree\n"
                            "let rec size t = match t with Leaf -> 0 | Node (l, _, r) -> size l + 1 + size r\n"
                            "let incr_all l = List.map (fun x -> x + 1) l\n"
                            "let total l = List.fold_left (fun a b -> a + b) 0 l\n");
  const std::vector<std::string> goals = {
      kSameLen,
      "fun l -> total (incr_all l) = total l + List.length l",
      "fun a b -> List.rev (List.append a b) = List.append (List.rev b) (List.rev a)",
      "fun t k -> size t > k || fact k = k",
      "fun (p : bool list) (q : int list) -> List.length p = List.length q",
      "fun l -> List.map (fun x -> x * 2) l = List.rev l",
  };
  std::mt19937 rng(11);
  int runs = 0;
  for (const auto& text : goals) {
    ExprPtr g = test::goal(w, text);
    GroundProgram gp = lower_goal(w, g);
    FunctionTable table;
    for (const auto& f : gp.funs) {
      ASSERT_TRUE(f.body) << f.name;
      auto def = std::make_shared<FunctionDef>();
      def->name = f.name;
      for (const auto& p : f.params) def->params.push_back(p.name);
      def->body = f.body;
      table[f.name] = def;
    }
    for (int i = 0; i < 100; ++i) {
      Evaluator src(w.table), low(table);
      std::vector<ValuePtr> args;
      Bindings lowered;
      TypePtr t = g->type;
      for (const auto& [name, lt] : gp.vars) {
        ValuePtr v = test::random_value(t->args[0], w.env, rng, 3, -3, 3);
        t = t->args[1];
        args.push_back(v);
        lowered[name] = lower_value(gp, v, lt);
      }
      ValuePtr expected = src.apply(src.eval(g), args);
      ValuePtr got = low.eval(gp.goal, lowered);
      ASSERT_EQ(expected->b, got->b) << text;
      ++runs;
    }
  }
  EXPECT_EQ(runs, 600);
}

TEST(Mangler, SuffixesInFirstUseOrder) {
  NameMangler m;
  m.reserve("map", "user");
  EXPECT_EQ(m.claim("map", "List.map@int"), "map_1");
  EXPECT_EQ(m.claim("map", "List.map@bool"), "map_2");
  EXPECT_EQ(m.claim("map", "List.map@int"), "map_1");
  EXPECT_EQ(m.claim("map", "user"), "map");
  EXPECT_TRUE(m.owns("map_2", "List.map@bool"));
}

}  // namespace
}  // namespace iml
