/* SPDX-License-Identifier: Apache-2.0 */

#include <gtest/gtest.h>

#include "helpers.hpp"

namespace iml {
namespace {

std::string scheme_of(const std::string& src, std::size_t index = 0) {
  TypedModule tm = infer(parse_module(src), World::initial().env);
  return type_to_string(tm.decls.at(index).schemes.at(0).body);
}

TEST(Infer, LengthIsPolymorphic) {
  TypedModule tm = infer(parse_module("let rec len l = match l with [] -> 0 | _ :: t -> 1 + len t"),
                         World::initial().env);
  const Scheme& s = tm.decls.at(0).schemes.at(0);
  ASSERT_EQ(s.vars.size(), 1u);
  EXPECT_EQ(type_to_string(s.body), s.vars[0] + " list -> int");
}

TEST(Infer, Identity) {
  TypedModule tm = infer(parse_module("let id x = x"), World::initial().env);
  const Scheme& s = tm.decls.at(0).schemes.at(0);
  ASSERT_EQ(s.vars.size(), 1u);
  EXPECT_EQ(type_to_string(s.body), s.vars[0] + " -> " + s.vars[0]);
}

TEST(Infer, QuantifiedVariablesOccurInBody) {
  TypedModule tm = infer(parse_module("let k x y = x\nlet rec app f l = match l with [] -> [] | h :: t -> f h :: app f t"),
                         World::initial().env);
  for (const auto& d : tm.decls)
    for (const auto& s : d.schemes) {
      std::set<std::string> vs;
      type_vars(s.body, vs);
      for (const auto& v : s.vars) EXPECT_TRUE(vs.count(v)) << v;
    }
}

TEST(Infer, SameLenLambdaAtIntToInt) {
  Decl d = parse_module("theorem same_len l = List.length (List.map (fun x -> x + 1) l) = List.length l").decls.at(0);
  TypedDecl td = infer_decl(d, World::initial().env);
  EXPECT_EQ(type_to_string(td.decl.funs.at(0).body->type), "bool");
  ExprPtr lam;
  std::function<void(const ExprPtr&)> find = [&](const ExprPtr& e) {
    if (e->kind == Expr::Kind::Lambda) lam = e;
    for (const auto& c : children_of(e)) find(c);
  };
  find(td.decl.funs[0].body);
  ASSERT_TRUE(lam);
  EXPECT_EQ(type_to_string(lam->type), "int -> int");
}

TEST(Infer, TheoremMustBeBool) {
  EXPECT_THROW(infer(parse_module("theorem t x = x + 1"), World::initial().env), TypeError);
}

TEST(Infer, MismatchIsTypeErrorWithSpan) {
  try {
    infer(parse_module("let f x =\n  if x then 1 else true"), World::initial().env);
    FAIL();
  } catch (const TypeError& e) {
    EXPECT_EQ(e.span().line, 2u);
  }
}

TEST(Infer, UnboundName) {
  EXPECT_THROW(infer(parse_module("let f x = g x"), World::initial().env), TypeError);
}

TEST(Infer, EveryNodeTyped) {
  TypedModule tm = infer(parse_module(test::kAck), World::initial().env);
  std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& e) {
    ASSERT_TRUE(e->type) << pretty(e);
    for (const auto& c : children_of(e)) walk(c);
  };
  walk(tm.decls.at(0).decl.funs.at(0).body);
  EXPECT_EQ(scheme_of(test::kAck), "int -> int -> int");
}

TEST(Admissible, NonUniformRecursion) {
  try {
    test::admit_all("type 'a t = Leaf of 'a | Tree of ('a * 'a) t");
    FAIL();
  } catch (const AdmissibilityError& e) {
    EXPECT_EQ(e.kind(), AdmissibilityError::Kind::NonUniformRecursion);
  }
}

TEST(Admissible, NatIsFine) { EXPECT_NO_THROW(test::admit_all("type nat = Z | S of nat")); }

TEST(Admissible, HigherOrderData) {
  try {
    test::admit_all("type t = C of (int -> int)");
    FAIL();
  } catch (const AdmissibilityError& e) {
    EXPECT_EQ(e.kind(), AdmissibilityError::Kind::HigherOrderData);
  }
}

TEST(Admissible, NotWellFounded) {
  try {
    test::admit_all("type s = S of s");
    FAIL();
  } catch (const AdmissibilityError& e) {
    EXPECT_EQ(e.kind(), AdmissibilityError::Kind::NotWellFounded);
  }
}

TEST(Admissible, ConsistentMapIsSpecializable) {
  EXPECT_NO_THROW(test::admit_all("let incr_all l = List.map (fun x -> x + 1) l"));
  EXPECT_NO_THROW(test::admit_all("let rec len l = match l with [] -> 0 | _ :: t -> 1 + len t"));
}

TEST(Admissible, ChangingFunctionalArgumentIsNotSpecializable) {
  try {
    test::admit_all("let rec g f n = if n <= 0 then f 0 else g (fun x -> f x + 1) (n - 1)");
    FAIL();
  } catch (const AdmissibilityError& e) {
    EXPECT_EQ(e.kind(), AdmissibilityError::Kind::NonSpecializable);
  }
}

TEST(Admissible, Redefinition) {
  World w = test::admit_all("let f x = x + 1");
  try {
    test::admit_all("let f x = x", w);
    FAIL();
  } catch (const AdmissibilityError& e) {
    EXPECT_EQ(e.kind(), AdmissibilityError::Kind::Redefinition);
  } catch (const AdmissionError& e) {
    EXPECT_EQ(e.kind(), AdmissionError::Kind::Redefinition);
  }
}

TEST(Admissible, DeterministicVerdicts) {
  for (const char* src : {"type 'a t = Leaf of 'a | Tree of ('a * 'a) t", "type t = C of (int -> int)"}) {
    std::string first, second;
    try { test::admit_all(src); } catch (const AdmissibilityError& e) { first = to_string(e.kind()); }
    try { test::admit_all(src); } catch (const AdmissibilityError& e) { second = to_string(e.kind()); }
    EXPECT_FALSE(first.empty());
    EXPECT_EQ(first, second);
  }
}

// Well-typed ground calls never hit a dynamic type error.
TEST(Soundness, RandomGroundCalls) {
  World w = test::admit_all(std::string(test::kAck) + test::kLeftPad + test::kFact + R"(
type tree = Leaf | Node of tree * int * tree
let rec size t = match t with Leaf -> 0 | Node (l, _, r) -> size l + 1 + size r
let rec mirror t = match t with Leaf -> Leaf | Node (l, x, r) -> Node (mirror r, x, mirror l)
let rec zip xs ys = match xs, ys with
  | x :: xt, y :: yt -> (x, y) :: zip xt yt
  | _, _ -> []
let incr_all l = List.map (fun x -> x + 1) l
let total l = List.fold_left (fun a b -> a + b) 0 l
)");
  std::mt19937 rng(99);
  const std::vector<std::string> names = {"ack", "left_pad", "fact", "size", "mirror", "zip",
                                          "incr_all", "total", "List.rev", "List.append", "List.length"};
  int calls = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::string& n = names[i % names.size()];
    const Scheme& s = w.env.values.at(n);
    TypePtr t = default_type_vars(s.body);
    std::vector<ValuePtr> args;
    while (t->kind == Type::Kind::Arrow) {
      bool small = n == "ack";
      args.push_back(test::random_value(t->args[0], w.env, rng, 3, small ? 0 : -5, small ? 2 : 5));
      t = t->args[1];
    }
    Evaluator ev(w.table);
    ValuePtr v;
    ASSERT_NO_THROW(v = ev.call(n, args)) << n;
    ++calls;
  }
  EXPECT_EQ(calls, 1000);
}

}  // namespace
}  // namespace iml
