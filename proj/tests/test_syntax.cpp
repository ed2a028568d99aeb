/* SPDX-License-Identifier: Apache-2.0 */

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "helpers.hpp"

namespace iml {
namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::filesystem::path> corpus() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(std::filesystem::path(IML_SOURCE_DIR) / "examples/iml"))
    if (e.path().extension() == ".iml") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

TEST(Parse, AckAdmAnnotation) {
  auto m = parse_module(test::kAck);
  ASSERT_EQ(m.decls.size(), 1u);
  const auto& f = m.decls[0].funs.at(0);
  EXPECT_EQ(f.name, "ack");
  EXPECT_TRUE(f.recursive);
  const Annotation* a = f.find(Annotation::Kind::Adm);
  ASSERT_NE(a, nullptr);
  EXPECT_EQ(a->names, (std::vector<std::string>{"m", "n"}));
}

TEST(Parse, EmptyInput) { EXPECT_TRUE(parse_module("").decls.empty()); }

TEST(Parse, LeftPadMeasure) {
  auto m = parse_module(test::kLeftPad);
  const Annotation* a = m.decls.at(0).funs.at(0).find(Annotation::Kind::Measure);
  ASSERT_NE(a, nullptr);
  EXPECT_EQ(pretty(a->measure), "Ordinal.of_int (n - List.length xs)");
}

TEST(Parse, DeclarationOrderPreserved) {
  auto m = parse_module("type t = A | B\nlet f x = x\nverify (fun x -> f x = x)\ntheorem th x = x = x\n");
  ASSERT_EQ(m.decls.size(), 4u);
  EXPECT_EQ(m.decls[0].kind, Decl::Kind::Type);
  EXPECT_EQ(m.decls[1].kind, Decl::Kind::Fun);
  EXPECT_EQ(m.decls[2].kind, Decl::Kind::Verify);
  EXPECT_EQ(m.decls[3].kind, Decl::Kind::Theorem);
}

TEST(Parse, UptoBound) {
  auto m = parse_module("verify upto 5 (fun l -> List.rev l = l)");
  ASSERT_TRUE(m.decls.at(0).bound);
  EXPECT_EQ(*m.decls[0].bound, 5u);
}

TEST(Parse, ErrorCarriesPosition) {
  try {
    parse_module("let f x =\n  x +\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_GE(e.span().line, 2u);
    EXPECT_TRUE(e.at_eof());
  }
  try {
    parse_module("let f x = ) x");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.span().line, 1u);
    EXPECT_EQ(e.span().col, 11u);
  }
}

TEST(Parse, DuplicateConstructorsAndParamsRejected) {
  EXPECT_THROW(parse_module("type t = A | A"), ParseError);
  EXPECT_THROW(parse_module("let f x x = x"), ParseError);
  EXPECT_THROW(parse_module("let f x = match x with | (a, a) -> a"), ParseError);
}

TEST(Parse, BigIntegerLiterals) {
  auto e = parse_expr("123456789012345678901234567890 + 1");
  EXPECT_EQ(pretty(e), "123456789012345678901234567890 + 1");
}

TEST(Pretty, DirectiveRoundTrip) {
  auto m = parse_module("verify (0 = 0)");
  auto again = parse_module(pretty(m.decls.at(0)));
  EXPECT_TRUE(alpha_equal(m.decls[0], again.decls.at(0)));
}

TEST(Pretty, CorpusRoundTrip) {
  auto files = corpus();
  ASSERT_FALSE(files.empty());
  for (const auto& f : files) {
    auto m = parse_module(slurp(f));
    for (const auto& d : m.decls) {
      std::string text = pretty(d);
      auto again = parse_module(text);
      ASSERT_EQ(again.decls.size(), 1u) << text;
      EXPECT_TRUE(alpha_equal(d, again.decls[0])) << f << "\n" << text;
    }
  }
}

TEST(Pretty, AlphaEquivalenceIgnoresBinderNames) {
  auto a = parse_expr("fun x -> let y = x + 1 in y * y");
  auto b = parse_expr("fun u -> let v = u + 1 in v * v");
  auto c = parse_expr("fun u -> let v = u + 1 in v * u");
  EXPECT_TRUE(alpha_equal(a, b));
  EXPECT_FALSE(alpha_equal(a, c));
}

// Random well-formed expressions over a small vocabulary.
class ExprGen {
 public:
  explicit ExprGen(unsigned seed) : rng_(seed) {}

  ExprPtr expr(int depth, std::vector<std::string>& scope) {
    int pick = depth <= 0 ? pick_of(3) : pick_of(14);
    switch (pick) {
      case 0: return mk_int(BigInt(pick_of(200)) - 100);
      case 1: return mk_bool(pick_of(2) == 0);
      case 2: return scope.empty() ? mk_int(pick_of(10)) : mk_var(scope[pick_of(scope.size())]);
      case 3: {
        static const BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Eq, BinOp::Lt,
                                    BinOp::Le,  BinOp::Gt,  BinOp::Ge,  BinOp::And, BinOp::Or};
        return mk_bin(ops[pick_of(10)], expr(depth - 1, scope), expr(depth - 1, scope));
      }
      case 4: return mk_not(expr(depth - 1, scope));
      case 5: return mk_if(expr(depth - 1, scope), expr(depth - 1, scope), expr(depth - 1, scope));
      case 6: {
        std::string n = fresh();
        ExprPtr bound = expr(depth - 1, scope);
        scope.push_back(n);
        ExprPtr body = expr(depth - 1, scope);
        scope.pop_back();
        return mk_let(n, bound, body);
      }
      case 7: {
        std::string n = fresh();
        scope.push_back(n);
        ExprPtr body = expr(depth - 1, scope);
        scope.pop_back();
        return mk_lambda({n}, body);
      }
      case 8: return mk_tuple({expr(depth - 1, scope), expr(depth - 1, scope)});
      case 9: return mk_construct("Nil", {});
      case 10: return mk_construct("Cons", {expr(depth - 1, scope), expr(depth - 1, scope)});
      case 11: return mk_call("List.length", {expr(depth - 1, scope)});
      case 12: return mk_app(expr(depth - 1, scope), {expr(depth - 1, scope)});
      default: {
        std::string h = fresh(), t = fresh();
        ExprPtr s = expr(depth - 1, scope);
        ExprPtr nil = expr(depth - 1, scope);
        scope.push_back(h);
        scope.push_back(t);
        ExprPtr cons = expr(depth - 1, scope);
        scope.resize(scope.size() - 2);
        return mk_match(s, {MatchCase{pconstruct("Nil", {}), nil},
                            MatchCase{pconstruct("Cons", {pvar(h), pvar(t)}), cons}});
      }
    }
  }

 private:
  std::size_t pick_of(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  std::string fresh() { return "v" + std::to_string(counter_++); }

  std::mt19937 rng_;
  int counter_ = 0;
};

TEST(Pretty, RandomDeclarationsRoundTrip) {
  ExprGen gen(20261017);
  for (int i = 0; i < 500; ++i) {
    std::vector<std::string> scope{"x", "y"};
    Decl d;
    d.kind = Decl::Kind::Verify;
    d.goal = mk_lambda({"x", "y"}, gen.expr(4, scope));
    std::string text = pretty(d);
    SourceModule m;
    ASSERT_NO_THROW(m = parse_module(text)) << text;
    ASSERT_EQ(m.decls.size(), 1u) << text;
    EXPECT_TRUE(alpha_equal(d, m.decls[0])) << text << "\n" << pretty(m.decls[0]);
  }
}

void check_spans(const ExprPtr& e, std::size_t size) {
  EXPECT_LE(e->span.begin, e->span.end);
  EXPECT_LE(e->span.end, size);
  for (const auto& c : children_of(e)) check_spans(c, size);
}

TEST(Parse, SpansLieWithinInput) {
  for (const auto& f : corpus()) {
    std::string text = slurp(f);
    for (const auto& d : parse_module(text).decls) {
      EXPECT_LE(d.span.end, text.size());
      if (d.goal) check_spans(d.goal, text.size());
      for (const auto& fn : d.funs) check_spans(fn.body, text.size());
    }
  }
}

TEST(Parse, TotalOnArbitraryBytes) {
  std::mt19937 rng(7);
  std::string alphabet = "let rec fun match with if then else ()[]@@;:,.|<>=-+*&_'\"\n\t xyz0123456789";
  std::vector<std::string> seeds;
  for (const auto& f : corpus()) seeds.push_back(slurp(f));
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    if (i % 2 == 0) {
      std::size_t n = rng() % 80;
      for (std::size_t k = 0; k < n; ++k) s += static_cast<char>(rng() % 256);
    } else {
      s = seeds[rng() % seeds.size()];
      for (int k = 0; k < 5 && !s.empty(); ++k) s[rng() % s.size()] = alphabet[rng() % alphabet.size()];
    }
    try {
      parse_module(s);
    } catch (const ParseError&) {
    }
  }
}

}  // namespace
}  // namespace iml
