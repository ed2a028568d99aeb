/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <functional>
#include <random>
#include <set>
#include <string>
#include <string_view>

#include "iml/defn.hpp"
#include "iml/eval.hpp"
#include "iml/syntax.hpp"
#include "iml/typecheck.hpp"
#include "iml/waterfall.hpp"

namespace iml::test {

inline const char* kAck = R"(
let rec ack m n =
  if m <= 0 then n + 1
  else if n <= 0 then ack (m - 1) 1
  else ack (m - 1) (ack m (n - 1))
[@@adm m, n]
)";

inline const char* kLeftPad = R"(
let rec left_pad c n xs =
  if List.length xs >= n then xs
  else left_pad c n (c :: xs)
[@@measure Ordinal.of_int (n - List.length xs)]
)";

inline const char* kFact = "let rec fact x = if x > 1 then x * fact (x - 1) else 1\n";

/// Admits every declaration of `src` on top of `w`, discharging VCs with the waterfall.
inline World admit_all(std::string_view src, World w = World::initial()) {
  AdmitConfig cfg{make_vc_prover()};
  for (const auto& d : parse_module(src).decls) w = admit(d, w, cfg);
  return w;
}

/// Typed goal of `verify <text>` against `w`, with type variables at int.
inline ExprPtr goal(const World& w, std::string_view text) {
  Decl d;
  d.kind = Decl::Kind::Verify;
  d.goal = parse_expr(text);
  return default_type_vars(encode_ordinals(infer_decl(d, w.env).decl.goal));
}

inline const FunDef& fun(const World& w, const std::string& name) {
  const FunDef* f = w.find_fun(name);
  if (!f) throw Error("no function " + name);
  return *f;
}

/// Random value of ground type `t`; datatypes recurse at most `depth` levels.
inline ValuePtr random_value(const TypePtr& t, const TypeEnv& env, std::mt19937& rng, int depth = 3,
                             int lo = -5, int hi = 5) {
  switch (t->kind) {
    case Type::Kind::Tuple: {
      std::vector<ValuePtr> xs;
      for (const auto& a : t->args) xs.push_back(random_value(a, env, rng, depth, lo, hi));
      return tuple_value(std::move(xs));
    }
    case Type::Kind::Con: {
      if (t->name == "int") return int_value(std::uniform_int_distribution<int>(lo, hi)(rng));
      if (t->name == "bool") return bool_value(rng() % 2 == 0);
      const TypeDecl& d = env.types.at(t->name);
      std::map<std::string, TypePtr> sub;
      for (std::size_t i = 0; i < d.params.size() && i < t->args.size(); ++i) sub[d.params[i]] = t->args[i];
      std::vector<const Constructor*> choices;
      for (const auto& c : d.ctors) {
        bool recursive = false;
        for (const auto& a : c.args) {
          std::set<std::string> names;
          std::function<void(const TypePtr&)> walk = [&](const TypePtr& x) {
            if (x->kind == Type::Kind::Con) names.insert(x->name);
            for (const auto& y : x->args) walk(y);
          };
          walk(a);
          recursive = recursive || names.count(d.name);
        }
        if (depth > 0 || !recursive) choices.push_back(&c);
      }
      const Constructor& c = *choices[rng() % choices.size()];
      std::vector<ValuePtr> args;
      for (const auto& a : c.args) args.push_back(random_value(subst_type(a, sub), env, rng, depth - 1, lo, hi));
      return construct_value(c.name, std::move(args));
    }
    default:
      throw Error("no random values of type " + type_to_string(t));
  }
}

}  // namespace iml::test
