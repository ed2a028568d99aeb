/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace iml {

using BigInt = boost::multiprecision::cpp_int;

/// Byte range plus 1-based line/column of the first byte.
struct Span {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
  std::uint32_t line = 0;
  std::uint32_t col = 0;
};

// ---------------------------------------------------------------------------
// Types. Shared between surface annotations and inference results.

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct Type {
  enum class Kind { Var, Con, Tuple, Arrow };
  Kind kind = Kind::Con;
  std::string name;           // Var: "'a" or "'_12"; Con: "int", "list", ...
  std::vector<TypePtr> args;  // Con arguments, Tuple elements, Arrow {from, to}
};

TypePtr tvar(std::string name);
TypePtr tcon(std::string name, std::vector<TypePtr> args = {});
TypePtr ttuple(std::vector<TypePtr> elems);
TypePtr tarrow(TypePtr from, TypePtr to);
TypePtr tarrows(const std::vector<TypePtr>& from, TypePtr to);
TypePtr tint();
TypePtr tbool();
TypePtr tordinal();

bool type_equal(const TypePtr& a, const TypePtr& b);
std::string type_to_string(const TypePtr& t);
void type_vars(const TypePtr& t, std::set<std::string>& out);
bool is_ground_type(const TypePtr& t);

// ---------------------------------------------------------------------------
// Patterns and expressions.

struct Pattern;
using PatternPtr = std::shared_ptr<const Pattern>;

struct Pattern {
  enum class Kind { Var, Wildcard, Construct, Tuple, Int, Bool };
  Kind kind = Kind::Wildcard;
  std::string name;  // Var name or constructor name
  std::vector<PatternPtr> args;
  BigInt ival;
  bool bval = false;
  Span span;
};

PatternPtr pvar(std::string name);
PatternPtr pwild();
PatternPtr pconstruct(std::string ctor, std::vector<PatternPtr> args);
PatternPtr ptuple(std::vector<PatternPtr> elems);
PatternPtr pint(BigInt v);
PatternPtr pbool(bool v);

void pattern_vars(const PatternPtr& p, std::vector<std::string>& out);

enum class BinOp { Add, Sub, Mul, Eq, Lt, Le, Gt, Ge, And, Or };

const char* binop_symbol(BinOp op);
bool is_comparison(BinOp op);
bool is_arith(BinOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct MatchCase {
  PatternPtr pattern;
  ExprPtr body;
};

/// One node type for every expression form.
///
/// Children live in `args` with a per-kind layout:
///   App       [fn, arg1, ..., argN]
///   Lambda    [body]              (binders in `params`)
///   Let       [bound, body]       (binder in `name`)
///   If        [cond, then, else]
///   Match     [scrutinee]         (branches in `cases`)
///   Construct [field1, ...]       (constructor in `name`)
///   Tuple     [elem1, ...]
///   Bin       [lhs, rhs]
///   Not       [arg]
///   IsA       [arg]               tester for constructor `name`
///   Select    [arg]               field `index` of constructor `name`
///   Proj      [arg]               tuple component `index`
/// IsA/Select/Proj never come out of the parser; lowering and template
/// extraction introduce them.
struct Expr {
  enum class Kind {
    Int, Bool, Var, App, Lambda, Let, If, Match, Construct, Tuple, Bin, Not,
    IsA, Select, Proj
  };
  Kind kind = Kind::Int;
  Span span;
  BigInt ival;
  bool bval = false;
  std::string name;
  BinOp op = BinOp::Add;
  std::size_t index = 0;
  std::vector<std::string> params;
  std::vector<TypePtr> param_types;  // Lambda only; entries may be null
  std::vector<ExprPtr> args;
  std::vector<MatchCase> cases;
  TypePtr type;  // set by inference, null before
};

ExprPtr mk_int(BigInt v);
ExprPtr mk_bool(bool v);
ExprPtr mk_var(std::string name, TypePtr type = nullptr);
ExprPtr mk_app(ExprPtr fn, std::vector<ExprPtr> args);
ExprPtr mk_call(std::string fn, std::vector<ExprPtr> args, TypePtr type = nullptr);
ExprPtr mk_lambda(std::vector<std::string> params, ExprPtr body);
ExprPtr mk_let(std::string name, ExprPtr bound, ExprPtr body);
ExprPtr mk_if(ExprPtr c, ExprPtr t, ExprPtr e);
ExprPtr mk_match(ExprPtr scrutinee, std::vector<MatchCase> cases);
ExprPtr mk_construct(std::string ctor, std::vector<ExprPtr> args, TypePtr type = nullptr);
ExprPtr mk_tuple(std::vector<ExprPtr> elems);
ExprPtr mk_bin(BinOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr mk_not(ExprPtr e);
ExprPtr mk_isa(std::string ctor, ExprPtr arg);
ExprPtr mk_select(std::string ctor, std::size_t index, ExprPtr arg, TypePtr type = nullptr);
ExprPtr mk_proj(std::size_t index, ExprPtr arg, TypePtr type = nullptr);

/// Copy of `e` with its type replaced.
ExprPtr with_type(const ExprPtr& e, TypePtr type);
/// Copy of `e` with children (and case bodies, in order after args) replaced.
ExprPtr with_children(const ExprPtr& e, std::vector<ExprPtr> children);
/// Children in the order used by `with_children`: args then case bodies.
std::vector<ExprPtr> children_of(const ExprPtr& e);

/// Name of the called function when `e` is `App(Var f, ...)`, else empty.
std::string call_name(const ExprPtr& e);
inline const ExprPtr& app_fn(const ExprPtr& e) { return e->args.front(); }

std::set<std::string> free_vars(const ExprPtr& e);
/// Capture-avoiding simultaneous substitution of free variables.
ExprPtr substitute(const ExprPtr& e, const std::vector<std::pair<std::string, ExprPtr>>& sub);
std::size_t expr_size(const ExprPtr& e);
bool expr_equal(const ExprPtr& a, const ExprPtr& b);  // syntactic, ignores spans/types
bool alpha_equal(const ExprPtr& a, const ExprPtr& b);
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

// ---------------------------------------------------------------------------
// Declarations.

struct Annotation {
  enum class Kind { Adm, Measure, Auto, Rewrite };
  Kind kind = Kind::Auto;
  std::vector<std::string> names;  // Adm
  ExprPtr measure;                 // Measure
};

struct Param {
  std::string name;
  TypePtr annot;  // may be null
};

struct Constructor {
  std::string name;
  std::vector<TypePtr> args;
};

struct TypeDecl {
  std::string name;
  std::vector<std::string> params;  // "'a", ...
  std::vector<Constructor> ctors;
};

struct FunDecl {
  std::string name;
  bool recursive = false;
  std::vector<Param> params;
  ExprPtr body;
  TypePtr ret_annot;
  std::vector<Annotation> annotations;
  Span span;

  bool has(Annotation::Kind k) const;
  const Annotation* find(Annotation::Kind k) const;
};

struct Decl {
  enum class Kind { Type, Fun, Theorem, Verify, Instance };
  Kind kind = Kind::Fun;
  Span span;
  TypeDecl type;                        // Type
  std::vector<FunDecl> funs;            // Fun: one, or two for `let rec ... and ...`; Theorem: one
  ExprPtr goal;                         // Verify / Instance
  std::optional<std::uint64_t> bound;   // `upto N`
  std::vector<Annotation> annotations;  // Verify / Instance
};

struct SourceModule {
  std::vector<Decl> decls;
};

bool alpha_equal(const Decl& a, const Decl& b);

}  // namespace iml
