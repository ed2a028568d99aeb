/* SPDX-License-Identifier: Apache-2.0 */

#include <cctype>
#include <set>

#include "iml/solver.hpp"

namespace iml {

namespace {

const std::set<std::string>& reserved() {
  static const std::set<std::string> words = {
      "and",    "or",     "not",      "xor",   "ite",    "distinct", "true",     "false", "let",
      "forall", "exists", "match",    "par",   "as",     "_",        "!",        "Int",   "Bool",
      "Real",   "Array",  "String",   "div",   "mod",    "abs",      "rem",      "select", "store",
      "to_real", "to_int", "is_int",  "concat", "extract", "const",  "lambda",   "map",   "default",
      "root-obj", "NUMERAL", "DECIMAL", "STRING", "BINARY", "HEXADECIMAL", "assert", "declare-fun",
      "define-fun", "check-sat", "exit", "push", "pop", "model", "error", "success", "sat", "unsat",
      "unknown", "unsupported", "power", "bvadd", "min", "max"};
  return words;
}

const char* binop_smt(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Eq: return "=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "and";
    case BinOp::Or: return "or";
  }
  return "?";
}

std::string int_literal(const BigInt& v) {
  if (v >= 0) return v.str();
  BigInt m = -v;
  return "(- " + m.str() + ")";
}

bool is_numeral(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

SmtEncoding::SmtEncoding(const GroundProgram& gp) : gp_(gp) {
  for (const auto& t : gp.types)
    for (const auto& c : t.ctors) {
      ctor_of_symbol_[symbol(c.name)] = c.name;
      for (const auto& a : c.args) collect_tuples(a);
    }
  for (const auto& f : gp.funs) {
    for (const auto& p : f.params) collect_tuples(p.annot);
    collect_tuples(f.ret_annot);
    if (f.body) collect_tuples(f.body);
  }
  for (const auto& [_, t] : gp.vars) collect_tuples(t);
  if (gp.goal) collect_tuples(gp.goal);
}

std::string SmtEncoding::symbol(const std::string& name) const {
  if (reserved().count(name)) return smt_quote(name + "!u");
  return smt_quote(name);
}

std::string SmtEncoding::tuple_key(const TypePtr& t) const { return type_to_string(t); }

void SmtEncoding::collect_tuples(const TypePtr& t) {
  if (!t) return;
  for (const auto& a : t->args) collect_tuples(a);
  if (t->kind != Type::Kind::Tuple) return;
  auto key = tuple_key(t);
  if (tuple_index_.count(key)) return;
  TupleSort s{"tup!" + std::to_string(tuples_.size()), t->args};
  tuple_index_[key] = tuples_.size();
  tuple_ctor_[s.name + "!mk"] = tuples_.size();
  tuples_.push_back(std::move(s));
}

void SmtEncoding::collect_tuples(const ExprPtr& e) {
  collect_tuples(e->type);
  for (const auto& t : e->param_types) collect_tuples(t);
  for (const auto& c : children_of(e)) collect_tuples(c);
}

const SmtEncoding::TupleSort& SmtEncoding::tuple_sort(const TypePtr& t) const {
  auto it = tuple_index_.find(tuple_key(t));
  if (it == tuple_index_.end()) throw Error("no SMT sort for tuple type " + type_to_string(t));
  return tuples_[it->second];
}

std::string SmtEncoding::sort(const TypePtr& t) const {
  if (!t) throw Error("untyped term in SMT encoding");
  switch (t->kind) {
    case Type::Kind::Con:
      if (t->name == "int" && t->args.empty()) return "Int";
      if (t->name == "bool" && t->args.empty()) return "Bool";
      if (!t->args.empty() || !gp_.find_type(t->name))
        throw Error("type " + type_to_string(t) + " has no SMT sort");
      return symbol(t->name);
    case Type::Kind::Tuple:
      return tuple_sort(t).name;
    default:
      throw Error("type " + type_to_string(t) + " has no SMT sort");
  }
}

std::string SmtEncoding::datatype_declarations() const {
  if (gp_.types.empty() && tuples_.empty()) return "";
  std::string names;
  std::string bodies;
  for (const auto& t : gp_.types) {
    names += "(" + symbol(t.name) + " 0)";
    bodies += "(";
    for (const auto& c : t.ctors) {
      bodies += "(" + symbol(c.name);
      for (std::size_t i = 0; i < c.args.size(); ++i)
        bodies += " (" + smt_quote(c.name + "!" + std::to_string(i)) + " " + sort(c.args[i]) + ")";
      bodies += ")";
    }
    bodies += ")";
  }
  for (const auto& s : tuples_) {
    names += "(" + s.name + " 0)";
    bodies += "((" + s.name + "!mk";
    for (std::size_t i = 0; i < s.elems.size(); ++i)
      bodies += " (" + s.name + "!" + std::to_string(i) + " " + sort(s.elems[i]) + ")";
    bodies += "))";
  }
  return "(declare-datatypes (" + names + ") (" + bodies + "))";
}

std::string SmtEncoding::declare_const(const std::string& name, const TypePtr& t) const {
  return "(declare-const " + symbol(name) + " " + sort(t) + ")";
}

std::string SmtEncoding::declare_fun(const FunDecl& f) const {
  std::string out = "(declare-fun " + symbol(f.name) + " (";
  for (std::size_t i = 0; i < f.params.size(); ++i) out += (i ? " " : "") + sort(f.params[i].annot);
  TypePtr ret = f.ret_annot ? f.ret_annot : (f.body ? f.body->type : nullptr);
  return out + ") " + sort(ret) + ")";
}

std::string SmtEncoding::term(const ExprPtr& e) const { return term(e, {}); }

std::string SmtEncoding::term(const ExprPtr& e, const std::set<std::string>& bound) const {
  auto sub = [&](const ExprPtr& x) { return term(x, bound); };
  switch (e->kind) {
    case Expr::Kind::Int:
      return int_literal(e->ival);
    case Expr::Kind::Bool:
      return e->bval ? "true" : "false";
    case Expr::Kind::Var:
      return symbol(e->name);
    case Expr::Kind::App: {
      std::string f = call_name(e);
      if (f.empty()) throw Error("higher-order application in ground term");
      if (e->args.size() == 1) return symbol(f);
      std::string out = "(" + symbol(f);
      for (std::size_t i = 1; i < e->args.size(); ++i) out += " " + sub(e->args[i]);
      return out + ")";
    }
    case Expr::Kind::If:
      return "(ite " + sub(e->args[0]) + " " + sub(e->args[1]) + " " + sub(e->args[2]) + ")";
    case Expr::Kind::Bin:
      return std::string("(") + binop_smt(e->op) + " " + sub(e->args[0]) + " " + sub(e->args[1]) + ")";
    case Expr::Kind::Not:
      return "(not " + sub(e->args[0]) + ")";
    case Expr::Kind::Construct: {
      if (e->args.empty()) return symbol(e->name);
      std::string out = "(" + symbol(e->name);
      for (const auto& a : e->args) out += " " + sub(a);
      return out + ")";
    }
    case Expr::Kind::Tuple: {
      TypePtr t = e->type;
      if (!t) {
        std::vector<TypePtr> elems;
        for (const auto& a : e->args) elems.push_back(a->type);
        t = ttuple(elems);
      }
      std::string out = "(" + tuple_sort(t).name + "!mk";
      for (const auto& a : e->args) out += " " + sub(a);
      return out + ")";
    }
    case Expr::Kind::IsA:
      return "((_ is " + symbol(e->name) + ") " + sub(e->args[0]) + ")";
    case Expr::Kind::Select:
      return "(" + smt_quote(e->name + "!" + std::to_string(e->index)) + " " + sub(e->args[0]) + ")";
    case Expr::Kind::Proj: {
      const auto& t = e->args[0]->type;
      if (!t || t->kind != Type::Kind::Tuple) throw Error("projection from an untyped tuple");
      return "(" + tuple_sort(t).name + "!" + std::to_string(e->index) + " " + sub(e->args[0]) + ")";
    }
    case Expr::Kind::Lambda:
    case Expr::Kind::Let:
    case Expr::Kind::Match:
      break;
  }
  throw Error("expression form not supported by the SMT encoding");
}

std::optional<ValuePtr> SmtEncoding::decode(const SExpr& v) const { return decode(v, {}); }

std::optional<ValuePtr> SmtEncoding::decode(const SExpr& v, const std::map<std::string, SExpr>& lets) const {
  auto source_ctor = [&](const std::string& lowered) {
    auto it = gp_.ctor_source.find(lowered);
    return it == gp_.ctor_source.end() ? lowered : it->second;
  };
  if (v.is_atom()) {
    if (is_numeral(v.atom)) return int_value(BigInt(v.atom));
    if (v.atom == "true") return bool_value(true);
    if (v.atom == "false") return bool_value(false);
    if (auto it = lets.find(v.atom); it != lets.end()) return decode(it->second, lets);
    if (auto it = ctor_of_symbol_.find(v.atom); it != ctor_of_symbol_.end())
      return construct_value(source_ctor(it->second), {});
    return std::nullopt;
  }
  const std::string& h = v.head();
  if (h == "-" && v.list.size() == 2 && v.list[1].is_atom() && is_numeral(v.list[1].atom))
    return int_value(-BigInt(v.list[1].atom));
  if (h == "as" && v.list.size() == 3) return decode(v.list[1], lets);
  if (h == "let" && v.list.size() == 3 && v.list[1].is_list) {
    auto inner = lets;
    for (const auto& b : v.list[1].list)
      if (b.is_list && b.list.size() == 2 && b.list[0].is_atom()) inner[b.list[0].atom] = b.list[1];
    return decode(v.list[2], inner);
  }
  std::vector<ValuePtr> args;
  for (std::size_t i = 1; i < v.list.size(); ++i) {
    auto a = decode(v.list[i], lets);
    if (!a) return std::nullopt;
    args.push_back(*a);
  }
  if (tuple_ctor_.count(h)) return tuple_value(std::move(args));
  if (auto it = ctor_of_symbol_.find(h); it != ctor_of_symbol_.end())
    return construct_value(source_ctor(it->second), std::move(args));
  if (v.list.size() == 1 && v.list[0].is_list) return decode(v.list[0], lets);
  return std::nullopt;
}

}  // namespace iml
