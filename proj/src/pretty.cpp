/* SPDX-License-Identifier: Apache-2.0 */

#include <sstream>

#include "iml/syntax.hpp"

namespace iml {

namespace {

// Precedence levels, loosest first.
enum Prec {
  kOpen = 0,   // fun / let / if / match
  kTuple = 1,
  kOr = 2,
  kAnd = 3,
  kCmp = 4,
  kCons = 5,
  kAdd = 6,
  kMul = 7,
  kUnary = 8,
  kApp = 9,
  kAtom = 10,
};

int prec_of(BinOp op) {
  switch (op) {
    case BinOp::Or: return kOr;
    case BinOp::And: return kAnd;
    case BinOp::Add:
    case BinOp::Sub: return kAdd;
    case BinOp::Mul: return kMul;
    default: return kCmp;
  }
}

bool is_list_ctor(const ExprPtr& e) {
  return e->kind == Expr::Kind::Construct &&
         ((e->name == "Nil" && e->args.empty()) || (e->name == "Cons" && e->args.size() == 2));
}

class Printer {
 public:
  std::string str() const { return out_.str(); }

  void expr(const ExprPtr& e, int prec) {
    switch (e->kind) {
      case Expr::Kind::Int:
        if (e->ival < 0)
          out_ << "(" << e->ival.str() << ")";
        else
          out_ << e->ival.str();
        return;
      case Expr::Kind::Bool:
        out_ << (e->bval ? "true" : "false");
        return;
      case Expr::Kind::Var:
        out_ << e->name;
        return;
      case Expr::Kind::App: {
        paren(prec > kApp, [&] {
          expr(e->args[0], kAtom);
          for (std::size_t i = 1; i < e->args.size(); ++i) {
            out_ << " ";
            expr(e->args[i], kAtom);
          }
        });
        return;
      }
      case Expr::Kind::Lambda:
        paren(prec > kOpen, [&] {
          out_ << "fun";
          for (std::size_t i = 0; i < e->params.size(); ++i) {
            const auto& t = i < e->param_types.size() ? e->param_types[i] : nullptr;
            if (t)
              out_ << " (" << e->params[i] << " : " << type_to_string(t) << ")";
            else
              out_ << " " << e->params[i];
          }
          out_ << " -> ";
          expr(e->args[0], kOpen);
        });
        return;
      case Expr::Kind::Let:
        paren(prec > kOpen, [&] {
          out_ << "let " << e->name << " = ";
          expr(e->args[0], kOpen);
          out_ << " in ";
          expr(e->args[1], kOpen);
        });
        return;
      case Expr::Kind::If:
        paren(prec > kOpen, [&] {
          out_ << "if ";
          expr(e->args[0], kOpen);
          out_ << " then ";
          expr(e->args[1], kTuple);
          out_ << " else ";
          expr(e->args[2], kTuple);
        });
        return;
      case Expr::Kind::Match:
        paren(prec > kOpen, [&] {
          out_ << "match ";
          expr(e->args[0], kOpen);
          out_ << " with";
          for (std::size_t i = 0; i < e->cases.size(); ++i) {
            out_ << " | ";
            pattern(e->cases[i].pattern, 0);
            out_ << " -> ";
            // A nested match in a non-final arm would capture later arms.
            bool last = i + 1 == e->cases.size();
            expr(e->cases[i].body, last ? kOpen : kTuple);
          }
        });
        return;
      case Expr::Kind::Construct:
        if (is_list_ctor(e)) {
          if (e->name == "Nil") {
            out_ << "[]";
            return;
          }
          paren(prec > kCons, [&] {
            expr(e->args[0], kCons + 1);
            out_ << " :: ";
            expr(e->args[1], kCons);
          });
          return;
        }
        if (e->args.empty()) {
          out_ << e->name;
          return;
        }
        paren(prec > kApp, [&] {
          out_ << e->name << " ";
          if (e->args.size() == 1 && e->args[0]->kind != Expr::Kind::Tuple) {
            expr(e->args[0], kAtom);
          } else if (e->args.size() == 1) {
            out_ << "(";
            expr(e->args[0], kAtom);
            out_ << ")";
          } else {
            out_ << "(";
            for (std::size_t i = 0; i < e->args.size(); ++i) {
              if (i) out_ << ", ";
              expr(e->args[i], kTuple + 1);
            }
            out_ << ")";
          }
        });
        return;
      case Expr::Kind::Tuple:
        out_ << "(";
        for (std::size_t i = 0; i < e->args.size(); ++i) {
          if (i) out_ << ", ";
          expr(e->args[i], kTuple + 1);
        }
        out_ << ")";
        return;
      case Expr::Kind::Bin: {
        int p = prec_of(e->op);
        paren(prec > p, [&] {
          // Comparisons do not chain; arithmetic and boolean ops associate left.
          expr(e->args[0], p == kCmp ? p + 1 : p);
          out_ << " " << binop_symbol(e->op) << " ";
          expr(e->args[1], p + 1);
        });
        return;
      }
      case Expr::Kind::Not:
        paren(prec > kUnary, [&] {
          out_ << "not ";
          expr(e->args[0], kUnary);
        });
        return;
      case Expr::Kind::IsA:
        paren(prec > kApp, [&] {
          out_ << "is_" << e->name << " ";
          expr(e->args[0], kAtom);
        });
        return;
      case Expr::Kind::Select:
        paren(prec > kApp, [&] {
          out_ << e->name << "_" << e->index << " ";
          expr(e->args[0], kAtom);
        });
        return;
      case Expr::Kind::Proj:
        paren(prec > kApp, [&] {
          out_ << "proj_" << e->index << " ";
          expr(e->args[0], kAtom);
        });
        return;
    }
  }

  // prec: 0 = top (tuples allowed), 1 = cons operand, 2 = constructor argument
  void pattern(const PatternPtr& p, int prec) {
    switch (p->kind) {
      case Pattern::Kind::Var:
        out_ << p->name;
        return;
      case Pattern::Kind::Wildcard:
        out_ << "_";
        return;
      case Pattern::Kind::Int:
        if (p->ival < 0)
          out_ << "(" << p->ival.str() << ")";
        else
          out_ << p->ival.str();
        return;
      case Pattern::Kind::Bool:
        out_ << (p->bval ? "true" : "false");
        return;
      case Pattern::Kind::Tuple:
        out_ << "(";
        for (std::size_t i = 0; i < p->args.size(); ++i) {
          if (i) out_ << ", ";
          pattern(p->args[i], 1);
        }
        out_ << ")";
        return;
      case Pattern::Kind::Construct:
        if (p->name == "Nil" && p->args.empty()) {
          out_ << "[]";
          return;
        }
        if (p->name == "Cons" && p->args.size() == 2) {
          if (prec >= 1) out_ << "(";
          pattern(p->args[0], 2);
          out_ << " :: ";
          pattern(p->args[1], 1);
          if (prec >= 1) out_ << ")";
          return;
        }
        if (p->args.empty()) {
          out_ << p->name;
          return;
        }
        if (prec >= 2) out_ << "(";
        out_ << p->name << " ";
        if (p->args.size() == 1 && p->args[0]->kind != Pattern::Kind::Tuple) {
          pattern(p->args[0], 2);
        } else if (p->args.size() == 1) {
          out_ << "(";
          pattern(p->args[0], 0);
          out_ << ")";
        } else {
          out_ << "(";
          for (std::size_t i = 0; i < p->args.size(); ++i) {
            if (i) out_ << ", ";
            pattern(p->args[i], 1);
          }
          out_ << ")";
        }
        if (prec >= 2) out_ << ")";
        return;
    }
  }

  void annotations(const std::vector<Annotation>& anns) {
    for (const auto& a : anns) {
      switch (a.kind) {
        case Annotation::Kind::Adm: {
          out_ << " [@@adm ";
          for (std::size_t i = 0; i < a.names.size(); ++i) out_ << (i ? "," : "") << a.names[i];
          out_ << "]";
          break;
        }
        case Annotation::Kind::Measure:
          out_ << " [@@measure ";
          expr(a.measure, kOpen);
          out_ << "]";
          break;
        case Annotation::Kind::Auto:
          out_ << " [@@auto]";
          break;
        case Annotation::Kind::Rewrite:
          out_ << " [@@rewrite]";
          break;
      }
    }
  }

  void fun(const FunDecl& f) {
    out_ << f.name;
    for (const auto& p : f.params) {
      if (p.annot)
        out_ << " (" << p.name << " : " << type_to_string(p.annot) << ")";
      else
        out_ << " " << p.name;
    }
    if (f.ret_annot) out_ << " : " << type_to_string(f.ret_annot);
    out_ << " =\n  ";
    expr(f.body, kOpen);
    annotations(f.annotations);
  }

  void decl(const Decl& d) {
    switch (d.kind) {
      case Decl::Kind::Type: {
        out_ << "type ";
        const auto& t = d.type;
        if (t.params.size() == 1) out_ << t.params[0] << " ";
        if (t.params.size() > 1) {
          out_ << "(";
          for (std::size_t i = 0; i < t.params.size(); ++i) out_ << (i ? ", " : "") << t.params[i];
          out_ << ") ";
        }
        out_ << t.name << " =";
        for (std::size_t i = 0; i < t.ctors.size(); ++i) {
          out_ << (i ? " | " : " ") << t.ctors[i].name;
          const auto& args = t.ctors[i].args;
          if (args.empty()) continue;
          out_ << " of ";
          if (args.size() == 1) {
            // A single tuple argument needs parentheses to stay one field.
            if (args[0]->kind == Type::Kind::Tuple)
              out_ << "(" << type_to_string(args[0]) << ")";
            else
              out_ << type_to_string(args[0]);
          } else {
            out_ << type_to_string(ttuple(args));
          }
        }
        return;
      }
      case Decl::Kind::Fun:
        out_ << (d.funs[0].recursive ? "let rec " : "let ");
        fun(d.funs[0]);
        for (std::size_t i = 1; i < d.funs.size(); ++i) {
          out_ << "\nand ";
          fun(d.funs[i]);
        }
        return;
      case Decl::Kind::Theorem:
        out_ << "theorem ";
        fun(d.funs[0]);
        return;
      case Decl::Kind::Verify:
      case Decl::Kind::Instance:
        out_ << (d.kind == Decl::Kind::Verify ? "verify " : "instance ");
        if (d.bound) out_ << "upto " << *d.bound << " ";
        expr(d.goal, kAtom);
        annotations(d.annotations);
        return;
    }
  }

 private:
  template <class F>
  void paren(bool need, F&& body) {
    if (need) out_ << "(";
    body();
    if (need) out_ << ")";
  }

  std::ostringstream out_;
};

}  // namespace

std::string pretty(const ExprPtr& e) {
  Printer p;
  p.expr(e, kOpen);
  return p.str();
}

std::string pretty(const PatternPtr& pat) {
  Printer p;
  p.pattern(pat, 0);
  return p.str();
}

std::string pretty(const Decl& d) {
  Printer p;
  p.decl(d);
  return p.str();
}

std::string pretty(const SourceModule& m) {
  std::string out;
  for (const auto& d : m.decls) out += pretty(d) + "\n\n";
  return out;
}

}  // namespace iml
