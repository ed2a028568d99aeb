/* SPDX-License-Identifier: Apache-2.0 */

#include <ostream>
#include <set>
#include <sstream>

#include "iml/session.hpp"
#include "iml/syntax.hpp"
#include "iml/template.hpp"
#include "iml/typecheck.hpp"

namespace iml {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  std::string t = s.substr(b, e - b + 1);
  while (t.size() >= 2 && t.compare(t.size() - 2, 2, ";;") == 0) t = trim(t.substr(0, t.size() - 2));
  return t;
}

}  // namespace

bool Session::incomplete(const std::string& input) {
  std::string t = trim(input);
  if (t.empty() || t[0] == '#') return false;
  try {
    parse_module(t);
    return false;
  } catch (const ParseError& e) {
    if (e.at_eof()) return true;
  }
  try {
    parse_expr(t);
    return false;
  } catch (const ParseError& e) {
    return e.at_eof();
  }
}

bool Session::command(const std::string& input) {
  std::string t = trim(input);
  if (t.empty()) return true;
  if (t[0] == '#') {
    std::istringstream is(t);
    std::string cmd, arg;
    is >> cmd >> arg;
    if (cmd == "#quit") return false;
    static const std::set<std::string> known = {"#config", "#show", "#template", "#measure", "#show_lowered"};
    if (!known.count(cmd)) {
      out_ << "unknown command " << cmd << "\n";
    } else if (cmd == "#config") {
      show_config();
    } else if (arg.empty() && cmd != "#show_lowered") {
      out_ << "usage: " << cmd << " <name>\n";
    } else if (cmd == "#show") {
      show(arg);
    } else if (cmd == "#template") {
      show_template(arg);
    } else if (cmd == "#measure") {
      show_measure(arg);
    } else if (cmd == "#show_lowered") {
      show_lowered(arg.empty() ? "it" : arg);
    }
    return true;
  }
  // A trailing annotation line amends the previous declaration.
  if (t.rfind("[@@", 0) == 0 && !last_input_.empty()) {
    world_ = last_world_;
    records_.resize(last_records_);
    t = last_input_ + "\n" + t;
  }
  SourceModule m;
  try {
    m = parse_module(t);
  } catch (const ParseError& module_error) {
    try {
      parse_expr(t);
    } catch (const ParseError&) {
      out_ << "parse error: " << module_error.what() << "\n";
      return true;
    }
    evaluate(t);
    return true;
  }
  last_input_ = t;
  last_world_ = world_;
  last_records_ = records_.size();
  for (const auto& d : m.decls) process(d);
  return true;
}

void Session::evaluate(const std::string& text) {
  try {
    ExprPtr e = infer_expr(bind_cx(parse_expr(text)), world_.env);
    Evaluator ev(world_.table);
    ValuePtr v = ev.eval(e);
    out_ << "- : " << type_to_string(e->type) << " = " << value_to_string(v) << "\n";
  } catch (const Error& e) {
    out_ << "error: " << e.what() << "\n";
  }
}

void Session::show(const std::string& name) {
  if (const FunDef* f = world_.find_fun(name)) {
    Decl d;
    d.kind = Decl::Kind::Fun;
    if (f->clique.empty()) {
      d.funs.push_back(f->decl);
    } else {
      for (const auto& n : f->clique) d.funs.push_back(world_.find_fun(n)->decl);
    }
    out_ << pretty(d) << "\n";
    return;
  }
  if (auto it = world_.theorems.find(name); it != world_.theorems.end()) {
    Decl d;
    d.kind = Decl::Kind::Theorem;
    d.funs.push_back(it->second->decl);
    out_ << pretty(d) << (it->second->proved ? "  (* proved *)" : "") << "\n";
    return;
  }
  if (auto it = world_.env.types.find(name); it != world_.env.types.end()) {
    Decl d;
    d.kind = Decl::Kind::Type;
    d.type = it->second;
    out_ << pretty(d) << "\n";
    return;
  }
  out_ << "unknown name " << name << "\n";
}

void Session::show_template(const std::string& name) {
  const FunDef* f = world_.find_fun(name);
  if (!f) {
    out_ << "unknown function " << name << "\n";
    return;
  }
  out_ << to_string(template_of(f->decl)) << "\n";
}

void Session::show_measure(const std::string& name) {
  const FunDef* f = world_.find_fun(name);
  if (!f) {
    out_ << "unknown function " << name << "\n";
    return;
  }
  if (!f->measure) {
    out_ << name << " is not recursive\n";
    return;
  }
  switch (f->measure->kind) {
    case MeasureSpec::Kind::Structural:
      out_ << "structural on " << f->decl.params[f->measure->param_index].name << "\n";
      break;
    case MeasureSpec::Kind::AdmLex:
    case MeasureSpec::Kind::Explicit:
      out_ << "measure " << pretty(f->measure->expr) << "\n";
      break;
  }
  for (const auto& vc : f->vcs) out_ << "  " << to_string(vc) << "\n";
}

void Session::show_lowered(const std::string& name) {
  if (auto it = lowered_.find(name); it != lowered_.end()) {
    out_ << pretty(it->second);
    return;
  }
  const FunDef* f = world_.find_fun(name);
  if (!f) {
    out_ << "nothing lowered under " << name << "\n";
    return;
  }
  try {
    std::vector<std::string> params;
    std::vector<ExprPtr> args;
    for (const auto& p : f->decl.params) {
      params.push_back(p.name);
      args.push_back(mk_var(p.name));
    }
    ExprPtr call = args.empty() ? mk_var(name) : mk_call(name, args);
    ExprPtr body = mk_bin(BinOp::Eq, call, call);
    ExprPtr goal = params.empty() ? body : mk_lambda(params, body);
    goal = default_type_vars(infer_expr(goal, world_.env));
    out_ << pretty(lower_goal(world_, goal));
  } catch (const Error& e) {
    out_ << "error: " << e.what() << "\n";
  }
}

void Session::show_config() {
  out_ << "solver-cmd   " << cfg_.solver_cmd << "\n"
       << "unroll-limit " << cfg_.unroll_limit << "\n"
       << "induct-depth " << cfg_.induct_depth << "\n"
       << "timeout-ms   " << cfg_.timeout_ms << "\n"
       << "trace-unroll " << (cfg_.trace_unroll ? "on" : "off") << "\n"
       << "trace-waterfall " << (cfg_.trace_waterfall ? "on" : "off") << "\n"
       << "machine      " << (cfg_.machine ? "on" : "off") << "\n";
}

}  // namespace iml
