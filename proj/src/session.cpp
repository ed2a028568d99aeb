/* SPDX-License-Identifier: Apache-2.0 */

#include "iml/session.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "iml/syntax.hpp"
#include "iml/typecheck.hpp"

namespace iml {

void SessionConfig::validate() const {
  if (unroll_limit == 0) throw Error("unroll limit must be positive");
  if (induct_depth == 0) throw Error("induction depth must be positive");
  if (timeout_ms == 0) throw Error("solver timeout must be positive");
  if (solver_cmd.empty()) throw Error("solver command is empty");
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Proved: return "proved";
    case Outcome::Refuted: return "refuted";
    case Outcome::Instance: return "instance";
    case Outcome::NoInstance: return "no instance";
    case Outcome::Unknown: return "unknown";
    case Outcome::AdmissionError: return "admission error";
    case Outcome::TypeError: return "type error";
    case Outcome::ParseError: return "parse error";
  }
  return "?";
}

std::string to_json(const DirectiveRecord& r, bool with_timing) {
  nlohmann::ordered_json j;
  j["directive"] = r.directive;
  j["verdict"] = to_string(r.verdict);
  nlohmann::ordered_json b = nlohmann::ordered_json::object();
  for (const auto& [n, v] : r.bindings) b[n] = v;
  j["bindings"] = b;
  j["expansions"] = r.expansions;
  if (with_timing) j["millis"] = r.millis;
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j.dump();
}

namespace {

using Clock = std::chrono::steady_clock;

double millis_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<std::pair<std::string, std::string>> surface(const Counterexample& cx) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [n, v] : cx.bindings) out.emplace_back(n, value_to_string(v));
  return out;
}

std::string describe(const Decl& d) {
  switch (d.kind) {
    case Decl::Kind::Type: return "type " + d.type.name;
    case Decl::Kind::Fun: return "let " + d.funs.front().name;
    case Decl::Kind::Theorem: return "theorem " + d.funs.front().name;
    default: return pretty(d);
  }
}

}  // namespace

Session::Session(SessionConfig cfg, std::ostream& out) : cfg_(std::move(cfg)), out_(out), world_(World::initial()) {
  cfg_.validate();
}

WaterfallConfig Session::waterfall_config() const {
  WaterfallConfig w;
  w.unroll_budget = cfg_.unroll_limit;
  w.induct_depth = cfg_.induct_depth;
  w.solver = SolverConfig{cfg_.solver_cmd, cfg_.timeout_ms};
  if (cfg_.trace_waterfall) w.trace = [this](const std::string& s) { out_ << "[waterfall] " << s << "\n"; };
  if (cfg_.trace_unroll) w.trace_unroll = [this](const std::string& s) { out_ << "[unroll] " << s << "\n"; };
  return w;
}

UnrollOptions Session::unroll_options(std::size_t budget) const {
  UnrollOptions o;
  o.budget = budget;
  o.solver = SolverConfig{cfg_.solver_cmd, cfg_.timeout_ms};
  if (cfg_.trace_unroll) o.trace = [this](const std::string& s) { out_ << "[unroll] " << s << "\n"; };
  return o;
}

ExprPtr Session::bind_cx(const ExprPtr& e) const {
  if (cx_.empty()) return e;
  std::vector<std::pair<std::string, ExprPtr>> sub;
  for (const auto& [n, v] : cx_) sub.emplace_back("CX." + n, v);
  return substitute(e, sub);
}

void Session::remember_cx(const Counterexample& cx) {
  cx_.clear();
  for (const auto& [n, v] : cx.bindings) cx_[n] = value_to_expr(v);
}

ExprPtr Session::typed_goal(const Decl& d) {
  Decl copy = d;
  copy.goal = bind_cx(d.goal);
  TypedDecl td = infer_decl(copy, world_.env);
  return default_type_vars(encode_ordinals(td.decl.goal));
}

void Session::record(DirectiveRecord r) {
  if (cfg_.machine) {
    out_ << to_json(r) << "\n";
  } else {
    out_ << r.directive << "\n  => " << to_string(r.verdict);
    if (r.expansions) out_ << " (" << r.expansions << " expansions)";
    out_ << "\n";
    for (const auto& [n, v] : r.bindings) out_ << "  CX." << n << " = " << v << "\n";
    if (!r.detail.empty()) out_ << "  " << r.detail << "\n";
  }
  out_.flush();
  records_.push_back(std::move(r));
}

void Session::directive(const Decl& d) {
  auto t0 = Clock::now();
  DirectiveRecord r;
  r.directive = pretty(d);
  ExprPtr goal = typed_goal(d);
  try {
    lowered_["it"] = lower_goal(world_, goal);
  } catch (const Error&) {
    lowered_.erase("it");
  }
  const bool is_verify = d.kind == Decl::Kind::Verify;
  const Polarity pol = is_verify ? Polarity::Falsifies : Polarity::Satisfies;
  Counterexample cx;
  if (is_verify && !d.bound) {
    ProofResult p = prove(goal, world_, waterfall_config());
    r.expansions = p.expansions;
    r.detail = p.reason;
    r.verdict = p.kind == ProofResult::Kind::Proved    ? Outcome::Proved
                : p.kind == ProofResult::Kind::Refuted ? Outcome::Refuted
                                                       : Outcome::Unknown;
    cx = p.cx;
  } else {
    std::size_t budget = d.bound ? static_cast<std::size_t>(*d.bound) : cfg_.unroll_limit;
    Verdict v = is_verify ? verify(world_, goal, unroll_options(budget)) : instance(world_, goal, unroll_options(budget));
    r.expansions = v.steps;
    r.detail = v.reason;
    switch (v.kind) {
      case Verdict::Kind::Proved: r.verdict = Outcome::Proved; break;
      case Verdict::Kind::Refuted: r.verdict = Outcome::Refuted; break;
      case Verdict::Kind::Instance: r.verdict = Outcome::Instance; break;
      case Verdict::Kind::NoInstance: r.verdict = Outcome::NoInstance; break;
      case Verdict::Kind::Unknown:
        r.verdict = Outcome::Unknown;
        r.detail = "Unknown(" + std::to_string(budget) + "): " + v.reason;
        break;
    }
    cx = v.cx;
  }
  if (r.verdict == Outcome::Refuted || r.verdict == Outcome::Instance) {
    std::string why;
    r.confirmed = check_cx(world_.table, goal, cx, pol, &why);
    if (!r.confirmed) {
      r.verdict = Outcome::Unknown;
      r.detail = "model not confirmed by evaluation: " + why;
    } else {
      r.bindings = surface(cx);
      r.detail.clear();
      remember_cx(cx);
    }
  }
  r.millis = millis_since(t0);
  record(std::move(r));
}

void Session::theorem(const Decl& d) {
  auto t0 = Clock::now();
  const std::string name = d.funs.front().name;
  WaterfallConfig quiet = waterfall_config();
  quiet.trace = nullptr;
  quiet.trace_unroll = nullptr;
  World w = admit(d, world_, AdmitConfig{make_vc_prover(quiet)});
  const TheoremDef& t = *w.theorems.at(name);
  ExprPtr goal = default_type_vars(encode_ordinals(theorem_goal(t)));
  try {
    lowered_[name] = lower_goal(w, goal);
  } catch (const Error&) {
  }
  DirectiveRecord r;
  r.directive = "theorem " + name;
  Counterexample cx;
  if (t.decl.has(Annotation::Kind::Auto)) {
    ProofResult p = prove(goal, w, waterfall_config());
    r.expansions = p.expansions;
    r.detail = p.reason;
    r.verdict = p.kind == ProofResult::Kind::Proved    ? Outcome::Proved
                : p.kind == ProofResult::Kind::Refuted ? Outcome::Refuted
                                                       : Outcome::Unknown;
    cx = p.cx;
  } else {
    Verdict v = verify(w, goal, unroll_options(cfg_.unroll_limit));
    r.expansions = v.steps;
    r.detail = v.reason;
    r.verdict = v.kind == Verdict::Kind::Proved    ? Outcome::Proved
                : v.kind == Verdict::Kind::Refuted ? Outcome::Refuted
                                                   : Outcome::Unknown;
    cx = v.cx;
  }
  if (r.verdict == Outcome::Refuted) {
    r.confirmed = check_cx(w.table, goal, cx, Polarity::Falsifies);
    if (r.confirmed) {
      r.bindings = surface(cx);
      r.detail.clear();
      remember_cx(cx);
    } else {
      r.verdict = Outcome::Unknown;
      r.detail = "model not confirmed by evaluation";
    }
  }
  if (r.verdict == Outcome::Proved) {
    r.detail.clear();
    if (t.decl.has(Annotation::Kind::Rewrite)) {
      try {
        w = install_rule(w, name);
        r.detail = "installed as rewrite rule";
      } catch (const AdmissionError& e) {
        r.detail = std::string("not usable as a rewrite rule: ") + e.what();
      }
    } else {
      auto proved = std::make_shared<TheoremDef>(t);
      proved->proved = true;
      w.theorems[name] = proved;
    }
  }
  world_ = std::move(w);
  r.millis = millis_since(t0);
  record(std::move(r));
}

void Session::process(const Decl& d) {
  auto t0 = Clock::now();
  DirectiveRecord err;
  err.directive = describe(d);
  try {
    switch (d.kind) {
      case Decl::Kind::Verify:
      case Decl::Kind::Instance:
        directive(d);
        return;
      case Decl::Kind::Theorem:
        theorem(d);
        return;
      default:
        world_ = admit(d, world_, AdmitConfig{make_vc_prover([this] {
                         WaterfallConfig w = waterfall_config();
                         w.trace = nullptr;
                         w.trace_unroll = nullptr;
                         return w;
                       }())});
        if (!cfg_.machine) {
          out_ << err.directive << " admitted";
          if (d.kind == Decl::Kind::Fun)
            if (const FunDef* f = world_.find_fun(d.funs.front().name); f && f->measure)
              out_ << " (termination: " << [&] {
                switch (f->measure->kind) {
                  case MeasureSpec::Kind::Structural:
                    return "structural on " + f->decl.params[f->measure->param_index].name;
                  default: return "measure " + pretty(f->measure->expr);
                }
              }() << ")";
          out_ << std::endl;
        }
        return;
    }
  } catch (const TypeError& e) {
    err.verdict = Outcome::TypeError;
    err.detail = e.what();
  } catch (const ParseError& e) {
    err.verdict = Outcome::ParseError;
    err.detail = e.what();
  } catch (const AdmissionError& e) {
    err.verdict = Outcome::AdmissionError;
    err.detail = std::string(to_string(e.kind())) + ": " + e.what();
  } catch (const AdmissibilityError& e) {
    err.verdict = Outcome::AdmissionError;
    err.detail = std::string(to_string(e.kind())) + ": " + e.what();
  } catch (const SolverStartError& e) {
    err.verdict = Outcome::Unknown;
    err.detail = std::string("solver error: ") + e.what();
  } catch (const SolverError& e) {
    err.verdict = Outcome::Unknown;
    err.detail = std::string("solver error: ") + e.what();
  } catch (const Error& e) {
    err.verdict = Outcome::AdmissionError;
    err.detail = e.what();
  }
  err.millis = millis_since(t0);
  record(std::move(err));
}

void Session::run_text(std::string_view text) {
  SourceModule m;
  try {
    m = parse_module(text);
  } catch (const ParseError& e) {
    DirectiveRecord r;
    r.directive = "<parse>";
    r.verdict = Outcome::ParseError;
    r.detail = e.what();
    record(std::move(r));
    return;
  }
  for (const auto& d : m.decls) process(d);
}

int Session::exit_code() const {
  bool negative = false, unknown = false;
  for (const auto& r : records_) {
    switch (r.verdict) {
      case Outcome::AdmissionError:
      case Outcome::TypeError:
      case Outcome::ParseError: return 3;
      case Outcome::Refuted:
      case Outcome::NoInstance: negative = true; break;
      case Outcome::Unknown: unknown = true; break;
      default: break;
    }
  }
  return negative ? 1 : unknown ? 2 : 0;
}

int run_batch(const std::string& path, const SessionConfig& cfg, std::ostream& out) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot read " << path << "\n";
    return 3;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  Session s(cfg, out);
  s.run_text(buf.str());
  return s.exit_code();
}

}  // namespace iml
