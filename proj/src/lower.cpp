/* SPDX-License-Identifier: Apache-2.0 */

#include "iml/lower.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "iml/syntax.hpp"

namespace iml {

const FunDecl* GroundProgram::find_fun(const std::string& name) const {
  for (const auto& f : funs)
    if (f.name == name) return &f;
  return nullptr;
}

const TypeDecl* GroundProgram::find_type(const std::string& name) const {
  for (const auto& t : types)
    if (t.name == name) return &t;
  return nullptr;
}

std::pair<const TypeDecl*, std::size_t> GroundProgram::find_ctor(const std::string& ctor) const {
  for (const auto& t : types)
    for (std::size_t i = 0; i < t.ctors.size(); ++i)
      if (t.ctors[i].name == ctor) return {&t, i};
  return {nullptr, 0};
}

std::string pretty(const GroundProgram& gp) {
  std::ostringstream os;
  for (const auto& t : gp.types) {
    Decl d;
    d.kind = Decl::Kind::Type;
    d.type = t;
    os << pretty(d) << "\n";
  }
  for (const auto& f : gp.funs) {
    if (!f.body) {
      os << "(* uninterpreted " << f.name << " *)\n";
      continue;
    }
    Decl d;
    d.kind = Decl::Kind::Fun;
    d.funs = {f};
    os << pretty(d) << "\n";
  }
  Decl g;
  g.kind = Decl::Kind::Verify;
  if (gp.vars.empty()) {
    g.goal = gp.goal;
  } else {
    std::vector<std::string> names;
    std::vector<TypePtr> types;
    for (const auto& [n, t] : gp.vars) {
      names.push_back(n);
      types.push_back(t);
    }
    auto lam = std::make_shared<Expr>(*mk_lambda(names, gp.goal));
    lam->param_types = types;
    g.goal = lam;
  }
  os << pretty(g) << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Names

void NameMangler::reserve(const std::string& name, const std::string& owner) {
  owner_of_.emplace(name, owner);
}

std::string NameMangler::claim(const std::string& desired, const std::string& owner) {
  auto try_name = [&](const std::string& n) {
    auto it = owner_of_.find(n);
    if (it == owner_of_.end()) {
      owner_of_.emplace(n, owner);
      return true;
    }
    return it->second == owner;
  };
  if (try_name(desired)) return desired;
  for (std::size_t k = 1;; ++k) {
    auto n = desired + "_" + std::to_string(k);
    if (try_name(n)) return n;
  }
}

bool NameMangler::owns(const std::string& name, const std::string& owner) const {
  auto it = owner_of_.find(name);
  return it != owner_of_.end() && it->second == owner;
}

std::string type_suffix(const TypePtr& t) {
  switch (t->kind) {
    case Type::Kind::Var:
      throw LowerError("type variable " + t->name + " survives monomorphization");
    case Type::Kind::Con: {
      std::string s;
      for (const auto& a : t->args) s += type_suffix(a) + "_";
      auto name = t->name;
      std::replace(name.begin(), name.end(), '.', '_');
      return s + name;
    }
    case Type::Kind::Tuple: {
      std::string s;
      for (std::size_t i = 0; i < t->args.size(); ++i) s += (i ? "_x_" : "") + type_suffix(t->args[i]);
      return s;
    }
    case Type::Kind::Arrow:
      return type_suffix(t->args[0]) + "_to_" + type_suffix(t->args[1]);
  }
  return "?";
}

namespace {

std::string strip_module(const std::string& name) {
  auto dot = name.rfind('.');
  return dot == std::string::npos ? name : name.substr(dot + 1);
}

bool is_arrow(const TypePtr& t) { return t && t->kind == Type::Kind::Arrow; }

// Splits `t1 -> ... -> tn -> r` into n parameter types.
std::vector<TypePtr> split_arrow(TypePtr t, std::size_t n, TypePtr* ret = nullptr) {
  std::vector<TypePtr> out;
  for (std::size_t i = 0; i < n && is_arrow(t); ++i) {
    out.push_back(t->args[0]);
    t = t->args[1];
  }
  if (ret) *ret = t;
  return out;
}

std::size_t arrow_depth(TypePtr t) {
  std::size_t n = 0;
  while (is_arrow(t)) {
    ++n;
    t = t->args[1];
  }
  return n;
}

ExprPtr retype(const ExprPtr& e, const std::map<std::string, TypePtr>& sub) {
  if (sub.empty()) return e;
  auto c = std::make_shared<Expr>(*e);
  c->type = subst_type(e->type, sub);
  for (auto& t : c->param_types) t = subst_type(t, sub);
  for (auto& a : c->args) a = retype(a, sub);
  for (auto& mc : c->cases) mc.body = retype(mc.body, sub);
  return c;
}

// Inlines functional lets, beta-reduces applied lambdas and flattens nested applications.
ExprPtr normalize(const ExprPtr& e) {
  auto kids = children_of(e);
  std::vector<ExprPtr> nk;
  for (const auto& k : kids) nk.push_back(normalize(k));
  ExprPtr n = kids.empty() ? e : with_children(e, nk);
  if (n->kind == Expr::Kind::Let && is_arrow(n->args[0]->type))
    return normalize(substitute(n->args[1], {{n->name, n->args[0]}}));
  if (n->kind != Expr::Kind::App) return n;
  const auto& head = n->args[0];
  std::vector<ExprPtr> args(n->args.begin() + 1, n->args.end());
  if (head->kind == Expr::Kind::App) {
    std::vector<ExprPtr> all(head->args.begin(), head->args.end());
    all.insert(all.end(), args.begin(), args.end());
    auto c = std::make_shared<Expr>(*n);
    c->args = all;
    return c;
  }
  if (head->kind == Expr::Kind::Lambda && args.size() >= head->params.size()) {
    ExprPtr body = head->args[0];
    auto ptypes = split_arrow(head->type, head->params.size());
    for (std::size_t i = head->params.size(); i-- > 0;) {
      auto let = std::make_shared<Expr>(*mk_let(head->params[i], args[i], body));
      let->type = body->type;
      body = let;
    }
    if (args.size() > head->params.size()) {
      auto c = std::make_shared<Expr>(*n);
      c->args = {body};
      c->args.insert(c->args.end(), args.begin() + static_cast<std::ptrdiff_t>(head->params.size()), args.end());
      body = c;
    }
    return normalize(body);
  }
  return n;
}

void first_types(const ExprPtr& e, std::map<std::string, TypePtr>& out) {
  if (e->kind == Expr::Kind::Var && e->type) out.emplace(e->name, e->type);
  for (const auto& c : children_of(e)) first_types(c, out);
}

const std::string kMarker = "\x01";

bool is_marker(const std::string& n) { return n.rfind(kMarker, 0) == 0; }

}  // namespace

// ---------------------------------------------------------------------------
// Lambda lifting

namespace {

class Lifter {
 public:
  Lifter(std::map<std::string, int>& counters, const std::function<bool(const std::string&)>& is_global,
         NameMangler* mangler)
      : counters_(counters), is_global_(is_global), mangler_(mangler) {}

  std::vector<FunDecl> lifted;

  ExprPtr lift(const ExprPtr& e, const std::string& base) {
    if (e->kind == Expr::Kind::App) {
      auto c = std::make_shared<Expr>(*e);
      std::string arg_base = base;
      if (e->args[0]->kind == Expr::Kind::Var) {
        auto h = e->args[0]->name;
        arg_base = strip_module(is_marker(h) ? h.substr(kMarker.size()) : h);
      }
      c->args[0] = lift(e->args[0], base);
      for (std::size_t i = 1; i < c->args.size(); ++i) c->args[i] = lift(c->args[i], arg_base);
      return c;
    }
    if (e->kind == Expr::Kind::Lambda) return lift_lambda(e, base);
    auto kids = children_of(e);
    if (kids.empty()) return e;
    std::vector<ExprPtr> nk;
    for (const auto& k : kids) nk.push_back(lift(k, base));
    return with_children(e, std::move(nk));
  }

 private:
  ExprPtr lift_lambda(const ExprPtr& e, const std::string& base) {
    ExprPtr body = lift(e->args[0], base);
    auto lam = std::make_shared<Expr>(*e);
    lam->args = {body};
    std::vector<std::string> caps;
    for (const auto& v : free_vars(lam))
      if (!is_global_(v) && !is_marker(v)) caps.push_back(v);
    std::map<std::string, TypePtr> types;
    first_types(body, types);
    TypePtr ret;
    auto ptypes = split_arrow(e->type, e->params.size(), &ret);
    if (ptypes.size() != e->params.size()) throw LowerError("untyped lambda cannot be lifted");

    int k = counters_[base]++;
    std::string name = base + "_lambda" + std::to_string(k);
    if (mangler_) name = mangler_->claim(name, "src:" + name);

    FunDecl f;
    f.name = name;
    std::vector<TypePtr> cap_types;
    for (const auto& c : caps) {
      auto t = types.count(c) ? types[c] : nullptr;
      if (!t) throw LowerError("cannot type captured variable " + c);
      cap_types.push_back(t);
      f.params.push_back(Param{c, t});
    }
    for (std::size_t i = 0; i < e->params.size(); ++i) f.params.push_back(Param{e->params[i], ptypes[i]});
    f.body = body;
    f.ret_annot = ret;
    f.span = e->span;
    lifted.push_back(f);

    auto fn_type = tarrows(cap_types, e->type);
    auto head = mk_var(name, fn_type);
    if (caps.empty()) return head;
    std::vector<ExprPtr> args;
    for (std::size_t i = 0; i < caps.size(); ++i) args.push_back(mk_var(caps[i], cap_types[i]));
    return with_type(mk_app(head, args), e->type);
  }

  std::map<std::string, int>& counters_;
  const std::function<bool(const std::string&)>& is_global_;
  NameMangler* mangler_;
};

}  // namespace

LiftResult lambda_lift(const ExprPtr& e, const std::string& context, std::map<std::string, int>& counters,
                       const std::function<bool(const std::string&)>& is_global, NameMangler* mangler) {
  Lifter l(counters, is_global, mangler);
  LiftResult r;
  r.expr = l.lift(e, context);
  r.lifted = std::move(l.lifted);
  return r;
}

// ---------------------------------------------------------------------------
// Specialization and monomorphization

namespace {

struct SourceFun {
  std::vector<std::string> params;
  std::vector<TypePtr> param_types;  // may mention scheme variables
  ExprPtr body;
  Scheme scheme;
};

struct BundleEntry {
  std::string fn;                  // ground instance
  std::vector<TypePtr> cap_types;  // source-level ground types of its captured arguments
};

struct Pending {
  std::string name;
  std::string src;
  std::map<std::string, TypePtr> tsub;
  std::vector<std::size_t> fpos;
  std::vector<BundleEntry> bundle;
};

struct Resolved {
  std::string name;
  std::vector<ExprPtr> args;  // first-order arguments, still source level
  std::size_t arity = 0;
};

class Lowerer {
 public:
  explicit Lowerer(const World& w) : w_(w) {
    for (const auto& [n, _] : w.funs) names_.reserve(n, "src:" + n);
    for (const auto& [n, _] : w.theorems) names_.reserve(n, "src:" + n);
    for (const auto& [n, _] : w.env.types) names_.reserve(n, "src:" + n);
    for (const auto& [n, _] : w.env.ctors) names_.reserve(n, "src:" + n);
    for (const auto& [n, _] : w.env.values) names_.reserve(n, "src:" + n);
    for (const char* n : {"int", "bool"}) names_.reserve(n, std::string("src:") + n);
  }

  GroundProgram run(const ExprPtr& goal, std::vector<std::pair<std::string, TypePtr>> vars) {
    ExprPtr body = goal;
    if (goal->kind == Expr::Kind::Lambda) {
      auto ptypes = split_arrow(goal->type, goal->params.size());
      for (std::size_t i = 0; i < goal->params.size(); ++i) vars.emplace_back(goal->params[i], ptypes.at(i));
      body = goal->args[0];
    }
    std::vector<std::string> scope;
    for (const auto& [n, t] : vars) {
      if (is_arrow(t)) throw LowerError("goal variable " + n + " has functional type " + type_to_string(t));
      gp_.vars.emplace_back(n, lower_type(t));
      scope.push_back(n);
    }
    body = prepare(body, "goal");
    gp_.goal = lower_expr(body, scope);
    while (!work_.empty()) {
      auto p = std::move(work_.front());
      work_.pop_front();
      process(p);
    }
    mark_recursion();
    return std::move(gp_);
  }

 private:
  // -- sources ---------------------------------------------------------------
  const SourceFun* source(const std::string& name) {
    auto it = sources_.find(name);
    if (it != sources_.end()) return &it->second;
    const FunDef* f = w_.find_fun(name);
    if (!f) return nullptr;
    SourceFun s;
    auto ptypes = split_arrow(f->scheme.body, f->decl.params.size());
    for (std::size_t i = 0; i < f->decl.params.size(); ++i) {
      s.params.push_back(f->decl.params[i].name);
      s.param_types.push_back(ptypes.at(i));
    }
    s.body = f->decl.body;
    s.scheme = f->scheme;
    return &sources_.emplace(name, std::move(s)).first->second;
  }

  bool is_global(const std::string& n) const {
    return sources_.count(n) || w_.funs.count(n) || w_.env.values.count(n);
  }

  ExprPtr prepare(const ExprPtr& e, const std::string& context) {
    auto n = normalize(e);
    auto r = lambda_lift(n, context, lambda_counters_, [this](const std::string& v) { return is_global(v); },
                         &names_);
    for (auto& f : r.lifted) {
      SourceFun s;
      std::vector<TypePtr> pts;
      for (const auto& p : f.params) {
        s.params.push_back(p.name);
        s.param_types.push_back(p.annot);
        pts.push_back(p.annot);
      }
      s.body = f.body;
      s.scheme = Scheme{{}, tarrows(pts, f.ret_annot)};
      sources_[f.name] = std::move(s);
    }
    return r.expr;
  }

  // -- types -----------------------------------------------------------------
  TypePtr lower_type(const TypePtr& t) {
    switch (t->kind) {
      case Type::Kind::Var:
        throw LowerError("type variable " + t->name + " survives monomorphization");
      case Type::Kind::Arrow:
        throw LowerError("functional type " + type_to_string(t) + " cannot be lowered");
      case Type::Kind::Tuple: {
        std::vector<TypePtr> es;
        for (const auto& a : t->args) es.push_back(lower_type(a));
        return ttuple(es);
      }
      case Type::Kind::Con:
        break;
    }
    if (t->name == "int" || t->name == "bool") return t;
    if (t->name == "Ordinal.t") throw LowerError("Ordinal.t values are not supported by the ground backend");
    auto key = type_suffix(t);
    auto it = type_names_.find(key);
    if (it != type_names_.end()) return tcon(it->second);
    auto dit = w_.env.types.find(t->name);
    if (dit == w_.env.types.end()) throw LowerError("unknown type " + t->name);
    const auto& src = dit->second;
    std::string name = t->args.empty() ? names_.claim(t->name, "src:" + t->name) : names_.claim(key, "type:" + key);
    type_names_[key] = name;
    gp_.type_source[name] = t->name;
    std::map<std::string, TypePtr> sub;
    for (std::size_t i = 0; i < src.params.size(); ++i) sub[src.params[i]] = t->args.at(i);
    TypeDecl td;
    td.name = name;
    for (const auto& c : src.ctors) {
      Constructor gc;
      gc.name = ctor_name(c.name, t);
      for (const auto& a : c.args) gc.args.push_back(lower_type(subst_type(a, sub)));
      td.ctors.push_back(std::move(gc));
    }
    gp_.types.push_back(std::move(td));
    return tcon(name);
  }

  std::string ctor_name(const std::string& ctor, const TypePtr& type) {
    if (type->args.empty()) {
      auto name = names_.claim(ctor, "src:" + ctor);
      gp_.ctor_source[name] = ctor;
      return name;
    }
    std::string suffix;
    for (std::size_t i = 0; i < type->args.size(); ++i) suffix += (i ? "_" : "") + type_suffix(type->args[i]);
    auto key = "ctor:" + ctor + "@" + type_suffix(type);
    auto name = names_.claim(ctor + "_" + suffix, key);
    gp_.ctor_source[name] = ctor;
    return name;
  }

  // Ground constructor for a source constructor at a (source, ground) datatype.
  std::string lower_ctor(const std::string& ctor, const TypePtr& type) {
    if (!type || type->kind != Type::Kind::Con) throw LowerError("constructor " + ctor + " at a non-datatype");
    lower_type(type);  // registers the instance
    return ctor_name(ctor, type);
  }

  std::vector<TypePtr> field_types(const std::string& ctor, const TypePtr& type) {
    const auto& sig = w_.env.ctors.at(ctor);
    std::map<std::string, TypePtr> sub;
    for (std::size_t i = 0; i < sig.type_params.size(); ++i) sub[sig.type_params[i]] = type->args.at(i);
    std::vector<TypePtr> out;
    for (const auto& a : sig.args) out.push_back(subst_type(a, sub));
    return out;
  }

  // -- calls -----------------------------------------------------------------
  Resolved resolve(const ExprPtr& head, const std::vector<ExprPtr>& args) {
    const auto& name = head->name;
    if (is_marker(name)) {
      auto g = name.substr(kMarker.size());
      return Resolved{g, args, gp_fun_arity(g)};
    }
    if (name.rfind("Ordinal.", 0) == 0)
      throw LowerError("Ordinal.t values are not supported by the ground backend (" + name + ")");
    const SourceFun* sf = source(name);
    if (!sf) {
      if (w_.env.values.count(name)) return resolve_opaque(head, args);
      throw LowerError("unknown function " + name);
    }
    auto targs = match_scheme(sf->scheme, head->type);
    std::map<std::string, TypePtr> tsub;
    for (std::size_t i = 0; i < targs.size(); ++i) tsub[sf->scheme.vars[i]] = targs[i];
    std::vector<TypePtr> ptypes;
    for (const auto& t : sf->param_types) ptypes.push_back(subst_type(t, tsub));
    std::vector<std::size_t> fpos;
    for (std::size_t i = 0; i < ptypes.size(); ++i)
      if (is_arrow(ptypes[i])) fpos.push_back(i);

    std::vector<BundleEntry> bundle;
    std::vector<ExprPtr> caps, plain;
    for (std::size_t i = 0; i < args.size() && i < ptypes.size(); ++i) {
      if (std::find(fpos.begin(), fpos.end(), i) == fpos.end()) {
        plain.push_back(args[i]);
        continue;
      }
      const auto& fa = args[i];
      Resolved r;
      if (fa->kind == Expr::Kind::Var && (is_marker(fa->name) || !is_local(fa->name)))
        r = resolve(fa, {});
      else if (fa->kind == Expr::Kind::App && fa->args[0]->kind == Expr::Kind::Var)
        r = resolve(fa->args[0], {fa->args.begin() + 1, fa->args.end()});
      else
        throw LowerError("functional argument `" + pretty(fa) + "` of " + name +
                         " is not a known function; it cannot be specialized");
      BundleEntry b;
      b.fn = r.name;
      for (const auto& c : r.args) {
        b.cap_types.push_back(c->type);
        caps.push_back(c);
      }
      bundle.push_back(std::move(b));
    }
    for (auto i : fpos)
      if (i >= args.size())
        throw LowerError("partial application of " + name + " leaves a functional parameter unspecialized");

    std::string key = name + "[";
    for (std::size_t i = 0; i < targs.size(); ++i) key += (i ? "," : "") + type_to_string(targs[i]);
    key += "]{";
    for (const auto& b : bundle) key += b.fn + "/" + std::to_string(b.cap_types.size()) + ";";
    key += "}";

    std::string inst;
    auto it = instances_.find(key);
    if (it != instances_.end()) {
      inst = it->second;
    } else {
      if (!bundle.empty()) {
        auto base = strip_module(name);
        inst = names_.claim(base + std::to_string(++spec_counters_[base]), key);
      } else if (!targs.empty()) {
        std::string suffix;
        for (std::size_t i = 0; i < targs.size(); ++i) suffix += (i ? "_" : "") + type_suffix(targs[i]);
        inst = names_.claim(strip_module(name) + "_" + suffix, key);
      } else {
        inst = names_.claim(name, "src:" + name);
      }
      instances_[key] = inst;
      std::size_t ncaps = 0;
      for (const auto& b : bundle) ncaps += b.cap_types.size();
      arity_[inst] = ncaps + ptypes.size() - fpos.size();
      gp_.fun_source[inst] = name;
      work_.push_back(Pending{inst, name, tsub, fpos, bundle});
    }
    std::vector<ExprPtr> fo = caps;
    fo.insert(fo.end(), plain.begin(), plain.end());
    if (args.size() > ptypes.size())
      throw LowerError("call of " + name + " returns a function; higher-order results are not supported");
    return Resolved{inst, fo, arity_.at(inst)};
  }

  std::size_t gp_fun_arity(const std::string& g) const {
    auto it = arity_.find(g);
    if (it == arity_.end()) throw LowerError("internal: unknown instance " + g);
    return it->second;
  }

  Resolved resolve_opaque(const ExprPtr& head, const std::vector<ExprPtr>& args) {
    const auto& name = head->name;
    const auto& scheme = w_.env.values.at(name);
    auto targs = match_scheme(scheme, head->type);
    std::string key = "opaque:" + name + "[";
    for (const auto& t : targs) key += type_to_string(t) + ",";
    key += "]";
    auto it = instances_.find(key);
    std::string inst;
    if (it != instances_.end()) {
      inst = it->second;
    } else {
      std::string suffix;
      for (std::size_t i = 0; i < targs.size(); ++i) suffix += "_" + type_suffix(targs[i]);
      inst = names_.claim(strip_module(name) + suffix, targs.empty() ? "src:" + name : key);
      instances_[key] = inst;
      TypePtr ret;
      auto pts = split_arrow(head->type, arrow_depth(head->type), &ret);
      FunDecl f;
      f.name = inst;
      for (std::size_t i = 0; i < pts.size(); ++i) f.params.push_back(Param{"x" + std::to_string(i), lower_type(pts[i])});
      f.ret_annot = lower_type(ret);
      arity_[inst] = pts.size();
      gp_.opaque.insert(inst);
      gp_.fun_source[inst] = name;
      gp_.funs.push_back(std::move(f));
    }
    return Resolved{inst, args, arity_.at(inst)};
  }

  bool is_local(const std::string& n) const {
    return std::find(scope_.begin(), scope_.end(), n) != scope_.end();
  }

  // -- instances -------------------------------------------------------------
  void process(const Pending& p) {
    const SourceFun* sf = source(p.src);
    ExprPtr body = retype(sf->body, p.tsub);
    std::set<std::string> avoid = free_vars(body);
    for (const auto& n : sf->params) avoid.insert(n);
    std::vector<std::pair<std::string, ExprPtr>> sub;
    FunDecl f;
    f.name = p.name;
    std::vector<Param> cap_params, plain_params;
    std::size_t b = 0;
    for (std::size_t i = 0; i < sf->params.size(); ++i) {
      auto pt = subst_type(sf->param_types[i], p.tsub);
      if (std::find(p.fpos.begin(), p.fpos.end(), i) == p.fpos.end()) {
        plain_params.push_back(Param{sf->params[i], pt});
        continue;
      }
      const auto& entry = p.bundle.at(b++);
      std::vector<ExprPtr> cap_vars;
      for (std::size_t k = 0; k < entry.cap_types.size(); ++k) {
        auto n = fresh_name(sf->params[i] + "_c" + std::to_string(k), avoid);
        avoid.insert(n);
        cap_params.push_back(Param{n, entry.cap_types[k]});
        cap_vars.push_back(mk_var(n, entry.cap_types[k]));
      }
      auto head = mk_var(kMarker + entry.fn, tarrows(entry.cap_types, pt));
      sub.emplace_back(sf->params[i], cap_vars.empty() ? head : with_type(mk_app(head, cap_vars), pt));
    }
    body = substitute(body, sub);
    body = prepare(body, strip_module(p.src));
    std::vector<std::string> scope;
    for (const auto& ps : {cap_params, plain_params})
      for (const auto& prm : ps) {
        f.params.push_back(Param{prm.name, lower_type(prm.annot)});
        scope.push_back(prm.name);
      }
    f.body = lower_expr(body, scope);
    f.ret_annot = f.body->type;
    gp_.funs.push_back(std::move(f));
  }

  // -- expressions -----------------------------------------------------------
  ExprPtr lower_expr(const ExprPtr& e, std::vector<std::string> scope) {
    auto saved = scope_;
    scope_ = scope;
    auto r = lower(e);
    scope_ = saved;
    return r;
  }

  ExprPtr lower(const ExprPtr& e) {
    auto typed = [&](const std::shared_ptr<Expr>& c) -> ExprPtr {
      if (e->type) c->type = lower_type(e->type);
      return c;
    };
    switch (e->kind) {
      case Expr::Kind::Int:
      case Expr::Kind::Bool:
        return typed(std::make_shared<Expr>(*e));
      case Expr::Kind::Var:
        if (is_local(e->name)) return typed(std::make_shared<Expr>(*e));
        if (is_global(e->name) || is_marker(e->name)) return lower_call(e, {});
        throw LowerError("unbound variable " + e->name);
      case Expr::Kind::App: {
        const auto& head = e->args[0];
        if (head->kind != Expr::Kind::Var || is_local(head->name))
          throw LowerError("cannot lower higher-order application `" + pretty(e) + "`");
        return lower_call(head, {e->args.begin() + 1, e->args.end()}, e->type);
      }
      case Expr::Kind::Lambda:
        throw LowerError("lambda survived lifting: " + pretty(e));
      case Expr::Kind::Let: {
        auto c = std::make_shared<Expr>(*e);
        c->args[0] = lower(e->args[0]);
        scope_.push_back(e->name);
        c->args[1] = lower(e->args[1]);
        scope_.pop_back();
        return typed(c);
      }
      case Expr::Kind::Match: {
        auto c = std::make_shared<Expr>(*e);
        c->args[0] = lower(e->args[0]);
        for (auto& mc : c->cases) {
          mc.pattern = lower_pattern(mc.pattern, e->args[0]->type);
          std::vector<std::string> pv;
          pattern_vars(mc.pattern, pv);
          auto n = scope_.size();
          scope_.insert(scope_.end(), pv.begin(), pv.end());
          mc.body = lower(mc.body);
          scope_.resize(n);
        }
        return typed(c);
      }
      case Expr::Kind::Construct: {
        auto c = std::make_shared<Expr>(*e);
        c->name = lower_ctor(e->name, e->type);
        for (auto& a : c->args) a = lower(a);
        return typed(c);
      }
      case Expr::Kind::IsA:
      case Expr::Kind::Select: {
        auto c = std::make_shared<Expr>(*e);
        c->name = lower_ctor(e->name, e->args[0]->type);
        c->args[0] = lower(e->args[0]);
        return typed(c);
      }
      default: {
        auto c = std::make_shared<Expr>(*e);
        for (auto& a : c->args) a = lower(a);
        return typed(c);
      }
    }
  }

  ExprPtr lower_call(const ExprPtr& head, const std::vector<ExprPtr>& args, const TypePtr& type = nullptr) {
    auto r = resolve(head, args);
    if (r.args.size() != r.arity)
      throw LowerError("partial application of " + head->name + " cannot be lowered; eta-expand it");
    std::vector<ExprPtr> la;
    std::vector<TypePtr> at;
    for (const auto& a : r.args) {
      la.push_back(lower(a));
      at.push_back(la.back()->type);
    }
    auto rt = lower_type(type ? type : head->type);
    auto c = std::make_shared<Expr>(*mk_call(r.name, la, rt));
    c->args[0] = mk_var(r.name, tarrows(at, rt));
    if (la.empty()) {
      // A constant function: keep it as a nullary application.
      c->type = rt;
    }
    return c;
  }

  PatternPtr lower_pattern(const PatternPtr& p, const TypePtr& type) {
    switch (p->kind) {
      case Pattern::Kind::Construct: {
        auto c = std::make_shared<Pattern>(*p);
        c->name = lower_ctor(p->name, type);
        auto fts = field_types(p->name, type);
        for (std::size_t i = 0; i < c->args.size(); ++i) c->args[i] = lower_pattern(c->args[i], fts.at(i));
        return c;
      }
      case Pattern::Kind::Tuple: {
        auto c = std::make_shared<Pattern>(*p);
        for (std::size_t i = 0; i < c->args.size(); ++i) c->args[i] = lower_pattern(c->args[i], type->args.at(i));
        return c;
      }
      default:
        return p;
    }
  }

  void calls_in(const ExprPtr& e, std::set<std::string>& out) const {
    if (e->kind == Expr::Kind::App) out.insert(call_name(e));
    for (const auto& c : children_of(e)) calls_in(c, out);
  }

  void mark_recursion() {
    std::map<std::string, std::set<std::string>> edges;
    for (const auto& f : gp_.funs)
      if (f.body) calls_in(f.body, edges[f.name]);
    for (auto& f : gp_.funs) {
      std::set<std::string> seen;
      std::vector<std::string> stack(edges[f.name].begin(), edges[f.name].end());
      while (!stack.empty()) {
        auto n = stack.back();
        stack.pop_back();
        if (!seen.insert(n).second) continue;
        for (const auto& m : edges[n]) stack.push_back(m);
      }
      f.recursive = seen.count(f.name) > 0;
    }
  }

  const World& w_;
  GroundProgram gp_;
  NameMangler names_;
  std::map<std::string, SourceFun> sources_;
  std::map<std::string, std::string> type_names_;
  std::map<std::string, std::string> instances_;
  std::map<std::string, std::size_t> arity_;
  std::map<std::string, int> spec_counters_;
  std::map<std::string, int> lambda_counters_;
  std::deque<Pending> work_;
  std::vector<std::string> scope_;
};

}  // namespace

GroundProgram lower_goal(const World& w, const ExprPtr& goal,
                         const std::vector<std::pair<std::string, TypePtr>>& vars) {
  Lowerer l(w);
  return l.run(goal, vars);
}

}  // namespace iml
