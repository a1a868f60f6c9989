#include "hopsi/typing.hpp"

#include <cassert>
#include <sstream>

namespace hopsi {

TypeEnv TypeEnv::of(std::initializer_list<std::pair<Name, Type>> entries) {
  TypeEnv env;
  for (const auto& [n, t] : entries) env.map_.emplace(n, t);
  return env;
}

const Type* TypeEnv::lookup(const Name& n) const {
  auto it = map_.find(n);
  return it == map_.end() ? nullptr : &it->second;
}

std::optional<TypeEnv> TypeEnv::extend(const Name& n, const Type& t) const {
  if (bound(n)) return std::nullopt;
  TypeEnv out = *this;
  out.map_.emplace(n, t);
  return out;
}

TypeEnv TypeEnv::extend_over(const Name& n, const Type& t) const {
  TypeEnv out = *this;
  out.map_.erase(n);
  out.map_.emplace(n, t);
  return out;
}

TypeEnv TypeEnv::remove(const Name& n) const {
  TypeEnv out = *this;
  out.map_.erase(n);
  return out;
}

NameSet TypeEnv::dom() const {
  NameSet s;
  for (const auto& [n, t] : map_) s.insert(n);
  return s;
}

NameSet TypeEnv::support() const {
  NameSet s;
  for (const auto& [n, t] : map_) {
    s.insert(n);
    NameSet ts = t.support();
    s.insert(ts.begin(), ts.end());
  }
  return s;
}

TypeEnv TypeEnv::swap(const Name& a, const Name& b) const {
  Transposition t{a, b};
  TypeEnv out;
  for (const auto& [n, ty] : map_) out.map_.emplace(t.apply(n), ty.swap(a, b));
  return out;
}

bool TypeEnv::operator==(const TypeEnv& o) const {
  if (map_.size() != o.map_.size()) return false;
  auto it = o.map_.begin();
  for (const auto& [n, t] : map_) {
    if (!(n == it->first) || !(t == it->second)) return false;
    ++it;
  }
  return true;
}

std::string TypeEnv::to_string() const {
  std::ostringstream os;
  os << "[";
  bool first = true;
  for (const auto& [n, t] : map_) {
    if (!first) os << ", ";
    first = false;
    os << n << ":" << t;
  }
  os << "]";
  return os.str();
}

bool check_subsumption(const TypingHooks& hooks, const Type& t1,
                       const Type& t2) {
  return hooks.subtype(t1, t2);
}

std::string describe(const TypeError& e) {
  std::ostringstream os;
  os << e.rule << ": " << e.message;
  if (!e.path.empty()) {
    os << " (at ";
    for (size_t i = 0; i < e.path.size(); ++i) {
      if (i) os << ".";
      os << e.path[i];
    }
    os << ")";
  }
  return os.str();
}

namespace {

struct Checker {
  const Instance& inst;
  std::vector<int> path;

  CheckOutcome fail(const std::string& rule, const std::string& message) {
    return TypeError{path, rule, message};
  }

  std::variant<Type, TypeError> synth(const TypeEnv& env,
                                      const Assertion& ambient, const Term& t) {
    return inst.hooks.synth_term(env, ambient, t);
  }

  CheckOutcome check(const TypeEnv& env, const Assertion& ambient,
                     const Process& p) {
    const ProcessNode& n = p.node();
    if (std::holds_alternative<NilP>(n.v)) return check_ok();

    if (const auto* pr = std::get_if<ParNode>(&n.v)) {
      return check_par(env, ambient, pr->left, pr->right);
    }

    if (const auto* o = std::get_if<OutputP>(&n.v)) {
      Assertion dir = inst.hooks.ambient_for(ambient, Direction::Output);
      auto subject_t = synth(env, dir, o->subject);
      if (auto* err = std::get_if<TypeError>(&subject_t)) return at(*err);
      auto carried = inst.hooks.compat(std::get<Type>(subject_t),
                                       Direction::Output);
      if (auto* err = std::get_if<TypeError>(&carried)) return at(*err);
      auto object_t = synth(env, dir, o->object);
      if (auto* err = std::get_if<TypeError>(&object_t)) return at(*err);
      if (!inst.hooks.subtype(std::get<Type>(object_t), std::get<Type>(carried)))
        return fail("OUT",
                    "object type " + std::get<Type>(object_t).to_string() +
                        " not a subtype of carried type " +
                        std::get<Type>(carried).to_string());
      path.push_back(0);
      auto out = check(env, ambient, o->cont);
      path.pop_back();
      return out;
    }

    if (const auto* i = std::get_if<InputP>(&n.v)) {
      Assertion dir = inst.hooks.ambient_for(ambient, Direction::Input);
      auto subject_t = synth(env, dir, i->subject);
      if (auto* err = std::get_if<TypeError>(&subject_t)) return at(*err);
      auto carried = inst.hooks.compat(std::get<Type>(subject_t),
                                       Direction::Input);
      if (auto* err = std::get_if<TypeError>(&carried)) return at(*err);

      // Alpha-rename binders clashing with the environment or ambient.
      Term pattern = i->pattern;
      Process cont = i->cont;
      std::vector<std::pair<Name, Type>> binders = i->binders;
      NameSet clash = env.dom();
      {
        NameSet amb = ambient.support();
        clash.insert(amb.begin(), amb.end());
      }
      for (auto& [x, ty] : binders) {
        if (clash.find(x) == clash.end()) continue;
        NameSet avoid = clash;
        NameSet ps = cont.support();
        avoid.insert(ps.begin(), ps.end());
        NameSet pats = pattern.support();
        avoid.insert(pats.begin(), pats.end());
        Name fresh = fresh_for(avoid, x.label());
        pattern = pattern.swap(x, fresh);
        cont = cont.swap(x, fresh);
        x = fresh;
      }

      TypeEnv extended = env;
      for (const auto& [x, ty] : binders) {
        auto next = extended.extend(x, ty);
        if (!next) return fail("IN", "duplicate pattern variable " + x.label());
        extended = *next;
      }
      auto pattern_t = synth(extended, dir, pattern);
      if (auto* err = std::get_if<TypeError>(&pattern_t)) return at(*err);
      if (!inst.hooks.subtype(std::get<Type>(carried), std::get<Type>(pattern_t)))
        return fail("IN",
                    "carried type " + std::get<Type>(carried).to_string() +
                        " not a subtype of pattern type " +
                        std::get<Type>(pattern_t).to_string());
      path.push_back(0);
      auto out = check(extended, ambient, cont);
      path.pop_back();
      return out;
    }

    if (const auto* r = std::get_if<RunP>(&n.v)) {
      auto handle_t = synth(env, ambient, r->handle);
      if (auto* err = std::get_if<TypeError>(&handle_t)) return at(*err);
      std::vector<Process> targets = inst.hooks.handles(ambient, r->handle);
      if (targets.empty()) {
        if (inst.hooks.empty_handle == EmptyHandlePolicy::Deadlock)
          return check_ok();
        return fail("RUN", "no handle target for " + r->handle.to_string());
      }
      auto extracted = inst.hooks.extract_env(std::get<Type>(handle_t));
      if (auto* err = std::get_if<TypeError>(&extracted)) return at(*err);
      const TypeEnv& inner = std::get<TypeEnv>(extracted);
      for (const Process& target : targets) {
        path.push_back(0);
        auto out = check(inner, ambient, target);
        path.pop_back();
        if (out) return out;
      }
      return check_ok();
    }

    if (const auto* c = std::get_if<CaseP>(&n.v)) {
      for (size_t k = 0; k < c->branches.size(); ++k) {
        path.push_back(static_cast<int>(k));
        if (auto err =
                inst.hooks.check_condition(env, ambient, c->branches[k].first)) {
          path.pop_back();
          return at(*err);
        }
        auto out = check(env, ambient, c->branches[k].second);
        path.pop_back();
        if (out) return out;
      }
      return check_ok();
    }

    if (const auto* re = std::get_if<RestrictP>(&n.v)) {
      Name x = re->name;
      Process body = re->body;
      NameSet clash = ambient.support();
      NameSet dom = env.dom();
      clash.insert(dom.begin(), dom.end());
      if (clash.find(x) != clash.end()) {
        NameSet avoid = clash;
        NameSet bs = body.support();
        avoid.insert(bs.begin(), bs.end());
        Name fresh = fresh_for(avoid, x.label());
        body = body.swap(x, fresh);
        x = fresh;
      }
      auto extended = env.extend(x, re->type);
      assert(extended);
      path.push_back(0);
      auto out = check(*extended, ambient, body);
      path.pop_back();
      return out;
    }

    if (const auto* rp = std::get_if<ReplP>(&n.v)) {
      path.push_back(0);
      auto out = check(env, ambient, rp->body);
      path.pop_back();
      return out;
    }

    const auto* a = std::get_if<AssertP>(&n.v);
    assert(a);
    if (auto err = inst.hooks.check_assertion(env, ambient, a->assertion))
      return at(*err);
    return check_ok();
  }

  CheckOutcome check_par(const TypeEnv& env, const Assertion& ambient,
                         const Process& left, const Process& right) {
    // Freshen each side's unguarded restriction binders against everything
    // in scope, then lend its frame to the sibling.
    NameSet scope = env.dom();
    {
      NameSet amb = ambient.support();
      scope.insert(amb.begin(), amb.end());
      NameSet ls = left.support();
      scope.insert(ls.begin(), ls.end());
      NameSet rs = right.support();
      scope.insert(rs.begin(), rs.end());
    }
    Process l = freshen_restrictions(left, scope);
    Process r = freshen_restrictions(right, scope);

    auto frames_of = [&](const Process& side) {
      return std::make_pair(
          frame_names(side),
          frame_assertion(side, inst.sig.unit, inst.sig.compose));
    };
    auto [lnames, lassert] = frames_of(l);
    auto [rnames, rassert] = frames_of(r);

    auto extend_all = [&](const TypeEnv& base,
                          const std::vector<std::pair<Name, Type>>& names)
        -> std::optional<TypeEnv> {
      TypeEnv out = base;
      for (const auto& [x, t] : names) {
        auto next = out.extend(x, t);
        if (!next) return std::nullopt;
        out = *next;
      }
      return out;
    };

    auto lenv = extend_all(env, rnames);
    auto renv = extend_all(env, lnames);
    if (!lenv || !renv)
      return fail("PAR", "sibling frame binder collides with environment");

    path.push_back(0);
    auto out = check(*lenv, inst.sig.compose(ambient, rassert), l);
    path.pop_back();
    if (out) return out;
    path.push_back(1);
    out = check(*renv, inst.sig.compose(ambient, lassert), r);
    path.pop_back();
    return out;
  }

  CheckOutcome at(TypeError err) {
    if (err.path.empty()) err.path = path;
    return err;
  }
};

}  // namespace

CheckOutcome check_process(const TypeEnv& env, const Assertion& ambient,
                           const Process& p, const Instance& inst) {
  // Well-formed judgment: mentioned names must be bound.
  NameSet mentioned = p.support();
  {
    NameSet amb = ambient.support();
    mentioned.insert(amb.begin(), amb.end());
  }
  for (const Name& n : mentioned) {
    if (!env.bound(n))
      return TypeError{{},
                       "ILL-FORMED",
                       "name " + n.label() + " not bound in the environment"};
  }
  Checker checker{inst, {}};
  return checker.check(env, ambient, p);
}

}  // namespace hopsi
