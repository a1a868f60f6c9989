#include "hopsi/instance_hopi2.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace hopsi::hopi2 {

// --- direct syntax ----------------------------------------------------------

namespace {
Hopi2Ptr mk(Hopi2Process p) {
  return std::make_shared<const Hopi2Process>(std::move(p));
}
}  // namespace

Hopi2Ptr h2_nil() { return mk({H2Nil{}}); }
Hopi2Ptr h2_in(Name channel, Name var, Hopi2Ptr body) {
  return mk({H2In{std::move(channel), std::move(var), std::move(body)}});
}
Hopi2Ptr h2_out(Name channel, Hopi2Ptr payload, Hopi2Ptr cont) {
  return mk({H2Out{std::move(channel), std::move(payload), std::move(cont)}});
}
Hopi2Ptr h2_par(Hopi2Ptr left, Hopi2Ptr right) {
  return mk({H2Par{std::move(left), std::move(right)}});
}
Hopi2Ptr h2_new(Name channel, size_t level, Hopi2Ptr body) {
  return mk({H2New{std::move(channel), level, std::move(body)}});
}
Hopi2Ptr h2_var(Name var) { return mk({H2Var{std::move(var)}}); }

std::string h2_to_string(const Hopi2Ptr& p) {
  std::ostringstream os;
  struct Printer {
    std::ostream& os;
    void walk(const Hopi2Ptr& p) {
      if (std::holds_alternative<H2Nil>(p->v)) {
        os << "0";
      } else if (const auto* i = std::get_if<H2In>(&p->v)) {
        os << i->channel << "(" << i->var << ").";
        walk_atom(i->body);
      } else if (const auto* o = std::get_if<H2Out>(&p->v)) {
        os << o->channel << "<";
        walk(o->payload);
        os << ">.";
        walk_atom(o->cont);
      } else if (const auto* pr = std::get_if<H2Par>(&p->v)) {
        walk_atom(pr->left);
        os << " | ";
        walk_atom(pr->right);
      } else if (const auto* nu = std::get_if<H2New>(&p->v)) {
        os << "(new " << nu->channel << ":ch^" << nu->level << ")";
        walk_atom(nu->body);
      } else if (const auto* v = std::get_if<H2Var>(&p->v)) {
        os << v->var;
      }
    }
    void walk_atom(const Hopi2Ptr& p) {
      if (std::holds_alternative<H2Par>(p->v)) {
        os << "(";
        walk(p);
        os << ")";
      } else {
        walk(p);
      }
    }
  } printer{os};
  printer.walk(p);
  return os.str();
}

// --- direct level inference ----------------------------------------------------

std::variant<size_t, LevelError> infer_level(const LevelEnv& env,
                                             const Hopi2Ptr& p) {
  if (std::holds_alternative<H2Nil>(p->v)) return size_t{0};
  if (const auto* v = std::get_if<H2Var>(&p->v)) {
    auto it = env.entries.find(v->var);
    if (it == env.entries.end() || it->second.first)
      return LevelError{"VAR", "unbound process variable " + v->var.label()};
    return it->second.second;
  }
  if (const auto* pr = std::get_if<H2Par>(&p->v)) {
    auto l = infer_level(env, pr->left);
    if (auto* e = std::get_if<LevelError>(&l)) return *e;
    auto r = infer_level(env, pr->right);
    if (auto* e = std::get_if<LevelError>(&r)) return *e;
    return std::max(std::get<size_t>(l), std::get<size_t>(r));
  }
  if (const auto* nu = std::get_if<H2New>(&p->v)) {
    if (nu->level == 0) return LevelError{"NEW", "channel level must be >= 1"};
    LevelEnv inner = env;
    inner.bind_channel(nu->channel, nu->level);
    return infer_level(inner, nu->body);
  }
  if (const auto* i = std::get_if<H2In>(&p->v)) {
    auto it = env.entries.find(i->channel);
    if (it == env.entries.end() || !it->second.first)
      return LevelError{"IN", "unbound channel " + i->channel.label()};
    size_t k = it->second.second;
    LevelEnv inner = env;
    inner.bind_var(i->var, k - 1);
    return infer_level(inner, i->body);
  }
  const auto* o = std::get_if<H2Out>(&p->v);
  assert(o);
  auto it = env.entries.find(o->channel);
  if (it == env.entries.end() || !it->second.first)
    return LevelError{"OUT", "unbound channel " + o->channel.label()};
  size_t k = it->second.second;
  auto payload = infer_level(env, o->payload);
  if (auto* e = std::get_if<LevelError>(&payload)) return *e;
  size_t m = std::get<size_t>(payload);
  if (m >= k)
    return LevelError{"OUT", "payload level " + std::to_string(m) +
                                 " not below channel level " +
                                 std::to_string(k)};
  auto cont = infer_level(env, o->cont);
  if (auto* e = std::get_if<LevelError>(&cont)) return *e;
  return std::max(k, std::get<size_t>(cont));
}

// --- generic types ----------------------------------------------------------------

Type Ty2::level(size_t n) {
  return Type(std::make_shared<Ty2>(Kind::Level, n));
}
Type Ty2::ch(size_t k) { return Type(std::make_shared<Ty2>(Kind::Ch, k)); }
Type Ty2::ch_in(size_t k) { return Type(std::make_shared<Ty2>(Kind::ChIn, k)); }
Type Ty2::ch_out(size_t k) {
  return Type(std::make_shared<Ty2>(Kind::ChOut, k));
}

const Ty2* type_as(const Type& t) {
  return dynamic_cast<const Ty2*>(t.ptr().get());
}

int Ty2::compare_same(const NominalBase& other, AlphaCtx&) const {
  const auto& o = static_cast<const Ty2&>(other);
  if (kind_ != o.kind_) return kind_ < o.kind_ ? -1 : 1;
  if (value_ != o.value_) return value_ < o.value_ ? -1 : 1;
  return 0;
}

void Ty2::print(std::ostream& os) const {
  switch (kind_) {
    case Kind::Level:
      os << value_;
      return;
    case Kind::Ch:
      os << "ch^" << value_;
      return;
    case Kind::ChIn:
      os << "ch-^" << value_;
      return;
    case Kind::ChOut:
      os << "ch+^" << value_;
      return;
  }
}

TypePtr Ty2::swap_names(const Name&, const Name&) const {
  return std::make_shared<Ty2>(kind_, value_);
}

// --- assertions ---------------------------------------------------------------------

Assertion level_assertion(size_t n) {
  return Assertion(std::make_shared<Assert2>(Assert2::Tag::Plain, n));
}
Assertion in_tag(size_t n) {
  return Assertion(std::make_shared<Assert2>(Assert2::Tag::In, n));
}
Assertion out_tag(size_t n) {
  return Assertion(std::make_shared<Assert2>(Assert2::Tag::Out, n));
}

const Assert2* assertion_as(const Assertion& a) {
  return dynamic_cast<const Assert2*>(a.ptr().get());
}

int Assert2::compare_same(const NominalBase& other, AlphaCtx&) const {
  const auto& o = static_cast<const Assert2&>(other);
  if (tag_ != o.tag_) return tag_ < o.tag_ ? -1 : 1;
  if (level_ != o.level_) return level_ < o.level_ ? -1 : 1;
  return 0;
}

void Assert2::print(std::ostream& os) const {
  os << level_;
  if (tag_ == Tag::In) os << "-";
  if (tag_ == Tag::Out) os << "+";
}

AssertionPtr Assert2::swap_names(const Name&, const Name&) const {
  return std::make_shared<Assert2>(tag_, level_);
}
AssertionPtr Assert2::substitute(const Subst&) const {
  return std::make_shared<Assert2>(tag_, level_);
}
AssertionPtr Assert2::canonical() const {
  return std::make_shared<Assert2>(tag_, level_);
}

Assertion compose(const Assertion& a, const Assertion& b) {
  const auto* ia = assertion_as(a);
  const auto* ib = assertion_as(b);
  assert(ia && ib);
  // Equal-level tag absorption; everything else is the plain maximum.
  if (ia->level() == ib->level()) {
    bool plain_left = ia->tag() == Assert2::Tag::Plain;
    bool plain_right = ib->tag() == Assert2::Tag::Plain;
    if (plain_left != plain_right) return level_assertion(ia->level());
  }
  return level_assertion(std::max(ia->level(), ib->level()));
}

// --- embedding ----------------------------------------------------------------------

namespace {

struct Embedder {
  LevelEnv scope;

  Process walk(const Hopi2Ptr& p) {
    if (std::holds_alternative<H2Nil>(p->v)) return Process::nil();
    if (const auto* v = std::get_if<H2Var>(&p->v))
      return Process::run(hopi::name_term(v->var));
    if (const auto* pr = std::get_if<H2Par>(&p->v))
      return Process::par(walk(pr->left), walk(pr->right));
    if (const auto* nu = std::get_if<H2New>(&p->v)) {
      LevelEnv saved = scope;
      scope.bind_channel(nu->channel, nu->level);
      Process body = walk(nu->body);
      scope = saved;
      return Process::restrict(nu->channel, Ty2::ch(nu->level),
                               std::move(body));
    }
    if (const auto* i = std::get_if<H2In>(&p->v)) {
      auto it = scope.entries.find(i->channel);
      size_t k = (it != scope.entries.end() && it->second.first)
                     ? it->second.second
                     : 1;
      LevelEnv saved = scope;
      scope.bind_var(i->var, k - 1);
      Process body = walk(i->body);
      scope = saved;
      return Process::input(hopi::name_term(i->channel),
                            {{i->var, Ty2::level(k - 1)}},
                            hopi::name_term(i->var), std::move(body));
    }
    const auto* o = std::get_if<H2Out>(&p->v);
    assert(o);
    Process payload = walk(o->payload);
    return Process::output(hopi::name_term(o->channel),
                           hopi::proc_term(std::move(payload)), walk(o->cont));
  }
};

}  // namespace

EmbedResult embed(const LevelEnv& env, const Hopi2Ptr& p) {
  Embedder embedder{env};
  Process proc = embedder.walk(p);
  TypeEnv types;
  for (const auto& [name, entry] : env.entries) {
    Type t = entry.first ? Ty2::ch(entry.second) : Ty2::level(entry.second);
    types = types.extend_over(name, t);
  }
  return {std::move(proc), std::move(types)};
}

// --- typing hooks --------------------------------------------------------------------

namespace {

size_t ambient_level(const Assertion& psi) {
  const auto* a = assertion_as(psi);
  assert(a);
  return a->level();
}

size_t max_probe_level(const TypeEnv& env, const Assertion& psi) {
  size_t m = ambient_level(psi) + 1;
  for (const auto& [n, t] : env) {
    if (const auto* ty = type_as(t)) m = std::max(m, ty->value() + 1);
  }
  return m;
}

// Minimal ambient level at which the embedded process checks.
std::variant<size_t, TypeError> probe_level(const TypeEnv& env,
                                            const Assertion& psi,
                                            const Process& p) {
  size_t bound = max_probe_level(env, psi);
  CheckOutcome last;
  for (size_t level = 0; level <= bound; ++level) {
    auto err = check_process(env, level_assertion(level), p, instance());
    if (!err) return level;
    last = err;
  }
  if (last) return *last;
  return TypeError{{}, "TERM", "no level admits the embedded process"};
}

std::variant<Type, TypeError> synth_term(const TypeEnv& env,
                                         const Assertion& psi, const Term& m) {
  const auto* tag = assertion_as(psi);
  if (!tag) return TypeError{{}, "TERM", "foreign assertion"};

  if (const Name* n = hopi::term_as_name(m)) {
    const Type* bound = env.lookup(*n);
    if (!bound) return TypeError{{}, "TERM", "unbound name " + n->label()};
    const auto* ty = type_as(*bound);
    if (!ty) return TypeError{{}, "TERM", "foreign type for " + n->label()};
    switch (ty->kind()) {
      case Ty2::Kind::Level:
        // Process variable. In plain (process) position its level must fit
        // under the ambient level; direction tags mark pattern and object
        // positions whose levels are constrained through subtyping instead.
        if (tag->tag() == Assert2::Tag::Plain && ty->value() > tag->level())
          return TypeError{{}, "VAR",
                           "variable level " + std::to_string(ty->value()) +
                               " above ambient level " +
                               std::to_string(tag->level())};
        return *bound;
      case Ty2::Kind::Ch:
        if (tag->tag() == Assert2::Tag::In) return Ty2::ch_in(ty->value());
        if (tag->tag() == Assert2::Tag::Out) {
          if (ty->value() > tag->level())
            return TypeError{{}, "CH-OUT",
                             "channel level " + std::to_string(ty->value()) +
                                 " above ambient level " +
                                 std::to_string(tag->level())};
          return Ty2::ch_out(ty->value());
        }
        return *bound;
      case Ty2::Kind::ChIn:
        if (tag->tag() == Assert2::Tag::Out)
          return TypeError{{}, "CH-OUT", "input-only channel used for output"};
        return tag->tag() == Assert2::Tag::In ? Ty2::ch_in(ty->value())
                                              : *bound;
      case Ty2::Kind::ChOut:
        if (tag->tag() == Assert2::Tag::In)
          return TypeError{{}, "CH-IN", "output-only channel used for input"};
        if (tag->tag() == Assert2::Tag::Out) {
          if (ty->value() > tag->level())
            return TypeError{{}, "CH-OUT",
                             "channel level " + std::to_string(ty->value()) +
                                 " above ambient level " +
                                 std::to_string(tag->level())};
          return Ty2::ch_out(ty->value());
        }
        return *bound;
    }
  }
  const Process* p = hopi::term_as_proc(m);
  assert(p);
  auto level = probe_level(env, psi, *p);
  if (auto* err = std::get_if<TypeError>(&level)) return *err;
  size_t lvl = std::get<size_t>(level);
  if (tag->tag() == Assert2::Tag::Plain && lvl > tag->level())
    return TypeError{{}, "TERM",
                     "process level " + std::to_string(lvl) +
                         " above ambient level " +
                         std::to_string(tag->level())};
  return Ty2::level(lvl);
}

bool subtype(const Type& a, const Type& b) {
  const auto* ta = type_as(a);
  const auto* tb = type_as(b);
  if (!ta || !tb) return false;
  if (ta->kind() == Ty2::Kind::Level && tb->kind() == Ty2::Kind::Level)
    return ta->value() <= tb->value();
  return ta->kind() == tb->kind() && ta->value() == tb->value();
}

std::variant<Type, TypeError> compat_hook(const Type& t, Direction d) {
  const auto* ty = type_as(t);
  if (!ty) return TypeError{{}, "CHA", "foreign type"};
  switch (ty->kind()) {
    case Ty2::Kind::Level:
      return TypeError{{}, "CHA", "levels carry nothing"};
    case Ty2::Kind::Ch:
      return Ty2::level(ty->value() - 1);
    case Ty2::Kind::ChIn:
      if (d == Direction::Output)
        return TypeError{{}, "CHA", "input-only channel in output position"};
      return Ty2::level(ty->value() - 1);
    case Ty2::Kind::ChOut:
      if (d == Direction::Input)
        return TypeError{{}, "CHA", "output-only channel in input position"};
      return Ty2::level(ty->value() - 1);
  }
  return TypeError{{}, "CHA", "unreachable"};
}

Assertion direction_ambient(const Assertion& psi, Direction d) {
  size_t n = ambient_level(psi);
  return d == Direction::Input ? in_tag(n) : out_tag(n);
}

bool entails(const Assertion& psi, const Condition& phi) {
  (void)psi;
  const auto* c = dynamic_cast<const hopi::Cond*>(phi.ptr().get());
  if (!c) return false;
  switch (c->kind()) {
    case hopi::Cond::Kind::Top:
      return true;
    case hopi::Cond::Kind::ChanEq: {
      const Name* l = hopi::term_as_name(c->lhs());
      const Name* r = hopi::term_as_name(c->rhs());
      return l && r && *l == *r;
    }
    case hopi::Cond::Kind::Handle:
      return struct_eq(c->lproc(), c->rproc());
  }
  return false;
}

// --- generators -------------------------------------------------------------------

const std::vector<Name>& channel_pool() {
  static const std::vector<Name> pool = [] {
    NameSupply supply(200);
    std::vector<Name> out;
    for (const char* l : {"a", "b", "c", "d"}) out.push_back(supply.fresh(l));
    return out;
  }();
  return pool;
}

struct GenScope {
  LevelEnv env;
  NameSupply vars{300};
  NameSupply channels{400};
};

std::vector<std::pair<Name, size_t>> channels_in(const LevelEnv& env) {
  std::vector<std::pair<Name, size_t>> out;
  for (const auto& [n, e] : env.entries)
    if (e.first) out.emplace_back(n, e.second);
  return out;
}

std::vector<std::pair<Name, size_t>> vars_below(const LevelEnv& env,
                                                size_t bound) {
  std::vector<std::pair<Name, size_t>> out;
  for (const auto& [n, e] : env.entries)
    if (!e.first && e.second < bound) out.emplace_back(n, e.second);
  return out;
}

// Builds a process whose inferred level is at most `budget`.
Hopi2Ptr gen_level_bounded(Rng& rng, GenScope& scope, size_t budget,
                           size_t size) {
  if (size == 0) return h2_nil();
  auto channels = channels_in(scope.env);
  for (int attempt = 0; attempt < 6; ++attempt) {
    switch (draw(rng, 7)) {
      case 6: {  // a communicating pair on one channel
        std::vector<std::pair<Name, size_t>> usable;
        for (auto& [ch, k] : channels)
          if (k <= budget) usable.emplace_back(ch, k);
        if (usable.empty()) break;
        auto [ch, k] = usable[draw(rng, usable.size())];
        GenScope pl = scope;
        Hopi2Ptr payload = gen_level_bounded(rng, pl, k - 1, size / 3);
        scope.vars = pl.vars;
        scope.channels = pl.channels;
        Name var = scope.vars.fresh("X");
        GenScope inner = scope;
        inner.env.bind_var(var, k - 1);
        Hopi2Ptr body = gen_level_bounded(rng, inner, budget, size / 3);
        scope.vars = inner.vars;
        scope.channels = inner.channels;
        return h2_par(h2_out(ch, std::move(payload), h2_nil()),
                      h2_in(ch, var, std::move(body)));
      }
      case 0:
        return h2_nil();
      case 1: {
        Hopi2Ptr l = gen_level_bounded(rng, scope, budget, size / 2);
        Hopi2Ptr r = gen_level_bounded(rng, scope, budget, size / 2);
        return h2_par(std::move(l), std::move(r));
      }
      case 2: {  // input: no level constraint on the channel
        if (channels.empty()) break;
        auto [ch, k] = channels[draw(rng, channels.size())];
        Name var = scope.vars.fresh("X");
        GenScope inner = scope;
        inner.env.bind_var(var, k - 1);
        Hopi2Ptr body = gen_level_bounded(rng, inner, budget, size - 1);
        scope.vars = inner.vars;
        scope.channels = inner.channels;
        return h2_in(ch, var, std::move(body));
      }
      case 3: {  // output: channel level within the budget
        std::vector<std::pair<Name, size_t>> usable;
        for (auto& [ch, k] : channels)
          if (k <= budget) usable.emplace_back(ch, k);
        if (usable.empty()) break;
        auto [ch, k] = usable[draw(rng, usable.size())];
        Hopi2Ptr payload;
        auto vars = vars_below(scope.env, k);
        if (!vars.empty() && coin(rng)) {
          payload = h2_var(vars[draw(rng, vars.size())].first);
        } else {
          GenScope inner = scope;
          payload = gen_level_bounded(rng, inner, k - 1, size / 2);
          scope.vars = inner.vars;
          scope.channels = inner.channels;
        }
        Hopi2Ptr cont = gen_level_bounded(rng, scope, budget, size / 2);
        return h2_out(ch, std::move(payload), std::move(cont));
      }
      case 4: {  // restriction
        Name ch = scope.channels.fresh("n");
        size_t k = 1 + draw(rng, std::min<size_t>(budget ? budget : 1, 3));
        GenScope inner = scope;
        inner.env.bind_channel(ch, k);
        Hopi2Ptr body = gen_level_bounded(rng, inner, budget, size - 1);
        scope.vars = inner.vars;
        scope.channels = inner.channels;
        return h2_new(ch, k, std::move(body));
      }
      default: {  // bare process variable
        auto vars = vars_below(scope.env, budget + 1);
        if (vars.empty()) break;
        return h2_var(vars[draw(rng, vars.size())].first);
      }
    }
  }
  return h2_nil();
}

}  // namespace

GeneratedHopi2 generate_well_typed(Rng& rng, size_t size) {
  GenScope scope;
  size_t budget = 2 + draw(rng, 2);
  const auto& pool = channel_pool();
  for (size_t i = 0; i < pool.size(); ++i)
    scope.env.bind_channel(pool[i], 1 + draw(rng, budget));
  LevelEnv free_env = scope.env;
  Hopi2Ptr p = gen_level_bounded(rng, scope, budget, size);
  return GeneratedHopi2{free_env, std::move(p)};
}

CheckOutcome embed_judgment(const LevelEnv& env, const Hopi2Ptr& p, size_t n) {
  EmbedResult embedded = embed(env, p);
  return check_process(embedded.env, level_assertion(n), embedded.process,
                       instance());
}

ProbeResult termination_probe(const LevelEnv& env, const Hopi2Ptr& p,
                              size_t budget) {
  EmbedResult embedded = embed(env, p);
  ExploreConfig cfg;
  cfg.max_depth = budget;
  cfg.max_states = budget;
  cfg.verify_frames = false;
  auto result =
      explore(level_assertion(8), embedded.process, instance().sig, cfg);
  ProbeResult out;
  out.states = result.nodes.size();
  for (const auto& node : result.nodes)
    out.depth = std::max(out.depth, node.depth);
  out.terminated = !result.budget_exceeded && !result.depth_exceeded;
  return out;
}

namespace {

Instance make_instance() {
  Instance inst;
  inst.sig.name = "hopi2";
  inst.sig.unit = level_assertion(0);
  inst.sig.compose = compose;
  inst.sig.entails = entails;
  inst.sig.chan_eq = [](const Term& m, const Term& k) {
    return hopi::Cond::chan_eq(m, k);
  };
  inst.sig.handles = [](const Assertion&,
                        const Term& m) -> std::vector<Process> {
    if (const Process* p = hopi::term_as_proc(m)) return {*p};
    return {};
  };
  inst.sig.match = [](const Term& pattern, const std::vector<Name>& binders,
                      const Term& value) -> std::optional<std::vector<Term>> {
    if (binders.size() != 1) return std::nullopt;
    const Name* v = hopi::term_as_name(pattern);
    if (!v || !(*v == binders[0])) return std::nullopt;
    return std::vector<Term>{value};
  };

  inst.hooks.synth_term = synth_term;
  inst.hooks.check_condition = [](const TypeEnv&, const Assertion& psi,
                                  const Condition& phi) -> CheckOutcome {
    if (entails(psi, phi)) return check_ok();
    return TypeError{{}, "CON", "condition not entailed"};
  };
  inst.hooks.check_assertion = [](const TypeEnv&, const Assertion&,
                                  const Assertion& inner) -> CheckOutcome {
    if (assertion_as(inner)) return check_ok();
    return TypeError{{}, "ASS", "foreign assertion"};
  };
  inst.hooks.subtype = subtype;
  inst.hooks.compat = compat_hook;
  inst.hooks.extract_env = [](const Type&) -> std::variant<TypeEnv, TypeError> {
    return TypeError{{}, "END", "level types carry no environment"};
  };
  // Levels carry no information about handle targets; the run rule falls
  // back to the deadlock reading, with the level guard living in synthesis.
  inst.hooks.handles = [](const Assertion&, const Term&) {
    return std::vector<Process>{};
  };
  inst.hooks.direction_ambient = direction_ambient;
  inst.hooks.empty_handle = EmptyHandlePolicy::Deadlock;

  InstanceGenerators g;
  g.term = [](Rng& rng, size_t size) -> Term {
    const auto& pool = channel_pool();
    if (size == 0 || coin(rng))
      return hopi::name_term(pool[draw(rng, pool.size())]);
    auto gen = generate_well_typed(rng, size > 1 ? size - 1 : 1);
    return hopi::proc_term(embed(gen.env, gen.process).process);
  };
  g.condition = [](Rng& rng, size_t) -> Condition {
    const auto& pool = channel_pool();
    Name n = pool[draw(rng, pool.size())];
    if (coin(rng)) return hopi::Cond::top();
    return hopi::Cond::chan_eq(hopi::name_term(n), hopi::name_term(n));
  };
  g.assertion = [](Rng& rng, size_t) -> Assertion {
    size_t n = draw(rng, 4);
    switch (draw(rng, 3)) {
      case 0:
        return in_tag(n);
      case 1:
        return out_tag(n);
      default:
        return level_assertion(n);
    }
  };
  g.type = [](Rng& rng, size_t) -> Type {
    size_t k = 1 + draw(rng, 3);
    switch (draw(rng, 4)) {
      case 0:
        return Ty2::level(draw(rng, 4));
      case 1:
        return Ty2::ch_in(k);
      case 2:
        return Ty2::ch_out(k);
      default:
        return Ty2::ch(k);
    }
  };
  g.env = [](Rng& rng, size_t size) -> TypeEnv {
    TypeEnv env;
    const auto& pool = channel_pool();
    size_t count = 1 + draw(rng, std::min<size_t>(size + 1, pool.size()));
    for (size_t i = 0; i < count; ++i)
      env = env.extend_over(pool[i], Ty2::ch(1 + draw(rng, 3)));
    return env;
  };
  g.process = [](Rng& rng, size_t size) -> Process {
    auto gen = generate_well_typed(rng, size);
    return embed(gen.env, gen.process).process;
  };
  g.judgment = [](Rng& rng, size_t size) -> std::pair<TypeEnv, Assertion> {
    TypeEnv env;
    const auto& pool = channel_pool();
    size_t count = 2 + draw(rng, std::min<size_t>(size, pool.size() - 2));
    for (size_t i = 0; i < count && i < pool.size(); ++i)
      env = env.extend_over(pool[i], Ty2::ch(1 + draw(rng, 3)));
    return {env, level_assertion(3 + draw(rng, 2))};
  };
  g.typed_term = [](Rng& rng, const TypeEnv& env, const Assertion&) -> Term {
    std::vector<Name> names;
    for (const auto& [n, t] : env) names.push_back(n);
    if (names.empty()) return hopi::name_term(channel_pool()[0]);
    return hopi::name_term(names[draw(rng, names.size())]);
  };
  g.typed_process = [](Rng& rng, const TypeEnv& env, const Assertion& psi,
                       size_t size) -> Process {
    GenScope scope;
    for (const auto& [n, t] : env) {
      const auto* ty = type_as(t);
      if (!ty) continue;
      if (ty->kind() == Ty2::Kind::Level)
        scope.env.bind_var(n, ty->value());
      else
        scope.env.bind_channel(n, ty->value());
    }
    size_t budget = ambient_level(psi);
    Hopi2Ptr p = gen_level_bounded(rng, scope, budget, size);
    Embedder embedder{scope.env};
    return embedder.walk(p);
  };
  g.chan_eq_partner = [](Rng&, const Assertion&,
                         const Term& t) -> std::optional<Term> {
    if (hopi::term_as_name(t)) return t;
    return std::nullopt;
  };
  g.assertion_extension = [](Rng& rng, const TypeEnv&, const Assertion&)
      -> std::optional<Assertion> {
    return level_assertion(draw(rng, 3));
  };
  g.compat_witnesses = [](Rng& rng) {
    size_t k = 1 + draw(rng, 3);
    return std::vector<std::tuple<Type, Direction, Type>>{
        {Ty2::ch(k), Direction::Output, Ty2::level(k - 1)},
        {Ty2::ch(k), Direction::Input, Ty2::level(k - 1)},
        {Ty2::ch_out(k), Direction::Output, Ty2::level(k - 1)},
        {Ty2::ch_in(k), Direction::Input, Ty2::level(k - 1)},
    };
  };
  inst.gens = g;
  return inst;
}

}  // namespace

Instance instance() {
  static const Instance inst = make_instance();
  return inst;
}

}  // namespace hopsi::hopi2
