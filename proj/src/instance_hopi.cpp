#include "hopsi/instance_hopi.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <ostream>

namespace hopsi::hopi {

namespace {

template <typename T>
int cmp3(const T& a, const T& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

// Order-insensitive comparison of entry lists under an alpha context.
template <typename Entry, typename Cmp>
int multiset_compare(const std::vector<Entry>& l, const std::vector<Entry>& r,
                     AlphaCtx& ctx, const Cmp& cmp) {
  if (int c = cmp3(l.size(), r.size())) return c;
  std::vector<size_t> li(l.size()), ri(r.size());
  std::iota(li.begin(), li.end(), 0);
  std::iota(ri.begin(), ri.end(), 0);
  AlphaCtx sl = ctx.self_left();
  AlphaCtx sr = ctx.self_right();
  std::stable_sort(li.begin(), li.end(), [&](size_t a, size_t b) {
    AlphaCtx c = sl;
    return cmp(l[a], l[b], c) < 0;
  });
  std::stable_sort(ri.begin(), ri.end(), [&](size_t a, size_t b) {
    AlphaCtx c = sr;
    return cmp(r[a], r[b], c) < 0;
  });
  for (size_t i = 0; i < li.size(); ++i) {
    if (int c = cmp(l[li[i]], r[ri[i]], ctx)) return c;
  }
  return 0;
}

int compare_entry(const Assert::Entry& a, const Assert::Entry& b,
                  AlphaCtx& ctx) {
  if (int c = compare_processes(a.first, b.first, ctx)) return c;
  return compare_nominal(*a.second, *b.second, ctx);
}

}  // namespace

// --- terms ---------------------------------------------------------------------

Term name_term(Name n) {
  return Term(std::make_shared<NameTerm>(std::move(n)));
}
Term proc_term(Process p) {
  return Term(std::make_shared<ProcTerm>(std::move(p)));
}

const Name* term_as_name(const Term& t) {
  const auto* nt = dynamic_cast<const NameTerm*>(t.ptr().get());
  return nt ? &nt->name() : nullptr;
}
const Process* term_as_proc(const Term& t) {
  const auto* pt = dynamic_cast<const ProcTerm*>(t.ptr().get());
  return pt ? &pt->proc() : nullptr;
}

int NameTerm::compare_same(const NominalBase& other, AlphaCtx& ctx) const {
  const auto& o = static_cast<const NameTerm&>(other);
  return ctx.name_cmp(name_, o.name_);
}

void NameTerm::print(std::ostream& os) const { os << name_; }

TermPtr NameTerm::swap_names(const Name& a, const Name& b) const {
  Transposition t{a, b};
  return std::make_shared<NameTerm>(t.apply(name_));
}

TermPtr NameTerm::substitute(const Subst& s) const {
  if (const Term* t = s.lookup(name_)) return t->ptr();
  return std::make_shared<NameTerm>(name_);
}

TermPtr NameTerm::canonical() const {
  return std::make_shared<NameTerm>(name_);
}

void ProcTerm::collect_support(NameSet& out) const {
  NameSet s = proc_.support();
  out.insert(s.begin(), s.end());
}

int ProcTerm::compare_same(const NominalBase& other, AlphaCtx& ctx) const {
  const auto& o = static_cast<const ProcTerm&>(other);
  return compare_processes(proc_, o.proc_, ctx);
}

void ProcTerm::print(std::ostream& os) const {
  os << "{";
  proc_.print(os);
  os << "}";
}

TermPtr ProcTerm::swap_names(const Name& a, const Name& b) const {
  return std::make_shared<ProcTerm>(proc_.swap(a, b));
}

TermPtr ProcTerm::substitute(const Subst& s) const {
  return std::make_shared<ProcTerm>(proc_.substitute(s));
}

TermPtr ProcTerm::canonical() const {
  return std::make_shared<ProcTerm>(canonicalize(proc_));
}

// --- conditions -------------------------------------------------------------------

Condition Cond::top() {
  return Condition(
      std::make_shared<Cond>(Kind::Top, Term(), Term(), Process(), Process()));
}
Condition Cond::chan_eq(Term lhs, Term rhs) {
  return Condition(std::make_shared<Cond>(Kind::ChanEq, std::move(lhs),
                                          std::move(rhs), Process(),
                                          Process()));
}
Condition Cond::handle(Process lhs, Process rhs) {
  return Condition(std::make_shared<Cond>(Kind::Handle, Term(), Term(),
                                          std::move(lhs), std::move(rhs)));
}

void Cond::collect_support(NameSet& out) const {
  switch (kind_) {
    case Kind::Top:
      return;
    case Kind::ChanEq:
      lhs_->collect_support(out);
      rhs_->collect_support(out);
      return;
    case Kind::Handle: {
      NameSet l = lp_.support();
      out.insert(l.begin(), l.end());
      NameSet r = rp_.support();
      out.insert(r.begin(), r.end());
      return;
    }
  }
}

int Cond::compare_same(const NominalBase& other, AlphaCtx& ctx) const {
  const auto& o = static_cast<const Cond&>(other);
  if (int c = cmp3(static_cast<int>(kind_), static_cast<int>(o.kind_)))
    return c;
  switch (kind_) {
    case Kind::Top:
      return 0;
    case Kind::ChanEq:
      if (int c = compare_nominal(*lhs_, *o.lhs_, ctx)) return c;
      return compare_nominal(*rhs_, *o.rhs_, ctx);
    case Kind::Handle:
      if (int c = compare_processes(lp_, o.lp_, ctx)) return c;
      return compare_processes(rp_, o.rp_, ctx);
  }
  return 0;
}

void Cond::print(std::ostream& os) const {
  switch (kind_) {
    case Kind::Top:
      os << "top";
      return;
    case Kind::ChanEq:
      lhs_->print(os);
      os << " <-> ";
      rhs_->print(os);
      return;
    case Kind::Handle:
      os << "{" << lp_ << "} <= {" << rp_ << "}";
      return;
  }
}

ConditionPtr Cond::swap_names(const Name& a, const Name& b) const {
  switch (kind_) {
    case Kind::Top:
      return std::make_shared<Cond>(*this);
    case Kind::ChanEq:
      return std::make_shared<Cond>(Kind::ChanEq, lhs_.swap(a, b),
                                    rhs_.swap(a, b), Process(), Process());
    case Kind::Handle:
      return std::make_shared<Cond>(Kind::Handle, Term(), Term(),
                                    lp_.swap(a, b), rp_.swap(a, b));
  }
  return nullptr;
}

ConditionPtr Cond::substitute(const Subst& s) const {
  switch (kind_) {
    case Kind::Top:
      return std::make_shared<Cond>(*this);
    case Kind::ChanEq:
      return std::make_shared<Cond>(Kind::ChanEq, lhs_.substitute(s),
                                    rhs_.substitute(s), Process(), Process());
    case Kind::Handle:
      return std::make_shared<Cond>(Kind::Handle, Term(), Term(),
                                    lp_.substitute(s), rp_.substitute(s));
  }
  return nullptr;
}

ConditionPtr Cond::canonical() const {
  switch (kind_) {
    case Kind::Top:
      return std::make_shared<Cond>(*this);
    case Kind::ChanEq:
      return std::make_shared<Cond>(Kind::ChanEq, lhs_.canonical(),
                                    rhs_.canonical(), Process(), Process());
    case Kind::Handle:
      return std::make_shared<Cond>(Kind::Handle, Term(), Term(),
                                    canonicalize(lp_), canonicalize(rp_));
  }
  return nullptr;
}

// --- types -------------------------------------------------------------------------

Type Ty::ch(Type carried) {
  return Type(std::make_shared<Ty>(Kind::Ch, std::move(carried), TypeEnv()));
}
Type Ty::drop(TypeEnv env) {
  return Type(std::make_shared<Ty>(Kind::Drop, Type(), std::move(env)));
}

const Ty* type_as(const Type& t) {
  return dynamic_cast<const Ty*>(t.ptr().get());
}

void Ty::collect_support(NameSet& out) const {
  if (kind_ == Kind::Ch) {
    carried_->collect_support(out);
  } else {
    NameSet s = env_.support();
    out.insert(s.begin(), s.end());
  }
}

int Ty::compare_same(const NominalBase& other, AlphaCtx& ctx) const {
  const auto& o = static_cast<const Ty&>(other);
  if (int c = cmp3(static_cast<int>(kind_), static_cast<int>(o.kind_)))
    return c;
  if (kind_ == Kind::Ch) return compare_nominal(*carried_, *o.carried_, ctx);
  if (int c = cmp3(env_.size(), o.env_.size())) return c;
  auto it = o.env_.begin();
  for (const auto& [n, t] : env_) {
    if (int c = ctx.name_cmp(n, it->first)) return c;
    if (int c = compare_nominal(*t, *it->second, ctx)) return c;
    ++it;
  }
  return 0;
}

void Ty::print(std::ostream& os) const {
  if (kind_ == Kind::Ch) {
    os << "ch(" << carried_ << ")";
  } else {
    os << "drop(" << env_.to_string() << ")";
  }
}

TypePtr Ty::swap_names(const Name& a, const Name& b) const {
  if (kind_ == Kind::Ch)
    return std::make_shared<Ty>(Kind::Ch, carried_.swap(a, b), TypeEnv());
  return std::make_shared<Ty>(Kind::Drop, Type(), env_.swap(a, b));
}

// --- assertions ----------------------------------------------------------------------

Assert::Assert(std::vector<Entry> entries) : entries_(std::move(entries)) {
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const Entry& a, const Entry& b) {
                     AlphaCtx ctx;
                     return compare_entry(a, b, ctx) < 0;
                   });
  entries_.erase(std::unique(entries_.begin(), entries_.end(),
                             [](const Entry& a, const Entry& b) {
                               AlphaCtx ctx;
                               return compare_entry(a, b, ctx) == 0;
                             }),
                 entries_.end());
}

const Type* Assert::lookup(const Process& p) const {
  Process cp = canonicalize(p);
  for (const auto& [proc, type] : entries_) {
    AlphaCtx ctx;
    if (compare_processes(canonicalize(proc), cp, ctx) == 0) return &type;
  }
  return nullptr;
}

void Assert::collect_support(NameSet& out) const {
  for (const auto& [p, t] : entries_) {
    NameSet ps = p.support();
    out.insert(ps.begin(), ps.end());
    t->collect_support(out);
  }
}

int Assert::compare_same(const NominalBase& other, AlphaCtx& ctx) const {
  const auto& o = static_cast<const Assert&>(other);
  return multiset_compare(entries_, o.entries_, ctx, compare_entry);
}

void Assert::print(std::ostream& os) const {
  os << "{";
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (i) os << ", ";
    os << "{" << entries_[i].first << "}:" << entries_[i].second;
  }
  os << "}";
}

AssertionPtr Assert::swap_names(const Name& a, const Name& b) const {
  std::vector<Entry> out;
  out.reserve(entries_.size());
  for (const auto& [p, t] : entries_)
    out.emplace_back(p.swap(a, b), t.swap(a, b));
  return std::make_shared<Assert>(std::move(out));
}

AssertionPtr Assert::substitute(const Subst& s) const {
  std::vector<Entry> out;
  out.reserve(entries_.size());
  // Types are not substitution targets.
  for (const auto& [p, t] : entries_) out.emplace_back(p.substitute(s), t);
  return std::make_shared<Assert>(std::move(out));
}

AssertionPtr Assert::canonical() const {
  std::vector<Entry> out;
  out.reserve(entries_.size());
  for (const auto& [p, t] : entries_) out.emplace_back(canonicalize(p), t);
  return std::make_shared<Assert>(std::move(out));
}

Assertion assertion(std::vector<Assert::Entry> entries) {
  return Assertion(std::make_shared<Assert>(std::move(entries)));
}

Assertion unit() { return assertion({}); }

const Assert* assertion_as(const Assertion& a) {
  return dynamic_cast<const Assert*>(a.ptr().get());
}

// --- entailment ---------------------------------------------------------------------

bool entails(const Assertion& psi, const Condition& phi) {
  (void)psi;  // the entailment set is closed under weakening
  const auto* c = dynamic_cast<const Cond*>(phi.ptr().get());
  if (!c) return false;
  switch (c->kind()) {
    case Cond::Kind::Top:
      return true;
    case Cond::Kind::ChanEq: {
      const Name* l = term_as_name(c->lhs());
      const Name* r = term_as_name(c->rhs());
      return l && r && *l == *r;
    }
    case Cond::Kind::Handle:
      return struct_eq(c->lproc(), c->rproc());
  }
  return false;
}

// --- signature ----------------------------------------------------------------------

namespace {

Assertion compose_union(const Assertion& a, const Assertion& b) {
  const auto* ia = assertion_as(a);
  const auto* ib = assertion_as(b);
  assert(ia && ib);
  std::vector<Assert::Entry> entries = ia->entries();
  const auto& more = ib->entries();
  entries.insert(entries.end(), more.begin(), more.end());
  return assertion(std::move(entries));
}

std::vector<Process> handle_targets(const Assertion&, const Term& m) {
  if (const Process* p = term_as_proc(m)) return {*p};
  return {};
}

std::optional<std::vector<Term>> match_pattern(
    const Term& pattern, const std::vector<Name>& binders, const Term& value) {
  // Shipped instances use the single-variable pattern: the received term is
  // bound wholesale.
  if (binders.size() != 1) return std::nullopt;
  const Name* v = term_as_name(pattern);
  if (!v || !(*v == binders[0])) return std::nullopt;
  return std::vector<Term>{value};
}

bool wrong_component(const Assertion& psi, const Process& comp) {
  if (const auto* o = as<OutputP>(comp)) return term_as_proc(o->subject);
  if (const auto* i = as<InputP>(comp)) return term_as_proc(i->subject);
  if (const auto* r = as<RunP>(comp)) {
    if (term_as_name(r->handle)) return handle_targets(psi, r->handle).empty();
  }
  return false;
}

// --- typing hooks -----------------------------------------------------------------

// Assertions can mention processes whose own assertions mention further
// processes; a depth guard keeps cyclic assertion chains from hanging the
// checker.
thread_local int g_depth = 0;

struct DepthGuard {
  bool ok;
  DepthGuard() : ok(++g_depth < 64) {}
  ~DepthGuard() { --g_depth; }
};

std::variant<Type, TypeError> synth_term(const TypeEnv& env,
                                         const Assertion& psi, const Term& m) {
  DepthGuard guard;
  if (!guard.ok) return TypeError{{}, "TERM", "assertion nesting too deep"};
  if (const Name* n = term_as_name(m)) {
    if (const Type* t = env.lookup(*n)) return *t;
    return TypeError{{}, "TERM", "unbound name " + n->label()};
  }
  const Process* p = term_as_proc(m);
  assert(p);
  const auto* psi_set = assertion_as(psi);
  if (!psi_set) return TypeError{{}, "TERM", "foreign assertion"};
  const Type* t = psi_set->lookup(*p);
  if (!t)
    return TypeError{{}, "TERM",
                     "no drop binding for process " + p->to_string()};
  const auto* ty = type_as(*t);
  if (!ty || ty->kind() != Ty::Kind::Drop)
    return TypeError{{}, "TERM", "process bound to a non-drop type"};
  if (auto err = check_process(ty->env(), psi, *p, instance()))
    return TypeError{err->path, "TERM",
                     "embedded process ill-typed: " + err->message};
  return *t;
}

CheckOutcome check_condition(const TypeEnv& env, const Assertion& psi,
                             const Condition& phi) {
  DepthGuard guard;
  if (!guard.ok) return TypeError{{}, "CON", "assertion nesting too deep"};
  const auto* c = dynamic_cast<const Cond*>(phi.ptr().get());
  if (!c) return TypeError{{}, "CON", "foreign condition"};
  switch (c->kind()) {
    case Cond::Kind::Top:
      return check_ok();
    case Cond::Kind::ChanEq: {
      if (!entails(psi, phi))
        return TypeError{{}, "CON", "channel equation not entailed"};
      auto lt = synth_term(env, psi, c->lhs());
      if (auto* err = std::get_if<TypeError>(&lt)) return *err;
      auto rt = synth_term(env, psi, c->rhs());
      if (auto* err = std::get_if<TypeError>(&rt)) return *err;
      return check_ok();
    }
    case Cond::Kind::Handle: {
      if (!entails(psi, phi))
        return TypeError{{}, "CON", "handle condition not entailed"};
      return check_process(env, psi, c->lproc(), instance());
    }
  }
  return check_ok();
}

CheckOutcome check_assertion(const TypeEnv& env, const Assertion& psi,
                             const Assertion& inner) {
  (void)env;
  DepthGuard guard;
  if (!guard.ok) return TypeError{{}, "ASS", "assertion nesting too deep"};
  const auto* set = assertion_as(inner);
  if (!set) return TypeError{{}, "ASS", "foreign assertion"};
  const auto& entries = set->entries();
  // Conflicting bindings for one process would make synthesis relational.
  for (size_t i = 0; i + 1 < entries.size(); ++i) {
    for (size_t j = i + 1; j < entries.size(); ++j) {
      AlphaCtx ctx;
      if (compare_processes(canonicalize(entries[i].first),
                            canonicalize(entries[j].first), ctx) == 0 &&
          !(entries[i].second == entries[j].second))
        return TypeError{{}, "ASS",
                         "conflicting types for process " +
                             entries[i].first.to_string()};
    }
  }
  for (const auto& [p, t] : entries) {
    const auto* ty = type_as(t);
    if (!ty || ty->kind() != Ty::Kind::Drop)
      return TypeError{{}, "ASS", "assertion binds a non-drop type"};
    if (auto err = check_process(ty->env(), psi, p, instance()))
      return TypeError{err->path, "ASS",
                       "asserted process ill-typed: " + err->message};
  }
  return check_ok();
}

std::variant<Type, TypeError> compat_hook(const Type& t, Direction) {
  const auto* ty = type_as(t);
  if (!ty) return TypeError{{}, "CHA", "foreign type"};
  if (ty->kind() != Ty::Kind::Ch)
    return TypeError{{}, "CHA", "subject has drop type, not a channel type"};
  return ty->carried();
}

std::variant<TypeEnv, TypeError> extract_hook(const Type& t) {
  const auto* ty = type_as(t);
  if (!ty) return TypeError{{}, "END", "foreign type"};
  if (ty->kind() != Ty::Kind::Drop)
    return TypeError{{}, "END", "channel types carry no environment"};
  return ty->env();
}

// --- generators --------------------------------------------------------------------

const std::vector<Name>& name_pool() {
  static const std::vector<Name> pool = [] {
    NameSupply supply;
    std::vector<Name> out;
    const char* labels[] = {"a", "b", "c", "d", "e", "f", "g", "h",
                            "x", "y", "z", "w", "u", "v", "p", "q"};
    for (const char* l : labels) out.push_back(supply.fresh(l));
    return out;
  }();
  return pool;
}

Name pool_name(Rng& rng, size_t limit = 16) {
  const auto& pool = name_pool();
  return pool[draw(rng, std::min(limit, pool.size()))];
}

Type gen_type(Rng& rng, size_t size);

TypeEnv gen_env(Rng& rng, size_t size) {
  TypeEnv env;
  size_t k = draw(rng, std::min<size_t>(size, 4) + 1);
  for (size_t i = 0; i < k; ++i) {
    Name n = pool_name(rng);
    if (!env.bound(n)) env = *env.extend(n, gen_type(rng, size / 2));
  }
  return env;
}

Type gen_type(Rng& rng, size_t size) {
  if (size == 0 || draw(rng, 3) == 0) return Ty::drop(TypeEnv());
  switch (draw(rng, 3)) {
    case 0:
      return Ty::ch(gen_type(rng, size - 1));
    case 1:
      return Ty::drop(gen_env(rng, size > 2 ? 2 : size - 1));
    default:
      return Ty::ch(Ty::drop(TypeEnv()));
  }
}

Process gen_process(Rng& rng, size_t size, bool allow_assert);

Term gen_term(Rng& rng, size_t size) {
  if (size == 0 || coin(rng)) return name_term(pool_name(rng));
  return proc_term(gen_process(rng, size - 1, false));
}

Condition gen_condition(Rng& rng, size_t size) {
  switch (draw(rng, 4)) {
    case 0:
      return Cond::top();
    case 1: {
      Name n = pool_name(rng);
      return Cond::chan_eq(name_term(n), name_term(n));
    }
    case 2:
      return Cond::chan_eq(name_term(pool_name(rng)),
                           name_term(pool_name(rng)));
    default: {
      Process p = gen_process(rng, size / 2, false);
      if (coin(rng)) return Cond::handle(p, p);
      return Cond::handle(p, gen_process(rng, size / 2, false));
    }
  }
}

Assertion gen_assertion(Rng& rng, size_t size) {
  std::vector<Assert::Entry> entries;
  size_t k = draw(rng, 3);
  for (size_t i = 0; i < k; ++i)
    entries.emplace_back(gen_process(rng, size / 2, false),
                         Ty::drop(gen_env(rng, 1)));
  return assertion(std::move(entries));
}

Process gen_process(Rng& rng, size_t size, bool allow_assert) {
  if (size == 0) return Process::nil();
  switch (draw(rng, 9)) {
    case 0:
      return Process::nil();
    case 1:
      return Process::par(gen_process(rng, size / 2, allow_assert),
                          gen_process(rng, size / 2, allow_assert));
    case 2:
      return Process::output(gen_term(rng, 1), gen_term(rng, size / 2),
                             gen_process(rng, size - 1, allow_assert));
    case 3: {
      Name x = pool_name(rng);
      return Process::input(gen_term(rng, 1), {{x, gen_type(rng, 1)}},
                            name_term(x),
                            gen_process(rng, size - 1, allow_assert));
    }
    case 4:
      return Process::run(gen_term(rng, size - 1));
    case 5: {
      std::vector<std::pair<Condition, Process>> branches;
      size_t k = 1 + draw(rng, 2);
      for (size_t i = 0; i < k; ++i)
        branches.emplace_back(gen_condition(rng, 1),
                              gen_process(rng, size / 2, false));
      return Process::choice(std::move(branches));
    }
    case 6: {
      Name x = pool_name(rng);
      return Process::restrict(x, gen_type(rng, 1),
                               gen_process(rng, size - 1, allow_assert));
    }
    case 7:
      return Process::repl(gen_process(rng, size / 2, false));
    default:
      if (allow_assert) return Process::assert_(gen_assertion(rng, size - 1));
      return Process::output(gen_term(rng, 1), gen_term(rng, size / 2),
                             Process::nil());
  }
}

// --- well-typed generation ---------------------------------------------------

struct Scope {
  TypeEnv env;
  Assertion psi;
  NameSupply binder_supply{1000};
};

std::vector<std::pair<Name, Type>> channels_in(const TypeEnv& env) {
  std::vector<std::pair<Name, Type>> out;
  for (const auto& [n, t] : env) {
    const auto* ty = type_as(t);
    if (ty && ty->kind() == Ty::Kind::Ch) out.emplace_back(n, t);
  }
  return out;
}

std::vector<Name> names_of_type(const TypeEnv& env, const Type& wanted) {
  std::vector<Name> out;
  for (const auto& [n, t] : env)
    if (t == wanted) out.push_back(n);
  return out;
}

// An object term of the carried type, if one can be produced in scope.
std::optional<Term> typed_object(Rng& rng, const Scope& scope,
                                 const Type& carried) {
  std::vector<Term> options;
  for (const Name& n : names_of_type(scope.env, carried))
    options.push_back(name_term(n));
  const auto* ty = type_as(carried);
  if (ty && ty->kind() == Ty::Kind::Drop) {
    if (const auto* set = assertion_as(scope.psi)) {
      for (const auto& [p, t] : set->entries())
        if (t == carried) options.push_back(proc_term(p));
    }
  }
  if (options.empty()) return std::nullopt;
  return options[draw(rng, options.size())];
}

Process gen_typed(Rng& rng, Scope& scope, size_t size, bool allow_assert) {
  if (size == 0) return Process::nil();
  auto channels = channels_in(scope.env);
  for (int attempt = 0; attempt < 6; ++attempt) {
    switch (draw(rng, 9)) {
      case 8: {  // a communicating pair on one channel
        if (channels.empty()) break;
        auto [subject, sty] = channels[draw(rng, channels.size())];
        Type carried = type_as(sty)->carried();
        auto object = typed_object(rng, scope, carried);
        if (!object) break;
        Process sender = Process::output(name_term(subject), *object,
                                         gen_typed(rng, scope, size / 3,
                                                   allow_assert));
        Name binder = scope.binder_supply.fresh("v");
        Scope inner = scope;
        inner.env = *scope.env.extend(binder, carried);
        Process cont = gen_typed(rng, inner, size / 3, allow_assert);
        scope.binder_supply = inner.binder_supply;
        Process receiver = Process::input(name_term(subject),
                                          {{binder, carried}},
                                          name_term(binder), std::move(cont));
        return Process::par(std::move(sender), std::move(receiver));
      }
      case 0:
        return Process::nil();
      case 1: {
        Process l = gen_typed(rng, scope, size / 2, allow_assert);
        Process r = gen_typed(rng, scope, size / 2, allow_assert);
        return Process::par(std::move(l), std::move(r));
      }
      case 2: {  // output
        if (channels.empty()) break;
        auto [subject, sty] = channels[draw(rng, channels.size())];
        Type carried = type_as(sty)->carried();
        auto object = typed_object(rng, scope, carried);
        if (!object) break;
        return Process::output(name_term(subject), *object,
                               gen_typed(rng, scope, size - 1, allow_assert));
      }
      case 3: {  // input
        if (channels.empty()) break;
        auto [subject, sty] = channels[draw(rng, channels.size())];
        Type carried = type_as(sty)->carried();
        Name binder = scope.binder_supply.fresh("v");
        Scope inner = scope;
        inner.env = *scope.env.extend(binder, carried);
        Process cont = gen_typed(rng, inner, size - 1, allow_assert);
        scope.binder_supply = inner.binder_supply;
        return Process::input(name_term(subject), {{binder, carried}},
                              name_term(binder), std::move(cont));
      }
      case 4: {  // replication: assertion-free body
        Process body = gen_typed(rng, scope, size / 2, false);
        return Process::repl(std::move(body));
      }
      case 5: {  // choice over entailed conditions
        std::vector<std::pair<Condition, Process>> branches;
        size_t k = 1 + draw(rng, 2);
        for (size_t i = 0; i < k; ++i) {
          Condition cond = Cond::top();
          if (!channels.empty() && coin(rng)) {
            Name n = channels[draw(rng, channels.size())].first;
            cond = Cond::chan_eq(name_term(n), name_term(n));
          }
          branches.emplace_back(cond, gen_typed(rng, scope, size / 2, false));
        }
        return Process::choice(std::move(branches));
      }
      case 6: {  // restriction
        Name binder = scope.binder_supply.fresh("n");
        Type ty = Ty::ch(Ty::drop(TypeEnv()));
        Scope inner = scope;
        inner.env = *scope.env.extend(binder, ty);
        Process body = gen_typed(rng, inner, size - 1, allow_assert);
        scope.binder_supply = inner.binder_supply;
        return Process::restrict(binder, ty, std::move(body));
      }
      default: {  // run a process with a drop binding in the ambient
        const auto* set = assertion_as(scope.psi);
        if (!set || set->entries().empty()) break;
        const auto& entry = set->entries()[draw(rng, set->entries().size())];
        return Process::run(proc_term(entry.first));
      }
    }
  }
  return Process::nil();
}

std::pair<TypeEnv, Assertion> gen_judgment(Rng& rng, size_t size) {
  TypeEnv env;
  const auto& pool = name_pool();
  Type d0 = Ty::drop(TypeEnv());
  size_t channel_count = 2 + draw(rng, std::min<size_t>(size, 4));
  for (size_t i = 0; i < channel_count && i < pool.size(); ++i) {
    Type t = (draw(rng, 3) == 0) ? Ty::ch(Ty::ch(d0)) : Ty::ch(d0);
    env = *env.extend(pool[i], t);
  }
  // Assertion entries: processes typable under this same environment.
  std::vector<Assert::Entry> entries;
  entries.emplace_back(Process::nil(), Ty::drop(env));
  if (coin(rng)) {
    auto channels = channels_in(env);
    if (!channels.empty()) {
      auto [subject, sty] = channels[draw(rng, channels.size())];
      Type carried = type_as(sty)->carried();
      auto receivers = names_of_type(env, carried);
      if (!receivers.empty()) {
        Process p = Process::output(name_term(subject),
                                    name_term(receivers[0]), Process::nil());
        entries.emplace_back(std::move(p), Ty::drop(env));
      }
    }
  }
  return {env, assertion(std::move(entries))};
}

Term gen_typed_term(Rng& rng, const TypeEnv& env, const Assertion& psi) {
  std::vector<Term> options;
  for (const auto& [n, t] : env) options.push_back(name_term(n));
  if (const auto* set = assertion_as(psi)) {
    for (const auto& [p, t] : set->entries()) options.push_back(proc_term(p));
  }
  if (options.empty()) return name_term(name_pool()[0]);
  return options[draw(rng, options.size())];
}

InstanceGenerators make_generators() {
  InstanceGenerators g;
  g.term = [](Rng& rng, size_t size) { return gen_term(rng, size); };
  g.condition = [](Rng& rng, size_t size) { return gen_condition(rng, size); };
  g.assertion = [](Rng& rng, size_t size) { return gen_assertion(rng, size); };
  g.type = [](Rng& rng, size_t size) { return gen_type(rng, size); };
  g.env = [](Rng& rng, size_t size) { return gen_env(rng, size); };
  g.process = [](Rng& rng, size_t size) { return gen_process(rng, size, true); };
  g.judgment = [](Rng& rng, size_t size) { return gen_judgment(rng, size); };
  g.typed_term = [](Rng& rng, const TypeEnv& env, const Assertion& psi) {
    return gen_typed_term(rng, env, psi);
  };
  g.typed_process = [](Rng& rng, const TypeEnv& env, const Assertion& psi,
                       size_t size) {
    Scope scope{env, psi, NameSupply(1000)};
    return gen_typed(rng, scope, size, false);
  };
  g.chan_eq_partner = [](Rng&, const Assertion&, const Term& t)
      -> std::optional<Term> {
    if (term_as_name(t)) return t;  // names are equivalent only to themselves
    return std::nullopt;
  };
  g.assertion_subst_support = [](const Assertion& a) {
    // Names reachable by substitution: process positions only, and not
    // also hidden inside a type, since types are substitution-exempt.
    NameSet procs, types;
    if (const auto* set = assertion_as(a)) {
      for (const auto& [p, t] : set->entries()) {
        NameSet ps = p.support();
        procs.insert(ps.begin(), ps.end());
        t->collect_support(types);
      }
    }
    NameSet out;
    for (const Name& n : procs)
      if (!types.count(n)) out.insert(n);
    return out;
  };
  g.assertion_extension = [](Rng& rng, const TypeEnv& env,
                             const Assertion& psi)
      -> std::optional<Assertion> {
    // New bindings typed under the full environment; rebinding an existing
    // process at a different type would make synthesis relational.
    Scope scope{env, psi, NameSupply(2000)};
    Process p = gen_typed(rng, scope, 3, false);
    Type t = Ty::drop(env);
    if (const auto* set = assertion_as(psi)) {
      if (const Type* existing = set->lookup(p)) {
        if (!(*existing == t)) return std::nullopt;
      }
    }
    return assertion({{std::move(p), std::move(t)}});
  };
  g.compat_witnesses = [](Rng& rng) {
    Type d0 = Ty::drop(TypeEnv());
    Type inner = coin(rng) ? d0 : Ty::ch(d0);
    return std::vector<std::tuple<Type, Direction, Type>>{
        {Ty::ch(inner), Direction::Output, inner},
        {Ty::ch(inner), Direction::Input, inner},
    };
  };
  return g;
}

Instance make_instance() {
  Instance inst;
  inst.sig.name = "hopi";
  inst.sig.unit = unit();
  inst.sig.compose = compose_union;
  inst.sig.entails = entails;
  inst.sig.chan_eq = [](const Term& m, const Term& k) {
    return Cond::chan_eq(m, k);
  };
  inst.sig.handles = handle_targets;
  inst.sig.match = match_pattern;
  inst.sig.wrong = wrong_component;

  inst.hooks.synth_term = synth_term;
  inst.hooks.check_condition = check_condition;
  inst.hooks.check_assertion = check_assertion;
  inst.hooks.subtype = [](const Type& a, const Type& b) { return a == b; };
  inst.hooks.compat = compat_hook;
  inst.hooks.extract_env = extract_hook;
  inst.hooks.handles = handle_targets;
  inst.hooks.empty_handle = EmptyHandlePolicy::Error;

  inst.gens = make_generators();
  return inst;
}

}  // namespace

Instance instance() {
  static const Instance inst = make_instance();
  return inst;
}

Instance broken_compose_instance() {
  Instance inst = instance();
  inst.sig.name = "hopi-broken-compose";
  // Forgets the left operand's bindings.
  inst.sig.compose = [](const Assertion&, const Assertion& b) { return b; };
  inst.sig.leq = [](const Assertion& a, const Assertion& b) {
    return compose_union(a, b) == b;
  };
  return inst;
}

Instance broken_subst_instance() {
  Instance inst = instance();
  inst.sig.name = "hopi-broken-subst";
  // Loses every substitution that lands inside an embedded process.
  inst.sig.subst_term = [](const Term& t, const Subst& s) {
    if (term_as_proc(t)) return t;
    return t.substitute(s);
  };
  return inst;
}

Instance broken_compat_instance() {
  Instance inst = instance();
  inst.sig.name = "hopi-broken-compat";
  // Hands back the channel type instead of the carried type.
  inst.hooks.compat = [](const Type& t, Direction) {
    return std::variant<Type, TypeError>(t);
  };
  return inst;
}

}  // namespace hopsi::hopi
