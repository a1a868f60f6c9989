#include "hopsi/syntax.hpp"

#include <algorithm>
#include <cassert>
#include <ostream>
#include <sstream>

namespace hopsi {

namespace {

ProcessPtr make_node(ProcessNode n) {
  return std::make_shared<const ProcessNode>(std::move(n));
}

}  // namespace

Process Process::nil() { return Process(make_node({NilP{}})); }

Process Process::par(Process left, Process right) {
  return Process(make_node({ParNode{std::move(left), std::move(right)}}));
}

Process Process::output(Term subject, Term object, Process cont) {
  return Process(make_node(
      {OutputP{std::move(subject), std::move(object), std::move(cont)}}));
}

Process Process::input(Term subject,
                       std::vector<std::pair<Name, Type>> binders,
                       Term pattern, Process cont) {
  return Process(make_node({InputP{std::move(subject), std::move(binders),
                                   std::move(pattern), std::move(cont)}}));
}

Process Process::run(Term handle) {
  return Process(make_node({RunP{std::move(handle)}}));
}

Process Process::choice(std::vector<std::pair<Condition, Process>> branches) {
  return Process(make_node({CaseP{std::move(branches)}}));
}

Process Process::restrict(Name name, Type type, Process body) {
  return Process(
      make_node({RestrictP{std::move(name), std::move(type), std::move(body)}}));
}

Process Process::repl(Process body) {
  return Process(make_node({ReplP{std::move(body)}}));
}

Process Process::assert_(Assertion assertion) {
  return Process(make_node({AssertP{std::move(assertion)}}));
}

bool Process::is_nil() const { return as<NilP>(*this) != nullptr; }
bool Process::is_par() const { return as<ParNode>(*this) != nullptr; }
bool Process::is_restrict() const { return as<RestrictP>(*this) != nullptr; }

// --- support ---------------------------------------------------------------

namespace {

void collect_support(const Process& p, NameSet& out) {
  const ProcessNode& n = p.node();
  if (std::holds_alternative<NilP>(n.v)) return;
  if (const auto* par = std::get_if<ParNode>(&n.v)) {
    collect_support(par->left, out);
    collect_support(par->right, out);
    return;
  }
  if (const auto* o = std::get_if<OutputP>(&n.v)) {
    o->subject->collect_support(out);
    o->object->collect_support(out);
    collect_support(o->cont, out);
    return;
  }
  if (const auto* i = std::get_if<InputP>(&n.v)) {
    i->subject->collect_support(out);
    for (const auto& [x, t] : i->binders) t->collect_support(out);
    NameSet inner;
    i->pattern->collect_support(inner);
    collect_support(i->cont, inner);
    for (const auto& [x, t] : i->binders) inner.erase(x);
    out.insert(inner.begin(), inner.end());
    return;
  }
  if (const auto* r = std::get_if<RunP>(&n.v)) {
    r->handle->collect_support(out);
    return;
  }
  if (const auto* c = std::get_if<CaseP>(&n.v)) {
    for (const auto& [cond, proc] : c->branches) {
      cond->collect_support(out);
      collect_support(proc, out);
    }
    return;
  }
  if (const auto* re = std::get_if<RestrictP>(&n.v)) {
    re->type->collect_support(out);
    NameSet inner;
    collect_support(re->body, inner);
    inner.erase(re->name);
    out.insert(inner.begin(), inner.end());
    return;
  }
  if (const auto* rp = std::get_if<ReplP>(&n.v)) {
    collect_support(rp->body, out);
    return;
  }
  if (const auto* a = std::get_if<AssertP>(&n.v)) {
    a->assertion->collect_support(out);
    return;
  }
}

}  // namespace

NameSet Process::support() const {
  NameSet s;
  collect_support(*this, s);
  return s;
}

// --- transposition -----------------------------------------------------------

Process Process::swap(const Name& a, const Name& b) const {
  if (a == b) return *this;
  Transposition t{a, b};
  const ProcessNode& n = node();
  if (std::holds_alternative<NilP>(n.v)) return *this;
  if (const auto* pr = std::get_if<ParNode>(&n.v))
    return par(pr->left.swap(a, b), pr->right.swap(a, b));
  if (const auto* o = std::get_if<OutputP>(&n.v))
    return output(o->subject.swap(a, b), o->object.swap(a, b),
                  o->cont.swap(a, b));
  if (const auto* i = std::get_if<InputP>(&n.v)) {
    std::vector<std::pair<Name, Type>> bs;
    bs.reserve(i->binders.size());
    for (const auto& [x, ty] : i->binders)
      bs.emplace_back(t.apply(x), ty.swap(a, b));
    return input(i->subject.swap(a, b), std::move(bs), i->pattern.swap(a, b),
                 i->cont.swap(a, b));
  }
  if (const auto* r = std::get_if<RunP>(&n.v)) return run(r->handle.swap(a, b));
  if (const auto* c = std::get_if<CaseP>(&n.v)) {
    std::vector<std::pair<Condition, Process>> bs;
    bs.reserve(c->branches.size());
    for (const auto& [cond, proc] : c->branches)
      bs.emplace_back(cond.swap(a, b), proc.swap(a, b));
    return choice(std::move(bs));
  }
  if (const auto* re = std::get_if<RestrictP>(&n.v))
    return restrict(t.apply(re->name), re->type.swap(a, b),
                    re->body.swap(a, b));
  if (const auto* rp = std::get_if<ReplP>(&n.v))
    return repl(rp->body.swap(a, b));
  const auto* as_ = std::get_if<AssertP>(&n.v);
  assert(as_);
  return assert_(as_->assertion.swap(a, b));
}

// --- substitution -------------------------------------------------------------

namespace {

// Renames binders clashing with the substitution's range or domain.
std::pair<std::vector<Name>, Process> freshen_binders_for(
    const std::vector<Name>& binders, Process scope, const Term* pattern,
    Term* pattern_out, const Subst& s) {
  NameSet danger = s.range_support();
  NameSet dom = s.domain();
  danger.insert(dom.begin(), dom.end());

  std::vector<Name> out = binders;
  Term pat = pattern ? *pattern : Term();
  for (size_t i = 0; i < out.size(); ++i) {
    if (danger.find(out[i]) == danger.end()) continue;
    NameSet avoid = scope.support();
    if (pat) {
      NameSet ps = pat.support();
      avoid.insert(ps.begin(), ps.end());
    }
    avoid.insert(danger.begin(), danger.end());
    for (const Name& b : out) avoid.insert(b);
    Name fresh = fresh_for(avoid, out[i].label());
    scope = scope.swap(out[i], fresh);
    if (pat) pat = pat.swap(out[i], fresh);
    out[i] = fresh;
  }
  if (pattern_out) *pattern_out = pat;
  return {std::move(out), std::move(scope)};
}

}  // namespace

Process Process::substitute(const Subst& s) const {
  if (s.empty()) return *this;
  const ProcessNode& n = node();
  if (std::holds_alternative<NilP>(n.v)) return *this;
  if (const auto* par_ = std::get_if<ParNode>(&n.v))
    return par(par_->left.substitute(s), par_->right.substitute(s));
  if (const auto* o = std::get_if<OutputP>(&n.v))
    return output(o->subject.substitute(s), o->object.substitute(s),
                  o->cont.substitute(s));
  if (const auto* i = std::get_if<InputP>(&n.v)) {
    Term subject = i->subject.substitute(s);
    std::vector<Name> names;
    names.reserve(i->binders.size());
    for (const auto& [x, t] : i->binders) names.push_back(x);
    Subst inner = s.without(names);
    if (inner.empty())
      return input(std::move(subject), i->binders, i->pattern, i->cont);
    Term pattern;
    auto [fresh_names, cont] =
        freshen_binders_for(names, i->cont, &i->pattern, &pattern, inner);
    std::vector<std::pair<Name, Type>> bs;
    bs.reserve(i->binders.size());
    for (size_t k = 0; k < i->binders.size(); ++k)
      bs.emplace_back(fresh_names[k], i->binders[k].second);
    return input(std::move(subject), std::move(bs), pattern.substitute(inner),
                 cont.substitute(inner));
  }
  if (const auto* r = std::get_if<RunP>(&n.v))
    return run(r->handle.substitute(s));
  if (const auto* c = std::get_if<CaseP>(&n.v)) {
    std::vector<std::pair<Condition, Process>> bs;
    bs.reserve(c->branches.size());
    for (const auto& [cond, proc] : c->branches)
      bs.emplace_back(cond.substitute(s), proc.substitute(s));
    return choice(std::move(bs));
  }
  if (const auto* re = std::get_if<RestrictP>(&n.v)) {
    Subst inner = s.without({re->name});
    if (inner.empty()) return *this;
    Name x = re->name;
    Process body = re->body;
    NameSet range = inner.range_support();
    if (range.find(x) != range.end()) {
      NameSet avoid = body.support();
      avoid.insert(range.begin(), range.end());
      NameSet dom = inner.domain();
      avoid.insert(dom.begin(), dom.end());
      Name fresh = fresh_for(avoid, x.label());
      body = body.swap(x, fresh);
      x = fresh;
    }
    return restrict(x, re->type, body.substitute(inner));
  }
  if (const auto* rp = std::get_if<ReplP>(&n.v))
    return repl(rp->body.substitute(s));
  const auto* as_ = std::get_if<AssertP>(&n.v);
  assert(as_);
  return assert_(as_->assertion.substitute(s));
}

// --- comparison ----------------------------------------------------------------

namespace {

int node_rank(const ProcessNode& n) { return static_cast<int>(n.v.index()); }

template <typename P>
int cmp3(const P& a, const P& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

}  // namespace

int compare_processes(const Process& a, const Process& b, AlphaCtx& ctx) {
  if (!a || !b) return a ? 1 : (b ? -1 : 0);
  if (a.ptr() == b.ptr() && ctx.depth() == 0) return 0;
  int ra = node_rank(a.node());
  int rb = node_rank(b.node());
  if (ra != rb) return ra < rb ? -1 : 1;

  const ProcessNode& na = a.node();
  const ProcessNode& nb = b.node();
  if (std::holds_alternative<NilP>(na.v)) return 0;
  if (const auto* pa = std::get_if<ParNode>(&na.v)) {
    const auto* pb = std::get_if<ParNode>(&nb.v);
    if (int c = compare_processes(pa->left, pb->left, ctx)) return c;
    return compare_processes(pa->right, pb->right, ctx);
  }
  if (const auto* oa = std::get_if<OutputP>(&na.v)) {
    const auto* ob = std::get_if<OutputP>(&nb.v);
    if (int c = compare_nominal(*oa->subject, *ob->subject, ctx)) return c;
    if (int c = compare_nominal(*oa->object, *ob->object, ctx)) return c;
    return compare_processes(oa->cont, ob->cont, ctx);
  }
  if (const auto* ia = std::get_if<InputP>(&na.v)) {
    const auto* ib = std::get_if<InputP>(&nb.v);
    if (int c = cmp3(ia->binders.size(), ib->binders.size())) return c;
    if (int c = compare_nominal(*ia->subject, *ib->subject, ctx)) return c;
    for (size_t i = 0; i < ia->binders.size(); ++i) {
      if (int c = compare_nominal(*ia->binders[i].second,
                                  *ib->binders[i].second, ctx))
        return c;
    }
    for (size_t i = 0; i < ia->binders.size(); ++i)
      ctx.push(ia->binders[i].first, ib->binders[i].first);
    int c = compare_nominal(*ia->pattern, *ib->pattern, ctx);
    if (c == 0) c = compare_processes(ia->cont, ib->cont, ctx);
    for (size_t i = 0; i < ia->binders.size(); ++i) ctx.pop();
    return c;
  }
  if (const auto* ra_ = std::get_if<RunP>(&na.v)) {
    const auto* rb_ = std::get_if<RunP>(&nb.v);
    return compare_nominal(*ra_->handle, *rb_->handle, ctx);
  }
  if (const auto* ca = std::get_if<CaseP>(&na.v)) {
    const auto* cb = std::get_if<CaseP>(&nb.v);
    if (int c = cmp3(ca->branches.size(), cb->branches.size())) return c;
    for (size_t i = 0; i < ca->branches.size(); ++i) {
      if (int c = compare_nominal(*ca->branches[i].first,
                                  *cb->branches[i].first, ctx))
        return c;
      if (int c =
              compare_processes(ca->branches[i].second, cb->branches[i].second, ctx))
        return c;
    }
    return 0;
  }
  if (const auto* rea = std::get_if<RestrictP>(&na.v)) {
    const auto* reb = std::get_if<RestrictP>(&nb.v);
    if (int c = compare_nominal(*rea->type, *reb->type, ctx)) return c;
    ctx.push(rea->name, reb->name);
    int c = compare_processes(rea->body, reb->body, ctx);
    ctx.pop();
    return c;
  }
  if (const auto* rpa = std::get_if<ReplP>(&na.v)) {
    const auto* rpb = std::get_if<ReplP>(&nb.v);
    return compare_processes(rpa->body, rpb->body, ctx);
  }
  const auto* aa = std::get_if<AssertP>(&na.v);
  const auto* ab = std::get_if<AssertP>(&nb.v);
  return compare_nominal(*aa->assertion, *ab->assertion, ctx);
}

bool Process::alpha_eq(const Process& other) const {
  AlphaCtx ctx;
  return compare_processes(*this, other, ctx) == 0;
}

// --- well-formedness ------------------------------------------------------------

namespace {

std::optional<WfDiagnostic> wf_walk(const Process& p, bool restricted,
                                    std::vector<int>& path) {
  const ProcessNode& n = p.node();
  if (std::holds_alternative<AssertP>(n.v)) {
    if (restricted)
      return WfDiagnostic{path,
                          "assertion unguarded inside case branch or replication"};
    return std::nullopt;
  }
  if (const auto* par = std::get_if<ParNode>(&n.v)) {
    path.push_back(0);
    if (auto d = wf_walk(par->left, restricted, path)) return d;
    path.back() = 1;
    auto d = wf_walk(par->right, restricted, path);
    path.pop_back();
    return d;
  }
  if (const auto* o = std::get_if<OutputP>(&n.v)) {
    path.push_back(0);
    auto d = wf_walk(o->cont, false, path);  // prefix guards
    path.pop_back();
    return d;
  }
  if (const auto* i = std::get_if<InputP>(&n.v)) {
    path.push_back(0);
    auto d = wf_walk(i->cont, false, path);
    path.pop_back();
    return d;
  }
  if (const auto* c = std::get_if<CaseP>(&n.v)) {
    for (size_t k = 0; k < c->branches.size(); ++k) {
      path.push_back(static_cast<int>(k));
      if (auto d = wf_walk(c->branches[k].second, true, path)) return d;
      path.pop_back();
    }
    return std::nullopt;
  }
  if (const auto* re = std::get_if<RestrictP>(&n.v)) {
    path.push_back(0);
    auto d = wf_walk(re->body, restricted, path);
    path.pop_back();
    return d;
  }
  if (const auto* rp = std::get_if<ReplP>(&n.v)) {
    path.push_back(0);
    auto d = wf_walk(rp->body, true, path);
    path.pop_back();
    return d;
  }
  return std::nullopt;
}

}  // namespace

std::optional<WfDiagnostic> well_formed_violation(const Process& p) {
  std::vector<int> path;
  return wf_walk(p, false, path);
}

// --- frames ------------------------------------------------------------------------

Assertion frame_assertion(const Process& p, const Assertion& unit,
                          const AssertionCompose& compose) {
  const ProcessNode& n = p.node();
  if (const auto* par = std::get_if<ParNode>(&n.v))
    return compose(frame_assertion(par->left, unit, compose),
                   frame_assertion(par->right, unit, compose));
  if (const auto* re = std::get_if<RestrictP>(&n.v))
    return frame_assertion(re->body, unit, compose);
  if (const auto* a = std::get_if<AssertP>(&n.v)) return a->assertion;
  return unit;
}

std::vector<std::pair<Name, Type>> frame_names(const Process& p) {
  std::vector<std::pair<Name, Type>> out;
  const ProcessNode& n = p.node();
  if (const auto* par = std::get_if<ParNode>(&n.v)) {
    auto l = frame_names(par->left);
    auto r = frame_names(par->right);
    out.insert(out.end(), l.begin(), l.end());
    out.insert(out.end(), r.begin(), r.end());
    return out;
  }
  if (const auto* re = std::get_if<RestrictP>(&n.v)) {
    out.emplace_back(re->name, re->type);
    auto inner = frame_names(re->body);
    out.insert(out.end(), inner.begin(), inner.end());
    return out;
  }
  return out;
}

// --- canonicalization ------------------------------------------------------------------

namespace {

void flatten_canonical(const Process& p, std::vector<Process>& out) {
  if (const auto* par = as<ParNode>(p)) {
    flatten_canonical(par->left, out);
    flatten_canonical(par->right, out);
    return;
  }
  if (!p.is_nil()) out.push_back(p);
}

Process build_par(std::vector<Process> comps) {
  if (comps.empty()) return Process::nil();
  Process acc = comps.back();
  for (size_t i = comps.size() - 1; i-- > 0;) acc = Process::par(comps[i], acc);
  return acc;
}

int cmp_under(const Process& a, const Process& b,
              const std::vector<Name>& enclosing) {
  AlphaCtx ctx;
  for (const Name& n : enclosing) ctx.push(n, n);
  return compare_processes(a, b, ctx);
}

void sort_components(std::vector<Process>& comps,
                     const std::vector<Name>& enclosing) {
  std::stable_sort(comps.begin(), comps.end(),
                   [&](const Process& a, const Process& b) {
                     return cmp_under(a, b, enclosing) < 0;
                   });
}

// Structure pass: scope minimization, parallel flattening/sorting, unit
// elimination, canonicalization of embedded values. No binder renaming.
Process canon_structure(const Process& p, std::vector<Name>& enclosing) {
  const ProcessNode& n = p.node();
  if (std::holds_alternative<NilP>(n.v)) return p;
  if (const auto* par = std::get_if<ParNode>(&n.v)) {
    Process l = canon_structure(par->left, enclosing);
    Process r = canon_structure(par->right, enclosing);
    std::vector<Process> comps;
    flatten_canonical(l, comps);
    flatten_canonical(r, comps);
    sort_components(comps, enclosing);
    return build_par(std::move(comps));
  }
  if (const auto* o = std::get_if<OutputP>(&n.v)) {
    Process cont = canon_structure(o->cont, enclosing);
    return Process::output(o->subject.canonical(), o->object.canonical(),
                           std::move(cont));
  }
  if (const auto* i = std::get_if<InputP>(&n.v)) {
    for (const auto& [x, t] : i->binders) enclosing.push_back(x);
    Process cont = canon_structure(i->cont, enclosing);
    for (size_t k = 0; k < i->binders.size(); ++k) enclosing.pop_back();
    return Process::input(i->subject.canonical(), i->binders,
                          i->pattern.canonical(), std::move(cont));
  }
  if (const auto* r = std::get_if<RunP>(&n.v))
    return Process::run(r->handle.canonical());
  if (const auto* c = std::get_if<CaseP>(&n.v)) {
    std::vector<std::pair<Condition, Process>> bs;
    bs.reserve(c->branches.size());
    for (const auto& [cond, proc] : c->branches)
      bs.emplace_back(cond.canonical(), canon_structure(proc, enclosing));
    return Process::choice(std::move(bs));
  }
  if (const auto* re = std::get_if<RestrictP>(&n.v)) {
    enclosing.push_back(re->name);
    Process body = canon_structure(re->body, enclosing);
    enclosing.pop_back();
    std::vector<Process> comps;
    flatten_canonical(body, comps);
    std::vector<Process> cluster;
    std::vector<Process> rest;
    for (const Process& comp : comps) {
      NameSet s = comp.support();
      if (s.find(re->name) != s.end())
        cluster.push_back(comp);
      else
        rest.push_back(comp);
    }
    Process wrapped =
        Process::restrict(re->name, re->type, build_par(std::move(cluster)));
    rest.push_back(std::move(wrapped));
    sort_components(rest, enclosing);
    return build_par(std::move(rest));
  }
  if (const auto* rp = std::get_if<ReplP>(&n.v))
    return Process::repl(canon_structure(rp->body, enclosing));
  const auto* a = std::get_if<AssertP>(&n.v);
  assert(a);
  return Process::assert_(a->assertion.canonical());
}

class Renamer {
 public:
  explicit Renamer(NameSet avoid) : avoid_(std::move(avoid)) {}

  Process rename(const Process& p) {
    const ProcessNode& n = p.node();
    if (std::holds_alternative<NilP>(n.v)) return p;
    if (const auto* par = std::get_if<ParNode>(&n.v))
      return Process::par(rename(par->left), rename(par->right));
    if (const auto* o = std::get_if<OutputP>(&n.v))
      return Process::output(o->subject.canonical(), o->object.canonical(),
                             rename(o->cont));
    if (const auto* i = std::get_if<InputP>(&n.v)) {
      Term pattern = i->pattern;
      Process cont = i->cont;
      std::vector<std::pair<Name, Type>> bs;
      bs.reserve(i->binders.size());
      for (const auto& [x, ty] : i->binders) {
        Name c = next_name();
        if (!(c == x)) {
          pattern = pattern.swap(x, c);
          cont = cont.swap(x, c);
        }
        bs.emplace_back(c, ty);
      }
      return Process::input(i->subject.canonical(), std::move(bs),
                            pattern.canonical(), rename(cont));
    }
    if (const auto* r = std::get_if<RunP>(&n.v))
      return Process::run(r->handle.canonical());
    if (const auto* c = std::get_if<CaseP>(&n.v)) {
      std::vector<std::pair<Condition, Process>> bs;
      bs.reserve(c->branches.size());
      for (const auto& [cond, proc] : c->branches)
        bs.emplace_back(cond.canonical(), rename(proc));
      return Process::choice(std::move(bs));
    }
    if (const auto* re = std::get_if<RestrictP>(&n.v)) {
      Name c = next_name();
      Process body = re->body;
      if (!(c == re->name)) body = body.swap(re->name, c);
      return Process::restrict(c, re->type, rename(body));
    }
    if (const auto* rp = std::get_if<ReplP>(&n.v))
      return Process::repl(rename(rp->body));
    const auto* a = std::get_if<AssertP>(&n.v);
    assert(a);
    return Process::assert_(a->assertion.canonical());
  }

 private:
  Name next_name() {
    while (true) {
      Name c = canonical_name(next_++);
      if (avoid_.find(c) == avoid_.end()) return c;
    }
  }

  NameSet avoid_;
  size_t next_ = 0;
};

}  // namespace

Process canonicalize(const Process& p) {
  std::vector<Name> enclosing;
  Process s = canon_structure(p, enclosing);
  Renamer renamer(s.support());
  return renamer.rename(s);
}

bool struct_eq(const Process& p, const Process& q) {
  Process cp = canonicalize(p);
  Process cq = canonicalize(q);
  AlphaCtx ctx;
  return compare_processes(cp, cq, ctx) == 0;
}

// --- prenex form ----------------------------------------------------------------------

PrenexForm prenex_decompose(const Process& p, const NameSet& avoid) {
  PrenexForm f;
  NameSet taken = avoid;
  {
    NameSet s = p.support();
    taken.insert(s.begin(), s.end());
  }
  std::vector<Process> work;
  work.push_back(p);
  // Worklist: split pars, hoist restrictions (freshening binders), drop nils.
  while (!work.empty()) {
    Process cur = work.front();
    work.erase(work.begin());
    if (cur.is_nil()) continue;
    if (const auto* par = as<ParNode>(cur)) {
      work.insert(work.begin(), {par->left, par->right});
      continue;
    }
    if (const auto* re = as<RestrictP>(cur)) {
      Name x = re->name;
      Process body = re->body;
      if (taken.find(x) != taken.end()) {
        NameSet all = taken;
        NameSet bs = body.support();
        all.insert(bs.begin(), bs.end());
        for (const Process& w : work) {
          NameSet ws = w.support();
          all.insert(ws.begin(), ws.end());
        }
        Name fresh = fresh_for(all, x.label());
        body = body.swap(x, fresh);
        x = fresh;
      }
      taken.insert(x);
      f.binders.emplace_back(x, re->type);
      work.insert(work.begin(), body);
      continue;
    }
    f.components.push_back(cur);
  }
  return f;
}

Process prenex_rebuild(const PrenexForm& f) {
  Process body = build_par(f.components);
  for (size_t i = f.binders.size(); i-- > 0;)
    body = Process::restrict(f.binders[i].first, f.binders[i].second, body);
  return body;
}

Process freshen_restrictions(const Process& p, const NameSet& avoid) {
  const ProcessNode& n = p.node();
  if (const auto* par = std::get_if<ParNode>(&n.v))
    return Process::par(freshen_restrictions(par->left, avoid),
                        freshen_restrictions(par->right, avoid));
  if (const auto* re = std::get_if<RestrictP>(&n.v)) {
    Name x = re->name;
    Process body = re->body;
    if (avoid.find(x) != avoid.end()) {
      NameSet all = avoid;
      NameSet bs = body.support();
      all.insert(bs.begin(), bs.end());
      Name fresh = fresh_for(all, x.label());
      body = body.swap(x, fresh);
      x = fresh;
    }
    NameSet deeper = avoid;
    deeper.insert(x);
    return Process::restrict(x, re->type, freshen_restrictions(body, deeper));
  }
  return p;
}

// --- printing ----------------------------------------------------------------------------

namespace {

void print_process(const Process& p, std::ostream& os);

void print_atom(const Process& p, std::ostream& os) {
  if (as<CaseP>(p) != nullptr) {
    os << "(";
    print_process(p, os);
    os << ")";
    return;
  }
  if (p.is_par()) {
    std::vector<Process> comps;
    flatten_canonical(p, comps);
    if (comps.empty()) {
      os << "0";
    } else if (comps.size() == 1) {
      print_atom(comps[0], os);
    } else {
      os << "(";
      print_process(p, os);
      os << ")";
    }
    return;
  }
  print_process(p, os);
}

void print_process(const Process& p, std::ostream& os) {
  const ProcessNode& n = p.node();
  if (std::holds_alternative<NilP>(n.v)) {
    os << "0";
    return;
  }
  if (std::holds_alternative<ParNode>(n.v)) {
    std::vector<Process> comps;
    flatten_canonical(p, comps);
    if (comps.empty()) {
      os << "0";
      return;
    }
    if (comps.size() == 1) {
      print_process(comps[0], os);
      return;
    }
    for (size_t i = 0; i < comps.size(); ++i) {
      if (i) os << " | ";
      print_atom(comps[i], os);
    }
    return;
  }
  if (const auto* o = std::get_if<OutputP>(&n.v)) {
    os << "'";
    o->subject->print(os);
    os << "<";
    o->object->print(os);
    os << ">.";
    print_atom(o->cont, os);
    return;
  }
  if (const auto* i = std::get_if<InputP>(&n.v)) {
    i->subject->print(os);
    os << "(\\";
    for (size_t k = 0; k < i->binders.size(); ++k) {
      if (k) os << ",";
      os << i->binders[k].first;
      os << ":";
      i->binders[k].second->print(os);
    }
    os << ")";
    i->pattern->print(os);
    os << ".";
    print_atom(i->cont, os);
    return;
  }
  if (const auto* r = std::get_if<RunP>(&n.v)) {
    os << "run ";
    r->handle->print(os);
    return;
  }
  if (const auto* c = std::get_if<CaseP>(&n.v)) {
    os << "case ";
    for (size_t k = 0; k < c->branches.size(); ++k) {
      if (k) os << " [] ";
      c->branches[k].first->print(os);
      os << ":";
      print_atom(c->branches[k].second, os);
    }
    return;
  }
  if (const auto* re = std::get_if<RestrictP>(&n.v)) {
    os << "(new " << re->name << ":";
    re->type->print(os);
    os << ")";
    print_atom(re->body, os);
    return;
  }
  if (const auto* rp = std::get_if<ReplP>(&n.v)) {
    os << "!";
    print_atom(rp->body, os);
    return;
  }
  const auto* a = std::get_if<AssertP>(&n.v);
  assert(a);
  os << "(| ";
  a->assertion->print(os);
  os << " |)";
}

}  // namespace

void Process::print(std::ostream& os) const { print_process(*this, os); }

std::string Process::to_string() const {
  std::ostringstream os;
  print(os);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Process& p) {
  p.print(os);
  return os;
}

}  // namespace hopsi
