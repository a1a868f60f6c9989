#include "hopsi/instance_rho.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <set>
#include <sstream>

namespace hopsi::rho {

// --- direct syntax ------------------------------------------------------------

namespace {
RhoPtr mk(RhoProcess p) {
  return std::make_shared<const RhoProcess>(std::move(p));
}
}  // namespace

RhoPtr r_nil() { return mk({RNil{}}); }
RhoPtr r_par(RhoPtr left, RhoPtr right) {
  return mk({RPar{std::move(left), std::move(right)}});
}
RhoPtr r_lift(RhoName subject, RhoPtr payload) {
  return mk({RLift{std::move(subject), std::move(payload)}});
}
RhoPtr r_input(RhoName subject, RhoName binder, RhoPtr body) {
  return mk({RInput{std::move(subject), std::move(binder), std::move(body)}});
}
RhoPtr r_drop(RhoName name) { return mk({RDrop{std::move(name)}}); }
RhoName quote(RhoPtr p) { return RhoName{std::move(p)}; }

size_t rho_size(const RhoPtr& p) {
  if (std::holds_alternative<RNil>(p->v)) return 1;
  if (const auto* pr = std::get_if<RPar>(&p->v))
    return 1 + rho_size(pr->left) + rho_size(pr->right);
  if (const auto* l = std::get_if<RLift>(&p->v))
    return 1 + rho_size(l->subject.quoted) + rho_size(l->payload);
  if (const auto* i = std::get_if<RInput>(&p->v))
    return 1 + rho_size(i->subject.quoted) + rho_size(i->binder.quoted) +
           rho_size(i->body);
  const auto* d = std::get_if<RDrop>(&p->v);
  return 1 + rho_size(d->name.quoted);
}

namespace {

void print_rho(const RhoPtr& p, std::ostream& os);

void print_name(const RhoName& x, std::ostream& os) {
  os << "@";
  const RhoPtr& q = x.quoted;
  bool atom = std::holds_alternative<RNil>(q->v) ||
              std::holds_alternative<RDrop>(q->v);
  if (atom) {
    print_rho(q, os);
  } else {
    os << "(";
    print_rho(q, os);
    os << ")";
  }
}

void print_rho_atom(const RhoPtr& p, std::ostream& os) {
  if (std::holds_alternative<RPar>(p->v)) {
    os << "(";
    print_rho(p, os);
    os << ")";
  } else {
    print_rho(p, os);
  }
}

void print_rho(const RhoPtr& p, std::ostream& os) {
  if (std::holds_alternative<RNil>(p->v)) {
    os << "0";
    return;
  }
  if (const auto* pr = std::get_if<RPar>(&p->v)) {
    print_rho_atom(pr->left, os);
    os << " | ";
    print_rho_atom(pr->right, os);
    return;
  }
  if (const auto* l = std::get_if<RLift>(&p->v)) {
    print_name(l->subject, os);
    os << "!(";
    print_rho(l->payload, os);
    os << ")";
    return;
  }
  if (const auto* i = std::get_if<RInput>(&p->v)) {
    print_name(i->subject, os);
    os << "?(";
    print_name(i->binder, os);
    os << ").";
    print_rho_atom(i->body, os);
    return;
  }
  const auto* d = std::get_if<RDrop>(&p->v);
  os << "*";
  print_name(d->name, os);
}

}  // namespace

std::string rho_to_string(const RhoPtr& p) {
  std::ostringstream os;
  print_rho(p, os);
  return os.str();
}

std::string name_to_string(const RhoName& x) {
  std::ostringstream os;
  print_name(x, os);
  return os.str();
}

// --- canonical forms --------------------------------------------------------------

namespace {

int cmp_rho_struct(const RhoPtr& a, const RhoPtr& b);

int cmp_name_struct(const RhoName& x, const RhoName& y) {
  return cmp_rho_struct(x.quoted, y.quoted);
}

int cmp_rho_struct(const RhoPtr& a, const RhoPtr& b) {
  if (a->v.index() != b->v.index())
    return a->v.index() < b->v.index() ? -1 : 1;
  if (std::holds_alternative<RNil>(a->v)) return 0;
  if (const auto* pa = std::get_if<RPar>(&a->v)) {
    const auto* pb = std::get_if<RPar>(&b->v);
    if (int c = cmp_rho_struct(pa->left, pb->left)) return c;
    return cmp_rho_struct(pa->right, pb->right);
  }
  if (const auto* la = std::get_if<RLift>(&a->v)) {
    const auto* lb = std::get_if<RLift>(&b->v);
    if (int c = cmp_name_struct(la->subject, lb->subject)) return c;
    return cmp_rho_struct(la->payload, lb->payload);
  }
  if (const auto* ia = std::get_if<RInput>(&a->v)) {
    const auto* ib = std::get_if<RInput>(&b->v);
    if (int c = cmp_name_struct(ia->subject, ib->subject)) return c;
    if (int c = cmp_name_struct(ia->binder, ib->binder)) return c;
    return cmp_rho_struct(ia->body, ib->body);
  }
  const auto* da = std::get_if<RDrop>(&a->v);
  const auto* db = std::get_if<RDrop>(&b->v);
  return cmp_name_struct(da->name, db->name);
}

bool names_equal_struct(const RhoName& x, const RhoName& y) {
  return cmp_name_struct(x, y) == 0;
}

// Replaces name occurrences structurally equal to `from` (atoms; quote
// interiors untouched) without splicing drops. Used for alpha-renaming.
RhoPtr rename_atom(const RhoPtr& p, const RhoName& from, const RhoName& to) {
  auto ren = [&](const RhoName& x) {
    return names_equal_struct(x, from) ? to : x;
  };
  if (std::holds_alternative<RNil>(p->v)) return p;
  if (const auto* pr = std::get_if<RPar>(&p->v))
    return r_par(rename_atom(pr->left, from, to),
                 rename_atom(pr->right, from, to));
  if (const auto* l = std::get_if<RLift>(&p->v))
    return r_lift(ren(l->subject), rename_atom(l->payload, from, to));
  if (const auto* i = std::get_if<RInput>(&p->v)) {
    if (names_equal_struct(i->binder, from))  // shadowed
      return r_input(ren(i->subject), i->binder, i->body);
    return r_input(ren(i->subject), i->binder,
                   rename_atom(i->body, from, to));
  }
  const auto* d = std::get_if<RDrop>(&p->v);
  return r_drop(ren(d->name));
}

void collect_atoms(const RhoPtr& p, std::vector<RhoName>& binders,
                   std::vector<RhoName>& out) {
  auto visit = [&](const RhoName& x) {
    for (const RhoName& b : binders)
      if (names_equal_struct(b, x)) return;
    for (const RhoName& f : out)
      if (names_equal_struct(f, x)) return;
    out.push_back(x);
  };
  if (std::holds_alternative<RNil>(p->v)) return;
  if (const auto* pr = std::get_if<RPar>(&p->v)) {
    collect_atoms(pr->left, binders, out);
    collect_atoms(pr->right, binders, out);
    return;
  }
  if (const auto* l = std::get_if<RLift>(&p->v)) {
    visit(l->subject);
    collect_atoms(l->payload, binders, out);
    return;
  }
  if (const auto* i = std::get_if<RInput>(&p->v)) {
    visit(i->subject);
    binders.push_back(i->binder);
    collect_atoms(i->body, binders, out);
    binders.pop_back();
    return;
  }
  const auto* d = std::get_if<RDrop>(&p->v);
  visit(d->name);
}

// Canonicalizes every name in the tree (bottom-up).
RhoPtr canon_names(const RhoPtr& p) {
  if (std::holds_alternative<RNil>(p->v)) return p;
  if (const auto* pr = std::get_if<RPar>(&p->v))
    return r_par(canon_names(pr->left), canon_names(pr->right));
  if (const auto* l = std::get_if<RLift>(&p->v))
    return r_lift(name_canonical(l->subject), canon_names(l->payload));
  if (const auto* i = std::get_if<RInput>(&p->v))
    return r_input(name_canonical(i->subject), name_canonical(i->binder),
                   canon_names(i->body));
  const auto* d = std::get_if<RDrop>(&p->v);
  return r_drop(name_canonical(d->name));
}

// Alpha-aware comparison over name-canonical trees: bound names compare by
// binder index, free names structurally.
struct RhoAlpha {
  std::vector<RhoName> left, right;

  int name_cmp(const RhoName& l, const RhoName& r) const {
    auto index_of = [](const std::vector<RhoName>& stack,
                       const RhoName& n) -> long {
      for (size_t i = stack.size(); i-- > 0;) {
        if (names_equal_struct(stack[i], n))
          return static_cast<long>(stack.size() - 1 - i);
      }
      return -1;
    };
    long li = index_of(left, l);
    long ri = index_of(right, r);
    if (li >= 0 || ri >= 0) {
      if (li < 0) return 1;
      if (ri < 0) return -1;
      if (li != ri) return li < ri ? -1 : 1;
      return 0;
    }
    return cmp_name_struct(l, r);
  }
};

int cmp_rho_alpha(const RhoPtr& a, const RhoPtr& b, RhoAlpha& ctx) {
  if (a->v.index() != b->v.index())
    return a->v.index() < b->v.index() ? -1 : 1;
  if (std::holds_alternative<RNil>(a->v)) return 0;
  if (const auto* pa = std::get_if<RPar>(&a->v)) {
    const auto* pb = std::get_if<RPar>(&b->v);
    if (int c = cmp_rho_alpha(pa->left, pb->left, ctx)) return c;
    return cmp_rho_alpha(pa->right, pb->right, ctx);
  }
  if (const auto* la = std::get_if<RLift>(&a->v)) {
    const auto* lb = std::get_if<RLift>(&b->v);
    if (int c = ctx.name_cmp(la->subject, lb->subject)) return c;
    return cmp_rho_alpha(la->payload, lb->payload, ctx);
  }
  if (const auto* ia = std::get_if<RInput>(&a->v)) {
    const auto* ib = std::get_if<RInput>(&b->v);
    if (int c = ctx.name_cmp(ia->subject, ib->subject)) return c;
    ctx.left.push_back(ia->binder);
    ctx.right.push_back(ib->binder);
    int c = cmp_rho_alpha(ia->body, ib->body, ctx);
    ctx.left.pop_back();
    ctx.right.pop_back();
    return c;
  }
  const auto* da = std::get_if<RDrop>(&a->v);
  const auto* db = std::get_if<RDrop>(&b->v);
  return ctx.name_cmp(da->name, db->name);
}

void flatten_rho(const RhoPtr& p, std::vector<RhoPtr>& out) {
  if (const auto* pr = std::get_if<RPar>(&p->v)) {
    flatten_rho(pr->left, out);
    flatten_rho(pr->right, out);
    return;
  }
  if (!std::holds_alternative<RNil>(p->v)) out.push_back(p);
}

RhoPtr build_rho_par(std::vector<RhoPtr> comps) {
  if (comps.empty()) return r_nil();
  RhoPtr acc = comps.back();
  for (size_t i = comps.size(); i-- > 1;) acc = r_par(comps[i - 1], acc);
  return acc;
}

RhoPtr rho_structure(const RhoPtr& p, std::vector<RhoName>& enclosing) {
  if (std::holds_alternative<RNil>(p->v)) return p;
  if (std::holds_alternative<RPar>(p->v)) {
    std::vector<RhoPtr> comps;
    flatten_rho(p, comps);
    for (RhoPtr& c : comps) c = rho_structure(c, enclosing);
    std::vector<RhoPtr> flat;
    for (const RhoPtr& c : comps) flatten_rho(c, flat);
    std::stable_sort(flat.begin(), flat.end(),
                     [&](const RhoPtr& a, const RhoPtr& b) {
                       RhoAlpha ctx{enclosing, enclosing};
                       return cmp_rho_alpha(a, b, ctx) < 0;
                     });
    return build_rho_par(std::move(flat));
  }
  if (const auto* l = std::get_if<RLift>(&p->v))
    return r_lift(l->subject, rho_structure(l->payload, enclosing));
  if (const auto* i = std::get_if<RInput>(&p->v)) {
    enclosing.push_back(i->binder);
    RhoPtr body = rho_structure(i->body, enclosing);
    enclosing.pop_back();
    return r_input(i->subject, i->binder, std::move(body));
  }
  return p;
}

struct RhoRenamer {
  size_t next = 0;
  std::vector<RhoName> avoid;

  RhoName next_name() {
    while (true) {
      RhoName c = family_name(next++);
      bool clash = false;
      for (const RhoName& a : avoid)
        if (names_equal_struct(a, c)) clash = true;
      if (!clash) return c;
    }
  }

  RhoPtr rename(const RhoPtr& p) {
    if (std::holds_alternative<RNil>(p->v)) return p;
    if (const auto* pr = std::get_if<RPar>(&p->v))
      return r_par(rename(pr->left), rename(pr->right));
    if (const auto* l = std::get_if<RLift>(&p->v))
      return r_lift(l->subject, rename(l->payload));
    if (const auto* i = std::get_if<RInput>(&p->v)) {
      RhoName c = next_name();
      RhoPtr body = names_equal_struct(i->binder, c)
                        ? i->body
                        : rename_atom(i->body, i->binder, c);
      return r_input(i->subject, c, rename(body));
    }
    return p;
  }
};

}  // namespace

RhoName family_name(size_t i) {
  RhoName n = quote(r_nil());
  for (size_t k = 0; k < i; ++k) n = quote(r_lift(n, r_nil()));
  return n;
}

RhoName name_canonical(const RhoName& x) {
  RhoPtr p = rho_canonical(x.quoted);
  if (const auto* d = std::get_if<RDrop>(&p->v)) return d->name;
  return quote(std::move(p));
}

RhoPtr rho_canonical(const RhoPtr& p) {
  RhoPtr named = canon_names(p);
  std::vector<RhoName> enclosing;
  RhoPtr structured = rho_structure(named, enclosing);
  RhoRenamer renamer;
  std::vector<RhoName> binders;
  collect_atoms(structured, binders, renamer.avoid);
  return renamer.rename(structured);
}

bool rho_struct_eq(const RhoPtr& p, const RhoPtr& q) {
  return cmp_rho_struct(rho_canonical(p), rho_canonical(q)) == 0;
}

bool name_eq(const RhoName& x, const RhoName& y) {
  return names_equal_struct(name_canonical(x), name_canonical(y));
}

std::vector<RhoName> rho_free_names(const RhoPtr& p) {
  RhoPtr c = rho_canonical(p);
  std::vector<RhoName> binders, out;
  collect_atoms(c, binders, out);
  return out;
}

// --- substitution ----------------------------------------------------------------

RhoPtr rho_subst(const RhoPtr& p, const RhoName& x, const RhoName& n) {
  RhoName xc = name_canonical(x);
  auto matches = [&](const RhoName& y) {
    return names_equal_struct(name_canonical(y), xc);
  };
  if (std::holds_alternative<RNil>(p->v)) return p;
  if (const auto* pr = std::get_if<RPar>(&p->v))
    return r_par(rho_subst(pr->left, x, n), rho_subst(pr->right, x, n));
  if (const auto* l = std::get_if<RLift>(&p->v))
    return r_lift(matches(l->subject) ? n : l->subject,
                  rho_subst(l->payload, x, n));
  if (const auto* i = std::get_if<RInput>(&p->v)) {
    RhoName subject = matches(i->subject) ? n : i->subject;
    if (matches(i->binder))  // shadowed below
      return r_input(std::move(subject), i->binder, i->body);
    RhoName binder = i->binder;
    RhoPtr body = i->body;
    // The substitution introduces the name itself and, through drop
    // splicing, the free names of its quoted process; none may be captured.
    std::vector<RhoName> incoming = rho_free_names(n.quoted);
    incoming.push_back(name_canonical(n));
    RhoName bc = name_canonical(binder);
    bool clash = false;
    for (const RhoName& inc : incoming)
      if (names_equal_struct(inc, bc)) clash = true;
    if (clash) {
      std::vector<RhoName> binders, avoid;
      collect_atoms(rho_canonical(body), binders, avoid);
      for (const RhoName& inc : incoming) avoid.push_back(inc);
      avoid.push_back(xc);
      RhoRenamer picker;
      picker.avoid = avoid;
      RhoName fresh = picker.next_name();
      body = rename_atom(canon_names(body), bc, fresh);
      binder = fresh;
    }
    return r_input(std::move(subject), std::move(binder),
                   rho_subst(body, x, n));
  }
  const auto* d = std::get_if<RDrop>(&p->v);
  if (matches(d->name)) return n.quoted;  // drop splices in the process
  return r_drop(d->name);
}

// --- reduction --------------------------------------------------------------------

std::vector<RhoPtr> rho_step(const RhoPtr& p) {
  std::vector<RhoPtr> comps;
  flatten_rho(p, comps);
  std::vector<RhoPtr> successors;
  for (size_t i = 0; i < comps.size(); ++i) {
    const auto* in = std::get_if<RInput>(&comps[i]->v);
    if (!in) continue;
    for (size_t j = 0; j < comps.size(); ++j) {
      if (i == j) continue;
      const auto* lift = std::get_if<RLift>(&comps[j]->v);
      if (!lift) continue;
      if (!name_eq(in->subject, lift->subject)) continue;
      RhoPtr cont = rho_subst(in->body, in->binder, quote(lift->payload));
      std::vector<RhoPtr> rest;
      for (size_t k = 0; k < comps.size(); ++k)
        if (k != i && k != j) rest.push_back(comps[k]);
      rest.push_back(std::move(cont));
      successors.push_back(rho_canonical(build_rho_par(std::move(rest))));
    }
  }
  std::sort(successors.begin(), successors.end(),
            [](const RhoPtr& a, const RhoPtr& b) {
              return cmp_rho_struct(a, b) < 0;
            });
  successors.erase(std::unique(successors.begin(), successors.end(),
                               [](const RhoPtr& a, const RhoPtr& b) {
                                 return cmp_rho_struct(a, b) == 0;
                               }),
                   successors.end());
  return successors;
}

// --- encoded terms -------------------------------------------------------------------

Term static_quote(Process p) {
  return Term(std::make_shared<StaticQuote>(std::move(p)));
}
Term dyn_quote(Process p) {
  return Term(std::make_shared<DynQuote>(std::move(p)));
}
Term dyn_name(Name n) { return Term(std::make_shared<DynName>(std::move(n))); }

const Process* term_as_static(const Term& t) {
  const auto* q = dynamic_cast<const StaticQuote*>(t.ptr().get());
  return q ? &q->proc() : nullptr;
}
const Process* term_as_dyn(const Term& t) {
  const auto* q = dynamic_cast<const DynQuote*>(t.ptr().get());
  return q ? &q->proc() : nullptr;
}
const Name* term_as_dyn_name(const Term& t) {
  const auto* q = dynamic_cast<const DynName*>(t.ptr().get());
  return q ? &q->name() : nullptr;
}

void StaticQuote::collect_support(NameSet& out) const {
  NameSet s = proc_.support();
  out.insert(s.begin(), s.end());
}
int StaticQuote::compare_same(const NominalBase& other, AlphaCtx& ctx) const {
  const auto& o = static_cast<const StaticQuote&>(other);
  return compare_processes(proc_, o.proc_, ctx);
}
void StaticQuote::print(std::ostream& os) const { os << "@{" << proc_ << "}"; }
TermPtr StaticQuote::swap_names(const Name& a, const Name& b) const {
  return std::make_shared<StaticQuote>(proc_.swap(a, b));
}
TermPtr StaticQuote::substitute(const Subst&) const {
  // Statically quoted names are substitution-inert.
  return std::make_shared<StaticQuote>(proc_);
}
TermPtr StaticQuote::canonical() const {
  return std::make_shared<StaticQuote>(canonicalize(proc_));
}

void DynQuote::collect_support(NameSet& out) const {
  NameSet s = proc_.support();
  out.insert(s.begin(), s.end());
}
int DynQuote::compare_same(const NominalBase& other, AlphaCtx& ctx) const {
  const auto& o = static_cast<const DynQuote&>(other);
  return compare_processes(proc_, o.proc_, ctx);
}
void DynQuote::print(std::ostream& os) const { os << "<@{" << proc_ << "}>"; }
TermPtr DynQuote::swap_names(const Name& a, const Name& b) const {
  return std::make_shared<DynQuote>(proc_.swap(a, b));
}
TermPtr DynQuote::substitute(const Subst& s) const {
  return std::make_shared<DynQuote>(proc_.substitute(s));
}
TermPtr DynQuote::canonical() const {
  return std::make_shared<DynQuote>(canonicalize(proc_));
}

int DynName::compare_same(const NominalBase& other, AlphaCtx& ctx) const {
  const auto& o = static_cast<const DynName&>(other);
  return ctx.name_cmp(name_, o.name_);
}
void DynName::print(std::ostream& os) const { os << "<" << name_ << ">"; }
TermPtr DynName::swap_names(const Name& a, const Name& b) const {
  Transposition t{a, b};
  return std::make_shared<DynName>(t.apply(name_));
}
TermPtr DynName::substitute(const Subst& s) const {
  if (const Term* t = s.lookup(name_)) {
    // A substituted pattern hole becomes the received quote.
    if (const Process* p = term_as_static(*t))
      return std::make_shared<DynQuote>(*p);
    return t->ptr();
  }
  return std::make_shared<DynName>(name_);
}
TermPtr DynName::canonical() const { return std::make_shared<DynName>(name_); }

// --- conditions -------------------------------------------------------------------

Condition RCond::chan_eq(Term lhs, Term rhs) {
  return Condition(std::make_shared<RCond>(Kind::ChanEq, std::move(lhs),
                                           std::move(rhs), Process(),
                                           Process()));
}
Condition RCond::proc_eq(Process lhs, Process rhs) {
  return Condition(std::make_shared<RCond>(Kind::ProcEq, Term(), Term(),
                                           std::move(lhs), std::move(rhs)));
}
Condition RCond::handle(Term handle, Process target) {
  return Condition(std::make_shared<RCond>(Kind::Handle, std::move(handle),
                                           Term(), Process(),
                                           std::move(target)));
}

void RCond::collect_support(NameSet& out) const {
  if (lhs_) lhs_->collect_support(out);
  if (rhs_) rhs_->collect_support(out);
  if (lp_) {
    NameSet s = lp_.support();
    out.insert(s.begin(), s.end());
  }
  if (rp_) {
    NameSet s = rp_.support();
    out.insert(s.begin(), s.end());
  }
}

int RCond::compare_same(const NominalBase& other, AlphaCtx& ctx) const {
  const auto& o = static_cast<const RCond&>(other);
  if (kind_ != o.kind_) return kind_ < o.kind_ ? -1 : 1;
  switch (kind_) {
    case Kind::ChanEq:
      if (int c = compare_nominal(*lhs_, *o.lhs_, ctx)) return c;
      return compare_nominal(*rhs_, *o.rhs_, ctx);
    case Kind::ProcEq:
      if (int c = compare_processes(lp_, o.lp_, ctx)) return c;
      return compare_processes(rp_, o.rp_, ctx);
    case Kind::Handle:
      if (int c = compare_nominal(*lhs_, *o.lhs_, ctx)) return c;
      return compare_processes(rp_, o.rp_, ctx);
  }
  return 0;
}

void RCond::print(std::ostream& os) const {
  switch (kind_) {
    case Kind::ChanEq:
      lhs_->print(os);
      os << " <-> ";
      rhs_->print(os);
      return;
    case Kind::ProcEq:
      os << "{" << lp_ << "} == {" << rp_ << "}";
      return;
    case Kind::Handle:
      lhs_->print(os);
      os << " <= {" << rp_ << "}";
      return;
  }
}

ConditionPtr RCond::swap_names(const Name& a, const Name& b) const {
  return std::make_shared<RCond>(kind_, lhs_ ? Term(lhs_.swap(a, b)) : Term(),
                                 rhs_ ? Term(rhs_.swap(a, b)) : Term(),
                                 lp_ ? lp_.swap(a, b) : Process(),
                                 rp_ ? rp_.swap(a, b) : Process());
}
ConditionPtr RCond::substitute(const Subst& s) const {
  return std::make_shared<RCond>(kind_, lhs_ ? lhs_.substitute(s) : Term(),
                                 rhs_ ? rhs_.substitute(s) : Term(),
                                 lp_ ? lp_.substitute(s) : Process(),
                                 rp_ ? rp_.substitute(s) : Process());
}
ConditionPtr RCond::canonical() const {
  return std::make_shared<RCond>(kind_, lhs_ ? lhs_.canonical() : Term(),
                                 rhs_ ? rhs_.canonical() : Term(),
                                 lp_ ? canonicalize(lp_) : Process(),
                                 rp_ ? canonicalize(rp_) : Process());
}

// --- types -----------------------------------------------------------------------

Type RTy::pair(Type carried, TypeEnv env) {
  return Type(
      std::make_shared<RTy>(Kind::Pair, std::move(carried), std::move(env)));
}
Type RTy::base(TypeEnv env) {
  return Type(std::make_shared<RTy>(Kind::Base, Type(), std::move(env)));
}

const RTy* type_as(const Type& t) {
  return dynamic_cast<const RTy*>(t.ptr().get());
}

void RTy::collect_support(NameSet& out) const {
  if (carried_) carried_->collect_support(out);
  NameSet s = env_.support();
  out.insert(s.begin(), s.end());
}

int RTy::compare_same(const NominalBase& other, AlphaCtx& ctx) const {
  const auto& o = static_cast<const RTy&>(other);
  if (kind_ != o.kind_) return kind_ < o.kind_ ? -1 : 1;
  if (kind_ == Kind::Pair) {
    if (int c = compare_nominal(*carried_, *o.carried_, ctx)) return c;
  }
  if (env_.size() != o.env_.size())
    return env_.size() < o.env_.size() ? -1 : 1;
  auto it = o.env_.begin();
  for (const auto& [n, t] : env_) {
    if (int c = ctx.name_cmp(n, it->first)) return c;
    if (int c = compare_nominal(*t, *it->second, ctx)) return c;
    ++it;
  }
  return 0;
}

void RTy::print(std::ostream& os) const {
  if (kind_ == Kind::Pair) {
    os << "<" << carried_ << "," << env_.to_string() << ">";
  } else {
    os << "<B," << env_.to_string() << ">";
  }
}

TypePtr RTy::swap_names(const Name& a, const Name& b) const {
  return std::make_shared<RTy>(kind_, carried_ ? carried_.swap(a, b) : Type(),
                               env_.swap(a, b));
}

// --- assertions --------------------------------------------------------------------

namespace {

int compare_rentry(const RAssert::Entry& a, const RAssert::Entry& b,
                   AlphaCtx& ctx) {
  if (int c = compare_nominal(*a.first, *b.first, ctx)) return c;
  return compare_nominal(*a.second, *b.second, ctx);
}

template <typename Entry, typename Cmp>
int multiset_compare(const std::vector<Entry>& l, const std::vector<Entry>& r,
                     AlphaCtx& ctx, const Cmp& cmp) {
  if (l.size() != r.size()) return l.size() < r.size() ? -1 : 1;
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

}  // namespace

RAssert::RAssert(std::vector<Entry> entries) : entries_(std::move(entries)) {
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const Entry& a, const Entry& b) {
                     AlphaCtx ctx;
                     return compare_rentry(a, b, ctx) < 0;
                   });
  entries_.erase(std::unique(entries_.begin(), entries_.end(),
                             [](const Entry& a, const Entry& b) {
                               AlphaCtx ctx;
                               return compare_rentry(a, b, ctx) == 0;
                             }),
                 entries_.end());
}

const Type* RAssert::lookup(const Term& t) const {
  Term key = norm_term(t);
  if (keys_.size() != entries_.size()) {
    keys_.clear();
    keys_.reserve(entries_.size());
    for (const auto& [term, type] : entries_) keys_.push_back(norm_term(term));
  }
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (keys_[i] == key) return &entries_[i].second;
  }
  return nullptr;
}

void RAssert::collect_support(NameSet& out) const {
  for (const auto& [t, ty] : entries_) {
    t->collect_support(out);
    ty->collect_support(out);
  }
}

int RAssert::compare_same(const NominalBase& other, AlphaCtx& ctx) const {
  const auto& o = static_cast<const RAssert&>(other);
  return multiset_compare(entries_, o.entries_, ctx, compare_rentry);
}

void RAssert::print(std::ostream& os) const {
  os << "{";
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (i) os << ", ";
    entries_[i].first->print(os);
    os << ":" << entries_[i].second;
  }
  os << "}";
}

AssertionPtr RAssert::swap_names(const Name& a, const Name& b) const {
  std::vector<Entry> out;
  out.reserve(entries_.size());
  for (const auto& [t, ty] : entries_)
    out.emplace_back(t.swap(a, b), ty.swap(a, b));
  return std::make_shared<RAssert>(std::move(out));
}
AssertionPtr RAssert::substitute(const Subst& s) const {
  std::vector<Entry> out;
  out.reserve(entries_.size());
  for (const auto& [t, ty] : entries_) out.emplace_back(t.substitute(s), ty);
  return std::make_shared<RAssert>(std::move(out));
}
AssertionPtr RAssert::canonical() const {
  std::vector<Entry> out;
  out.reserve(entries_.size());
  for (const auto& [t, ty] : entries_) out.emplace_back(t.canonical(), ty);
  return std::make_shared<RAssert>(std::move(out));
}

Assertion assertion(std::vector<RAssert::Entry> entries) {
  return Assertion(std::make_shared<RAssert>(std::move(entries)));
}
Assertion unit() { return assertion({}); }
const RAssert* assertion_as(const Assertion& a) {
  return dynamic_cast<const RAssert*>(a.ptr().get());
}

// --- encoding -----------------------------------------------------------------------

namespace {

struct EncScope {
  std::vector<std::pair<RhoName, Name>> bound;  // canonical name -> atomic

  const Name* lookup(const RhoName& x) const {
    RhoName c = name_canonical(x);
    for (size_t i = bound.size(); i-- > 0;)
      if (names_equal_struct(bound[i].first, c)) return &bound[i].second;
    return nullptr;
  }
};

Type untyped_binder_type() { return RTy::base(TypeEnv()); }

Process encode_walk(const RhoPtr& p, EncScope& scope, NameSupply& atoms,
                    bool name_level);

Term encode_name_walk(const RhoName& x, EncScope& scope, NameSupply& atoms) {
  if (const Name* atom = scope.lookup(x)) return hopi::name_term(*atom);
  // A free structured name is an atom: binders never reach inside its
  // quote, so the interior encodes in an empty scope.
  EncScope sealed;
  return static_quote(encode_walk(x.quoted, sealed, atoms, true));
}

Process encode_walk(const RhoPtr& p, EncScope& scope, NameSupply& atoms,
                    bool name_level) {
  if (std::holds_alternative<RNil>(p->v)) return Process::nil();
  if (const auto* pr = std::get_if<RPar>(&p->v))
    return Process::par(encode_walk(pr->left, scope, atoms, name_level),
                        encode_walk(pr->right, scope, atoms, name_level));
  if (const auto* l = std::get_if<RLift>(&p->v)) {
    Term subject = encode_name_walk(l->subject, scope, atoms);
    // The object carries the name-level translation of the payload: it is
    // what the receiver binds as a quoted name.
    Process payload = encode_walk(l->payload, scope, atoms, true);
    return Process::output(std::move(subject), dyn_quote(std::move(payload)),
                           Process::nil());
  }
  if (const auto* i = std::get_if<RInput>(&p->v)) {
    Term subject = encode_name_walk(i->subject, scope, atoms);
    Name atom = atoms.fresh("r");
    EncScope inner = scope;
    inner.bound.emplace_back(name_canonical(i->binder), atom);
    Process body = encode_walk(i->body, inner, atoms, name_level);
    return Process::input(std::move(subject), {{atom, untyped_binder_type()}},
                          dyn_name(atom), std::move(body));
  }
  const auto* d = std::get_if<RDrop>(&p->v);
  if (const Name* atom = scope.lookup(d->name))
    return Process::run(hopi::name_term(*atom));
  if (name_level) {
    // Inside names the structure must be kept: the drop stays a request to
    // run the quoted process. The quote interior is atomic, hence sealed.
    EncScope sealed;
    return Process::run(
        static_quote(encode_walk(d->name.quoted, sealed, atoms, true)));
  }
  // A free name can never be substituted, so the drop is inert.
  return Process::nil();
}

}  // namespace

Process encode(const RhoPtr& p) {
  EncScope scope;
  NameSupply atoms(700);
  return encode_walk(p, scope, atoms, false);
}

Term encode_name(const RhoName& x) {
  EncScope scope;
  NameSupply atoms(700);
  return encode_name_walk(x, scope, atoms);
}

// --- channel-equivalence normalization ---------------------------------------------

namespace {

Process norm_process(const Process& p);

Term norm_inner(const Term& t) {
  if (const Process* q = term_as_static(t)) {
    Process inner = norm_process(*q);
    // A statically quoted run collapses to the term it runs; the collapse
    // applies at the top of the quote only.
    if (const auto* r = as<RunP>(inner)) {
      if (term_as_static(r->handle) || hopi::term_as_name(r->handle))
        return norm_inner(r->handle);
    }
    return static_quote(inner);
  }
  if (const Process* q = term_as_dyn(t)) {
    // Dynamic quotes are process payloads: contents normalize as processes,
    // without the name-level collapse.
    return dyn_quote(norm_process(*q));
  }
  return t;
}

Process map_terms(const Process& p,
                  const std::function<Term(const Term&)>& f) {
  const ProcessNode& n = p.node();
  if (std::holds_alternative<NilP>(n.v)) return p;
  if (const auto* pr = std::get_if<ParNode>(&n.v))
    return Process::par(map_terms(pr->left, f), map_terms(pr->right, f));
  if (const auto* o = std::get_if<OutputP>(&n.v))
    return Process::output(f(o->subject), f(o->object), map_terms(o->cont, f));
  if (const auto* i = std::get_if<InputP>(&n.v))
    return Process::input(f(i->subject), i->binders, f(i->pattern),
                          map_terms(i->cont, f));
  if (const auto* r = std::get_if<RunP>(&n.v))
    return Process::run(f(r->handle));
  if (const auto* c = std::get_if<CaseP>(&n.v)) {
    std::vector<std::pair<Condition, Process>> bs;
    for (const auto& [cond, proc] : c->branches)
      bs.emplace_back(cond, map_terms(proc, f));
    return Process::choice(std::move(bs));
  }
  if (const auto* re = std::get_if<RestrictP>(&n.v))
    return Process::restrict(re->name, re->type, map_terms(re->body, f));
  if (const auto* rp = std::get_if<ReplP>(&n.v))
    return Process::repl(map_terms(rp->body, f));
  return p;
}

Process norm_process(const Process& p) {
  return canonicalize(map_terms(p, norm_inner));
}

}  // namespace

Term norm_term(const Term& t) { return norm_inner(t); }

bool chan_eq_entailed(const Term& m, const Term& k) {
  return norm_term(m) == norm_term(k);
}

// --- behavioural equivalence -----------------------------------------------------

namespace {

Process behav_normal(const Process& p);
Process mainize(const Process& p);
Process behav_in_term(const Process& p);

// Terms compare with quoted runs spliced through and flavors identified.
Term behav_term(const Term& t) {
  if (const Process* q = term_as_static(t))
    return static_quote(behav_in_term(*q));
  if (const Process* q = term_as_dyn(t))
    return static_quote(behav_in_term(*q));
  return t;
}

template <typename OnRun>
Process behav_walk(const Process& p, const OnRun& on_run,
                   Process (*recurse)(const Process&)) {
  const ProcessNode& n = p.node();
  if (const auto* r = std::get_if<RunP>(&n.v)) return on_run(*r);
  if (const auto* pr = std::get_if<ParNode>(&n.v))
    return Process::par(recurse(pr->left), recurse(pr->right));
  if (const auto* o = std::get_if<OutputP>(&n.v))
    return Process::output(behav_term(o->subject), behav_term(o->object),
                           recurse(o->cont));
  if (const auto* i = std::get_if<InputP>(&n.v))
    return Process::input(behav_term(i->subject), i->binders,
                          behav_term(i->pattern), recurse(i->cont));
  if (const auto* c = std::get_if<CaseP>(&n.v)) {
    std::vector<std::pair<Condition, Process>> bs;
    for (const auto& [cond, proc] : c->branches)
      bs.emplace_back(cond, recurse(proc));
    return Process::choice(std::move(bs));
  }
  if (const auto* re = std::get_if<RestrictP>(&n.v))
    return Process::restrict(re->name, re->type, recurse(re->body));
  if (const auto* rp = std::get_if<ReplP>(&n.v))
    return Process::repl(recurse(rp->body));
  return p;
}

// Inside quoted terms the name-level structure is kept but quoted runs
// splice through, matching how substitution inlines dropped contents.
Process behav_in_term(const Process& p) {
  return behav_walk(
      p,
      [](const RunP& r) -> Process {
        if (const Process* q = term_as_static(r.handle))
          return behav_in_term(*q);
        if (const Process* q = term_as_dyn(r.handle)) return behav_in_term(*q);
        return Process::run(behav_term(r.handle));
      },
      behav_in_term);
}

// The main translation of a spliced name-level process: a quoted run in
// process position is the drop of a free name, hence inert.
Process mainize(const Process& p) {
  return behav_walk(
      p,
      [](const RunP& r) -> Process {
        if (term_as_static(r.handle) || term_as_dyn(r.handle))
          return Process::nil();
        return Process::run(behav_term(r.handle));
      },
      mainize);
}

// Process positions: running a quote splices its content demoted to the
// main translation.
Process behav_normal(const Process& p) {
  return behav_walk(
      p,
      [](const RunP& r) -> Process {
        if (const Process* q = term_as_static(r.handle)) return mainize(*q);
        if (const Process* q = term_as_dyn(r.handle)) return mainize(*q);
        return Process::run(behav_term(r.handle));
      },
      behav_normal);
}

}  // namespace

bool behav_eq(const Process& p, const Process& q) {
  Process bp = canonicalize(behav_normal(p));
  Process bq = canonicalize(behav_normal(q));
  AlphaCtx ctx;
  return compare_processes(bp, bq, ctx) == 0;
}

// --- untyped instance ---------------------------------------------------------------

namespace {

bool untyped_entails(const Assertion&, const Condition& phi) {
  const auto* c = dynamic_cast<const RCond*>(phi.ptr().get());
  if (!c) return false;
  switch (c->kind()) {
    case RCond::Kind::ChanEq:
      return chan_eq_entailed(c->lhs(), c->rhs());
    case RCond::Kind::ProcEq: {
      Process l = norm_process(c->lproc());
      Process r = norm_process(c->rproc());
      AlphaCtx ctx;
      return compare_processes(l, r, ctx) == 0;
    }
    case RCond::Kind::Handle: {
      Term key = norm_term(c->lhs());
      if (const Process* content = term_as_static(key)) {
        Process l = norm_process(*content);
        Process r = norm_process(c->rproc());
        AlphaCtx ctx;
        return compare_processes(l, r, ctx) == 0;
      }
      return false;
    }
  }
  return false;
}

std::vector<Process> quote_handles(const Assertion&, const Term& m) {
  if (const Process* p = term_as_static(m)) return {*p};
  if (const Process* p = term_as_dyn(m)) return {*p};
  return {};
}

std::optional<std::vector<Term>> rho_match(const Term& pattern,
                                           const std::vector<Name>& binders,
                                           const Term& value) {
  if (binders.size() != 1) return std::nullopt;
  const Name* hole = term_as_dyn_name(pattern);
  if (!hole || !(*hole == binders[0])) return std::nullopt;
  // The received object is a dynamic quote; the binder takes the quoted
  // name, which is inert from then on.
  if (const Process* q = term_as_dyn(value))
    return std::vector<Term>{static_quote(*q)};
  return std::nullopt;
}

}  // namespace

// --- correspondence -----------------------------------------------------------------

CorrespondenceReport correspondence_check(const RhoPtr& p, size_t depth) {
  CorrespondenceReport report;
  std::vector<RhoPtr> frontier{rho_canonical(p)};
  std::set<std::string> visited;
  const Instance inst = instance();
  for (size_t level = 0; level <= depth && !frontier.empty(); ++level) {
    std::vector<RhoPtr> next;
    for (const RhoPtr& state : frontier) {
      std::string key = rho_to_string(state);
      if (!visited.insert(key).second) continue;
      ++report.states_checked;

      std::vector<RhoPtr> direct = rho_step(state);
      Process encoded = encode(state);
      std::vector<Process> encoded_succ =
          reduce_steps(inst.sig.unit, encoded, inst.sig);

      // Forward: every direct step is matched by an encoded step.
      for (const RhoPtr& succ : direct) {
        Process target = encode(succ);
        bool matched = false;
        for (const Process& s : encoded_succ)
          if (behav_eq(s, target)) matched = true;
        if (!matched)
          report.violations.push_back("unmatched direct step from " + key +
                                      " to " + rho_to_string(succ));
      }
      // Backward: every encoded step corresponds to a direct step.
      for (const Process& s : encoded_succ) {
        bool matched = false;
        for (const RhoPtr& succ : direct)
          if (behav_eq(s, encode(succ))) matched = true;
        if (!matched)
          report.violations.push_back("spurious encoded step from " + key +
                                      " to " + s.to_string());
      }
      for (RhoPtr& succ : direct) next.push_back(std::move(succ));
    }
    frontier = std::move(next);
  }
  return report;
}

// --- typed encoding -----------------------------------------------------------------

TypedRhoPtr t_nil() {
  return std::make_shared<const TypedRho>(TypedRho{TNil{}});
}
TypedRhoPtr t_par(TypedRhoPtr l, TypedRhoPtr r) {
  return std::make_shared<const TypedRho>(
      TypedRho{TPar{std::move(l), std::move(r)}});
}
TypedRhoPtr t_lift(RhoName subject, TypedRhoPtr payload, Type payload_type) {
  return std::make_shared<const TypedRho>(TypedRho{
      TLift{std::move(subject), std::move(payload), std::move(payload_type)}});
}
TypedRhoPtr t_input(RhoName subject, RhoName binder, Type binder_type,
                    TypedRhoPtr body) {
  return std::make_shared<const TypedRho>(
      TypedRho{TInput{std::move(subject), std::move(binder),
                      std::move(binder_type), std::move(body)}});
}
TypedRhoPtr t_drop(RhoName name) {
  return std::make_shared<const TypedRho>(TypedRho{TDrop{std::move(name)}});
}

namespace {

RhoPtr strip_types(const TypedRhoPtr& p) {
  if (std::holds_alternative<TNil>(p->v)) return r_nil();
  if (const auto* pr = std::get_if<TPar>(&p->v))
    return r_par(strip_types(pr->left), strip_types(pr->right));
  if (const auto* l = std::get_if<TLift>(&p->v))
    return r_lift(l->subject, strip_types(l->payload));
  if (const auto* i = std::get_if<TInput>(&p->v))
    return r_input(i->subject, i->binder, strip_types(i->body));
  const auto* d = std::get_if<TDrop>(&p->v);
  return r_drop(d->name);
}

struct TypedEncoder {
  const NameTypeTable& table;
  EncScope scope;
  NameSupply atoms{800};
  std::vector<RAssert::Entry> entries;
  std::vector<std::string> missing;

  const Type* subject_type(const RhoName& x) {
    RhoName c = name_canonical(x);
    for (const auto& [name, type] : table)
      if (names_equal_struct(name_canonical(name), c)) return &type;
    return nullptr;
  }

  Term encode_subject(const RhoName& x) {
    if (const Name* atom = scope.lookup(x)) return hopi::name_term(*atom);
    EncScope sealed;
    Term term = static_quote(encode_walk(x.quoted, sealed, atoms, true));
    if (const Type* t = subject_type(x)) {
      entries.emplace_back(term, *t);
    } else {
      missing.push_back(name_to_string(x));
    }
    return term;
  }

  void declare_payload(const Process& payload, const Type& type) {
    entries.emplace_back(dyn_quote(payload), type);
    entries.emplace_back(static_quote(payload), type);
    collect_nested(payload, type);
  }

  void collect_nested(const Process& p, const Type& type) {
    const ProcessNode& n = p.node();
    if (const auto* pr = std::get_if<ParNode>(&n.v)) {
      collect_nested(pr->left, type);
      collect_nested(pr->right, type);
    } else if (const auto* o = std::get_if<OutputP>(&n.v)) {
      if (const Process* q = term_as_dyn(o->object)) declare_payload(*q, type);
      collect_nested(o->cont, type);
    } else if (const auto* i = std::get_if<InputP>(&n.v)) {
      collect_nested(i->cont, type);
    } else if (const auto* rp = std::get_if<ReplP>(&n.v)) {
      collect_nested(rp->body, type);
    } else if (const auto* re = std::get_if<RestrictP>(&n.v)) {
      collect_nested(re->body, type);
    }
  }

  Process walk(const TypedRhoPtr& p) {
    if (std::holds_alternative<TNil>(p->v)) return Process::nil();
    if (const auto* pr = std::get_if<TPar>(&p->v))
      return Process::par(walk(pr->left), walk(pr->right));
    if (const auto* l = std::get_if<TLift>(&p->v)) {
      Term subject = encode_subject(l->subject);
      Process payload =
          encode_walk(strip_types(l->payload), scope, atoms, true);
      // Both flavors are declared: the object synthesizes before the
      // communication, the received static quote after it. Objects nested
      // deeper inside the payload share the payload type.
      declare_payload(payload, l->payload_type);
      return Process::output(std::move(subject), dyn_quote(payload),
                             Process::nil());
    }
    if (const auto* i = std::get_if<TInput>(&p->v)) {
      Term subject = encode_subject(i->subject);
      Name atom = atoms.fresh("r");
      EncScope saved = scope;
      scope.bound.emplace_back(name_canonical(i->binder), atom);
      Process body = walk(i->body);
      scope = saved;
      return Process::input(std::move(subject), {{atom, i->binder_type}},
                            dyn_name(atom), std::move(body));
    }
    const auto* d = std::get_if<TDrop>(&p->v);
    if (const Name* atom = scope.lookup(d->name))
      return Process::run(hopi::name_term(*atom));
    return Process::nil();
  }
};

}  // namespace

TypedEncoding encode_typed(const TypedRhoPtr& p, const NameTypeTable& table) {
  TypedEncoder encoder{table, {}, NameSupply(800), {}, {}};
  // Declared names are bound up front so that quotes nested inside other
  // names find their declarations when their contents are checked. Their
  // encodings output the quoted nil, which needs a carried-type binding.
  for (const auto& [name, type] : table) {
    encoder.entries.emplace_back(encode_name(name), type);
    if (const auto* ty = type_as(type)) {
      if (ty->kind() == RTy::Kind::Pair)
        encoder.entries.emplace_back(dyn_quote(encode(r_nil())),
                                     ty->carried());
    }
  }
  Process proc = encoder.walk(p);
  // First declaration wins per normalized key; later payload declarations
  // for an already-declared name defer to it.
  std::vector<RAssert::Entry> deduped;
  std::vector<Term> keys;
  for (auto& entry : encoder.entries) {
    Term key = norm_term(entry.first);
    bool seen = false;
    for (const Term& k : keys)
      if (k == key) seen = true;
    if (seen) continue;
    keys.push_back(std::move(key));
    deduped.push_back(std::move(entry));
  }
  TypedEncoding out;
  out.process = std::move(proc);
  out.bindings = assertion(std::move(deduped));
  out.missing = std::move(encoder.missing);
  return out;
}

// --- typed hooks ------------------------------------------------------------------------

namespace {

thread_local int g_rho_depth = 0;
struct RhoDepthGuard {
  bool ok;
  RhoDepthGuard() : ok(++g_rho_depth < 64) {}
  ~RhoDepthGuard() { --g_rho_depth; }
};

std::variant<Type, TypeError> typed_synth(const TypeEnv& env,
                                          const Assertion& psi,
                                          const Term& m) {
  RhoDepthGuard guard;
  if (!guard.ok) return TypeError{{}, "TERM", "assertion nesting too deep"};
  if (const Name* n = hopi::term_as_name(m)) {
    if (const Type* t = env.lookup(*n)) return *t;
    return TypeError{{}, "TERM-3", "unbound name " + n->label()};
  }
  if (const Name* n = term_as_dyn_name(m)) {
    if (const Type* t = env.lookup(*n)) return *t;
    return TypeError{{}, "TERM-3", "unbound pattern hole " + n->label()};
  }
  const Process* content = term_as_static(m);
  const char* rule = "TERM-1";
  if (!content) {
    content = term_as_dyn(m);
    rule = "TERM-2";
  }
  if (!content) return TypeError{{}, "TERM", "foreign term"};
  const auto* set = assertion_as(psi);
  if (!set) return TypeError{{}, rule, "foreign assertion"};
  const Type* t = set->lookup(m);
  if (!t) return TypeError{{}, rule, "no type binding for quoted process"};
  const auto* ty = type_as(*t);
  if (!ty) return TypeError{{}, rule, "foreign type"};
  if (auto err = check_process(ty->env(), psi, *content, typed_instance()))
    return TypeError{err->path, rule,
                     "quoted process ill-typed: " + err->message};
  return *t;
}

CheckOutcome typed_check_condition(const TypeEnv& env, const Assertion& psi,
                                   const Condition& phi) {
  RhoDepthGuard guard;
  if (!guard.ok) return TypeError{{}, "CON", "assertion nesting too deep"};
  const auto* c = dynamic_cast<const RCond*>(phi.ptr().get());
  if (!c) return TypeError{{}, "CON", "foreign condition"};
  switch (c->kind()) {
    case RCond::Kind::ChanEq: {
      auto lt = typed_synth(env, psi, c->lhs());
      if (auto* err = std::get_if<TypeError>(&lt)) return *err;
      auto rt = typed_synth(env, psi, c->rhs());
      if (auto* err = std::get_if<TypeError>(&rt)) return *err;
      if (!(std::get<Type>(lt) == std::get<Type>(rt)))
        return TypeError{{}, "CHANEQ", "channel equation across types"};
      return check_ok();
    }
    case RCond::Kind::ProcEq:
    case RCond::Kind::Handle:
      return check_ok();
  }
  return check_ok();
}

CheckOutcome typed_check_assertion(const TypeEnv&, const Assertion& psi,
                                   const Assertion& inner) {
  RhoDepthGuard guard;
  if (!guard.ok) return TypeError{{}, "ASS", "assertion nesting too deep"};
  const auto* set = assertion_as(inner);
  if (!set) return TypeError{{}, "ASS", "foreign assertion"};
  const auto& entries = set->entries();
  for (size_t i = 0; i < entries.size(); ++i) {
    for (size_t j = i + 1; j < entries.size(); ++j) {
      if (norm_term(entries[i].first) == norm_term(entries[j].first) &&
          !(entries[i].second == entries[j].second))
        return TypeError{{}, "ASS", "conflicting types for one name"};
    }
  }
  for (const auto& [term, type] : entries) {
    const Process* content = term_as_static(term);
    if (!content) content = term_as_dyn(term);
    if (!content) return TypeError{{}, "ASS", "assertion binds a non-quote"};
    const auto* ty = type_as(type);
    if (!ty) return TypeError{{}, "ASS", "foreign type"};
    if (auto err = check_process(ty->env(), psi, *content, typed_instance()))
      return TypeError{err->path, "ASS",
                       "asserted process ill-typed: " + err->message};
  }
  return check_ok();
}

// Typed channel equivalence: structural equivalence of the quoted content
// plus agreement of the declared types.
bool typed_entails(const Assertion& psi, const Condition& phi) {
  const auto* c = dynamic_cast<const RCond*>(phi.ptr().get());
  if (!c) return false;
  if (c->kind() == RCond::Kind::ChanEq) {
    if (!chan_eq_entailed(c->lhs(), c->rhs())) return false;
    const Name* ln = hopi::term_as_name(c->lhs());
    const Name* rn = hopi::term_as_name(c->rhs());
    if (ln || rn) return ln && rn;  // atoms: same-name equivalence only
    const auto* set = assertion_as(psi);
    if (!set) return false;
    const Type* lt = set->lookup(c->lhs());
    const Type* rt = set->lookup(c->rhs());
    return lt && rt && *lt == *rt;
  }
  return untyped_entails(psi, phi);
}

Assertion compose_union(const Assertion& a, const Assertion& b) {
  const auto* ia = assertion_as(a);
  const auto* ib = assertion_as(b);
  assert(ia && ib);
  std::vector<RAssert::Entry> entries = ia->entries();
  const auto& more = ib->entries();
  entries.insert(entries.end(), more.begin(), more.end());
  return assertion(std::move(entries));
}

RhoName pool_name(Rng& rng, size_t count = 3) {
  return family_name(draw(rng, count));
}

}  // namespace

namespace {

// Pool names plus the binder family, so bound occurrences appear in
// subject and drop positions and get exercised by substitution.
RhoName anywhere_name(Rng& rng) {
  return family_name(draw(rng, 5));
}

}  // namespace

RhoPtr generate_rho(Rng& rng, size_t size) {
  if (size <= 1) {
    switch (draw(rng, 3)) {
      case 0:
        return r_nil();
      default:
        return r_drop(anywhere_name(rng));
    }
  }
  switch (draw(rng, 7)) {
    case 5:
    case 6: {  // a communicating pair on one subject
      RhoName subject = pool_name(rng);
      RhoName binder = family_name(3 + draw(rng, 2));
      return r_par(r_lift(subject, generate_rho(rng, size / 3)),
                   r_input(subject, binder, generate_rho(rng, size / 3)));
    }
    case 0:
      return r_nil();
    case 1:
      return r_par(generate_rho(rng, size / 2), generate_rho(rng, size / 2));
    case 2:
      return r_lift(anywhere_name(rng), generate_rho(rng, size - 2));
    case 3: {
      RhoName binder =
          coin(rng) ? pool_name(rng) : family_name(3 + draw(rng, 2));
      return r_input(anywhere_name(rng), binder, generate_rho(rng, size - 2));
    }
    default:
      return r_drop(coin(rng) ? anywhere_name(rng)
                              : quote(generate_rho(rng, size - 2)));
  }
}

GeneratedTyped generate_typed(Rng& rng, size_t size) {
  // Subjects come from a pool of tall tower names so generated payload
  // quotes never collide with them. The towers bottom out at the quoted
  // nil, so the whole chain shares the subject type; payloads carry the
  // base type.
  Type base = RTy::base(TypeEnv());
  Type subject_type = RTy::pair(base, TypeEnv());
  NameTypeTable table;
  std::vector<RhoName> subjects;
  for (size_t i = 0; i <= 5; ++i)
    table.emplace_back(family_name(i), subject_type);
  for (size_t i = 0; i < 3; ++i) subjects.push_back(family_name(3 + i));

  struct Gen {
    Rng& rng;
    const std::vector<RhoName>& subjects;
    Type base;
    std::vector<RhoName> binders;

    TypedRhoPtr build(size_t size) {
      if (size <= 1) return leaf();
      switch (draw(rng, 6)) {
        case 0:
          return leaf();
        case 1:
          return t_par(build(size / 2), build(size / 2));
        case 5: {  // a matching sender and receiver on one subject
          RhoName subject = subjects[draw(rng, subjects.size())];
          std::vector<RhoName> saved;
          saved.swap(binders);
          TypedRhoPtr payload = build(size >= 4 ? size / 2 - 1 : 0);
          binders.swap(saved);
          RhoName binder = family_name(8 + binders.size());
          binders.push_back(binder);
          TypedRhoPtr body = build(size / 2);
          binders.pop_back();
          return t_par(t_lift(subject, std::move(payload), base),
                       t_input(subject, binder, base, std::move(body)));
        }
        case 2: {
          // Payload quotes are hoisted into the global assertion, so they
          // must not capture enclosing binders.
          std::vector<RhoName> saved;
          saved.swap(binders);
          TypedRhoPtr payload = build(size >= 2 ? size - 2 : 0);
          binders.swap(saved);
          return t_lift(subjects[draw(rng, subjects.size())],
                        std::move(payload), base);
        }
        case 3: {
          RhoName binder = family_name(8 + binders.size());
          binders.push_back(binder);
          TypedRhoPtr body = build(size - 2);
          binders.pop_back();
          return t_input(subjects[draw(rng, subjects.size())], binder, base,
                         std::move(body));
        }
        default:
          return leaf();
      }
    }

    TypedRhoPtr leaf() {
      if (!binders.empty() && coin(rng))
        return t_drop(binders[draw(rng, binders.size())]);
      return t_nil();
    }
  } gen{rng, subjects, base, {}};

  GeneratedTyped out;
  out.program = gen.build(size);
  out.table = std::move(table);
  return out;
}

// --- instances ----------------------------------------------------------------------

namespace {

Instance make_untyped() {
  Instance inst;
  inst.sig.name = "rho";
  inst.sig.unit = unit();
  inst.sig.compose = compose_union;
  inst.sig.entails = untyped_entails;
  inst.sig.chan_eq = [](const Term& m, const Term& k) {
    return RCond::chan_eq(m, k);
  };
  inst.sig.handles = quote_handles;
  inst.sig.match = rho_match;

  inst.hooks.synth_term = [](const TypeEnv&, const Assertion&,
                             const Term&) -> std::variant<Type, TypeError> {
    return TypeError{{}, "TERM", "the untyped instance has no type rules"};
  };
  inst.hooks.check_condition = [](const TypeEnv&, const Assertion&,
                                  const Condition&) -> CheckOutcome {
    return TypeError{{}, "CON", "the untyped instance has no type rules"};
  };
  inst.hooks.check_assertion = [](const TypeEnv&, const Assertion&,
                                  const Assertion&) -> CheckOutcome {
    return TypeError{{}, "ASS", "the untyped instance has no type rules"};
  };
  inst.hooks.subtype = [](const Type& a, const Type& b) { return a == b; };
  inst.hooks.compat = [](const Type&,
                         Direction) -> std::variant<Type, TypeError> {
    return TypeError{{}, "CHA", "the untyped instance has no type rules"};
  };
  inst.hooks.extract_env =
      [](const Type&) -> std::variant<TypeEnv, TypeError> {
    return TypeError{{}, "END", "the untyped instance has no type rules"};
  };
  inst.hooks.handles = quote_handles;

  InstanceGenerators g;
  g.term = [](Rng& rng, size_t size) -> Term {
    return encode_name(quote(generate_rho(rng, size)));
  };
  g.condition = [](Rng& rng, size_t size) -> Condition {
    Term l = encode_name(quote(generate_rho(rng, size / 2)));
    Term r = coin(rng) ? l : encode_name(quote(generate_rho(rng, size / 2)));
    return RCond::chan_eq(l, r);
  };
  g.assertion = [](Rng&, size_t) { return unit(); };
  g.process = [](Rng& rng, size_t size) {
    return encode(generate_rho(rng, size));
  };
  inst.gens = g;
  return inst;
}

Instance make_typed() {
  Instance inst;
  inst.sig.name = "rho-typed";
  inst.sig.unit = unit();
  inst.sig.compose = compose_union;
  inst.sig.entails = typed_entails;
  inst.sig.chan_eq = [](const Term& m, const Term& k) {
    return RCond::chan_eq(m, k);
  };
  inst.sig.handles = quote_handles;
  inst.sig.match = rho_match;

  inst.hooks.synth_term = typed_synth;
  inst.hooks.check_condition = typed_check_condition;
  inst.hooks.check_assertion = typed_check_assertion;
  inst.hooks.subtype = [](const Type& a, const Type& b) { return a == b; };
  inst.hooks.compat = [](const Type& t,
                         Direction) -> std::variant<Type, TypeError> {
    const auto* ty = type_as(t);
    if (!ty) return TypeError{{}, "CHA", "foreign type"};
    if (ty->kind() != RTy::Kind::Pair)
      return TypeError{{}, "CHA", "base-typed names carry nothing"};
    return ty->carried();
  };
  inst.hooks.extract_env =
      [](const Type& t) -> std::variant<TypeEnv, TypeError> {
    const auto* ty = type_as(t);
    if (!ty) return TypeError{{}, "END", "foreign type"};
    return ty->env();
  };
  inst.hooks.handles = quote_handles;
  // Atomic names have no handle targets until a quote is substituted in.
  inst.hooks.empty_handle = EmptyHandlePolicy::Deadlock;

  InstanceGenerators g;
  g.term = [](Rng& rng, size_t size) -> Term {
    return encode_name(quote(generate_rho(rng, size)));
  };
  g.condition = [](Rng& rng, size_t size) -> Condition {
    Term l = encode_name(quote(generate_rho(rng, size / 2)));
    Term r = coin(rng) ? l : encode_name(quote(generate_rho(rng, size / 2)));
    return RCond::chan_eq(l, r);
  };
  g.assertion = [](Rng& rng, size_t size) -> Assertion {
    auto gen = generate_typed(rng, size);
    return encode_typed(gen.program, gen.table).bindings;
  };
  g.type = [](Rng& rng, size_t) -> Type {
    Type base = RTy::base(TypeEnv());
    return coin(rng) ? base : RTy::pair(base, TypeEnv());
  };
  g.env = [](Rng&, size_t) { return TypeEnv(); };
  g.judgment = [](Rng& rng, size_t size) -> std::pair<TypeEnv, Assertion> {
    auto gen = generate_typed(rng, size + 2);
    return {TypeEnv(), encode_typed(gen.program, gen.table).bindings};
  };
  g.typed_term = [](Rng& rng, const TypeEnv&, const Assertion& psi) -> Term {
    const auto* set = assertion_as(psi);
    if (set && !set->entries().empty())
      return set->entries()[draw(rng, set->entries().size())].first;
    return encode_name(family_name(10));
  };
  g.typed_process = [](Rng& rng, const TypeEnv&, const Assertion&,
                       size_t size) -> Process {
    auto gen = generate_typed(rng, size);
    return encode_typed(gen.program, gen.table).process;
  };
  g.chan_eq_partner = [](Rng&, const Assertion&,
                         const Term& t) -> std::optional<Term> {
    // Quoted nils shuffled by the monoid laws stay equivalent.
    if (const Process* q = term_as_static(t)) {
      if (q->is_nil())
        return static_quote(Process::par(Process::nil(), Process::nil()));
      return t;
    }
    return t;
  };
  g.assertion_extension = [](Rng& rng, const TypeEnv&, const Assertion&)
      -> std::optional<Assertion> {
    auto gen = generate_typed(rng, 4);
    return encode_typed(gen.program, gen.table).bindings;
  };
  g.assertion_subst_support = [](const Assertion& a) {
    NameSet terms, types;
    if (const auto* set = assertion_as(a)) {
      for (const auto& [t, ty] : set->entries()) {
        t->collect_support(terms);
        ty->collect_support(types);
      }
    }
    NameSet out;
    for (const Name& n : terms)
      if (!types.count(n)) out.insert(n);
    return out;
  };
  g.compat_witnesses = [](Rng&) {
    Type base = RTy::base(TypeEnv());
    return std::vector<std::tuple<Type, Direction, Type>>{
        {RTy::pair(base, TypeEnv()), Direction::Output, base},
        {RTy::pair(base, TypeEnv()), Direction::Input, base},
    };
  };
  inst.gens = g;
  return inst;
}

}  // namespace

Instance instance() {
  static const Instance inst = make_untyped();
  return inst;
}

Instance typed_instance() {
  static const Instance inst = make_typed();
  return inst;
}

}  // namespace hopsi::rho
