#pragma once

#include <variant>

#include "hopsi/instance.hpp"
#include "hopsi/instance_hopi.hpp"
#include "hopsi/semantics.hpp"
#include "hopsi/typing.hpp"

// The reflective calculus: processes and names share one syntax (names are
// quoted processes), with lift/input/drop instead of restriction. Ships a
// direct interpreter, the encoding into the generic framework, the
// behavioural-equivalence check used by the correspondence suite, and the
// reflection type system.

namespace hopsi::rho {

// --- direct syntax ------------------------------------------------------------

struct RhoProcess;
using RhoPtr = std::shared_ptr<const RhoProcess>;

// A name is a quoted process.
struct RhoName {
  RhoPtr quoted;
};

struct RNil {};
struct RPar {
  RhoPtr left;
  RhoPtr right;
};
struct RLift {
  RhoName subject;
  RhoPtr payload;
};
struct RInput {
  RhoName subject;
  RhoName binder;
  RhoPtr body;
};
struct RDrop {
  RhoName name;
};

struct RhoProcess {
  std::variant<RNil, RPar, RLift, RInput, RDrop> v;
};

RhoPtr r_nil();
RhoPtr r_par(RhoPtr left, RhoPtr right);
RhoPtr r_lift(RhoName subject, RhoPtr payload);
RhoPtr r_input(RhoName subject, RhoName binder, RhoPtr body);
RhoPtr r_drop(RhoName name);
RhoName quote(RhoPtr p);

std::string rho_to_string(const RhoPtr& p);
std::string name_to_string(const RhoName& x);

size_t rho_size(const RhoPtr& p);

// Canonical forms: parallel sorted with nils dropped, binders renamed from
// the canonical name family, quote-of-drop names collapsed.
RhoPtr rho_canonical(const RhoPtr& p);
RhoName name_canonical(const RhoName& x);

// Structural congruence and name equivalence (mutually recursive).
bool rho_struct_eq(const RhoPtr& p, const RhoPtr& q);
bool name_eq(const RhoName& x, const RhoName& y);

// Free names (as atoms, canonical forms).
std::vector<RhoName> rho_free_names(const RhoPtr& p);

// Capture-avoiding substitution {n/x}; dropping a substituted name splices
// in the quoted process.
RhoPtr rho_subst(const RhoPtr& p, const RhoName& x, const RhoName& n);

// One-step successors under the communication rule, canonical and sorted.
std::vector<RhoPtr> rho_step(const RhoPtr& p);

// The i-th member of the canonical name family used for binders.
RhoName family_name(size_t i);

// --- terms of the encoded form ---------------------------------------------------

// Statically quoted name: substitution-inert.
class StaticQuote final : public TermImpl {
 public:
  explicit StaticQuote(Process p) : proc_(std::move(p)) {}
  const Process& proc() const { return proc_; }

  void collect_support(NameSet& out) const override;
  int kind_rank() const override { return 12; }
  int compare_same(const NominalBase& other, AlphaCtx& ctx) const override;
  void print(std::ostream& os) const override;
  TermPtr swap_names(const Name& a, const Name& b) const override;
  TermPtr substitute(const Subst& s) const override;
  TermPtr canonical() const override;

 private:
  Process proc_;
};

// Dynamically quoted object: substitution reaches inside.
class DynQuote final : public TermImpl {
 public:
  explicit DynQuote(Process p) : proc_(std::move(p)) {}
  const Process& proc() const { return proc_; }

  void collect_support(NameSet& out) const override;
  int kind_rank() const override { return 13; }
  int compare_same(const NominalBase& other, AlphaCtx& ctx) const override;
  void print(std::ostream& os) const override;
  TermPtr swap_names(const Name& a, const Name& b) const override;
  TermPtr substitute(const Subst& s) const override;
  TermPtr canonical() const override;

 private:
  Process proc_;
};

// Input pattern: a dynamic wrapper around the pattern variable.
class DynName final : public TermImpl {
 public:
  explicit DynName(Name n) : name_(std::move(n)) {}
  const Name& name() const { return name_; }

  void collect_support(NameSet& out) const override { out.insert(name_); }
  int kind_rank() const override { return 14; }
  int compare_same(const NominalBase& other, AlphaCtx& ctx) const override;
  void print(std::ostream& os) const override;
  TermPtr swap_names(const Name& a, const Name& b) const override;
  TermPtr substitute(const Subst& s) const override;
  TermPtr canonical() const override;

 private:
  Name name_;
};

Term static_quote(Process p);
Term dyn_quote(Process p);
Term dyn_name(Name n);
const Process* term_as_static(const Term& t);
const Process* term_as_dyn(const Term& t);
const Name* term_as_dyn_name(const Term& t);

// --- conditions --------------------------------------------------------------------

class RCond final : public ConditionImpl {
 public:
  enum class Kind { ChanEq, ProcEq, Handle };

  static Condition chan_eq(Term lhs, Term rhs);
  static Condition proc_eq(Process lhs, Process rhs);
  static Condition handle(Term handle, Process target);

  Kind kind() const { return kind_; }
  const Term& lhs() const { return lhs_; }
  const Term& rhs() const { return rhs_; }
  const Process& lproc() const { return lp_; }
  const Process& rproc() const { return rp_; }

  void collect_support(NameSet& out) const override;
  int kind_rank() const override { return 21; }
  int compare_same(const NominalBase& other, AlphaCtx& ctx) const override;
  void print(std::ostream& os) const override;
  ConditionPtr swap_names(const Name& a, const Name& b) const override;
  ConditionPtr substitute(const Subst& s) const override;
  ConditionPtr canonical() const override;

  RCond(Kind k, Term l, Term r, Process lp, Process rp)
      : kind_(k), lhs_(std::move(l)), rhs_(std::move(r)), lp_(std::move(lp)),
        rp_(std::move(rp)) {}

 private:
  Kind kind_;
  Term lhs_, rhs_;
  Process lp_, rp_;
};

// --- types ------------------------------------------------------------------------

class RTy final : public TypeImpl {
 public:
  enum class Kind { Pair, Base };

  static Type pair(Type carried, TypeEnv env);
  static Type base(TypeEnv env);

  Kind kind() const { return kind_; }
  const Type& carried() const { return carried_; }
  const TypeEnv& env() const { return env_; }

  void collect_support(NameSet& out) const override;
  int kind_rank() const override { return 32; }
  int compare_same(const NominalBase& other, AlphaCtx& ctx) const override;
  void print(std::ostream& os) const override;
  TypePtr swap_names(const Name& a, const Name& b) const override;

  RTy(Kind k, Type carried, TypeEnv env)
      : kind_(k), carried_(std::move(carried)), env_(std::move(env)) {}

 private:
  Kind kind_;
  Type carried_;
  TypeEnv env_;
};

const RTy* type_as(const Type& t);

// --- assertions (typed instance) -----------------------------------------------------

// Finite set of quote-term : type bindings; union composition.
class RAssert final : public AssertionImpl {
 public:
  using Entry = std::pair<Term, Type>;

  explicit RAssert(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  // Lookup by normalized quote content (flavors identified).
  const Type* lookup(const Term& t) const;

  void collect_support(NameSet& out) const override;
  int kind_rank() const override { return 42; }
  int compare_same(const NominalBase& other, AlphaCtx& ctx) const override;
  void print(std::ostream& os) const override;
  AssertionPtr swap_names(const Name& a, const Name& b) const override;
  AssertionPtr substitute(const Subst& s) const override;
  AssertionPtr canonical() const override;

 private:
  std::vector<Entry> entries_;
  mutable std::vector<Term> keys_;  // normalization cache for lookup
};

Assertion assertion(std::vector<RAssert::Entry> entries);
Assertion unit();
const RAssert* assertion_as(const Assertion& a);

// --- encoding ------------------------------------------------------------------------

// Untyped encoding. Bound names become fresh atomic names; free names
// become static quotes of the name-level translation.
Process encode(const RhoPtr& p);
Term encode_name(const RhoName& x);

// Chan-eq normalization on encoded terms (quote-of-run collapse, flavors
// identified). Exposed for the equivalence tests.
Term norm_term(const Term& t);
bool chan_eq_entailed(const Term& m, const Term& k);

// Minimal behavioural equivalence for correspondence checking: the
// run-of-quote collapse applied everywhere (including inside quoted terms),
// then canonical structural congruence.
bool behav_eq(const Process& p, const Process& q);

struct CorrespondenceReport {
  size_t states_checked = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Verifies, to the given depth, that each visited direct state and its
// encoding have matching one-step behaviour up to behavioural equivalence.
CorrespondenceReport correspondence_check(const RhoPtr& p, size_t depth);

// --- typed encoding ---------------------------------------------------------------------

struct TypedRho;
using TypedRhoPtr = std::shared_ptr<const TypedRho>;

struct TNil {};
struct TPar {
  TypedRhoPtr left;
  TypedRhoPtr right;
};
struct TLift {
  RhoName subject;
  TypedRhoPtr payload;
  Type payload_type;
};
struct TInput {
  RhoName subject;
  RhoName binder;
  Type binder_type;
  TypedRhoPtr body;
};
struct TDrop {
  RhoName name;
};

struct TypedRho {
  std::variant<TNil, TPar, TLift, TInput, TDrop> v;
};

TypedRhoPtr t_nil();
TypedRhoPtr t_par(TypedRhoPtr l, TypedRhoPtr r);
TypedRhoPtr t_lift(RhoName subject, TypedRhoPtr payload, Type payload_type);
TypedRhoPtr t_input(RhoName subject, RhoName binder, Type binder_type,
                    TypedRhoPtr body);
TypedRhoPtr t_drop(RhoName name);

// Subject types for the free names of a typed program.
using NameTypeTable = std::vector<std::pair<RhoName, Type>>;

struct TypedEncoding {
  Process process;
  Assertion bindings;  // hoisted quote-type assertions
  std::vector<std::string> missing;  // subjects without declared types
};

TypedEncoding encode_typed(const TypedRhoPtr& p, const NameTypeTable& table);

// Untyped and typed instances.
Instance instance();
Instance typed_instance();

// A random closed direct process over a small pool of quoted names.
RhoPtr generate_rho(Rng& rng, size_t size);

// A random well-typed program with its name-type table.
struct GeneratedTyped {
  TypedRhoPtr program;
  NameTypeTable table;
};
GeneratedTyped generate_typed(Rng& rng, size_t size);

}  // namespace hopsi::rho
