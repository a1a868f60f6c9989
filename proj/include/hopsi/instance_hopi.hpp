#pragma once

#include <set>

#include "hopsi/instance.hpp"
#include "hopsi/typing.hpp"

// Simplified higher-order pi: terms are names or embedded processes,
// conditions are name equations, reflexive process handles and truth,
// assertions bind embedded processes to types.

namespace hopsi::hopi {

// --- terms -------------------------------------------------------------------

class NameTerm final : public TermImpl {
 public:
  explicit NameTerm(Name n) : name_(std::move(n)) {}
  const Name& name() const { return name_; }

  void collect_support(NameSet& out) const override { out.insert(name_); }
  int kind_rank() const override { return 10; }
  int compare_same(const NominalBase& other, AlphaCtx& ctx) const override;
  void print(std::ostream& os) const override;
  TermPtr swap_names(const Name& a, const Name& b) const override;
  TermPtr substitute(const Subst& s) const override;
  TermPtr canonical() const override;

 private:
  Name name_;
};

class ProcTerm final : public TermImpl {
 public:
  explicit ProcTerm(Process p) : proc_(std::move(p)) {}
  const Process& proc() const { return proc_; }

  void collect_support(NameSet& out) const override;
  int kind_rank() const override { return 11; }
  int compare_same(const NominalBase& other, AlphaCtx& ctx) const override;
  void print(std::ostream& os) const override;
  TermPtr swap_names(const Name& a, const Name& b) const override;
  TermPtr substitute(const Subst& s) const override;
  TermPtr canonical() const override;

 private:
  Process proc_;
};

Term name_term(Name n);
Term proc_term(Process p);

// Null when the term is not of that shape.
const Name* term_as_name(const Term& t);
const Process* term_as_proc(const Term& t);

// --- conditions -----------------------------------------------------------------

// Truth, channel equivalence between names/terms, and process handles.
class Cond final : public ConditionImpl {
 public:
  enum class Kind { Top, ChanEq, Handle };

  static Condition top();
  static Condition chan_eq(Term lhs, Term rhs);
  static Condition handle(Process lhs, Process rhs);

  Kind kind() const { return kind_; }
  const Term& lhs() const { return lhs_; }
  const Term& rhs() const { return rhs_; }
  const Process& lproc() const { return lp_; }
  const Process& rproc() const { return rp_; }

  void collect_support(NameSet& out) const override;
  int kind_rank() const override { return 20; }
  int compare_same(const NominalBase& other, AlphaCtx& ctx) const override;
  void print(std::ostream& os) const override;
  ConditionPtr swap_names(const Name& a, const Name& b) const override;
  ConditionPtr substitute(const Subst& s) const override;
  ConditionPtr canonical() const override;

  Cond(Kind k, Term l, Term r, Process lp, Process rp)
      : kind_(k), lhs_(std::move(l)), rhs_(std::move(r)), lp_(std::move(lp)),
        rp_(std::move(rp)) {}

 private:
  Kind kind_;
  Term lhs_, rhs_;
  Process lp_, rp_;
};

// --- types ---------------------------------------------------------------------

class Ty final : public TypeImpl {
 public:
  enum class Kind { Ch, Drop };

  static Type ch(Type carried);
  static Type drop(TypeEnv env);

  Kind kind() const { return kind_; }
  const Type& carried() const { return carried_; }
  const TypeEnv& env() const { return env_; }

  void collect_support(NameSet& out) const override;
  int kind_rank() const override { return 30; }
  int compare_same(const NominalBase& other, AlphaCtx& ctx) const override;
  void print(std::ostream& os) const override;
  TypePtr swap_names(const Name& a, const Name& b) const override;

  Ty(Kind k, Type carried, TypeEnv env)
      : kind_(k), carried_(std::move(carried)), env_(std::move(env)) {}

 private:
  Kind kind_;
  Type carried_;
  TypeEnv env_;
};

const Ty* type_as(const Type& t);

// --- assertions -------------------------------------------------------------------

// Finite set of process:type bindings; composition is union, unit is empty.
class Assert final : public AssertionImpl {
 public:
  using Entry = std::pair<Process, Type>;

  explicit Assert(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  const Type* lookup(const Process& p) const;

  void collect_support(NameSet& out) const override;
  int kind_rank() const override { return 40; }
  int compare_same(const NominalBase& other, AlphaCtx& ctx) const override;
  void print(std::ostream& os) const override;
  AssertionPtr swap_names(const Name& a, const Name& b) const override;
  AssertionPtr substitute(const Subst& s) const override;
  AssertionPtr canonical() const override;

 private:
  std::vector<Entry> entries_;  // canonically sorted, deduplicated
};

Assertion assertion(std::vector<Assert::Entry> entries);
Assertion unit();
const Assert* assertion_as(const Assertion& a);

// --- instance ---------------------------------------------------------------------

bool entails(const Assertion& psi, const Condition& phi);

// The full instance bundle (signature, typing hooks, generators).
Instance instance();

// Mutants for harness calibration: each breaks one contract.
Instance broken_compose_instance();    // composition drops entries
Instance broken_subst_instance();      // substitution loses names
Instance broken_compat_instance();     // compat ignores the carried type

}  // namespace hopsi::hopi
