#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hopsi/value.hpp"

namespace hopsi {

class Process;

struct NilP {};

struct ProcessNode;
using ProcessPtr = std::shared_ptr<const ProcessNode>;

// Immutable generic process tree. Terms, conditions, assertions and type
// annotations are instance-supplied nominal values.
class Process {
 public:
  Process() = default;
  explicit Process(ProcessPtr node) : node_(std::move(node)) {}

  static Process nil();
  static Process par(Process left, Process right);
  static Process output(Term subject, Term object, Process cont);
  static Process input(Term subject, std::vector<std::pair<Name, Type>> binders,
                       Term pattern, Process cont);
  static Process run(Term handle);
  static Process choice(std::vector<std::pair<Condition, Process>> branches);
  static Process restrict(Name name, Type type, Process body);
  static Process repl(Process body);
  static Process assert_(Assertion assertion);

  const ProcessNode& node() const { return *node_; }
  const ProcessPtr& ptr() const { return node_; }
  explicit operator bool() const { return node_ != nullptr; }

  bool is_nil() const;
  bool is_par() const;
  bool is_restrict() const;

  NameSet support() const;
  Process swap(const Name& a, const Name& b) const;
  Process substitute(const Subst& s) const;

  // Alpha-equivalence (not the full structural congruence).
  bool alpha_eq(const Process& other) const;

  std::string to_string() const;
  void print(std::ostream& os) const;

 private:
  ProcessPtr node_;
};

struct OutputP {
  Term subject;
  Term object;
  Process cont;
};
struct InputP {
  Term subject;
  std::vector<std::pair<Name, Type>> binders;
  Term pattern;
  Process cont;
};
struct RunP {
  Term handle;
};
struct CaseP {
  std::vector<std::pair<Condition, Process>> branches;
};
struct RestrictP {
  Name name;
  Type type;
  Process body;
};
struct ReplP {
  Process body;
};
struct AssertP {
  Assertion assertion;
};
struct ParNode {
  Process left;
  Process right;
};

struct ProcessNode {
  std::variant<NilP, ParNode, OutputP, InputP, RunP, CaseP, RestrictP, ReplP,
               AssertP>
      v;
};

template <typename T>
const T* as(const Process& p) {
  return p ? std::get_if<T>(&p.node().v) : nullptr;
}

// Total alpha-aware structural order; drives canonical sorting and equality.
int compare_processes(const Process& a, const Process& b, AlphaCtx& ctx);

// --- well-formedness -------------------------------------------------------

struct WfDiagnostic {
  std::vector<int> path;
  std::string message;
};

// A process is well-formed when no assertion sits unguarded inside a case
// branch or replication body. Handle targets are checked by instances.
std::optional<WfDiagnostic> well_formed_violation(const Process& p);
inline bool well_formed(const Process& p) {
  return !well_formed_violation(p).has_value();
}

// --- frames -----------------------------------------------------------------

using AssertionCompose =
    std::function<Assertion(const Assertion&, const Assertion&)>;

// Composition of unguarded assertions; non-contributing constructors yield
// the unit.
Assertion frame_assertion(const Process& p, const Assertion& unit,
                          const AssertionCompose& compose);

// Unguarded restriction binders with their annotations, traversal order.
std::vector<std::pair<Name, Type>> frame_names(const Process& p);

// --- structural congruence ---------------------------------------------------

// Normal form deciding the least congruence generated by alpha-equivalence,
// the commutative monoid laws for parallel with nil, and scope extrusion.
// Scopes are minimized, parallel components sorted, binders renamed in
// traversal order.
Process canonicalize(const Process& p);

bool struct_eq(const Process& p, const Process& q);

// Prenex view: all unguarded restrictions hoisted (binders freshened when
// needed), parallel flattened. The components contain no top-level
// restriction or parallel. Equal to the input up to struct_eq.
struct PrenexForm {
  std::vector<std::pair<Name, Type>> binders;
  std::vector<Process> components;
};

PrenexForm prenex_decompose(const Process& p, const NameSet& avoid);
Process prenex_rebuild(const PrenexForm& f);

// Renames the unguarded restriction binders of `p` away from `avoid`.
Process freshen_restrictions(const Process& p, const NameSet& avoid);

std::ostream& operator<<(std::ostream& os, const Process& p);

}  // namespace hopsi
