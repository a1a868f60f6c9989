#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hopsi/syntax.hpp"

namespace hopsi {

class TypeEnv;

// Rule direction for channel compatibility: output (+) or input (-).
enum class Direction { Output, Input };

struct Redex;

// Deterministic RNG handle shared by every generator.
using Rng = std::mt19937_64;

inline uint64_t draw(Rng& rng, uint64_t bound) {
  return bound == 0 ? 0 : rng() % bound;
}
inline bool coin(Rng& rng) { return (rng() & 1) != 0; }

// Semantics-facing instance parameters.
struct InstanceSignature {
  std::string name;

  Assertion unit;
  std::function<Assertion(const Assertion&, const Assertion&)> compose;
  std::function<bool(const Assertion&, const Condition&)> entails;
  // Builds the channel-equivalence condition between two terms.
  std::function<Condition(const Term&, const Term&)> chan_eq;
  // Finite set of processes the term is a handle for under the assertion.
  std::function<std::vector<Process>(const Assertion&, const Term&)> handles;
  // Pattern match: yields the substitution terms for the binders, in binder
  // order, with pattern[binders := result] equal to the received value.
  std::function<std::optional<std::vector<Term>>(
      const Term& pattern, const std::vector<Name>& binders, const Term& value)>
      match;
  // Runtime-error predicate over one prenex component; empty when absent.
  std::function<bool(const Assertion&, const Process& component)> wrong;

  // Specialisation preorder. Default: composing the right side on absorbs
  // the left (valid for the union/max compositions the instances use).
  std::function<bool(const Assertion&, const Assertion&)> leq;

  // The substitution function exposed to the substitution-law checker;
  // defaults to the term's own.
  std::function<Term(const Term&, const Subst&)> subst_term;

  bool assertion_leq(const Assertion& a, const Assertion& b) const {
    if (leq) return leq(a, b);
    return compose(a, b) == b;
  }

  Term substitute_term(const Term& t, const Subst& s) const {
    return subst_term ? subst_term(t, s) : t.substitute(s);
  }
};

struct TypeError {
  std::vector<int> path;
  std::string rule;
  std::string message;
};

using CheckOutcome = std::optional<TypeError>;  // nullopt = well-typed

inline CheckOutcome check_ok() { return std::nullopt; }

// How the checker treats `run M` when the ambient assertion gives the handle
// no targets.
enum class EmptyHandlePolicy { Error, Deadlock };

// Typing-facing instance parameters.
struct TypingHooks {
  // Term type synthesis; the result or the violated rule.
  std::function<std::variant<Type, TypeError>(const TypeEnv&, const Assertion&,
                                              const Term&)>
      synth_term;
  std::function<CheckOutcome(const TypeEnv&, const Assertion&,
                             const Condition&)>
      check_condition;
  std::function<CheckOutcome(const TypeEnv&, const Assertion&,
                             const Assertion&)>
      check_assertion;
  std::function<bool(const Type&, const Type&)> subtype;
  // Extremal object type carried in the given direction.
  std::function<std::variant<Type, TypeError>(const Type&, Direction)> compat;
  // Environment extraction from a handle type.
  std::function<std::variant<TypeEnv, TypeError>(const Type&)> extract_env;
  // Handle targets used by the run rule (usually the signature's).
  std::function<std::vector<Process>(const Assertion&, const Term&)> handles;
  // Ambient seen by subject/pattern/object synthesis inside a prefix rule.
  // Identity unless the instance marks direction through assertions.
  std::function<Assertion(const Assertion&, Direction)> direction_ambient;

  EmptyHandlePolicy empty_handle = EmptyHandlePolicy::Error;

  Assertion ambient_for(const Assertion& psi, Direction d) const {
    return direction_ambient ? direction_ambient(psi, d) : psi;
  }
};

// Randomized-value sources for the falsification harness and property
// suites. Sizes are soft caps on constructor counts.
struct InstanceGenerators {
  std::function<Term(Rng&, size_t)> term;
  std::function<Condition(Rng&, size_t)> condition;
  std::function<Assertion(Rng&, size_t)> assertion;
  std::function<Type(Rng&, size_t)> type;
  std::function<TypeEnv(Rng&, size_t)> env;
  std::function<Process(Rng&, size_t)> process;

  // A coherent judgment context: an environment and a compatible ambient
  // assertion under which generated terms are likely to synthesize.
  std::function<std::pair<TypeEnv, Assertion>(Rng&, size_t)> judgment;
  // A term expected to typecheck in the given context.
  std::function<Term(Rng&, const TypeEnv&, const Assertion&)> typed_term;
  // A process expected to typecheck in the given context.
  std::function<Process(Rng&, const TypeEnv&, const Assertion&, size_t)>
      typed_process;
  // An entailed-equivalent partner for a term (channel equivalence).
  std::function<std::optional<Term>(Rng&, const Assertion&, const Term&)>
      chan_eq_partner;
  // A coherent assertion extension for weakening tests: composing it onto
  // the ambient must keep every judgment it already supports derivable.
  std::function<std::optional<Assertion>(Rng&, const TypeEnv&,
                                         const Assertion&)>
      assertion_extension;
  // Known-good (channel type, direction, carried type) triples.
  std::function<std::vector<std::tuple<Type, Direction, Type>>(Rng&)>
      compat_witnesses;
  // Names substitution can actually reach inside an assertion. Types are
  // never substituted into, so assertions embedding type environments
  // exclude those names here. Default: the full support.
  std::function<NameSet(const Assertion&)> assertion_subst_support;
};

struct Instance {
  InstanceSignature sig;
  TypingHooks hooks;
  InstanceGenerators gens;
};

}  // namespace hopsi
