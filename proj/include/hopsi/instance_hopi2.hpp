#pragma once

#include <variant>

#include "hopsi/instance.hpp"
#include "hopsi/instance_hopi.hpp"
#include "hopsi/semantics.hpp"
#include "hopsi/typing.hpp"

// Level-based termination typing for a higher-order calculus where only
// processes are communicated. Ships two routes: a direct syntax-directed
// level checker, and an embedding into the generic framework where levels
// ride on the assertions; differential tests keep them in agreement.

namespace hopsi::hopi2 {

// --- direct syntax -----------------------------------------------------------

struct Hopi2Process;
using Hopi2Ptr = std::shared_ptr<const Hopi2Process>;

struct H2Nil {};
struct H2In {
  Name channel;
  Name var;
  Hopi2Ptr body;
};
struct H2Out {
  Name channel;
  Hopi2Ptr payload;
  Hopi2Ptr cont;
};
struct H2Par {
  Hopi2Ptr left;
  Hopi2Ptr right;
};
struct H2New {
  Name channel;
  size_t level;  // ch^k, k >= 1
  Hopi2Ptr body;
};
struct H2Var {
  Name var;
};

struct Hopi2Process {
  std::variant<H2Nil, H2In, H2Out, H2Par, H2New, H2Var> v;
};

Hopi2Ptr h2_nil();
Hopi2Ptr h2_in(Name channel, Name var, Hopi2Ptr body);
Hopi2Ptr h2_out(Name channel, Hopi2Ptr payload, Hopi2Ptr cont);
Hopi2Ptr h2_par(Hopi2Ptr left, Hopi2Ptr right);
Hopi2Ptr h2_new(Name channel, size_t level, Hopi2Ptr body);
Hopi2Ptr h2_var(Name var);

std::string h2_to_string(const Hopi2Ptr& p);

// Environment of the direct system: channels at ch^k, variables at levels.
struct LevelEnv {
  std::map<Name, std::pair<bool, size_t>> entries;  // (is_channel, k/level)

  void bind_channel(const Name& n, size_t k) { entries[n] = {true, k}; }
  void bind_var(const Name& n, size_t level) { entries[n] = {false, level}; }
};

struct LevelError {
  std::string rule;
  std::string message;
};

// Syntax-directed level synthesis of the direct system.
std::variant<size_t, LevelError> infer_level(const LevelEnv& env,
                                             const Hopi2Ptr& p);

// --- generic embedding --------------------------------------------------------

class Ty2 final : public TypeImpl {
 public:
  enum class Kind { Level, Ch, ChIn, ChOut };

  static Type level(size_t n);
  static Type ch(size_t k);
  static Type ch_in(size_t k);
  static Type ch_out(size_t k);

  Kind kind() const { return kind_; }
  size_t value() const { return value_; }

  void collect_support(NameSet&) const override {}
  int kind_rank() const override { return 31; }
  int compare_same(const NominalBase& other, AlphaCtx& ctx) const override;
  void print(std::ostream& os) const override;
  TypePtr swap_names(const Name&, const Name&) const override;

  Ty2(Kind k, size_t v) : kind_(k), value_(v) {}

 private:
  Kind kind_;
  size_t value_;
};

const Ty2* type_as(const Type& t);

// Assertions are levels, optionally tagged with the direction of use being
// typed. Composition takes the maximum and collapses tags.
class Assert2 final : public AssertionImpl {
 public:
  enum class Tag { Plain, In, Out };

  Assert2(Tag tag, size_t level) : tag_(tag), level_(level) {}

  Tag tag() const { return tag_; }
  size_t level() const { return level_; }

  void collect_support(NameSet&) const override {}
  int kind_rank() const override { return 41; }
  int compare_same(const NominalBase& other, AlphaCtx& ctx) const override;
  void print(std::ostream& os) const override;
  AssertionPtr swap_names(const Name&, const Name&) const override;
  AssertionPtr substitute(const Subst&) const override;
  AssertionPtr canonical() const override;

 private:
  Tag tag_;
  size_t level_;
};

Assertion level_assertion(size_t n);
Assertion in_tag(size_t n);
Assertion out_tag(size_t n);
const Assert2* assertion_as(const Assertion& a);

Assertion compose(const Assertion& a, const Assertion& b);

// Translates the direct process into the generic syntax. Pattern variables
// are annotated from the channel's level; the environment supplies the
// levels of the free channels.
struct EmbedResult {
  Process process;
  TypeEnv env;
};
EmbedResult embed(const LevelEnv& env, const Hopi2Ptr& p);

// The direct judgment re-expressed through the generic checker: holds when
// the process checks at ambient level n.
CheckOutcome embed_judgment(const LevelEnv& env, const Hopi2Ptr& p, size_t n);

// --- termination probing ---------------------------------------------------------

struct ProbeResult {
  bool terminated = false;
  size_t states = 0;
  size_t depth = 0;
};

// Exhaustive exploration of the embedded form with a canonical-state budget.
ProbeResult termination_probe(const LevelEnv& env, const Hopi2Ptr& p,
                              size_t budget);

// Random well-typed direct processes paired with their environments.
struct GeneratedHopi2 {
  LevelEnv env;
  Hopi2Ptr process;
};
GeneratedHopi2 generate_well_typed(Rng& rng, size_t size);

Instance instance();

}  // namespace hopsi::hopi2
