#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hopsi/instance.hpp"
#include "hopsi/syntax.hpp"

namespace hopsi {

struct Redex {
  enum class Kind { Com, CaseBranch, RunUnfold, ReplUnfold, StructStep, Wrong };
  Kind kind;
  std::vector<int> position;  // component path within the prenex view
  std::string detail;
};

struct TraceStep {
  size_t index = 0;
  std::string rule;
  Assertion ambient;  // global assertion composed with the state's frame
  Process before;
  Process after;
};

struct EvalSettings {
  // Bounds on the evaluation closure searched per reduction step. Case and
  // run unfoldings are cheap; replication grows states, so the closure is
  // cut off by state count and unfolding depth.
  size_t closure_budget = 256;
  size_t closure_depth = 16;
};

// Ordering for canonical-form keyed containers.
struct ProcessLess {
  bool operator()(const Process& a, const Process& b) const {
    AlphaCtx ctx;
    return compare_processes(a, b, ctx) < 0;
  }
};

// One-step evaluation successors (case selection, handle unfolding,
// replication unfolding), canonicalized and sorted. Structural rewrites are
// folded into canonicalization rather than emitted as separate steps.
std::vector<std::pair<Process, std::string>> eval_steps(
    const Assertion& ambient, const Process& p, const InstanceSignature& sig);

// One-step reduction successors: communications reachable through the
// bounded evaluation closure. Canonicalized, deduplicated, sorted.
std::vector<Process> reduce_steps(const Assertion& ambient, const Process& p,
                                  const InstanceSignature& sig,
                                  const EvalSettings& settings = {});

// Positions where the instance's runtime-error predicate fires on the state
// or on any state in its evaluation closure.
std::vector<Redex> wrong_states(const Assertion& ambient, const Process& p,
                                const InstanceSignature& sig,
                                const EvalSettings& settings = {});

enum class Strategy { All, Random, First };

struct ExploreConfig {
  size_t max_depth = 5;
  Strategy strategy = Strategy::All;
  uint64_t seed = 0;
  bool verify_frames = true;
  bool detect_wrong = false;
  size_t max_states = 0;  // 0 = unbounded
  EvalSettings eval;
};

struct ExploreNode {
  Process state;
  size_t depth = 0;
  std::vector<size_t> children;
  bool truncated = false;  // successors exist beyond the depth bound
};

struct ExploreResult {
  std::vector<ExploreNode> nodes;  // node 0 is the initial state
  std::vector<TraceStep> trace;    // random/first strategies only
  bool wrong_reachable = false;
  bool depth_exceeded = false;
  bool budget_exceeded = false;  // max_states hit before exhaustion
  std::vector<std::string> frame_violations;
  size_t states_visited = 0;
};

ExploreResult explore(const Assertion& ambient, const Process& p,
                      const InstanceSignature& sig, const ExploreConfig& cfg);

}  // namespace hopsi
