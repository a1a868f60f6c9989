#pragma once

#include <string>
#include <vector>

#include "hopsi/instance.hpp"
#include "hopsi/nominal.hpp"
#include "hopsi/typing.hpp"

namespace hopsi {

// Randomized falsification of the instance assumptions the generic type
// system imposes, plus the channel-compatibility contract and the
// substitution laws every nominal datatype must satisfy.

struct AssumptionResult {
  std::string name;
  size_t checked = 0;   // trials where the premise held
  size_t attempts = 0;  // generation attempts
  std::vector<std::string> counterexamples;

  bool ok() const { return counterexamples.empty(); }
};

struct HarnessReport {
  std::string instance;
  uint64_t seed = 0;
  std::vector<AssumptionResult> assumptions;
  AssumptionResult compat_contract;
  SubstLawReport subst_laws;

  bool ok() const {
    for (const auto& a : assumptions)
      if (!a.ok()) return false;
    return compat_contract.ok() && subst_laws.ok();
  }

  std::string summary() const;
};

struct HarnessConfig {
  size_t trials = 1000;
  size_t max_size = 6;
  uint64_t seed = 0;
};

HarnessReport run_assumption_harness(const Instance& inst,
                                     const HarnessConfig& cfg);

// The substitution-law part alone (also used by the nominal suite).
SubstLawReport run_substitution_laws(const Instance& inst, size_t samples,
                                     uint64_t seed);

}  // namespace hopsi
