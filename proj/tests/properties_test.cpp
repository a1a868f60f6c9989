#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hopsi/harness.hpp"
#include "hopsi/instance_hopi2.hpp"
#include "hopsi/instance_rho.hpp"
#include "support.hpp"

// Randomized suites for the metatheory: weakening and strengthening of
// environments, assertion weakening, substitution, frame behaviour along
// evaluation and reduction, and congruence properties of the canonical
// forms. The acceptance binary reruns these at full trial counts.

using namespace hopsi;
using namespace hopsi::test;

namespace {

const Instance& hopi_inst() {
  static const Instance i = hopi::instance();
  return i;
}

Name fresh_probe(uint64_t salt) {
  return Name(kFreshIdBase + (uint64_t(2) << 40) + salt,
              std::make_shared<const std::string>("p" + std::to_string(salt)));
}

}  // namespace

TEST_CASE("weakening: unused bindings never break process judgments") {
  Rng rng(51);
  size_t checked = 0;
  for (int i = 0; i < 200; ++i) {
    auto [env, psi] = hopi_inst().gens.judgment(rng, 4);
    Process p = hopi_inst().gens.typed_process(rng, env, psi, 5);
    if (check_process(env, psi, p, hopi_inst())) continue;
    Name x = fresh_probe(i);
    Type t = hopi_inst().gens.type(rng, 2);
    auto extended = env.extend(x, t);
    REQUIRE(extended);
    auto err = check_process(*extended, psi, p, hopi_inst());
    if (err) CAPTURE(describe(*err));
    CHECK_FALSE(err);
    ++checked;
  }
  CHECK(checked >= 150);
}

TEST_CASE("strengthening: fresh bindings can be dropped") {
  Rng rng(52);
  size_t checked = 0;
  for (int i = 0; i < 200; ++i) {
    auto [env, psi] = hopi_inst().gens.judgment(rng, 4);
    Name x = fresh_probe(i);
    Type t = hopi_inst().gens.type(rng, 2);
    auto extended = env.extend(x, t);
    REQUIRE(extended);
    Process p = hopi_inst().gens.typed_process(rng, env, psi, 5);
    NameSet supp = p.support();
    if (supp.count(x)) continue;
    if (check_process(*extended, psi, p, hopi_inst())) continue;
    auto err = check_process(env, psi, p, hopi_inst());
    if (err) CAPTURE(describe(*err));
    CHECK_FALSE(err);
    ++checked;
  }
  CHECK(checked >= 150);
}

TEST_CASE("assertion weakening preserves judgments across instances") {
  for (const Instance& inst :
       {hopi::instance(), hopi2::instance(), rho::typed_instance()}) {
    HarnessConfig cfg;
    cfg.trials = 150;
    cfg.seed = 53;
    auto report = run_assumption_harness(inst, cfg);
    for (const auto& a : report.assumptions) {
      if (a.name != "T-ASS-WEAK") continue;
      CAPTURE(inst.sig.name);
      if (!a.ok()) CAPTURE(a.counterexamples[0]);
      CHECK(a.ok());
    }
  }
}

TEST_CASE("substitution preserves process judgments") {
  Rng rng(54);
  size_t checked = 0;
  for (int i = 0; i < 300; ++i) {
    auto [env, psi] = hopi_inst().gens.judgment(rng, 4);
    Term l = hopi_inst().gens.typed_term(rng, env, psi);
    auto lt = hopi_inst().hooks.synth_term(env, psi, l);
    if (std::holds_alternative<TypeError>(lt)) continue;
    Name x = fresh_probe(i);
    auto extended = env.extend(x, std::get<Type>(lt));
    REQUIRE(extended);
    Process p = hopi_inst().gens.typed_process(rng, *extended, psi, 5);
    if (check_process(*extended, psi, p, hopi_inst())) continue;
    Process substituted = p.substitute(Subst::single(x, l));
    NameSet supp = substituted.support();
    if (supp.count(x)) continue;
    auto err = check_process(env, psi, substituted, hopi_inst());
    if (err) {
      CAPTURE(p.to_string());
      CAPTURE(describe(*err));
    }
    CHECK_FALSE(err);
    ++checked;
  }
  CHECK(checked >= 200);
}

TEST_CASE("frames are stable under evaluation and grow under reduction") {
  // The explorer asserts both laws on every visited edge.
  Rng rng(55);
  size_t explored = 0;
  for (int i = 0; i < 60; ++i) {
    auto [env, psi] = hopi_inst().gens.judgment(rng, 4);
    Process p = hopi_inst().gens.typed_process(rng, env, psi, 6);
    ExploreConfig cfg;
    cfg.max_depth = 3;
    cfg.verify_frames = true;
    auto result = explore(psi, p, hopi_inst().sig, cfg);
    CHECK(result.frame_violations.empty());
    explored += result.nodes.size();
  }
  CHECK(explored >= 60);
}

TEST_CASE("evaluation preserves typability") {
  Rng rng(56);
  size_t steps = 0;
  for (int i = 0; i < 120; ++i) {
    auto [env, psi] = hopi_inst().gens.judgment(rng, 4);
    Process p = hopi_inst().gens.typed_process(rng, env, psi, 6);
    if (check_process(env, psi, p, hopi_inst())) continue;
    for (const auto& [next, rule] : eval_steps(psi, p, hopi_inst().sig)) {
      auto err = check_process(env, psi, next, hopi_inst());
      if (err) {
        CAPTURE(rule);
        CAPTURE(next.to_string());
        CAPTURE(describe(*err));
      }
      CHECK_FALSE(err);
      ++steps;
    }
  }
  CHECK(steps > 30);
}

TEST_CASE("struct_eq is an equivalence and a congruence on samples") {
  Rng rng(57);
  const Instance& inst = hopi_inst();
  std::vector<Process> samples;
  for (int i = 0; i < 12; ++i) samples.push_back(inst.gens.process(rng, 5));

  for (const Process& p : samples) CHECK(struct_eq(p, p));
  for (const Process& p : samples) {
    for (const Process& q : samples) {
      CHECK(struct_eq(p, q) == struct_eq(q, p));
      if (!struct_eq(p, q)) continue;
      for (const Process& r : samples)
        if (struct_eq(q, r)) CHECK(struct_eq(p, r));
      // Congruence through contexts.
      Names n;
      CHECK(struct_eq(Process::par(p, samples[0]), Process::par(q, samples[0])));
      CHECK(struct_eq(Process::repl(p), Process::repl(q)));
      CHECK(struct_eq(out(n.a, n.b, p), out(n.a, n.b, q)));
      CHECK(struct_eq(Process::restrict(n.x, d0(), p),
                      Process::restrict(n.x, d0(), q)));
    }
  }
}

TEST_CASE("canonicalize is idempotent on generated processes") {
  Rng rng(58);
  const Instance& inst = hopi_inst();
  for (int i = 0; i < 150; ++i) {
    Process p = inst.gens.process(rng, 6);
    Process c = canonicalize(p);
    CHECK(canonicalize(c).alpha_eq(c));
    CHECK(struct_eq(p, c));
  }
}

TEST_CASE("reduction successor sets are invariant under struct_eq") {
  Rng rng(59);
  Names n;
  const Instance& inst = hopi_inst();
  size_t compared = 0;
  for (int i = 0; i < 40; ++i) {
    Process p = inst.gens.process(rng, 5);
    // Shuffle with a unit and a commuted pair.
    Process q = Process::par(Process::nil(), p);
    REQUIRE(struct_eq(p, q));
    auto sp = reduce_steps(inst.sig.unit, p, inst.sig);
    auto sq = reduce_steps(inst.sig.unit, q, inst.sig);
    REQUIRE(sp.size() == sq.size());
    for (size_t k = 0; k < sp.size(); ++k) CHECK(struct_eq(sp[k], sq[k]));
    compared += sp.size();
  }
  (void)compared;
}

TEST_CASE("communication only touches pattern variables") {
  Rng rng(60);
  const Instance& inst = hopi_inst();
  for (int i = 0; i < 60; ++i) {
    auto [env, psi] = inst.gens.judgment(rng, 4);
    Process p = inst.gens.typed_process(rng, env, psi, 6);
    NameSet before = p.support();
    NameSet psi_supp = psi.support();
    before.insert(psi_supp.begin(), psi_supp.end());
    for (const Process& next : reduce_steps(psi, p, inst.sig)) {
      for (const Name& m : next.support()) {
        CAPTURE(next.to_string());
        CHECK(before.count(m) == 1);
      }
    }
  }
}
