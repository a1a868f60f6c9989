#include "hopsi/harness.hpp"

#include <sstream>

namespace hopsi {

namespace {

bool synth_ok(const Instance& inst, const TypeEnv& env, const Assertion& psi,
              const Term& m, Type* out = nullptr) {
  auto r = inst.hooks.synth_term(env, psi, m);
  if (std::holds_alternative<TypeError>(r)) return false;
  if (out) *out = std::get<Type>(r);
  return true;
}

Name fresh_name(uint64_t salt) {
  return Name(kFreshIdBase + (uint64_t(1) << 40) + salt,
              std::make_shared<const std::string>("w" + std::to_string(salt)));
}

using Trial = std::function<std::optional<std::string>(Rng&, size_t)>;

struct Runner {
  const HarnessConfig& cfg;
  Rng rng;

  // A trial yields nullopt when its premise did not hold, an empty string
  // when premise and conclusion held, and a description otherwise. On
  // failure, smaller generation sizes are probed to minimize the report.
  AssumptionResult run(const std::string& name, const Trial& trial) {
    AssumptionResult result;
    result.name = name;
    size_t limit = cfg.trials * 8;
    while (result.checked < cfg.trials && result.attempts < limit) {
      ++result.attempts;
      // An unsatisfiable premise stays vacuous; stop probing early.
      if (result.attempts >= 200 && result.checked == 0) break;
      Rng trial_rng(rng());
      auto outcome = trial(trial_rng, cfg.max_size);
      if (!outcome) continue;
      ++result.checked;
      if (!outcome->empty()) {
        result.counterexamples.push_back(minimize(trial, *outcome));
        if (result.counterexamples.size() >= 3) break;
      }
    }
    return result;
  }

  std::string minimize(const Trial& trial, std::string found) {
    for (size_t size = 1; size < cfg.max_size; ++size) {
      for (size_t attempt = 0; attempt < 50; ++attempt) {
        Rng trial_rng(rng());
        auto outcome = trial(trial_rng, size);
        if (outcome && !outcome->empty()) return *outcome;
      }
    }
    return found;
  }
};

}  // namespace

std::string HarnessReport::summary() const {
  std::ostringstream os;
  os << "instance " << instance << " (seed " << seed << ")\n";
  for (const auto& a : assumptions) {
    os << "  " << a.name << ": " << a.checked << " cases";
    if (!a.ok()) os << ", FAILED: " << a.counterexamples[0];
    os << "\n";
  }
  os << "  compatibility contract: " << compat_contract.checked << " cases";
  if (!compat_contract.ok())
    os << ", FAILED: " << compat_contract.counterexamples[0];
  os << "\n";
  os << "  substitution laws: " << subst_laws.samples_run << " samples";
  if (!subst_laws.ok())
    os << ", FAILED (law " << std::to_string(subst_laws.failures[0].law)
       << "): " << subst_laws.failures[0].value;
  os << "\n";
  return os.str();
}

namespace {

template <typename V>
SubstLawReport run_laws_for(const Instance& inst, uint64_t seed,
                            const std::vector<V>& values,
                            const std::function<V(const V&, const Subst&)>&
                                substitute,
                            std::function<NameSet(const V&)> law_support = {}) {
  SubstLawOps<V, Term> ops;
  ops.substitute = [&](const V& x, const std::vector<Name>& names,
                       const std::vector<Term>& repls) {
    return substitute(x, Subst(names, repls));
  };
  ops.swap = [](const V& x, const Name& a, const Name& b) {
    return x.swap(a, b);
  };
  ops.support = law_support
                    ? law_support
                    : std::function<NameSet(const V&)>(
                          [](const V& x) { return x.support(); });
  ops.full_support = [](const V& x) { return x.support(); };
  ops.replacement_support = [](const Term& x) { return x.support(); };
  ops.equal = [](const V& a, const V& b) {
    return a.canonical() == b.canonical();
  };
  ops.print = [](const V& x) { return x.to_string(); };

  Rng repl_rng(seed ^ 0xabcdULL);
  std::function<Term(size_t)> replacement_at = [&](size_t) {
    return inst.gens.term(repl_rng, 2);
  };
  return check_substitution_laws<V, Term>(ops, values, replacement_at,
                                          seed & 0xffff);
}

}  // namespace

SubstLawReport run_substitution_laws(const Instance& inst, size_t samples,
                                     uint64_t seed) {
  Rng rng(seed ^ 0x5eedf00dULL);
  if (!inst.gens.term) return {};

  // Every pluggable datatype must satisfy the laws; the sample budget is
  // split across terms, conditions and assertions.
  size_t term_share = samples / 2;
  size_t rest = samples - term_share;

  std::vector<Term> terms;
  for (size_t i = 0; i < term_share; ++i)
    terms.push_back(inst.gens.term(rng, 1 + i % 5));
  SubstLawReport report = run_laws_for<Term>(
      inst, seed, terms, [&](const Term& t, const Subst& s) {
        return inst.sig.substitute_term(t, s);
      });

  if (inst.gens.condition) {
    std::vector<Condition> conditions;
    for (size_t i = 0; i < rest / 2; ++i)
      conditions.push_back(inst.gens.condition(rng, 1 + i % 4));
    SubstLawReport conds = run_laws_for<Condition>(
        inst, seed ^ 1, conditions,
        [](const Condition& c, const Subst& s) { return c.substitute(s); });
    report.samples_run += conds.samples_run;
    report.failures.insert(report.failures.end(), conds.failures.begin(),
                           conds.failures.end());
  }
  if (inst.gens.assertion) {
    std::vector<Assertion> assertions;
    for (size_t i = 0; i < rest - rest / 2; ++i)
      assertions.push_back(inst.gens.assertion(rng, 1 + i % 4));
    SubstLawReport asses = run_laws_for<Assertion>(
        inst, seed ^ 2, assertions,
        [](const Assertion& a, const Subst& s) { return a.substitute(s); },
        inst.gens.assertion_subst_support);
    report.samples_run += asses.samples_run;
    report.failures.insert(report.failures.end(), asses.failures.begin(),
                           asses.failures.end());
  }
  return report;
}

HarnessReport run_assumption_harness(const Instance& inst,
                                     const HarnessConfig& cfg) {
  HarnessReport report;
  report.instance = inst.sig.name;
  report.seed = cfg.seed;
  Runner runner{cfg, Rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL)};

  const bool typed = static_cast<bool>(inst.gens.judgment);

  auto gen_judgment = [&](Rng& rng, size_t size) {
    return inst.gens.judgment(rng, size);
  };

  if (typed) {
    // Environment weakening: an unused binding preserves judgments.
    report.assumptions.push_back(runner.run(
        "T-ENV-WEAK", [&](Rng& rng, size_t size) -> std::optional<std::string> {
          auto [env, psi] = gen_judgment(rng, size);
          Term m = inst.gens.typed_term(rng, env, psi);
          Type t;
          if (!synth_ok(inst, env, psi, m, &t)) return std::nullopt;
          Name x = fresh_name(draw(rng, 1 << 20));
          if (!inst.gens.type) return std::nullopt;
          Type xt = inst.gens.type(rng, 2);
          auto extended = env.extend(x, xt);
          if (!extended) return std::nullopt;
          Type t2;
          if (!synth_ok(inst, *extended, psi, m, &t2))
            return "term " + m.to_string() +
                   " lost its type under a weakened environment";
          if (!(t2 == t))
            return "term " + m.to_string() + " changed type from " +
                   t.to_string() + " to " + t2.to_string();
          return "";
        }));

    // Environment strengthening: dropping a binding fresh for the judgment.
    report.assumptions.push_back(runner.run(
        "T-ENV-STRENGTH", [&](Rng& rng, size_t size) -> std::optional<std::string> {
          auto [env, psi] = gen_judgment(rng, size);
          Term m = inst.gens.typed_term(rng, env, psi);
          Name x = fresh_name(draw(rng, 1 << 20));
          if (!inst.gens.type) return std::nullopt;
          Type xt = inst.gens.type(rng, 2);
          auto extended = env.extend(x, xt);
          if (!extended) return std::nullopt;
          Type t;
          if (!synth_ok(inst, *extended, psi, m, &t)) return std::nullopt;
          NameSet supp = m.support();
          if (supp.count(x)) return std::nullopt;
          Type t2;
          if (!synth_ok(inst, env, psi, m, &t2))
            return "term " + m.to_string() +
                   " lost its type after strengthening";
          return "";
        }));

    // If a substituted term types, the replacements type.
    report.assumptions.push_back(runner.run(
        "T-COMP-TERM", [&](Rng& rng, size_t size) -> std::optional<std::string> {
          auto [env, psi] = gen_judgment(rng, size);
          Term m = inst.gens.typed_term(rng, env, psi);
          NameSet supp = m.support();
          if (supp.empty()) return std::nullopt;
          Name x = *supp.begin();
          Term repl = inst.gens.typed_term(rng, env, psi);
          Term substituted =
              inst.sig.substitute_term(m, Subst::single(x, repl));
          if (!synth_ok(inst, env, psi, substituted)) return std::nullopt;
          if (!synth_ok(inst, env, psi, repl))
            return "replacement " + repl.to_string() +
                   " untypable although the substituted term types";
          return "";
        }));

    // Assertion weakening on process judgments.
    report.assumptions.push_back(runner.run(
        "T-ASS-WEAK", [&](Rng& rng, size_t size) -> std::optional<std::string> {
          auto [env, psi] = gen_judgment(rng, size);
          if (!inst.gens.typed_process) return std::nullopt;
          Process p = inst.gens.typed_process(rng, env, psi, size);
          if (check_process(env, psi, p, inst)) return std::nullopt;
          if (!inst.gens.assertion_extension) return std::nullopt;
          auto extra = inst.gens.assertion_extension(rng, env, psi);
          if (!extra) return std::nullopt;
          NameSet extra_supp = extra->support();
          for (const Name& n : extra_supp)
            if (!env.bound(n)) return std::nullopt;
          Assertion weakened = inst.sig.compose(psi, *extra);
          auto err = check_process(env, weakened, p, inst);
          if (err)
            return "process " + p.to_string() +
                   " untypable after assertion weakening: " + err->message;
          return "";
        }));

    // Channel equivalence survives assertion weakening.
    report.assumptions.push_back(runner.run(
        "T-WEAK-CHANEQ", [&](Rng& rng, size_t size) -> std::optional<std::string> {
          auto [env, psi] = gen_judgment(rng, size);
          Term m = inst.gens.typed_term(rng, env, psi);
          if (!inst.gens.chan_eq_partner) return std::nullopt;
          auto partner = inst.gens.chan_eq_partner(rng, psi, m);
          if (!partner) return std::nullopt;
          Condition eq = inst.sig.chan_eq(m, *partner);
          if (!inst.sig.entails(psi, eq)) return std::nullopt;
          if (!inst.gens.assertion_extension) return std::nullopt;
          auto extra = inst.gens.assertion_extension(rng, env, psi);
          if (!extra) return std::nullopt;
          Assertion weakened = inst.sig.compose(psi, *extra);
          if (!inst.sig.entails(weakened, eq))
            return "equation " + eq.to_string() +
                   " lost under assertion weakening";
          return "";
        }));

    // Typed substitution preserves process judgments.
    report.assumptions.push_back(runner.run(
        "T-SUBS", [&](Rng& rng, size_t size) -> std::optional<std::string> {
          auto [env, psi] = gen_judgment(rng, size);
          if (!inst.gens.typed_process) return std::nullopt;
          Term l = inst.gens.typed_term(rng, env, psi);
          Type lt;
          if (!synth_ok(inst, env, psi, l, &lt)) return std::nullopt;
          Name x = fresh_name(draw(rng, 1 << 20));
          auto extended = env.extend(x, lt);
          if (!extended) return std::nullopt;
          Process p =
              inst.gens.typed_process(rng, *extended, psi, size);
          if (check_process(*extended, psi, p, inst)) return std::nullopt;
          Process substituted = p.substitute(Subst::single(x, l));
          auto err = check_process(env, psi, substituted, inst);
          if (err) {
            NameSet supp = substituted.support();
            if (supp.count(x)) return std::nullopt;
            return "substituted process " + substituted.to_string() +
                   " untypable: " + err->message;
          }
          return "";
        }));

    // Channel-equivalent terms share types.
    report.assumptions.push_back(runner.run(
        "T-EQUAL", [&](Rng& rng, size_t size) -> std::optional<std::string> {
          auto [env, psi] = gen_judgment(rng, size);
          Term m = inst.gens.typed_term(rng, env, psi);
          Type t;
          if (!synth_ok(inst, env, psi, m, &t)) return std::nullopt;
          if (!inst.gens.chan_eq_partner) return std::nullopt;
          auto partner = inst.gens.chan_eq_partner(rng, psi, m);
          if (!partner) return std::nullopt;
          if (!inst.sig.entails(psi, inst.sig.chan_eq(m, *partner)))
            return std::nullopt;
          Type t2;
          if (!synth_ok(inst, env, psi, *partner, &t2))
            return "equivalent term " + partner->to_string() +
                   " untypable although " + m.to_string() + " types";
          if (!(t2 == t))
            return "equivalent terms " + m.to_string() + " and " +
                   partner->to_string() + " have different types";
          return "";
        }));

    // Extracted environments cover the handle's names.
    report.assumptions.push_back(runner.run(
        "T-ENV-CLAUS", [&](Rng& rng, size_t size) -> std::optional<std::string> {
          auto [env, psi] = gen_judgment(rng, size);
          Term m = inst.gens.typed_term(rng, env, psi);
          Type t;
          if (!synth_ok(inst, env, psi, m, &t)) return std::nullopt;
          auto extracted = inst.hooks.extract_env(t);
          if (std::holds_alternative<TypeError>(extracted))
            return std::nullopt;
          const TypeEnv& inner = std::get<TypeEnv>(extracted);
          for (const Name& n : m.support()) {
            if (!inner.bound(n))
              return "extracted environment misses " + n.label() + " from " +
                     m.to_string();
          }
          return "";
        }));

    // Handles survive assertion weakening.
    report.assumptions.push_back(runner.run(
        "T-WEAK-ASS-CLAUS", [&](Rng& rng, size_t size) -> std::optional<std::string> {
          auto [env, psi] = gen_judgment(rng, size);
          Term m = inst.gens.typed_term(rng, env, psi);
          auto targets = inst.hooks.handles(psi, m);
          if (targets.empty()) return std::nullopt;
          if (!inst.gens.assertion_extension) return std::nullopt;
          auto extra = inst.gens.assertion_extension(rng, env, psi);
          if (!extra) return std::nullopt;
          Assertion weakened = inst.sig.compose(psi, *extra);
          auto after = inst.hooks.handles(weakened, m);
          for (const Process& target : targets) {
            bool still = false;
            for (const Process& t2 : after)
              if (struct_eq(target, t2)) still = true;
            if (!still)
              return "handle target lost under weakening for " +
                     m.to_string();
          }
          return "";
        }));

    // Substituted handles spawn processes typable in the extracted
    // environment, for typed substitutions as used in preservation.
    report.assumptions.push_back(runner.run(
        "T-SUBS-RUN", [&](Rng& rng, size_t size) -> std::optional<std::string> {
          auto [env, psi] = gen_judgment(rng, size);
          Term m = inst.gens.typed_term(rng, env, psi);
          Type t;
          if (!synth_ok(inst, env, psi, m, &t)) return std::nullopt;
          auto extracted = inst.hooks.extract_env(t);
          if (std::holds_alternative<TypeError>(extracted))
            return std::nullopt;
          const TypeEnv& inner = std::get<TypeEnv>(extracted);
          Term repl = inst.gens.typed_term(rng, inner, psi);
          Type rt;
          if (!synth_ok(inst, inner, psi, repl, &rt)) return std::nullopt;
          std::optional<Name> target_name;
          for (const auto& [n, ty] : inner) {
            if (ty == rt) {
              target_name = n;
              break;
            }
          }
          if (!target_name) return std::nullopt;
          Term substituted =
              inst.sig.substitute_term(m, Subst::single(*target_name, repl));
          for (const Process& p : inst.hooks.handles(psi, substituted)) {
            auto err = check_process(inner, psi, p, inst);
            if (err)
              return "spawned process untypable after substitution: " +
                     err->message;
          }
          return "";
        }));
  }

  // Compatibility contract: witnesses carry, carried types compare, output
  // compatibility is contravariant and input compatibility covariant.
  report.compat_contract = runner.run(
      "COMPAT", [&](Rng& rng, size_t size) -> std::optional<std::string> {
        (void)size;
        if (!inst.gens.compat_witnesses) return std::nullopt;
        auto witnesses = inst.gens.compat_witnesses(rng);
        if (witnesses.empty()) return std::nullopt;
        auto carried_ok = [&](const Type& channel, Direction d,
                              const Type& object) -> bool {
          auto c = inst.hooks.compat(channel, d);
          if (std::holds_alternative<TypeError>(c)) return false;
          const Type& extremal = std::get<Type>(c);
          return d == Direction::Output
                     ? inst.hooks.subtype(object, extremal)
                     : inst.hooks.subtype(extremal, object);
        };
        for (const auto& [channel, d, object] : witnesses) {
          if (!carried_ok(channel, d, object))
            return "witness not carried: " + channel.to_string() +
                   " should carry " + object.to_string();
          if (!inst.hooks.subtype(object, object))
            return "subtyping is not reflexive on " + object.to_string();
          if (inst.gens.type) {
            Type other = inst.gens.type(rng, 2);
            if (d == Direction::Output &&
                inst.hooks.subtype(other, object) &&
                !carried_ok(channel, d, other))
              return "output compatibility is not contravariant at " +
                     other.to_string();
            if (d == Direction::Input && inst.hooks.subtype(object, other) &&
                !carried_ok(channel, d, other))
              return "input compatibility is not covariant at " +
                     other.to_string();
            if (carried_ok(channel, d, other) &&
                !inst.hooks.subtype(other, object) &&
                !inst.hooks.subtype(object, other))
              return "carried types incomparable: " + object.to_string() +
                     " vs " + other.to_string();
          }
        }
        return "";
      });

  report.subst_laws =
      run_substitution_laws(inst, std::min<size_t>(cfg.trials, 400), cfg.seed);
  return report;
}

}  // namespace hopsi
