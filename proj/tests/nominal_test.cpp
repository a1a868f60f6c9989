#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hopsi/harness.hpp"
#include "hopsi/instance_hopi2.hpp"
#include "hopsi/instance_rho.hpp"
#include "support.hpp"

using namespace hopsi;
using namespace hopsi::test;

TEST_CASE("name identity is the token, not the label") {
  NameSupply supply;
  Name a1 = supply.fresh("a");
  Name a2 = supply.fresh("a");
  CHECK(a1 != a2);
  CHECK(a1 == a1);
  // The supply never reuses tokens.
  NameSet seen;
  for (int i = 0; i < 100; ++i) {
    Name n = supply.fresh("n");
    CHECK(seen.insert(n).second);
  }
}

TEST_CASE("transpositions are involutions on terms and processes") {
  Names n;
  std::vector<Term> terms = {
      hopi::name_term(n.a),
      hopi::proc_term(out(n.a, n.b, Process::nil())),
      hopi::proc_term(Process::restrict(n.x, d0(), out(n.x, n.a, Process::nil()))),
  };
  for (const Term& t : terms) {
    Term swapped = t.swap(n.a, n.b);
    CHECK(swapped.swap(n.a, n.b) == t);
  }
}

TEST_CASE("support commutes with swapping") {
  Names n;
  Process p = Process::par(
      out(n.a, n.b, Process::nil()),
      Process::restrict(n.x, d0(), out(n.x, n.c, Process::nil())));
  NameSet before = p.support();
  NameSet after = p.swap(n.a, n.c).support();
  NameSet expected;
  Transposition t{n.a, n.c};
  for (const Name& m : before) expected.insert(t.apply(m));
  CHECK(after == expected);
}

TEST_CASE("substitution laws hold for the shipped instances") {
  for (const Instance& inst :
       {hopi::instance(), hopi2::instance(), rho::instance(),
        rho::typed_instance()}) {
    SubstLawReport report = run_substitution_laws(inst, 400, 11);
    CAPTURE(inst.sig.name);
    if (!report.ok()) CAPTURE(report.failures[0].detail);
    CHECK(report.ok());
    CHECK(report.samples_run == 400);
  }
}

TEST_CASE("a name-dropping substitution violates the first law") {
  Instance broken = hopi::broken_subst_instance();
  SubstLawReport report = run_substitution_laws(broken, 400, 11);
  REQUIRE_FALSE(report.ok());
  bool law1 = false;
  for (const auto& f : report.failures)
    if (f.law == 1) law1 = true;
  CHECK(law1);
}

TEST_CASE("an empty sample set passes vacuously") {
  SubstLawOps<Term, Term> ops;
  ops.substitute = [](const Term& t, const std::vector<Name>&,
                      const std::vector<Term>&) { return t; };
  ops.swap = [](const Term& t, const Name&, const Name&) { return t; };
  ops.support = [](const Term& t) { return t.support(); };
  ops.replacement_support = [](const Term& t) { return t.support(); };
  ops.equal = [](const Term& a, const Term& b) { return a == b; };
  ops.print = [](const Term& t) { return t.to_string(); };
  std::function<Term(size_t)> repl = [](size_t) {
    return hopi::name_term(Name(1, std::make_shared<const std::string>("a")));
  };
  auto report = check_substitution_laws<Term, Term>(ops, {}, repl, 0);
  CHECK(report.ok());
  CHECK(report.samples_run == 0);
}

TEST_CASE("pointwise freshness") {
  Names n;
  Process p = out(n.a, n.b, Process::nil());
  Term t = hopi::proc_term(p);
  CHECK(fresh_for_value(n.c, *t.ptr()));
  CHECK_FALSE(fresh_for_value(n.a, *t.ptr()));
  // Set-wise: every member fresh.
  NameSet set{n.c, n.d};
  bool all_fresh = true;
  for (const Name& m : set)
    if (!fresh_for_value(m, *t.ptr())) all_fresh = false;
  CHECK(all_fresh);
}

TEST_CASE("alpha-equivalent processes have equal support") {
  Names n;
  Rng rng(3);
  const Instance inst = hopi::instance();
  for (int i = 0; i < 50; ++i) {
    Process p = inst.gens.process(rng, 5);
    Process q = canonicalize(p);
    CHECK(p.support() == q.support());
  }
}
