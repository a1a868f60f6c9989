#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace hopsi;
using namespace hopsi::test;

namespace {

const Instance& inst() {
  static const Instance i = hopi::instance();
  return i;
}

Assertion unit() { return inst().sig.unit; }

}  // namespace

TEST_CASE("nil is well-typed in any well-formed judgment") {
  CHECK_FALSE(check_process(TypeEnv(), unit(), Process::nil(), inst()));
  Names n;
  TypeEnv env = TypeEnv::of({{n.a, hopi::Ty::ch(d0())}});
  CHECK_FALSE(check_process(env, unit(), Process::nil(), inst()));
}

TEST_CASE("judgments mentioning unbound names are ill-formed") {
  Names n;
  auto err = check_process(TypeEnv(), unit(), out(n.a, n.b, Process::nil()),
                           inst());
  REQUIRE(err);
  CHECK(err->rule == "ILL-FORMED");
}

TEST_CASE("output and input check against the carried type") {
  Names n;
  TypeEnv env = TypeEnv::of(
      {{n.a, hopi::Ty::ch(d0())}, {n.b, d0()}, {n.c, hopi::Ty::ch(d0())}});

  CHECK_FALSE(check_process(env, unit(), out(n.a, n.b, Process::nil()), inst()));
  CHECK_FALSE(
      check_process(env, unit(), in(n.a, n.x, d0(), Process::nil()), inst()));

  // Object type mismatch: channel-typed object on a drop-carrying channel.
  auto err =
      check_process(env, unit(), out(n.a, n.c, Process::nil()), inst());
  REQUIRE(err);
  CHECK(err->rule == "OUT");

  // Subject must be a channel.
  auto err2 =
      check_process(env, unit(), out(n.b, n.b, Process::nil()), inst());
  REQUIRE(err2);
  CHECK(err2->rule == "CHA");
}

TEST_CASE("received variables are usable at their annotated type") {
  Names n;
  // a carries drop; forwarding on a drop-carrying channel is fine.
  TypeEnv env = TypeEnv::of(
      {{n.a, hopi::Ty::ch(d0())}, {n.b, hopi::Ty::ch(d0())}});
  Process fwd = in(n.a, n.x, d0(), out(n.b, n.x, Process::nil()));
  CHECK_FALSE(check_process(env, unit(), fwd, inst()));
}

TEST_CASE("the received-process-as-subject process is rejected") {
  Names n;
  // 'a<{P}>.0 | a(\x:drop([]))x.'x<b>.0 must not typecheck: x gets a drop
  // type and is then used as a channel.
  Process payload = Process::nil();
  Process whole = Process::par(
      Process::output(hopi::name_term(n.a), hopi::proc_term(payload),
                      Process::nil()),
      in(n.a, n.x, d0(), out(n.x, n.b, Process::nil())));

  // Natural environment for its free names.
  TypeEnv env = TypeEnv::of(
      {{n.a, hopi::Ty::ch(d0())}, {n.b, d0()}});
  Assertion psi = hopi::assertion({{payload, d0()}});
  auto err = check_process(env, psi, whole, inst());
  REQUIRE(err);
  CHECK(err->rule == "CHA");

  // No typing of the free names saves it: enumerate a family of candidate
  // environments and ambient assertions consistent with {a, b}.
  std::vector<Type> candidates = {
      d0(),
      hopi::Ty::ch(d0()),
      hopi::Ty::ch(hopi::Ty::ch(d0())),
      hopi::Ty::drop(TypeEnv::of({{n.b, d0()}})),
      hopi::Ty::ch(hopi::Ty::drop(TypeEnv::of({{n.b, d0()}}))),
  };
  size_t rejected_count = 0, combos = 0;
  for (const Type& ta : candidates) {
    for (const Type& tb : candidates) {
      TypeEnv env2 = TypeEnv::of({{n.a, ta}, {n.b, tb}});
      for (const Assertion& psi2 :
           {hopi::unit(), psi, hopi::assertion({{payload, hopi::Ty::drop(
                                                             env2)}})}) {
        ++combos;
        if (check_process(env2, psi2, whole, inst())) ++rejected_count;
      }
    }
  }
  CHECK(rejected_count == combos);
}

TEST_CASE("run typechecks through extraction and handles") {
  Names n;
  TypeEnv env = TypeEnv::of({{n.a, hopi::Ty::ch(d0())}});
  Assertion psi = hopi::assertion({{Process::nil(), d0()}});

  // run {0} with {0}:drop([]) in the ambient.
  Process p = Process::run(hopi::proc_term(Process::nil()));
  CHECK_FALSE(check_process(env, psi, p, inst()));

  // run on a name: no handle, strict mode errors.
  auto err = check_process(env, psi, Process::run(hopi::name_term(n.a)),
                           inst());
  REQUIRE(err);
  CHECK(err->rule == "RUN");

  // Deadlock policy accepts it instead.
  Instance lenient = inst();
  lenient.hooks.empty_handle = EmptyHandlePolicy::Deadlock;
  CHECK_FALSE(check_process(env, psi, Process::run(hopi::name_term(n.a)),
                            lenient));

  // A handle process that itself fails under the extracted environment.
  Process bad = out(n.a, n.a, Process::nil());  // object not drop-typed
  Assertion psi_bad = hopi::assertion({{bad, hopi::Ty::drop(env)}});
  auto err2 = check_process(env, psi_bad, Process::run(hopi::proc_term(bad)),
                            inst());
  CHECK(err2);
}

TEST_CASE("case branches and conditions all check") {
  Names n;
  TypeEnv env = TypeEnv::of({{n.a, hopi::Ty::ch(d0())}, {n.b, d0()}});
  Process good = Process::choice(
      {{hopi::Cond::top(), out(n.a, n.b, Process::nil())},
       {hopi::Cond::chan_eq(hopi::name_term(n.a), hopi::name_term(n.a)),
        Process::nil()}});
  CHECK_FALSE(check_process(env, unit(), good, inst()));

  // A non-entailed channel equation is not a typable condition here.
  Process bad_cond = Process::choice(
      {{hopi::Cond::chan_eq(hopi::name_term(n.a), hopi::name_term(n.b)),
        Process::nil()}});
  auto err = check_process(env, unit(), bad_cond, inst());
  REQUIRE(err);
  CHECK(err->rule == "CON");

  // An ill-typed branch poisons the whole case.
  Process bad_branch = Process::choice(
      {{hopi::Cond::top(), out(n.b, n.b, Process::nil())}});
  CHECK(check_process(env, unit(), bad_branch, inst()));
}

TEST_CASE("assertions typecheck their bound processes") {
  Names n;
  TypeEnv env = TypeEnv::of({{n.a, hopi::Ty::ch(d0())}});

  Assertion good = hopi::assertion({{Process::nil(), d0()}});
  CHECK_FALSE(check_process(env, unit(), Process::assert_(good), inst()));

  // Inner process is ill-typed under its drop environment.
  Process p = out(n.a, n.a, Process::nil());
  Assertion bad = hopi::assertion({{p, hopi::Ty::drop(env)}});
  auto err = check_process(env, unit(), Process::assert_(bad), inst());
  REQUIRE(err);
  CHECK(err->rule == "ASS");

  // Conflicting bindings for the same process are rejected.
  Assertion conflict = hopi::assertion(
      {{Process::nil(), d0()}, {Process::nil(), hopi::Ty::drop(env)}});
  auto err2 = check_process(env, unit(), Process::assert_(conflict), inst());
  REQUIRE(err2);
  CHECK(err2->rule == "ASS");
}

TEST_CASE("parallel lends frames to siblings") {
  Names n;
  TypeEnv env = TypeEnv::of({{n.a, hopi::Ty::ch(d0())}});
  // (| {0}:drop([]) |) | run {0}: the right side needs the left's frame.
  Process p = Process::par(
      Process::assert_(hopi::assertion({{Process::nil(), d0()}})),
      Process::run(hopi::proc_term(Process::nil())));
  CHECK_FALSE(check_process(env, unit(), p, inst()));

  // Without the frame the run has no handle binding.
  auto err = check_process(
      env, unit(), Process::run(hopi::proc_term(Process::nil())), inst());
  REQUIRE(err);
  CHECK(err->rule == "TERM");
}

TEST_CASE("restriction freshens against ambient and environment") {
  Names n;
  TypeEnv env = TypeEnv::of({{n.a, hopi::Ty::ch(d0())}});
  // (new a:ch(drop([])))'a<{0}>.0 under an environment already binding a.
  Assertion psi = hopi::assertion({{Process::nil(), d0()}});
  Process p = Process::restrict(
      n.a, hopi::Ty::ch(d0()),
      Process::output(hopi::name_term(n.a), hopi::proc_term(Process::nil()),
                      Process::nil()));
  CHECK_FALSE(check_process(env, psi, p, inst()));
}

TEST_CASE("subsumption is reflexive under syntactic subtyping") {
  Type t1 = hopi::Ty::ch(d0());
  CHECK(check_subsumption(inst().hooks, t1, t1));
  CHECK_FALSE(check_subsumption(inst().hooks, t1, d0()));
  CHECK_FALSE(check_subsumption(inst().hooks, d0(), t1));
}

TEST_CASE("embedded process terms synthesize through the ambient") {
  Names n;
  TypeEnv env = TypeEnv::of({{n.a, hopi::Ty::ch(d0())}});
  Assertion psi = hopi::assertion({{Process::nil(), d0()}});

  auto t = inst().hooks.synth_term(env, psi, hopi::proc_term(Process::nil()));
  REQUIRE(std::holds_alternative<Type>(t));
  CHECK(std::get<Type>(t) == d0());

  // Unbound name.
  auto e1 = inst().hooks.synth_term(TypeEnv(), psi, hopi::name_term(n.a));
  CHECK(std::holds_alternative<TypeError>(e1));

  // Process without a drop binding.
  auto e2 = inst().hooks.synth_term(env, unit(),
                                    hopi::proc_term(Process::nil()));
  CHECK(std::holds_alternative<TypeError>(e2));
}

TEST_CASE("extraction only succeeds on drop types") {
  auto env = inst().hooks.extract_env(d0());
  CHECK(std::holds_alternative<TypeEnv>(env));
  auto err = inst().hooks.extract_env(hopi::Ty::ch(d0()));
  CHECK(std::holds_alternative<TypeError>(err));
}

TEST_CASE("generated well-typed processes do typecheck") {
  Rng rng(7);
  size_t checked = 0;
  for (int i = 0; i < 120; ++i) {
    auto [env, psi] = inst().gens.judgment(rng, 4);
    Process p = inst().gens.typed_process(rng, env, psi, 6);
    CAPTURE(p.to_string());
    auto err = check_process(env, psi, p, inst());
    if (err) CAPTURE(describe(*err));
    CHECK_FALSE(err);
    ++checked;
  }
  CHECK(checked == 120);
}
