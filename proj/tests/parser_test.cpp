#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hopsi/parser.hpp"
#include "support.hpp"

using namespace hopsi;

namespace {

Process parse_hopi_process(const std::string& text) {
  auto r = parse_hopi(text);
  REQUIRE(std::holds_alternative<GenericSource>(r));
  return std::get<GenericSource>(r).process;
}

}  // namespace

TEST_CASE("basic forms parse") {
  CHECK(parse_hopi_process("0").is_nil());

  Process p = parse_hopi_process("'a<b>.0 | a(\\x:drop([]))x.0");
  REQUIRE(p.is_par());
  const auto* par = as<ParNode>(p);
  CHECK(as<OutputP>(par->left));
  CHECK(as<InputP>(par->right));

  Process q = parse_hopi_process("run {0}");
  CHECK(as<RunP>(q));

  Process c = parse_hopi_process("case top:0 [] a <-> a:'a<b>.0");
  REQUIRE(as<CaseP>(c));
  CHECK(as<CaseP>(c)->branches.size() == 2);

  Process nu = parse_hopi_process("(new x:ch(drop([])))'x<y>.0");
  CHECK(as<RestrictP>(nu));

  Process bang = parse_hopi_process("!(0 | 0)");
  CHECK(as<ReplP>(bang));

  Process assert_p = parse_hopi_process("(| { {0}:drop([]) } |)");
  CHECK(as<AssertP>(assert_p));
}

TEST_CASE("parse errors carry positions") {
  auto r = parse_hopi("case");
  REQUIRE(std::holds_alternative<ParseError>(r));
  CHECK(std::get<ParseError>(r).line == 1);

  auto r2 = parse_hopi("'a<b>");  // missing continuation
  CHECK(std::holds_alternative<ParseError>(r2));

  auto r3 = parse_hopi("0 extra");
  CHECK(std::holds_alternative<ParseError>(r3));
}

TEST_CASE("declarations populate the environment and ambient") {
  auto r = parse_hopi(
      "name a : ch(drop([]))\n"
      "name b : drop([])\n"
      "assert { {0}:drop([]) }\n"
      "'a<{0}>.0");
  REQUIRE(std::holds_alternative<GenericSource>(r));
  const auto& src = std::get<GenericSource>(r);
  CHECK(src.env.size() == 2);
  const auto* set = hopi::assertion_as(src.ambient);
  REQUIRE(set);
  CHECK(set->entries().size() == 1);
}

TEST_CASE("printing parses back to the same text") {
  std::vector<std::string> sources = {
      "0",
      "'a<b>.0",
      "'a<{'c<d>.0}>.0 | a(\\x:drop([]))x.'x<b>.0",
      "run {'a<b>.0}",
      "case top:0 [] a <-> a:0",
      "(new x:ch(drop([])))('x<y>.0 | !'x<z>.0)",
      "(| {{0}:drop([a:ch(drop([]))])} |)",
  };
  for (const std::string& text : sources) {
    Process first = parse_hopi_process(text);
    std::string printed = first.to_string();
    CAPTURE(text);
    CAPTURE(printed);
    Process second = parse_hopi_process(printed);
    CHECK(second.to_string() == printed);
  }
}

TEST_CASE("generated processes round-trip through the printer") {
  Rng rng(41);
  const Instance inst = hopi::instance();
  for (int i = 0; i < 120; ++i) {
    Process p = inst.gens.process(rng, 6);
    std::string printed = p.to_string();
    auto r = parse_hopi(printed);
    CAPTURE(printed);
    REQUIRE(std::holds_alternative<GenericSource>(r));
    CHECK(std::get<GenericSource>(r).process.to_string() == printed);
  }
}

TEST_CASE("direct level syntax parses") {
  auto r = parse_hopi2(
      "name a : ch^2\n"
      "level 3\n"
      "a<0>.0 | a(X).X");
  REQUIRE(std::holds_alternative<Hopi2Source>(r));
  const auto& src = std::get<Hopi2Source>(r);
  CHECK(src.has_level);
  CHECK(src.level == 3);
  auto level = hopi2::infer_level(src.env, src.process);
  REQUIRE(std::holds_alternative<size_t>(level));
  CHECK(std::get<size_t>(level) == 2);
}

TEST_CASE("reflective syntax parses and round-trips") {
  std::vector<std::string> sources = {
      "0",
      "*@0",
      "@0!(0)",
      "@0?(@0).*@0",
      "@(@0!(0))!(*@0) | @0?(@(*@0)).*@(*@0)",
  };
  for (const std::string& text : sources) {
    auto r = parse_rho(text, false);
    CAPTURE(text);
    REQUIRE(std::holds_alternative<RhoSource>(r));
    std::string printed = rho::rho_to_string(std::get<RhoSource>(r).process);
    auto r2 = parse_rho(printed, false);
    REQUIRE(std::holds_alternative<RhoSource>(r2));
    CHECK(rho::rho_to_string(std::get<RhoSource>(r2).process) == printed);
  }
}

TEST_CASE("generated reflective processes round-trip") {
  Rng rng(43);
  for (int i = 0; i < 120; ++i) {
    rho::RhoPtr p = rho::generate_rho(rng, 6);
    std::string printed = rho::rho_to_string(p);
    auto r = parse_rho(printed, false);
    CAPTURE(printed);
    REQUIRE(std::holds_alternative<RhoSource>(r));
    CHECK(rho::rho_to_string(std::get<RhoSource>(r).process) == printed);
  }
}

TEST_CASE("typed reflective syntax keeps annotations") {
  auto r = parse_rho(
      "name @0 : <<B,[]>,[]>\n"
      "@0!(0 : <B,[]>) | @0?(@(*@0) : <B,[]>).0",
      true);
  REQUIRE(std::holds_alternative<RhoSource>(r));
  const auto& src = std::get<RhoSource>(r);
  REQUIRE(src.typed);
  REQUIRE(src.table.size() == 1);
  auto enc = rho::encode_typed(src.typed, src.table);
  CHECK(enc.missing.empty());
  const auto* set = rho::assertion_as(enc.bindings);
  REQUIRE(set);
  CHECK(set->entries().size() >= 2);
}
