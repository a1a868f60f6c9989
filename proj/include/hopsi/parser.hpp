#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "hopsi/instance_hopi.hpp"
#include "hopsi/instance_hopi2.hpp"
#include "hopsi/instance_rho.hpp"
#include "hopsi/typing.hpp"

namespace hopsi {

struct ParseError {
  size_t line = 1;
  size_t column = 1;
  std::string message;
};

// A source file: optional name:type declarations, an optional initial
// assertion, then one process body.

struct GenericSource {
  TypeEnv env;
  Assertion ambient;  // unit if no assert declaration
  Process process;
};

struct Hopi2Source {
  hopi2::LevelEnv env;
  hopi2::Hopi2Ptr process;
  size_t level = 0;  // ambient level for checking; defaults high
  bool has_level = false;
};

struct RhoSource {
  rho::RhoPtr process;        // untyped reading
  rho::TypedRhoPtr typed;     // typed reading when annotations are present
  rho::NameTypeTable table;   // declared subject types
  bool is_typed = false;
};

std::variant<GenericSource, ParseError> parse_hopi(std::string_view text);
std::variant<Hopi2Source, ParseError> parse_hopi2(std::string_view text);
std::variant<RhoSource, ParseError> parse_rho(std::string_view text,
                                              bool typed);

}  // namespace hopsi
