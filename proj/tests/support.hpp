#pragma once

// Shared helpers for the test suites.

#include <string>
#include <vector>

#include "hopsi/instance_hopi.hpp"
#include "hopsi/semantics.hpp"
#include "hopsi/syntax.hpp"
#include "hopsi/typing.hpp"

namespace hopsi::test {

struct Names {
  NameSupply supply;
  Name a = supply.fresh("a");
  Name b = supply.fresh("b");
  Name c = supply.fresh("c");
  Name d = supply.fresh("d");
  Name x = supply.fresh("x");
  Name y = supply.fresh("y");
  Name z = supply.fresh("z");
};

inline Type d0() { return hopi::Ty::drop(TypeEnv()); }

inline Process out(const Name& subj, const Name& obj, Process cont) {
  return Process::output(hopi::name_term(subj), hopi::name_term(obj),
                         std::move(cont));
}

inline Process in(const Name& subj, const Name& binder, const Type& t,
                  Process cont) {
  return Process::input(hopi::name_term(subj), {{binder, t}},
                        hopi::name_term(binder), std::move(cont));
}

inline bool contains_state(const std::vector<Process>& states,
                           const Process& wanted) {
  for (const Process& s : states)
    if (struct_eq(s, wanted)) return true;
  return false;
}

}  // namespace hopsi::test
