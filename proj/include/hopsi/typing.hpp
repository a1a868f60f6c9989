#pragma once

#include <map>
#include <optional>
#include <string>

#include "hopsi/instance.hpp"
#include "hopsi/syntax.hpp"

namespace hopsi {

// Finite map from names to types. Lookup of unbound names is an error at the
// use site; extension over a bound name is rejected (alpha-rename first).
class TypeEnv {
 public:
  TypeEnv() = default;

  static TypeEnv of(std::initializer_list<std::pair<Name, Type>> entries);

  const Type* lookup(const Name& n) const;
  bool bound(const Name& n) const { return lookup(n) != nullptr; }

  // Returns the extended environment; fails (nullopt) if already bound.
  std::optional<TypeEnv> extend(const Name& n, const Type& t) const;
  TypeEnv extend_over(const Name& n, const Type& t) const;  // overwrite
  TypeEnv remove(const Name& n) const;

  NameSet dom() const;
  // dom plus every name inside the stored types.
  NameSet support() const;

  TypeEnv swap(const Name& a, const Name& b) const;

  size_t size() const { return map_.size(); }
  bool empty() const { return map_.empty(); }

  auto begin() const { return map_.begin(); }
  auto end() const { return map_.end(); }

  bool operator==(const TypeEnv& o) const;

  std::string to_string() const;

 private:
  std::map<Name, Type> map_;
};

// Syntax-directed check of the generic process typing rules. The judgment
// must be well-formed: every name in the ambient assertion and the process
// bound in the environment.
CheckOutcome check_process(const TypeEnv& env, const Assertion& ambient,
                           const Process& p, const Instance& inst);

// Subsumption: t1 usable where t2 is expected.
bool check_subsumption(const TypingHooks& hooks, const Type& t1,
                       const Type& t2);

std::string describe(const TypeError& e);

}  // namespace hopsi
