#pragma once

#include <memory>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "hopsi/nominal.hpp"

namespace hopsi {

class Subst;

class TermImpl;
class ConditionImpl;
class AssertionImpl;
class TypeImpl;

using TermPtr = std::shared_ptr<const TermImpl>;
using ConditionPtr = std::shared_ptr<const ConditionImpl>;
using AssertionPtr = std::shared_ptr<const AssertionImpl>;
using TypePtr = std::shared_ptr<const TypeImpl>;

// Instance-supplied term datatype. Terms can embed whole processes, so the
// alpha-aware comparison and canonicalization hooks recurse through them.
class TermImpl : public NominalBase {
 public:
  virtual TermPtr swap_names(const Name& a, const Name& b) const = 0;
  virtual TermPtr substitute(const Subst& s) const = 0;
  // Structural normal form (canonicalizes any embedded processes).
  virtual TermPtr canonical() const = 0;
};

class ConditionImpl : public NominalBase {
 public:
  virtual ConditionPtr swap_names(const Name& a, const Name& b) const = 0;
  virtual ConditionPtr substitute(const Subst& s) const = 0;
  virtual ConditionPtr canonical() const = 0;
};

class AssertionImpl : public NominalBase {
 public:
  virtual AssertionPtr swap_names(const Name& a, const Name& b) const = 0;
  virtual AssertionPtr substitute(const Subst& s) const = 0;
  virtual AssertionPtr canonical() const = 0;
};

// Types are nominal but never substituted into; alpha-renaming still reaches
// them (a type may embed a type environment).
class TypeImpl : public NominalBase {
 public:
  virtual TypePtr swap_names(const Name& a, const Name& b) const = 0;
};

namespace detail {
template <typename Ptr>
int compare_ptrs(const Ptr& a, const Ptr& b, AlphaCtx& ctx) {
  if (a == b) return 0;
  if (!a || !b) return a ? 1 : -1;
  return compare_nominal(*a, *b, ctx);
}
}  // namespace detail

// Thin value wrappers. Shared immutable payloads; equality is alpha-aware
// structural comparison after canonicalization of embedded processes.

class Term {
 public:
  Term() = default;
  explicit Term(TermPtr impl) : impl_(std::move(impl)) {}

  const TermImpl& operator*() const { return *impl_; }
  const TermImpl* operator->() const { return impl_.get(); }
  const TermPtr& ptr() const { return impl_; }
  explicit operator bool() const { return impl_ != nullptr; }

  NameSet support() const { return impl_->support(); }
  Term swap(const Name& a, const Name& b) const {
    return Term(impl_->swap_names(a, b));
  }
  Term substitute(const Subst& s) const { return Term(impl_->substitute(s)); }
  Term canonical() const { return Term(impl_->canonical()); }

  int compare(const Term& o) const {
    AlphaCtx ctx;
    return detail::compare_ptrs(impl_, o.impl_, ctx);
  }
  bool operator==(const Term& o) const { return compare(o) == 0; }
  bool operator!=(const Term& o) const { return compare(o) != 0; }

  std::string to_string() const { return impl_ ? impl_->to_string() : "<null>"; }

 private:
  TermPtr impl_;
};

class Condition {
 public:
  Condition() = default;
  explicit Condition(ConditionPtr impl) : impl_(std::move(impl)) {}

  const ConditionImpl& operator*() const { return *impl_; }
  const ConditionImpl* operator->() const { return impl_.get(); }
  const ConditionPtr& ptr() const { return impl_; }
  explicit operator bool() const { return impl_ != nullptr; }

  NameSet support() const { return impl_->support(); }
  Condition swap(const Name& a, const Name& b) const {
    return Condition(impl_->swap_names(a, b));
  }
  Condition substitute(const Subst& s) const {
    return Condition(impl_->substitute(s));
  }
  Condition canonical() const { return Condition(impl_->canonical()); }

  int compare(const Condition& o) const {
    AlphaCtx ctx;
    return detail::compare_ptrs(impl_, o.impl_, ctx);
  }
  bool operator==(const Condition& o) const { return compare(o) == 0; }
  bool operator!=(const Condition& o) const { return compare(o) != 0; }

  std::string to_string() const { return impl_ ? impl_->to_string() : "<null>"; }

 private:
  ConditionPtr impl_;
};

class Assertion {
 public:
  Assertion() = default;
  explicit Assertion(AssertionPtr impl) : impl_(std::move(impl)) {}

  const AssertionImpl& operator*() const { return *impl_; }
  const AssertionImpl* operator->() const { return impl_.get(); }
  const AssertionPtr& ptr() const { return impl_; }
  explicit operator bool() const { return impl_ != nullptr; }

  NameSet support() const { return impl_->support(); }
  Assertion swap(const Name& a, const Name& b) const {
    return Assertion(impl_->swap_names(a, b));
  }
  Assertion substitute(const Subst& s) const {
    return Assertion(impl_->substitute(s));
  }
  Assertion canonical() const { return Assertion(impl_->canonical()); }

  int compare(const Assertion& o) const {
    AlphaCtx ctx;
    return detail::compare_ptrs(impl_, o.impl_, ctx);
  }
  bool operator==(const Assertion& o) const { return compare(o) == 0; }
  bool operator!=(const Assertion& o) const { return compare(o) != 0; }

  std::string to_string() const { return impl_ ? impl_->to_string() : "<null>"; }

 private:
  AssertionPtr impl_;
};

class Type {
 public:
  Type() = default;
  explicit Type(TypePtr impl) : impl_(std::move(impl)) {}

  const TypeImpl& operator*() const { return *impl_; }
  const TypeImpl* operator->() const { return impl_.get(); }
  const TypePtr& ptr() const { return impl_; }
  explicit operator bool() const { return impl_ != nullptr; }

  NameSet support() const { return impl_->support(); }
  Type swap(const Name& a, const Name& b) const {
    return Type(impl_->swap_names(a, b));
  }

  int compare(const Type& o) const {
    AlphaCtx ctx;
    return detail::compare_ptrs(impl_, o.impl_, ctx);
  }
  bool operator==(const Type& o) const { return compare(o) == 0; }
  bool operator!=(const Type& o) const { return compare(o) != 0; }

  std::string to_string() const { return impl_ ? impl_->to_string() : "<null>"; }

 private:
  TypePtr impl_;
};

// Simultaneous substitution of terms for names.
class Subst {
 public:
  Subst() = default;
  Subst(std::vector<Name> names, std::vector<Term> terms);

  static Subst single(const Name& x, Term t) {
    return Subst({x}, {std::move(t)});
  }

  const Term* lookup(const Name& x) const;
  bool empty() const { return names_.empty(); }
  size_t size() const { return names_.size(); }

  const std::vector<Name>& names() const { return names_; }
  const std::vector<Term>& terms() const { return terms_; }

  NameSet domain() const;
  // Union of the supports of all replacement terms.
  NameSet range_support() const;

  // Drop bindings for the given binders (used when passing under them).
  Subst without(const std::vector<Name>& binders) const;

 private:
  std::vector<Name> names_;
  std::vector<Term> terms_;
};

inline std::ostream& operator<<(std::ostream& os, const Term& t) {
  t->print(os);
  return os;
}
inline std::ostream& operator<<(std::ostream& os, const Condition& c) {
  c->print(os);
  return os;
}
inline std::ostream& operator<<(std::ostream& os, const Assertion& a) {
  a->print(os);
  return os;
}
inline std::ostream& operator<<(std::ostream& os, const Type& t) {
  t->print(os);
  return os;
}

}  // namespace hopsi
