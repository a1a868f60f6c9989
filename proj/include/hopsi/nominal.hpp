#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace hopsi {

// Atomic name. Identity is the numeric token; the label is only for display.
class Name {
 public:
  Name() : id_(0) {}
  Name(uint64_t id, std::shared_ptr<const std::string> label)
      : id_(id), label_(std::move(label)) {}

  uint64_t id() const { return id_; }
  const std::string& label() const {
    static const std::string empty = "?";
    return label_ ? *label_ : empty;
  }

  bool operator==(const Name& o) const { return id_ == o.id_; }
  bool operator!=(const Name& o) const { return id_ != o.id_; }
  bool operator<(const Name& o) const { return id_ < o.id_; }

 private:
  uint64_t id_;
  std::shared_ptr<const std::string> label_;
};

using NameSet = std::set<Name>;

std::ostream& operator<<(std::ostream& os, const Name& n);

// Ids at or above this base are reserved for canonical binder renaming and
// internal freshening; user-facing supplies never reach them. The two
// internal uses get disjoint bands.
inline constexpr uint64_t kInternalIdBase = uint64_t(1) << 62;
inline constexpr uint64_t kFreshIdBase =
    (uint64_t(1) << 62) | (uint64_t(1) << 61);

// Deterministic per-workspace fresh-name source.
class NameSupply {
 public:
  NameSupply() = default;
  explicit NameSupply(uint64_t first) : next_(first) {}

  Name fresh(std::string_view hint);

  uint64_t peek() const { return next_; }

 private:
  uint64_t next_ = 1;
};

// Canonical binder name for slot `index`, skipping any index whose id would
// collide with `avoid`. Used by alpha-renaming; ids live in the reserved
// range so they never clash with user names.
Name canonical_name(size_t index);

// Smallest internal-range name not present in `avoid`, labeled from `hint`.
Name fresh_for(const NameSet& avoid, std::string_view hint);

struct Transposition {
  Name first;
  Name second;

  Name apply(const Name& n) const {
    if (n == first) return second;
    if (n == second) return first;
    return n;
  }
};

// Binder stacks for alpha-aware structural comparison. Two values are
// compared with the binders each side has passed under; bound names compare
// by binder index, free names by token.
class AlphaCtx {
 public:
  void push(const Name& l, const Name& r) {
    left_.push_back(l);
    right_.push_back(r);
  }
  void pop() {
    left_.pop_back();
    right_.pop_back();
  }
  size_t depth() const { return left_.size(); }

  // -1, 0, 1 ordering of a left-side name against a right-side name.
  int name_cmp(const Name& l, const Name& r) const;

  // Contexts for comparing two values from the same side (both stacks equal).
  // Needed for order-insensitive comparison of value collections.
  AlphaCtx self_left() const {
    AlphaCtx c;
    c.left_ = left_;
    c.right_ = left_;
    return c;
  }
  AlphaCtx self_right() const {
    AlphaCtx c;
    c.left_ = right_;
    c.right_ = right_;
    return c;
  }

 private:
  std::vector<Name> left_;
  std::vector<Name> right_;
};

// Contract shared by every pluggable nominal datatype (terms, conditions,
// assertions, types). Concrete values are immutable and shared.
class NominalBase {
 public:
  virtual ~NominalBase() = default;

  virtual void collect_support(NameSet& out) const = 0;

  // Total order: first by kind_rank across concrete classes, then by
  // compare_same against a value of the same dynamic type.
  virtual int kind_rank() const = 0;
  virtual int compare_same(const NominalBase& other, AlphaCtx& ctx) const = 0;

  virtual void print(std::ostream& os) const = 0;

  NameSet support() const {
    NameSet s;
    collect_support(s);
    return s;
  }

  std::string to_string() const {
    std::ostringstream os;
    print(os);
    return os.str();
  }
};

int compare_nominal(const NominalBase& a, const NominalBase& b, AlphaCtx& ctx);

inline bool fresh_for_value(const Name& a, const NominalBase& v) {
  NameSet s = v.support();
  return s.find(a) == s.end();
}

// --- substitution law checking -------------------------------------------
//
// Report from exercising an instance substitution function against the two
// laws every nominal datatype must satisfy:
//   1. names of the replacements survive substitution of a supported name
//   2. substitution is stable under transposing fresh names onto the domain

struct SubstLawFailure {
  int law = 0;            // 1 or 2
  std::string value;      // printed sample
  std::string detail;
};

struct SubstLawReport {
  size_t samples_run = 0;
  std::vector<SubstLawFailure> failures;

  bool ok() const { return failures.empty(); }
};

// Operations a caller supplies to run the law checker over one nominal kind.
// V is the wrapper type (Term, Condition, Assertion).
template <typename V, typename R>
struct SubstLawOps {
  // X[names := replacements]
  std::function<V(const V&, const std::vector<Name>&, const std::vector<R>&)>
      substitute;
  std::function<V(const V&, const Name&, const Name&)> swap;
  // Support used to pick the substituted name; excludes positions the
  // substitution is not defined on (e.g. inside types).
  std::function<NameSet(const V&)> support;
  // The value's actual support, for checking what survived. Defaults to
  // `support` when unset.
  std::function<NameSet(const V&)> full_support;
  std::function<NameSet(const R&)> replacement_support;
  std::function<bool(const V&, const V&)> equal;
  std::function<std::string(const V&)> print;
};

template <typename V, typename R>
SubstLawReport check_substitution_laws(
    const SubstLawOps<V, R>& ops, const std::vector<V>& samples,
    const std::function<R(size_t)>& replacement_at, size_t fresh_base) {
  SubstLawReport report;
  for (const V& x : samples) {
    ++report.samples_run;
    NameSet supp = ops.support(x);
    if (supp.empty()) continue;

    // One-name substitution with the sample's first supported name.
    Name a = *supp.begin();
    R y = replacement_at(report.samples_run);
    NameSet ysupp = ops.replacement_support(y);
    V substituted = ops.substitute(x, {a}, {y});
    NameSet after = ops.full_support ? ops.full_support(substituted)
                                     : ops.support(substituted);
    for (const Name& b : ysupp) {
      if (after.find(b) == after.end()) {
        report.failures.push_back(
            {1, ops.print(x),
             "name " + b.label() + " lost after substituting for " +
                 a.label()});
        break;
      }
    }

    // Law 2 with a name fresh for both the sample and the domain.
    Name u(kFreshIdBase + fresh_base + report.samples_run,
           std::make_shared<const std::string>("u"));
    if (supp.find(u) == supp.end()) {
      V lhs = ops.substitute(x, {a}, {y});
      V rhs = ops.substitute(ops.swap(x, u, a), {u}, {y});
      if (!ops.equal(lhs, rhs)) {
        report.failures.push_back(
            {2, ops.print(x),
             "substitution for " + a.label() +
                 " disagrees with transposed substitution"});
      }
    }
  }
  return report;
}

}  // namespace hopsi
