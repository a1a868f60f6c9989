#include "hopsi/value.hpp"

#include <cassert>

namespace hopsi {

Subst::Subst(std::vector<Name> names, std::vector<Term> terms)
    : names_(std::move(names)), terms_(std::move(terms)) {
  assert(names_.size() == terms_.size());
}

const Term* Subst::lookup(const Name& x) const {
  for (size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == x) return &terms_[i];
  }
  return nullptr;
}

NameSet Subst::domain() const {
  NameSet s;
  for (const Name& n : names_) s.insert(n);
  return s;
}

NameSet Subst::range_support() const {
  NameSet s;
  for (const Term& t : terms_) {
    NameSet ts = t.support();
    s.insert(ts.begin(), ts.end());
  }
  return s;
}

Subst Subst::without(const std::vector<Name>& binders) const {
  std::vector<Name> ns;
  std::vector<Term> ts;
  for (size_t i = 0; i < names_.size(); ++i) {
    bool shadowed = false;
    for (const Name& b : binders) {
      if (b == names_[i]) {
        shadowed = true;
        break;
      }
    }
    if (!shadowed) {
      ns.push_back(names_[i]);
      ts.push_back(terms_[i]);
    }
  }
  return Subst(std::move(ns), std::move(ts));
}

}  // namespace hopsi
