#include "hopsi/nominal.hpp"

#include <ostream>

namespace hopsi {

std::ostream& operator<<(std::ostream& os, const Name& n) {
  return os << n.label();
}

Name NameSupply::fresh(std::string_view hint) {
  uint64_t id = next_++;
  std::string label(hint);
  label += std::to_string(id);
  return Name(id, std::make_shared<const std::string>(std::move(label)));
}

Name canonical_name(size_t index) {
  return Name(kInternalIdBase + index,
              std::make_shared<const std::string>("c" + std::to_string(index)));
}

Name fresh_for(const NameSet& avoid, std::string_view hint) {
  uint64_t id = kFreshIdBase;
  for (const Name& n : avoid) {
    if (n.id() >= id) id = n.id() + 1;
  }
  std::string label(hint);
  label += "'";
  return Name(id, std::make_shared<const std::string>(std::move(label)));
}

int AlphaCtx::name_cmp(const Name& l, const Name& r) const {
  // Innermost binder wins, mirroring de Bruijn indexing.
  auto index_of = [](const std::vector<Name>& stack, const Name& n) -> long {
    for (size_t i = stack.size(); i-- > 0;) {
      if (stack[i] == n) return static_cast<long>(stack.size() - 1 - i);
    }
    return -1;
  };
  long li = index_of(left_, l);
  long ri = index_of(right_, r);
  if (li >= 0 || ri >= 0) {
    if (li < 0) return 1;   // free > bound
    if (ri < 0) return -1;
    if (li != ri) return li < ri ? -1 : 1;
    return 0;
  }
  if (l.id() != r.id()) return l.id() < r.id() ? -1 : 1;
  return 0;
}

int compare_nominal(const NominalBase& a, const NominalBase& b, AlphaCtx& ctx) {
  if (a.kind_rank() != b.kind_rank())
    return a.kind_rank() < b.kind_rank() ? -1 : 1;
  return a.compare_same(b, ctx);
}

}  // namespace hopsi
