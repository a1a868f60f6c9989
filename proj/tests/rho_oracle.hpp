#pragma once

// Brute-force differential oracle for name equivalence: explicit relation
// matrices closed under the two name-equivalence rules and structural
// congruence, over every process of size <= 4. Shared by the unit and
// acceptance suites.

#include <doctest.h>

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hopsi/instance_rho.hpp"

namespace hopsi::rho_oracle {

using namespace hopsi::rho;

// Exhaustive differential oracle: the closure of the two name-equivalence
// rules over every quoted process of size <= 4, computed by fixpoint over
// explicit relation matrices, compared against the normalization-based
// decision procedure and against entailed channel equivalence of the
// encodings.
struct Universe {
  std::vector<RhoPtr> procs;  // all processes of size <= 4
  std::map<std::string, size_t> index;

  size_t find(const RhoPtr& p) const {
    auto it = index.find(rho_to_string(p));
    REQUIRE(it != index.end());
    return it->second;
  }

  bool has(const RhoPtr& p) const {
    return index.count(rho_to_string(p)) > 0;
  }
};

Universe enumerate_universe() {
  Universe u;
  std::vector<std::vector<RhoPtr>> by_size(5);
  by_size[1].push_back(r_nil());
  for (size_t s = 2; s <= 4; ++s) {
    // drops
    for (const RhoPtr& inner : by_size[s - 1])
      by_size[s].push_back(r_drop(quote(inner)));
    // lifts
    for (size_t sx = 1; sx + 1 < s; ++sx) {
      size_t sp = s - 1 - sx;
      for (const RhoPtr& x : by_size[sx])
        for (const RhoPtr& p : by_size[sp])
          by_size[s].push_back(r_lift(quote(x), p));
    }
    // pars
    for (size_t sl = 1; sl + 1 < s; ++sl) {
      size_t sr = s - 1 - sl;
      for (const RhoPtr& l : by_size[sl])
        for (const RhoPtr& r : by_size[sr])
          by_size[s].push_back(r_par(l, r));
    }
    // inputs
    for (size_t sx = 1; sx + 2 < s; ++sx) {
      for (size_t sy = 1; sx + sy + 1 < s; ++sy) {
        size_t sb = s - 1 - sx - sy;
        for (const RhoPtr& x : by_size[sx])
          for (const RhoPtr& y : by_size[sy])
            for (const RhoPtr& b : by_size[sb])
              by_size[s].push_back(r_input(quote(x), quote(y), b));
      }
    }
  }
  for (size_t s = 1; s <= 4; ++s) {
    for (const RhoPtr& p : by_size[s]) {
      std::string key = rho_to_string(p);
      if (!u.index.count(key)) {
        u.index[key] = u.procs.size();
        u.procs.push_back(p);
      }
    }
  }
  return u;
}

struct Closure {
  std::vector<std::vector<bool>> proc_eq;  // structural congruence
  std::vector<std::vector<bool>> nm_eq;    // name equivalence of quotes
};

// Multiset matching of parallel components under the current relation.
bool match_components(const std::vector<size_t>& l,
                      const std::vector<size_t>& r,
                      const std::vector<std::vector<bool>>& rel) {
  if (l.size() != r.size()) return false;
  std::vector<bool> used(r.size(), false);
  std::function<bool(size_t)> assign = [&](size_t i) -> bool {
    if (i == l.size()) return true;
    for (size_t j = 0; j < r.size(); ++j) {
      if (used[j] || !rel[l[i]][r[j]]) continue;
      used[j] = true;
      if (assign(i + 1)) return true;
      used[j] = false;
    }
    return false;
  };
  return assign(0);
}

void flatten_indices(const Universe& u, const RhoPtr& p,
                     std::vector<size_t>& out) {
  if (std::holds_alternative<RNil>(p->v)) return;
  if (const auto* pr = std::get_if<RPar>(&p->v)) {
    flatten_indices(u, pr->left, out);
    flatten_indices(u, pr->right, out);
    return;
  }
  out.push_back(u.find(p));
}

Closure brute_force_closure(const Universe& u) {
  size_t n = u.procs.size();
  Closure c;
  c.proc_eq.assign(n, std::vector<bool>(n, false));
  c.nm_eq.assign(n, std::vector<bool>(n, false));
  for (size_t i = 0; i < n; ++i) {
    c.proc_eq[i][i] = true;
    c.nm_eq[i][i] = true;
  }

  bool changed = true;
  while (changed) {
    changed = false;

    // Name rule one: quotes of congruent processes are equivalent.
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        if (c.proc_eq[i][j] && !c.nm_eq[i][j]) {
          c.nm_eq[i][j] = true;
          changed = true;
        }

    // Name rule two: a quoted drop is equivalent to the dropped name.
    for (size_t i = 0; i < n; ++i) {
      const auto* d = std::get_if<RDrop>(&u.procs[i]->v);
      if (!d) continue;
      if (!u.has(d->name.quoted)) continue;
      size_t j = u.find(d->name.quoted);
      if (!c.nm_eq[i][j]) {
        c.nm_eq[i][j] = true;
        changed = true;
      }
    }

    // Symmetric-transitive closure of name equivalence.
    for (size_t k = 0; k < n; ++k)
      for (size_t i = 0; i < n; ++i) {
        if (!c.nm_eq[i][k]) continue;
        if (!c.nm_eq[k][i]) {
          c.nm_eq[k][i] = true;
          changed = true;
        }
        for (size_t j = 0; j < n; ++j)
          if (c.nm_eq[k][j] && !c.nm_eq[i][j]) {
            c.nm_eq[i][j] = true;
            changed = true;
          }
      }

    // Structural congruence: monoid laws via component multisets, and
    // congruence through each constructor with names compared by nm_eq.
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        if (c.proc_eq[i][j]) continue;
        const RhoPtr& p = u.procs[i];
        const RhoPtr& q = u.procs[j];
        bool equal = false;
        bool p_comp = std::holds_alternative<RNil>(p->v) ||
                      std::holds_alternative<RPar>(p->v);
        bool q_comp = std::holds_alternative<RNil>(q->v) ||
                      std::holds_alternative<RPar>(q->v);
        if (p_comp || q_comp) {
          std::vector<size_t> li, ri;
          flatten_indices(u, p, li);
          flatten_indices(u, q, ri);
          equal = match_components(li, ri, c.proc_eq);
        } else if (const auto* lp = std::get_if<RLift>(&p->v)) {
          const auto* lq = std::get_if<RLift>(&q->v);
          equal = lq && c.nm_eq[u.find(lp->subject.quoted)]
                                [u.find(lq->subject.quoted)] &&
                  c.proc_eq[u.find(lp->payload)][u.find(lq->payload)];
        } else if (const auto* dp = std::get_if<RDrop>(&p->v)) {
          const auto* dq = std::get_if<RDrop>(&q->v);
          equal = dq && c.nm_eq[u.find(dp->name.quoted)]
                                [u.find(dq->name.quoted)];
        } else if (const auto* ip = std::get_if<RInput>(&p->v)) {
          const auto* iq = std::get_if<RInput>(&q->v);
          // Every universe binder is the quoted nil, so alpha is trivial.
          equal = iq && c.nm_eq[u.find(ip->subject.quoted)]
                                [u.find(iq->subject.quoted)] &&
                  c.nm_eq[u.find(ip->binder.quoted)]
                          [u.find(iq->binder.quoted)] &&
                  c.proc_eq[u.find(ip->body)][u.find(iq->body)];
        }
        if (equal) {
          c.proc_eq[i][j] = true;
          changed = true;
        }
      }
    }

    // Symmetric-transitive closure of process congruence.
    for (size_t k = 0; k < n; ++k)
      for (size_t i = 0; i < n; ++i) {
        if (!c.proc_eq[i][k]) continue;
        if (!c.proc_eq[k][i]) {
          c.proc_eq[k][i] = true;
          changed = true;
        }
        for (size_t j = 0; j < n; ++j)
          if (c.proc_eq[k][j] && !c.proc_eq[i][j]) {
            c.proc_eq[i][j] = true;
            changed = true;
          }
      }
  }
  return c;
}


}  // namespace hopsi::rho_oracle
