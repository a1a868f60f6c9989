#include "hopsi/semantics.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace hopsi {

namespace {

Assertion component_frame(const Process& comp, const InstanceSignature& sig) {
  return frame_assertion(comp, sig.unit, sig.compose);
}

// Ambient for component i: the global assertion composed with the frames of
// every sibling.
Assertion ambient_at(const Assertion& ambient,
                     const std::vector<Process>& comps, size_t i,
                     const InstanceSignature& sig) {
  Assertion acc = ambient;
  for (size_t j = 0; j < comps.size(); ++j) {
    if (j == i) continue;
    acc = sig.compose(acc, component_frame(comps[j], sig));
  }
  return acc;
}

Assertion ambient_at_pair(const Assertion& ambient,
                          const std::vector<Process>& comps, size_t i,
                          size_t j, const InstanceSignature& sig) {
  Assertion acc = ambient;
  for (size_t k = 0; k < comps.size(); ++k) {
    if (k == i || k == j) continue;
    acc = sig.compose(acc, component_frame(comps[k], sig));
  }
  return acc;
}

Process rebuild_with(const PrenexForm& pf, std::vector<Process> comps) {
  PrenexForm next;
  next.binders = pf.binders;
  next.components = std::move(comps);
  return prenex_rebuild(next);
}

using StateSet = std::map<Process, size_t, ProcessLess>;

std::vector<std::pair<Process, std::string>> eval_once(
    const Assertion& ambient, const Process& state,
    const InstanceSignature& sig) {
  std::vector<std::pair<Process, std::string>> out;
  PrenexForm pf = prenex_decompose(state, ambient.support());
  for (size_t i = 0; i < pf.components.size(); ++i) {
    const Process& comp = pf.components[i];
    Assertion psi = ambient_at(ambient, pf.components, i, sig);
    if (const auto* c = as<CaseP>(comp)) {
      for (const auto& [cond, branch] : c->branches) {
        if (!sig.entails(psi, cond)) continue;
        std::vector<Process> comps = pf.components;
        comps[i] = branch;
        out.emplace_back(canonicalize(rebuild_with(pf, std::move(comps))),
                         "E-CASE");
      }
      continue;
    }
    if (const auto* r = as<RunP>(comp)) {
      for (const Process& target : sig.handles(psi, r->handle)) {
        std::vector<Process> comps = pf.components;
        comps[i] = target;
        out.emplace_back(canonicalize(rebuild_with(pf, std::move(comps))),
                         "E-RUN");
      }
      continue;
    }
    if (const auto* rp = as<ReplP>(comp)) {
      std::vector<Process> comps = pf.components;
      comps[i] = Process::par(rp->body, comp);
      out.emplace_back(canonicalize(rebuild_with(pf, std::move(comps))),
                       "E-REP");
    }
  }
  return out;
}

std::vector<Process> com_successors(const Assertion& ambient,
                                    const Process& state,
                                    const InstanceSignature& sig) {
  std::vector<Process> out;
  PrenexForm pf = prenex_decompose(state, ambient.support());
  const auto& comps = pf.components;
  for (size_t i = 0; i < comps.size(); ++i) {
    const auto* o = as<OutputP>(comps[i]);
    if (!o) continue;
    for (size_t j = 0; j < comps.size(); ++j) {
      if (i == j) continue;
      const auto* in = as<InputP>(comps[j]);
      if (!in) continue;
      Assertion psi = ambient_at_pair(ambient, comps, i, j, sig);
      if (!sig.entails(psi, sig.chan_eq(o->subject, in->subject))) continue;
      std::vector<Name> binder_names;
      binder_names.reserve(in->binders.size());
      for (const auto& [x, t] : in->binders) binder_names.push_back(x);
      auto matched = sig.match(in->pattern, binder_names, o->object);
      if (!matched) continue;
      assert(matched->size() == binder_names.size());
      Process receiver = in->cont.substitute(Subst(binder_names, *matched));
      std::vector<Process> next = comps;
      next[i] = o->cont;
      next[j] = receiver;
      out.push_back(canonicalize(rebuild_with(pf, std::move(next))));
    }
  }
  return out;
}

size_t count_repl_components(const Process& p, const Assertion& ambient) {
  PrenexForm pf = prenex_decompose(p, ambient.support());
  size_t n = 0;
  for (const Process& c : pf.components)
    if (as<ReplP>(c)) ++n;
  return n;
}

// Bounded breadth-first evaluation closure. Replication is unfolded lazily:
// each search level spends at most one unfolding per replicated component
// present at the start, so the closure stays finite without cutting off the
// case and run chains a communication may need.
std::vector<Process> eval_closure(const Assertion& ambient, const Process& p,
                                  const InstanceSignature& sig,
                                  const EvalSettings& settings) {
  Process start = canonicalize(p);
  size_t repl_budget =
      std::min<size_t>(count_repl_components(start, ambient), 8);
  StateSet seen;
  seen.emplace(start, 0);
  struct Item {
    Process state;
    size_t depth;
    size_t repls;
  };
  std::deque<Item> queue;
  queue.push_back({start, 0, repl_budget});
  std::vector<Process> order{start};
  while (!queue.empty() && seen.size() < settings.closure_budget) {
    Item item = queue.front();
    queue.pop_front();
    if (item.depth >= settings.closure_depth) continue;
    for (auto& [next, rule] : eval_once(ambient, item.state, sig)) {
      size_t repls = item.repls;
      if (rule == "E-REP") {
        if (repls == 0) continue;
        --repls;
      }
      if (seen.count(next)) continue;
      seen.emplace(next, item.depth + 1);
      order.push_back(next);
      queue.push_back({next, item.depth + 1, repls});
      if (seen.size() >= settings.closure_budget) break;
    }
  }
  return order;
}

}  // namespace

std::vector<std::pair<Process, std::string>> eval_steps(
    const Assertion& ambient, const Process& p, const InstanceSignature& sig) {
  auto out = eval_once(ambient, canonicalize(p), sig);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    AlphaCtx ctx;
    int c = compare_processes(a.first, b.first, ctx);
    if (c != 0) return c < 0;
    return a.second < b.second;
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const auto& a, const auto& b) {
                          AlphaCtx ctx;
                          return compare_processes(a.first, b.first, ctx) == 0 &&
                                 a.second == b.second;
                        }),
            out.end());
  return out;
}

std::vector<Process> reduce_steps(const Assertion& ambient, const Process& p,
                                  const InstanceSignature& sig,
                                  const EvalSettings& settings) {
  std::set<Process, ProcessLess> results;
  for (const Process& state : eval_closure(ambient, p, sig, settings)) {
    for (Process& s : com_successors(ambient, state, sig))
      results.insert(std::move(s));
  }
  return std::vector<Process>(results.begin(), results.end());
}

std::vector<Redex> wrong_states(const Assertion& ambient, const Process& p,
                                const InstanceSignature& sig,
                                const EvalSettings& settings) {
  std::vector<Redex> out;
  if (!sig.wrong) return out;
  std::set<std::string> seen;
  for (const Process& state : eval_closure(ambient, p, sig, settings)) {
    PrenexForm pf = prenex_decompose(state, ambient.support());
    for (size_t i = 0; i < pf.components.size(); ++i) {
      Assertion psi = ambient_at(ambient, pf.components, i, sig);
      if (!sig.wrong(psi, pf.components[i])) continue;
      std::string key = pf.components[i].to_string();
      if (!seen.insert(key).second) continue;
      out.push_back(Redex{Redex::Kind::Wrong,
                          {static_cast<int>(i)},
                          pf.components[i].to_string()});
    }
  }
  return out;
}

namespace {

// Frame discipline checks attached to explored edges: reduction may only
// grow the frame, evaluation must leave it unchanged.
void verify_frame_laws(const Assertion& ambient, const Process& state,
                       const InstanceSignature& sig,
                       const std::vector<Process>& reducts,
                       std::vector<std::string>& violations) {
  Assertion before = component_frame(canonicalize(state), sig);
  for (const Process& next : reducts) {
    Assertion after = component_frame(next, sig);
    if (!sig.assertion_leq(before, after)) {
      violations.push_back("frame shrank across reduction: " +
                           before.to_string() + " to " + after.to_string());
    }
  }
  for (const auto& [next, rule] : eval_once(ambient, canonicalize(state), sig)) {
    Assertion after = component_frame(next, sig);
    if (!(before == after)) {
      violations.push_back("frame changed across evaluation (" + rule +
                           "): " + before.to_string() + " to " +
                           after.to_string());
    }
  }
}

}  // namespace

ExploreResult explore(const Assertion& ambient, const Process& p,
                      const InstanceSignature& sig, const ExploreConfig& cfg) {
  ExploreResult result;
  Process start = canonicalize(p);

  if (cfg.strategy == Strategy::All) {
    StateSet index;
    std::deque<size_t> queue;
    result.nodes.push_back(ExploreNode{start, 0, {}, false});
    index.emplace(start, 0);
    queue.push_back(0);
    while (!queue.empty()) {
      if (cfg.max_states && result.nodes.size() > cfg.max_states) {
        result.budget_exceeded = true;
        break;
      }
      size_t id = queue.front();
      queue.pop_front();
      ExploreNode node = result.nodes[id];
      ++result.states_visited;
      if (cfg.detect_wrong &&
          !wrong_states(ambient, node.state, sig, cfg.eval).empty())
        result.wrong_reachable = true;
      auto reducts = reduce_steps(ambient, node.state, sig, cfg.eval);
      if (cfg.verify_frames)
        verify_frame_laws(ambient, node.state, sig, reducts,
                          result.frame_violations);
      if (node.depth >= cfg.max_depth) {
        if (!reducts.empty()) {
          result.nodes[id].truncated = true;
          result.depth_exceeded = true;
        }
        continue;
      }
      for (const Process& next : reducts) {
        auto it = index.find(next);
        size_t child;
        if (it == index.end()) {
          child = result.nodes.size();
          result.nodes.push_back(ExploreNode{next, node.depth + 1, {}, false});
          index.emplace(next, child);
          queue.push_back(child);
        } else {
          child = it->second;
        }
        result.nodes[id].children.push_back(child);
      }
    }
    return result;
  }

  // Single-trace strategies.
  Rng rng(cfg.seed);
  Process state = start;
  result.nodes.push_back(ExploreNode{state, 0, {}, false});
  for (size_t step = 0; step < cfg.max_depth; ++step) {
    ++result.states_visited;
    if (cfg.detect_wrong &&
        !wrong_states(ambient, state, sig, cfg.eval).empty())
      result.wrong_reachable = true;
    auto reducts = reduce_steps(ambient, state, sig, cfg.eval);
    if (cfg.verify_frames)
      verify_frame_laws(ambient, state, sig, reducts, result.frame_violations);
    if (reducts.empty()) break;
    size_t pick = cfg.strategy == Strategy::First
                      ? 0
                      : static_cast<size_t>(draw(rng, reducts.size()));
    TraceStep ts;
    ts.index = step;
    ts.rule = "R-COM";
    ts.ambient = sig.compose(ambient, component_frame(state, sig));
    ts.before = state;
    ts.after = reducts[pick];
    result.trace.push_back(ts);
    state = reducts[pick];
    size_t id = result.nodes.size();
    result.nodes.push_back(ExploreNode{state, step + 1, {}, false});
    result.nodes[id - 1].children.push_back(id);
    if (step + 1 == cfg.max_depth &&
        !reduce_steps(ambient, state, sig, cfg.eval).empty()) {
      result.nodes[id].truncated = true;
      result.depth_exceeded = true;
    }
  }
  if (cfg.detect_wrong && !result.trace.empty()) {
    if (!wrong_states(ambient, state, sig, cfg.eval).empty())
      result.wrong_reachable = true;
  }
  return result;
}

}  // namespace hopsi
