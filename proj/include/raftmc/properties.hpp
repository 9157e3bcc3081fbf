#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <tuple>
#include <vector>

#include "raftmc/explore.hpp"

namespace raftmc {

// ---------------------------------------------------------------------------
// Engine surface. Universal ("leads-to invariant") checks fail with a
// counterexample path; existential checks succeed with a witness path.

enum class TriggerKind { State, Transition };

struct TriggerPoint {
  TriggerKind kind = TriggerKind::State;
  std::uint32_t index = 0;  // state id, or index into lts.transitions
};

template <typename V>
struct Trigger {
  V value;
  TriggerPoint at;
};

struct Verdict {
  bool holds = false;
  std::optional<Path> counterexample;
  std::optional<Path> witness;
};

namespace detail {

constexpr std::uint32_t kNone = 0xffffffffu;

// A trigger point in 4 bytes: the high bit distinguishes transitions.
using PackedPoint = std::uint32_t;
constexpr PackedPoint kTransitionBit = 0x80000000u;

inline PackedPoint pack(TriggerPoint pt) {
  return pt.index | (pt.kind == TriggerKind::Transition ? kTransitionBit : 0);
}

inline TriggerPoint unpack(PackedPoint p) {
  return {p & kTransitionBit ? TriggerKind::Transition : TriggerKind::State,
          p & ~kTransitionBit};
}

// Where the reachability sweep for a trigger begins: the state itself, or
// the state just after the triggering transition.
inline StateId sweep_start(const Lts& lts, TriggerPoint pt) {
  return pt.kind == TriggerKind::State ? pt.index
                                       : lts.transitions[pt.index].dst;
}

// BFS over the explored graph. `parent_edge[s]` is the transition taken to
// first reach `s` (kNone for the roots). Roots remember which trigger point
// seeded them via `root_point`, when provided.
struct Bfs {
  std::vector<std::uint32_t> parent_edge;
  std::vector<PackedPoint> root_point;
  std::vector<StateId> order;  // visit order

  void run(const Lts& lts, const ForwardIndex& fwd,
           std::span<const PackedPoint> seeds, bool track_roots) {
    parent_edge.assign(lts.states.size(), kNone);
    if (track_roots) root_point.assign(lts.states.size(), kNone);
    order.clear();
    std::vector<char> seen(lts.states.size(), 0);
    for (PackedPoint p : seeds) {
      StateId s = sweep_start(lts, unpack(p));
      if (seen[s]) continue;
      seen[s] = 1;
      if (track_roots) root_point[s] = p;
      order.push_back(s);
    }
    for (std::size_t head = 0; head < order.size(); ++head) {
      StateId s = order[head];
      auto [begin, end] = fwd.out_edges(s);
      for (const std::uint32_t* e = begin; e != end; ++e) {
        StateId d = lts.transitions[*e].dst;
        if (seen[d]) continue;
        seen[d] = 1;
        parent_edge[d] = *e;
        order.push_back(d);
      }
    }
  }
};

// Transition indices of the parent chain root -> target, in forward order.
inline std::vector<std::uint32_t> chain(const Lts& lts, const Bfs& bfs,
                                        StateId target, StateId* root) {
  std::vector<std::uint32_t> edges;
  StateId at = target;
  while (bfs.parent_edge[at] != kNone) {
    edges.push_back(bfs.parent_edge[at]);
    at = lts.transitions[bfs.parent_edge[at]].src;
  }
  if (root) *root = at;
  std::reverse(edges.begin(), edges.end());
  return edges;
}

inline void extend_path(Path& path, const Lts& lts,
                        std::span<const std::uint32_t> edges) {
  for (std::uint32_t e : edges) {
    path.labels.push_back(lts.transitions[e].label);
    path.states.push_back(lts.transitions[e].dst);
  }
}

// initial -> (trigger point) -> target, using a BFS rooted at the initial
// state and one rooted at the sweep seeds. Marks where the trigger fired.
inline Path build_path(const Lts& lts, const Bfs& from_initial,
                       const Bfs& sweep, StateId target) {
  StateId sweep_root = 0;
  std::vector<std::uint32_t> second_leg = chain(lts, sweep, target, &sweep_root);
  TriggerPoint pt = unpack(sweep.root_point[sweep_root]);

  Path path;
  path.states.push_back(lts.initial);
  if (pt.kind == TriggerKind::State) {
    extend_path(path, lts, chain(lts, from_initial, pt.index, nullptr));
  } else {
    const Transition& t = lts.transitions[pt.index];
    extend_path(path, lts, chain(lts, from_initial, t.src, nullptr));
    extend_path(path, lts, std::span<const std::uint32_t>{&pt.index, 1});
  }
  path.trigger_index = path.states.size() - 1;
  extend_path(path, lts, second_leg);
  return path;
}

template <typename V>
std::map<V, std::vector<PackedPoint>> group_triggers(
    const std::vector<Trigger<V>>& triggers) {
  std::map<V, std::vector<PackedPoint>> groups;
  for (const Trigger<V>& t : triggers) groups[t.value].push_back(pack(t.at));
  return groups;
}

// Shared core: one reachability sweep per distinct trigger value.
// `on_state(value, state)` returns true when the sweep should stop there -
// a follow violation for universal checks, a satisfied goal for existential
// ones. Returns the first hit in deterministic order, if any.
template <typename V, typename Hit>
std::optional<Path> sweep_groups(
    const Lts& lts, const ForwardIndex& fwd,
    const std::map<V, std::vector<PackedPoint>>& groups, Hit&& on_state) {
  Bfs sweep;
  for (const auto& [value, points] : groups) {
    sweep.run(lts, fwd, points, /*track_roots=*/true);
    for (StateId s : sweep.order) {
      if (!on_state(value, s)) continue;
      Bfs from_initial;
      PackedPoint init_seed = pack({TriggerKind::State, lts.initial});
      from_initial.run(lts, fwd, std::span{&init_seed, 1},
                       /*track_roots=*/false);
      return build_path(lts, from_initial, sweep, s);
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Universal leads-to invariant: for every trigger occurrence with value v,
// every state reachable from the occurrence (the state itself included; for
// transition triggers, everything from the landing state on) must satisfy
// follow(v, state). Violations come with a shortest initial -> trigger ->
// violation path.
template <typename V, typename Follow>
Verdict check_leads_to_invariant(const Lts& lts,
                                 const std::vector<Trigger<V>>& triggers,
                                 Follow&& follow) {
  ForwardIndex fwd = build_forward_index(lts);
  auto groups = detail::group_triggers(triggers);
  Verdict verdict;
  verdict.counterexample = detail::sweep_groups(
      lts, fwd, groups,
      [&](const V& value, StateId s) { return !follow(value, s); });
  verdict.holds = !verdict.counterexample.has_value();
  return verdict;
}

// Existential pair: some trigger occurrence with value v reaches a state
// satisfying goal(v, state). Success comes with an initial -> trigger ->
// goal witness path.
template <typename V, typename Goal>
Verdict check_exists_leads_to(const Lts& lts,
                              const std::vector<Trigger<V>>& triggers,
                              Goal&& goal) {
  ForwardIndex fwd = build_forward_index(lts);
  auto groups = detail::group_triggers(triggers);
  Verdict verdict;
  verdict.witness = detail::sweep_groups(
      lts, fwd, groups,
      [&](const V& value, StateId s) { return goal(value, s); });
  verdict.holds = verdict.witness.has_value();
  return verdict;
}

// ---------------------------------------------------------------------------
// Observations, interned for the concrete checks: per state, the facts every
// non-crashed node exposes; logs deduplicated into ids.

class ObservationIndex {
 public:
  struct Fact {
    NodeId id = 0;
    bool leader = false;
    Term term = 0;
    Index commit = 0;
    std::uint32_t log = 0;
  };

  explicit ObservationIndex(const Lts& lts) {
    offsets_.reserve(lts.states.size() + 1);
    offsets_.push_back(0);
    for (const std::string& bytes : lts.states) {
      GlobalState s = decode_state(bytes);
      for (const NodeState& n : s.nodes) {
        if (n.role == Role::Crashed) continue;
        facts_.push_back({n.id, n.role == Role::Leader, n.current_term,
                          n.commit_index, intern(n.log)});
      }
      offsets_.push_back(static_cast<std::uint32_t>(facts_.size()));
    }
  }

  std::span<const Fact> facts(StateId s) const {
    return {facts_.data() + offsets_[s], facts_.data() + offsets_[s + 1]};
  }

  const Log& log(std::uint32_t id) const { return logs_[id]; }

  std::uint32_t intern(const Log& log) {
    auto [it, added] = log_ids_.try_emplace(log, logs_.size());
    if (added) logs_.push_back(log);
    return it->second;
  }

  // Length of the longest common prefix of two interned logs, memoized.
  Index common_prefix(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    auto [it, added] = lcp_.try_emplace(std::pair{a, b}, 0);
    if (added) {
      const Log& la = logs_[a];
      const Log& lb = logs_[b];
      Index k = 0;
      while (k < la.size() && k < lb.size() && la.at(k + 1) == lb.at(k + 1)) ++k;
      it->second = k;
    }
    return it->second;
  }

  // True when no position past the common prefix holds the same entry in
  // both logs - i.e. "same entry here implies same history before here"
  // holds for this pair.
  bool consistent(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    auto [it, added] = pair_ok_.try_emplace(std::pair{a, b}, true);
    if (added) {
      const Log& la = logs_[a];
      const Log& lb = logs_[b];
      for (Index p = common_prefix(a, b) + 1; p <= la.size() && p <= lb.size();
           ++p) {
        if (la.at(p) == lb.at(p)) {
          it->second = false;
          break;
        }
      }
    }
    return it->second;
  }

 private:
  std::vector<Fact> facts_;
  std::vector<std::uint32_t> offsets_;
  std::vector<Log> logs_;
  std::map<Log, std::uint32_t> log_ids_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, Index> lcp_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, bool> pair_ok_;
};

// ---------------------------------------------------------------------------
// The four safety checks.

// At most one leader may ever be seen per term: once some node shows up as
// leader of term t, no different node may show up as leader of t anywhere
// downstream (or in the same state).
inline Verdict check_election_safety(const Lts& lts, ObservationIndex& obs) {
  using V = std::tuple<NodeId, Term>;
  std::vector<Trigger<V>> triggers;
  for (StateId s = 0; s < lts.states.size(); ++s)
    for (const auto& f : obs.facts(s))
      if (f.leader) triggers.push_back({{f.id, f.term}, {TriggerKind::State, s}});
  return check_leads_to_invariant(
      lts, triggers, [&](const V& v, StateId s) {
        for (const auto& f : obs.facts(s))
          if (f.leader && f.term == std::get<1>(v) && f.id != std::get<0>(v))
            return false;
        return true;
      });
}

// Two logs that agree on the entry at some position agree on everything up
// to that position - and stay that way.
inline Verdict check_log_matching(const Lts& lts, ObservationIndex& obs) {
  using V = std::tuple<NodeId, std::uint32_t>;  // observer id, log
  std::vector<Trigger<V>> triggers;
  for (StateId s = 0; s < lts.states.size(); ++s)
    for (const auto& f : obs.facts(s))
      if (obs.log(f.log).size() > 0)
        triggers.push_back({{f.id, f.log}, {TriggerKind::State, s}});
  return check_leads_to_invariant(
      lts, triggers, [&](const V& v, StateId s) {
        for (const auto& f : obs.facts(s))
          if (f.id != std::get<0>(v) && !obs.consistent(std::get<1>(v), f.log))
            return false;
        return true;
      });
}

// Entries committed under term t appear in the log of every leader of any
// later term.
inline Verdict check_leader_completeness(const Lts& lts, ObservationIndex& obs) {
  using V = std::tuple<Term, Index, Index, std::uint32_t>;
  std::vector<Trigger<V>> triggers;
  for (std::uint32_t t = 0; t < lts.transitions.size(); ++t) {
    const ActionLabel& label = lts.labels[lts.transitions[t].label];
    if (const auto* commit = std::get_if<AdvanceCommitLabel>(&label)) {
      const CommitInfo& info = commit->info;
      triggers.push_back({{info.term, info.old_commit_index,
                           info.new_commit_index, obs.intern(info.log)},
                          {TriggerKind::Transition, t}});
    }
  }
  // For a pair of logs, is every entry in (from, to] of `committed` present
  // somewhere in `later`? Memoized per distinct question.
  std::map<V, std::map<std::uint32_t, bool>> memo;
  return check_leads_to_invariant(
      lts, triggers, [&](const V& v, StateId s) {
        auto& [term, from, to, committed] = v;
        for (const auto& f : obs.facts(s)) {
          if (!f.leader || f.term <= term) continue;
          auto [it, added] = memo[v].try_emplace(f.log, true);
          if (added) {
            const Log& c = obs.log(committed);
            const Log& l = obs.log(f.log);
            for (Index p = from + 1; p <= to; ++p)
              if (!l.contains(c.at(p))) {
                it->second = false;
                break;
              }
          }
          if (!it->second) return false;
        }
        return true;
      });
}

// Once a node has applied a prefix (its commit index reached c), no other
// node may ever apply a different prefix of length >= c.
inline Verdict check_state_machine_safety(const Lts& lts,
                                          ObservationIndex& obs) {
  using V = std::tuple<NodeId, Index, std::uint32_t>;  // id, commit, log
  std::vector<Trigger<V>> triggers;
  for (StateId s = 0; s < lts.states.size(); ++s)
    for (const auto& f : obs.facts(s))
      if (f.commit > 0)
        triggers.push_back({{f.id, f.commit, f.log}, {TriggerKind::State, s}});
  return check_leads_to_invariant(
      lts, triggers, [&](const V& v, StateId s) {
        auto& [id, commit, log] = v;
        for (const auto& f : obs.facts(s))
          if (f.id != id && f.commit >= commit &&
              obs.common_prefix(log, f.log) < commit)
            return false;
        return true;
      });
}

// ---------------------------------------------------------------------------
// Liveness witnesses: sanity that elections, hand-overs and commits actually
// happen in the explored system.

inline Verdict check_leader_liveness(const Lts& lts, ObservationIndex& obs) {
  std::vector<Trigger<int>> triggers;
  for (StateId s = 0; s < lts.states.size() && triggers.empty(); ++s)
    for (const auto& f : obs.facts(s))
      if (f.leader) {
        triggers.push_back({0, {TriggerKind::State, s}});
        break;
      }
  return check_exists_leads_to(lts, triggers,
                               [](const int&, StateId) { return true; });
}

// Some run elects two different nodes (in different terms).
inline Verdict check_distinct_leaders(const Lts& lts, ObservationIndex& obs) {
  std::vector<Trigger<NodeId>> triggers;
  for (StateId s = 0; s < lts.states.size(); ++s)
    for (const auto& f : obs.facts(s))
      if (f.leader) triggers.push_back({f.id, {TriggerKind::State, s}});
  return check_exists_leads_to(lts, triggers,
                               [&](const NodeId& first, StateId s) {
                                 for (const auto& f : obs.facts(s))
                                   if (f.leader && f.id != first) return true;
                                 return false;
                               });
}

// Some run commits on one node and then shows a second node with at least
// as deep a commit - the scenario state-machine safety quantifies over.
inline Verdict check_sms_non_vacuity(const Lts& lts, ObservationIndex& obs) {
  using V = std::tuple<NodeId, Index>;
  std::vector<Trigger<V>> triggers;
  for (StateId s = 0; s < lts.states.size(); ++s)
    for (const auto& f : obs.facts(s))
      if (f.commit > 0)
        triggers.push_back({{f.id, f.commit}, {TriggerKind::State, s}});
  return check_exists_leads_to(
      lts, triggers, [&](const V& v, StateId s) {
        for (const auto& f : obs.facts(s))
          if (f.id != std::get<0>(v) && f.commit >= std::get<1>(v)) return true;
        return false;
      });
}

// Can a run mark maxTerm leader sightings, no two consecutive marks naming
// the same node? (The first mark is unconstrained.) Searched as reachability
// over (state, last marked node, marks so far), counting capped at maxTerm.
inline Verdict check_leader_alternation(const Lts& lts, ObservationIndex& obs,
                                        const Config& cfg) {
  if (cfg.max_term <= 1) {
    // One mark, unconstrained: exactly leader liveness.
    return check_leader_liveness(lts, obs);
  }

  ForwardIndex fwd = build_forward_index(lts);
  const std::uint32_t num_states = static_cast<std::uint32_t>(lts.states.size());
  const std::uint32_t lasts = cfg.number_of_servers + 1;  // 0 = none yet
  const std::uint32_t counts = cfg.max_term + 1;
  const std::uint64_t product = std::uint64_t{num_states} * lasts * counts;

  auto key = [&](StateId s, std::uint32_t last, std::uint32_t count) {
    return (std::uint64_t{s} * lasts + last) * counts + count;
  };

  // Parent bookkeeping for the witness: the predecessor product node, plus
  // the transition taken (kNone for a mark step, which stays in place).
  std::vector<std::uint64_t> parent(product, detail::kNone);
  std::vector<std::uint32_t> via(product, detail::kNone);
  std::vector<char> seen(product, 0);

  std::vector<std::uint64_t> queue;
  std::uint64_t start = key(lts.initial, 0, 0);
  seen[start] = 1;
  queue.push_back(start);

  std::optional<std::uint64_t> goal;
  for (std::size_t head = 0; head < queue.size() && !goal; ++head) {
    std::uint64_t at = queue[head];
    std::uint32_t count = static_cast<std::uint32_t>(at % counts);
    std::uint32_t last = static_cast<std::uint32_t>((at / counts) % lasts);
    StateId s = static_cast<StateId>(at / counts / lasts);

    if (count < cfg.max_term) {  // mark a leader sighting here
      for (const auto& f : obs.facts(s)) {
        if (!f.leader) continue;
        if (last != 0 && f.id + 1 == last) continue;
        std::uint64_t next = key(s, f.id + 1, count + 1);
        if (seen[next]) continue;
        seen[next] = 1;
        parent[next] = at;
        queue.push_back(next);
        if (count + 1 == cfg.max_term) {
          goal = next;
          break;
        }
      }
    }
    auto [begin, end] = fwd.out_edges(s);
    for (const std::uint32_t* e = begin; e != end && !goal; ++e) {
      std::uint64_t next = key(lts.transitions[*e].dst, last, count);
      if (seen[next]) continue;
      seen[next] = 1;
      parent[next] = at;
      via[next] = *e;
      queue.push_back(next);
    }
  }

  Verdict verdict;
  verdict.holds = goal.has_value();
  if (goal) {
    // Project the product walk back onto the LTS, dropping mark steps.
    std::vector<std::uint32_t> edges;
    for (std::uint64_t at = *goal; parent[at] != detail::kNone;
         at = parent[at])
      if (via[at] != detail::kNone) edges.push_back(via[at]);
    std::reverse(edges.begin(), edges.end());
    Path path;
    path.states.push_back(lts.initial);
    detail::extend_path(path, lts, edges);
    path.trigger_index = path.states.size() - 1;  // the final mark happens here
    verdict.witness = std::move(path);
  }
  return verdict;
}

// Convenience wrappers that build their own observation index.
inline Verdict check_election_safety(const Lts& lts) {
  ObservationIndex obs(lts);
  return check_election_safety(lts, obs);
}
inline Verdict check_log_matching(const Lts& lts) {
  ObservationIndex obs(lts);
  return check_log_matching(lts, obs);
}
inline Verdict check_leader_completeness(const Lts& lts) {
  ObservationIndex obs(lts);
  return check_leader_completeness(lts, obs);
}
inline Verdict check_state_machine_safety(const Lts& lts) {
  ObservationIndex obs(lts);
  return check_state_machine_safety(lts, obs);
}
inline Verdict check_leader_liveness(const Lts& lts) {
  ObservationIndex obs(lts);
  return check_leader_liveness(lts, obs);
}
inline Verdict check_distinct_leaders(const Lts& lts) {
  ObservationIndex obs(lts);
  return check_distinct_leaders(lts, obs);
}
inline Verdict check_sms_non_vacuity(const Lts& lts) {
  ObservationIndex obs(lts);
  return check_sms_non_vacuity(lts, obs);
}
inline Verdict check_leader_alternation(const Lts& lts, const Config& cfg) {
  ObservationIndex obs(lts);
  return check_leader_alternation(lts, obs, cfg);
}

}  // namespace raftmc
