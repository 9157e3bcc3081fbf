#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "raftmc/encoding.hpp"
#include "raftmc/render.hpp"
#include "raftmc/successors.hpp"

namespace raftmc {

using StateId = std::uint32_t;
using LabelId = std::uint32_t;

struct Transition {
  StateId src = 0;
  LabelId label = 0;
  StateId dst = 0;

  friend auto operator<=>(const Transition&, const Transition&) = default;
};

// The explored transition system. States are stored in discovery order as
// their canonical encodings (index = state id, initial = 0); labels are
// interned. Transitions are emitted while expanding, so they are grouped by
// source in ascending order.
struct Lts {
  StateId initial = 0;
  std::vector<std::string> states;
  std::vector<ActionLabel> labels;
  std::vector<Transition> transitions;

  GlobalState state_at(StateId id) const { return decode_state(states[id]); }
};

struct ExploreLimits {
  std::size_t max_states = std::numeric_limits<std::size_t>::max();
};

// When the state budget runs out the exploration stops cleanly after
// finishing the state it was expanding (every recorded transition has both
// endpoints), flags the result, and reports how much frontier was left.
struct ExploreResult {
  Lts lts;
  bool state_limit_hit = false;
  std::size_t frontier_remaining = 0;
  std::size_t states_found = 0;
};

// Exhaustive breadth-first enumeration of everything reachable from the
// initial state. Deterministic: the canonical successor order fixes the
// numbering of states, labels and transitions.
inline ExploreResult explore(const Config& cfg, const ExploreLimits& limits = {},
                             const ProtocolFaults& faults = {}) {
  validate(cfg);

  std::deque<std::string> store;  // stable addresses for the map's keys
  std::unordered_map<std::string_view, StateId> ids;
  std::map<ActionLabel, LabelId> label_ids;

  ExploreResult result;
  Lts& lts = result.lts;

  auto intern_state = [&](std::string bytes) {
    auto it = ids.find(bytes);
    if (it != ids.end()) return it->second;
    StateId id = static_cast<StateId>(store.size());
    store.push_back(std::move(bytes));
    ids.emplace(std::string_view(store.back()), id);
    return id;
  };

  auto intern_label = [&](const ActionLabel& label) {
    auto it = label_ids.find(label);
    if (it != label_ids.end()) return it->second;
    LabelId id = static_cast<LabelId>(lts.labels.size());
    lts.labels.push_back(label);
    label_ids.emplace(label, id);
    return id;
  };

  intern_state(encode_state(initial_state(cfg)));

  StateId expanded = 0;
  for (StateId cur = 0; cur < store.size(); ++cur) {
    GlobalState state = decode_state(store[cur]);
    for (Successor& next : successors(state, cfg, faults)) {
#ifndef NDEBUG
      if (!faults.any()) validate(next.state, cfg);
#endif
      StateId dst = intern_state(encode_state(next.state));
      lts.transitions.push_back({cur, intern_label(next.label), dst});
    }
    expanded = cur + 1;
    if (store.size() > limits.max_states) {
      result.state_limit_hit = true;
      break;
    }
  }

  result.frontier_remaining = store.size() - expanded;
  result.states_found = store.size();
  lts.states.assign(std::make_move_iterator(store.begin()),
                    std::make_move_iterator(store.end()));
  return result;
}

// Aldebaran-format dump: header, then one transition per line in stored
// order. Byte-for-byte reproducible for a given configuration.
inline void export_aut(const Lts& lts, std::ostream& out) {
  out << "des (" << lts.initial << ", " << lts.transitions.size() << ", "
      << lts.states.size() << ")\n";
  for (const Transition& t : lts.transitions)
    out << '(' << t.src << ",\"" << render(lts.labels[t.label]) << "\"," << t.dst
        << ")\n";
}

// Compressed-sparse-row view of the transitions, as indices into
// lts.transitions, for the graph passes in the property checks.
struct ForwardIndex {
  std::vector<std::uint32_t> offsets;  // size = states + 1
  std::vector<std::uint32_t> edges;    // transition indices, grouped by src

  std::pair<const std::uint32_t*, const std::uint32_t*> out_edges(
      StateId s) const {
    return {edges.data() + offsets[s], edges.data() + offsets[s + 1]};
  }
};

inline ForwardIndex build_forward_index(const Lts& lts) {
  ForwardIndex fwd;
  fwd.offsets.assign(lts.states.size() + 1, 0);
  for (const Transition& t : lts.transitions) fwd.offsets[t.src + 1]++;
  for (std::size_t i = 1; i < fwd.offsets.size(); ++i)
    fwd.offsets[i] += fwd.offsets[i - 1];
  fwd.edges.resize(lts.transitions.size());
  std::vector<std::uint32_t> cursor(fwd.offsets.begin(), fwd.offsets.end() - 1);
  for (std::uint32_t i = 0; i < lts.transitions.size(); ++i)
    fwd.edges[cursor[lts.transitions[i].src]++] = i;
  return fwd;
}

// A concrete run through the LTS: states[0] is the initial state and
// labels[i] takes states[i] to states[i+1]. For property results,
// trigger_index (when set) points at the state where the triggering
// observation was made - for transition-triggered properties that is the
// state just after the triggering transition.
struct Path {
  std::vector<StateId> states;
  std::vector<LabelId> labels;
  std::optional<std::size_t> trigger_index;
};

// Re-drive a path through the successor function, step by step, starting
// from the configuration's initial state. True only if every step is a real
// transition (label and landing state both match).
inline bool validate_path(const Lts& lts, const Path& path, const Config& cfg,
                          const ProtocolFaults& faults = {}) {
  if (path.states.empty()) return false;
  if (path.states[0] != lts.initial) return false;
  if (path.labels.size() + 1 != path.states.size()) return false;
  if (lts.states[lts.initial] != encode_state(initial_state(cfg))) return false;
  for (std::size_t i = 0; i < path.labels.size(); ++i) {
    GlobalState here = lts.state_at(path.states[i]);
    const ActionLabel& want = lts.labels[path.labels[i]];
    const std::string& want_dst = lts.states[path.states[i + 1]];
    bool found = false;
    for (const Successor& next : successors(here, cfg, faults)) {
      if (next.label == want && encode_state(next.state) == want_dst) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace raftmc
