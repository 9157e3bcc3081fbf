#include <doctest.h>

#include <set>
#include <variant>

#include "raftmc/explore.hpp"
#include "raftmc/render.hpp"
#include "raftmc/successors.hpp"

using namespace raftmc;

namespace {

Config tiny(std::uint32_t nodes, std::uint32_t commands, std::uint32_t terms,
            std::uint32_t capacity, bool lossy = false, bool crashes = false) {
  Config cfg;
  cfg.number_of_servers = nodes;
  cfg.number_of_client_requests = commands;
  cfg.max_term = terms;
  cfg.network_capacity = capacity;
  cfg.lossy_network = lossy;
  cfg.crashes_enabled = crashes;
  return cfg;
}

template <typename T>
std::size_t count_labels(const Lts& lts) {
  std::set<LabelId> hits;
  for (const Transition& t : lts.transitions)
    if (std::holds_alternative<T>(lts.labels[t.label])) hits.insert(t.label);
  return hits.size();
}

}  // namespace

TEST_CASE("fresh three-node cluster offers exactly the three timeouts") {
  Config cfg = tiny(3, 2, 1, 3);
  auto succ = successors(initial_state(cfg), cfg);
  REQUIRE(succ.size() == 3);
  for (NodeId i = 0; i < 3; ++i) {
    auto* t = std::get_if<TimeoutLabel>(&succ[i].label);
    REQUIRE(t != nullptr);
    CHECK(t->node == i);
  }
}

TEST_CASE("a buffered reply blocks receiving but not the other actions") {
  Config cfg = tiny(3, 1, 1, 3);
  GlobalState s = initial_state(cfg);
  NetworkPayload incoming{2, RequestVoteRequest{1, 0, 0}, 1};
  s.network.messages.push_back(incoming);
  s.nodes[1].reply_to_send = NetworkPayload{1, RequestVoteResponse{1, true}, 2};

  bool node1_receives = false;
  bool node1_sends_reply = false;
  for (const Successor& succ : successors(s, cfg)) {
    if (auto* r = std::get_if<ReceiveRpcLabel>(&succ.label))
      node1_receives |= r->payload.receiver == 1;
    if (auto* snd = std::get_if<SendRpcLabel>(&succ.label))
      node1_sends_reply |= snd->payload.sender == 1;
  }
  CHECK(!node1_receives);
  CHECK(node1_sends_reply);

  // Once the reply has left, the delivery becomes available.
  GlobalState cleared = s;
  cleared.nodes[1].reply_to_send.reset();
  cleared.network.messages.clear();
  cleared.network.messages.push_back(incoming);
  bool receives_now = false;
  for (const Successor& succ : successors(cleared, cfg))
    if (auto* r = std::get_if<ReceiveRpcLabel>(&succ.label))
      receives_now |= r->payload.receiver == 1;
  CHECK(receives_now);
}

TEST_CASE("leader replication is one atomic broadcast round") {
  Config cfg = tiny(3, 2, 1, 3);
  GlobalState s = initial_state(cfg);
  NodeState& leader = s.nodes[0];
  leader.role = Role::Leader;
  leader.current_term = 1;
  leader.voted_for = 0;
  leader.voter_log.insert(0);
  leader.voter_log.insert(1);
  leader.log.append({1, 1});
  leader.next_index = {2, 1, 1};
  leader.match_index = {1, 0, 0};
  for (NodeId i = 1; i < 3; ++i) {
    s.nodes[i].current_term = 1;
    s.nodes[i].voted_for = 0;
  }

  std::size_t rounds = 0;
  std::size_t single_appends = 0;
  for (const Successor& succ : successors(s, cfg)) {
    if (auto* set = std::get_if<SendRpcSetLabel>(&succ.label)) {
      ++rounds;
      REQUIRE(set->payloads.size() == 2);
      for (const NetworkPayload& p : set->payloads) {
        CHECK(p.sender == 0);
        CHECK(std::holds_alternative<AppendEntriesRequest>(p.rpc));
      }
      // Both messages land together; nothing else changes.
      CHECK(succ.state.network.messages.size() == 2);
      CHECK(succ.state.nodes == s.nodes);
    }
    if (auto* one = std::get_if<SendRpcLabel>(&succ.label))
      single_appends +=
          std::holds_alternative<AppendEntriesRequest>(one->payload.rpc);
  }
  CHECK(rounds == 1);
  CHECK(single_appends == 0);

  // The round is all-or-nothing: once the capacity guard cannot admit a
  // whole broadcast, no replication happens at all.
  GlobalState crowded = s;
  crowded.network.messages.push_back(
      NetworkPayload{2, RequestVoteResponse{1, false}, 0});
  for (const Successor& succ : successors(crowded, cfg))
    CHECK(!std::holds_alternative<SendRpcSetLabel>(succ.label));
}

TEST_CASE("successor lists are sorted and free of duplicates") {
  Config cfg = tiny(2, 1, 2, 3, true, true);
  auto result = explore(cfg, {.max_states = 2000});
  for (StateId s = 0; s < result.lts.states.size() && s < 500; ++s) {
    auto succ = successors(result.lts.state_at(s), cfg);
    for (std::size_t i = 1; i < succ.size(); ++i) {
      CHECK(succ[i - 1] < succ[i]);
    }
  }
}

TEST_CASE("crash and resume labels appear only when crashes are enabled") {
  auto off = explore(tiny(2, 0, 1, 2, false, false));
  CHECK(count_labels<CrashLabel>(off.lts) == 0);
  CHECK(count_labels<ResumeLabel>(off.lts) == 0);

  auto on = explore(tiny(2, 0, 1, 2, false, true));
  CHECK(count_labels<CrashLabel>(on.lts) > 0);
  CHECK(count_labels<ResumeLabel>(on.lts) > 0);
  CHECK(on.lts.states.size() > off.lts.states.size());
}

TEST_CASE("lose labels appear only when the network is lossy") {
  auto perfect = explore(tiny(2, 1, 1, 2, false, false));
  CHECK(count_labels<LoseLabel>(perfect.lts) == 0);

  auto lossy = explore(tiny(2, 1, 1, 2, true, false));
  bool lose_seen = false;
  for (const Transition& t : lossy.lts.transitions)
    lose_seen |= std::holds_alternative<LoseLabel>(lossy.lts.labels[t.label]);
  CHECK(lose_seen);
}

TEST_CASE("state limit aborts with a usable partial result") {
  Config cfg = tiny(3, 2, 1, 3);
  auto result = explore(cfg, {.max_states = 100});
  CHECK(result.state_limit_hit);
  CHECK(result.states_found >= 100);
  CHECK(result.frontier_remaining > 0);
  // Every recorded transition still has both endpoints in the store.
  for (const Transition& t : result.lts.transitions) {
    CHECK(t.src < result.lts.states.size());
    CHECK(t.dst < result.lts.states.size());
  }
}

TEST_CASE("exploration is deterministic") {
  Config cfg = tiny(2, 1, 2, 2, true, true);
  auto a = explore(cfg, {.max_states = 5000});
  auto b = explore(cfg, {.max_states = 5000});
  CHECK(a.lts.states == b.lts.states);
  CHECK(a.lts.transitions == b.lts.transitions);
  CHECK(a.lts.labels == b.lts.labels);
  CHECK(a.state_limit_hit == b.state_limit_hit);
}

TEST_CASE("terms and commit indices evolve monotonically along transitions") {
  Config cfg = tiny(2, 1, 2, 2, false, true);
  auto result = explore(cfg, {.max_states = 4000});
  for (const Transition& t : result.lts.transitions) {
    GlobalState src = result.lts.state_at(t.src);
    GlobalState dst = result.lts.state_at(t.dst);
    const ActionLabel& label = result.lts.labels[t.label];
    for (std::size_t i = 0; i < src.nodes.size(); ++i) {
      CHECK(dst.nodes[i].current_term >= src.nodes[i].current_term);
      auto* resume = std::get_if<ResumeLabel>(&label);
      bool resumed_here = resume && resume->node == i;
      if (!resumed_here)
        CHECK(dst.nodes[i].commit_index >= src.nodes[i].commit_index);
      // Crash/resume never lose persistent state.
      if (std::holds_alternative<CrashLabel>(label) || resumed_here) {
        CHECK(dst.nodes[i].log == src.nodes[i].log);
        CHECK(dst.nodes[i].current_term == src.nodes[i].current_term);
        CHECK(dst.nodes[i].voted_for == src.nodes[i].voted_for);
      }
    }
  }
}

TEST_CASE("no reachable state shows two leaders of the same term") {
  Config cfg = tiny(3, 1, 2, 3, false, false);
  auto result = explore(cfg, {.max_states = 30000});
  for (StateId s = 0; s < result.lts.states.size(); ++s) {
    GlobalState g = result.lts.state_at(s);
    std::set<Term> leader_terms;
    for (const NodeState& n : g.nodes)
      if (n.role == Role::Leader)
        CHECK(leader_terms.insert(n.current_term).second);
  }
}

TEST_CASE("paths replay through the successor function") {
  Config cfg = tiny(1, 1, 1, 1);
  auto result = explore(cfg);
  REQUIRE(result.lts.transitions.size() == 4);

  Path path;
  path.states.push_back(0);
  for (const Transition& t : result.lts.transitions) {
    path.labels.push_back(t.label);
    path.states.push_back(t.dst);
  }
  CHECK(validate_path(result.lts, path, cfg));

  // A wrong label or a wrong landing state must be rejected.
  Path wrong_label = path;
  std::swap(wrong_label.labels[0], wrong_label.labels[1]);
  CHECK(!validate_path(result.lts, wrong_label, cfg));

  Path wrong_state = path;
  wrong_state.states[2] = 4;
  CHECK(!validate_path(result.lts, wrong_state, cfg));
}
