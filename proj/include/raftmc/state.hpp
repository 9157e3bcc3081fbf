#pragma once

#include <compare>
#include <variant>
#include <vector>

#include "raftmc/environment.hpp"
#include "raftmc/node.hpp"

namespace raftmc {

// One state of the whole system: every server, the in-flight messages and
// the client's progress. Value type with full ordering, so it can be used
// directly as a canonical-form key.
struct GlobalState {
  std::vector<NodeState> nodes;
  NetworkState network;
  ClientState client;

  friend auto operator<=>(const GlobalState&, const GlobalState&) = default;
};

inline GlobalState initial_state(const Config& cfg) {
  GlobalState s;
  s.nodes.resize(cfg.number_of_servers);
  for (NodeId id = 0; id < cfg.number_of_servers; ++id) {
    NodeState& n = s.nodes[id];
    n.id = id;
    n.next_index.assign(cfg.number_of_servers, 1);
    n.match_index.assign(cfg.number_of_servers, 0);
  }
  return s;
}

inline void validate(const GlobalState& s, const Config& cfg) {
  if (s.nodes.size() != cfg.number_of_servers)
    throw std::logic_error("wrong number of nodes");
  for (NodeId id = 0; id < s.nodes.size(); ++id) {
    if (s.nodes[id].id != id) throw std::logic_error("node id mismatch");
    validate(s.nodes[id], cfg);
  }
  validate(s.network, cfg);
  validate(s.client, cfg);
}

// ---------------------------------------------------------------------------
// Transition labels. The declaration order of the variant doubles as the
// canonical action-kind order used when sorting successors.

struct TimeoutLabel {
  NodeId node = 0;
  friend auto operator<=>(const TimeoutLabel&, const TimeoutLabel&) = default;
};

struct SendRpcLabel {
  NetworkPayload payload;
  friend auto operator<=>(const SendRpcLabel&, const SendRpcLabel&) = default;
};

struct SendRpcSetLabel {
  std::vector<NetworkPayload> payloads;  // sorted
  friend auto operator<=>(const SendRpcSetLabel&,
                          const SendRpcSetLabel&) = default;
};

struct ReceiveRpcLabel {
  NetworkPayload payload;
  friend auto operator<=>(const ReceiveRpcLabel&,
                          const ReceiveRpcLabel&) = default;
};

struct ClientCommandLabel {
  CommandId command = 0;
  friend auto operator<=>(const ClientCommandLabel&,
                          const ClientCommandLabel&) = default;
};

struct AdvanceCommitLabel {
  CommitInfo info;
  friend auto operator<=>(const AdvanceCommitLabel&,
                          const AdvanceCommitLabel&) = default;
};

struct CrashLabel {
  NodeId node = 0;
  friend auto operator<=>(const CrashLabel&, const CrashLabel&) = default;
};

struct ResumeLabel {
  NodeId node = 0;
  friend auto operator<=>(const ResumeLabel&, const ResumeLabel&) = default;
};

// Deliberately carries nothing: an observer sees that *a* message was lost,
// not which one.
struct LoseLabel {
  friend auto operator<=>(const LoseLabel&, const LoseLabel&) = default;
};

using ActionLabel =
    std::variant<TimeoutLabel, SendRpcLabel, SendRpcSetLabel, ReceiveRpcLabel,
                 ClientCommandLabel, AdvanceCommitLabel, CrashLabel,
                 ResumeLabel, LoseLabel>;

// ---------------------------------------------------------------------------
// Observations: the facts about a state the properties quantify over.
// Crashed nodes expose nothing.

struct LeaderFact {
  NodeId id = 0;
  Term term = 0;
  friend auto operator<=>(const LeaderFact&, const LeaderFact&) = default;
};

struct LogFact {
  NodeId id = 0;
  Term term = 0;
  Index commit_index = 0;
  Log log;
  friend auto operator<=>(const LogFact&, const LogFact&) = default;
};

struct LeaderLogFact {
  Term term = 0;
  Log log;
  friend auto operator<=>(const LeaderLogFact&, const LeaderLogFact&) = default;
};

struct Observation {
  std::vector<LeaderFact> leaders;
  std::vector<LogFact> logs;
  std::vector<LeaderLogFact> leader_logs;

  friend bool operator==(const Observation&, const Observation&) = default;
};

inline Observation observe(const GlobalState& s) {
  Observation obs;
  for (const NodeState& n : s.nodes) {
    if (n.role == Role::Crashed) continue;
    obs.logs.push_back({n.id, n.current_term, n.commit_index, n.log});
    if (n.role == Role::Leader) {
      obs.leaders.push_back({n.id, n.current_term});
      obs.leader_logs.push_back({n.current_term, n.log});
    }
  }
  return obs;
}

}  // namespace raftmc
