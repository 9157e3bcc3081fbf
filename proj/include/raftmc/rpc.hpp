#pragma once

#include <compare>
#include <optional>
#include <variant>

#include "raftmc/log.hpp"

namespace raftmc {

struct RequestVoteRequest {
  Term term = 0;
  Index last_log_index = 0;
  Term last_log_term = 0;

  friend auto operator<=>(const RequestVoteRequest&,
                          const RequestVoteRequest&) = default;
};

struct RequestVoteResponse {
  Term term = 0;
  bool vote_granted = false;

  friend auto operator<=>(const RequestVoteResponse&,
                          const RequestVoteResponse&) = default;
};

// Replication ships at most one entry per message; an empty `entry` is a
// heartbeat. `leader_commit` is the commit index the leader advertises.
struct AppendEntriesRequest {
  Term term = 0;
  Index prev_log_index = 0;
  Term prev_log_term = 0;
  std::optional<LogEntry> entry;
  Index leader_commit = 0;

  friend auto operator<=>(const AppendEntriesRequest&,
                          const AppendEntriesRequest&) = default;
};

struct AppendEntriesResponse {
  Term term = 0;
  bool success = false;
  Index match_index = 0;  // meaningful only on success

  friend auto operator<=>(const AppendEntriesResponse&,
                          const AppendEntriesResponse&) = default;
};

using Rpc = std::variant<RequestVoteRequest, RequestVoteResponse,
                         AppendEntriesRequest, AppendEntriesResponse>;

inline Term rpc_term(const Rpc& rpc) {
  return std::visit([](const auto& m) { return m.term; }, rpc);
}

inline bool is_request(const Rpc& rpc) {
  return std::holds_alternative<RequestVoteRequest>(rpc) ||
         std::holds_alternative<AppendEntriesRequest>(rpc);
}

// An addressed message as it sits in the network.
struct NetworkPayload {
  NodeId sender = 0;
  Rpc rpc;
  NodeId receiver = 0;

  friend auto operator<=>(const NetworkPayload&,
                          const NetworkPayload&) = default;
};

}  // namespace raftmc
