#pragma once

#include <string>

#include "raftmc/state.hpp"

namespace raftmc {

// Human-readable action and payload rendering, shared by the .aut export
// and trace files. The format is part of the tool's output contract; change
// it only together with the golden tests.

inline std::string render(const Log& log) {
  std::string out = "[";
  for (std::size_t i = 0; i < log.entries.size(); ++i) {
    if (i) out += ",";
    out += "(" + std::to_string(log.entries[i].term) + "," +
           std::to_string(log.entries[i].command) + ")";
  }
  return out + "]";
}

inline std::string render(const Rpc& rpc) {
  auto b = [](bool v) { return v ? std::string("true") : std::string("false"); };
  return std::visit(
      [&](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, RequestVoteRequest>) {
          return "requestVoteRequest(" + std::to_string(m.term) + ", " +
                 std::to_string(m.last_log_index) + ", " +
                 std::to_string(m.last_log_term) + ")";
        } else if constexpr (std::is_same_v<T, RequestVoteResponse>) {
          return "requestVoteResponse(" + std::to_string(m.term) + ", " +
                 b(m.vote_granted) + ")";
        } else if constexpr (std::is_same_v<T, AppendEntriesRequest>) {
          Log entries;
          if (m.entry) entries.append(*m.entry);
          return "appendEntriesRequest(" + std::to_string(m.term) + ", " +
                 std::to_string(m.prev_log_index) + ", " +
                 std::to_string(m.prev_log_term) + ", " + render(entries) +
                 ", " + std::to_string(m.leader_commit) + ")";
        } else {
          return "appendEntriesResponse(" + std::to_string(m.term) + ", " +
                 b(m.success) + ", " + std::to_string(m.match_index) + ")";
        }
      },
      rpc);
}

inline std::string render(const NetworkPayload& p) {
  return std::to_string(p.sender) + ", " + render(p.rpc) + ", " +
         std::to_string(p.receiver);
}

inline std::string render(const ActionLabel& label) {
  return std::visit(
      [](const auto& l) -> std::string {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, TimeoutLabel>) {
          return "timeout(" + std::to_string(l.node) + ")";
        } else if constexpr (std::is_same_v<T, SendRpcLabel>) {
          return "sendRPC(" + render(l.payload) + ")";
        } else if constexpr (std::is_same_v<T, SendRpcSetLabel>) {
          std::string out = "sendRPCset({";
          for (std::size_t i = 0; i < l.payloads.size(); ++i) {
            if (i) out += ", ";
            out += "(" + render(l.payloads[i]) + ")";
          }
          return out + "})";
        } else if constexpr (std::is_same_v<T, ReceiveRpcLabel>) {
          return "receiveRPC(" + render(l.payload) + ")";
        } else if constexpr (std::is_same_v<T, ClientCommandLabel>) {
          return "clientCommand(" + std::to_string(l.command) + ")";
        } else if constexpr (std::is_same_v<T, AdvanceCommitLabel>) {
          return "advanceCommitIndex(" +
                 std::to_string(l.info.old_commit_index) + ", " +
                 std::to_string(l.info.new_commit_index) + ", " +
                 std::to_string(l.info.term) + ", " + render(l.info.log) + ")";
        } else if constexpr (std::is_same_v<T, CrashLabel>) {
          return "crash(" + std::to_string(l.node) + ")";
        } else if constexpr (std::is_same_v<T, ResumeLabel>) {
          return "resume(" + std::to_string(l.node) + ")";
        } else {
          return "lose";
        }
      },
      label);
}

}  // namespace raftmc
