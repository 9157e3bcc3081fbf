#pragma once

#include <algorithm>
#include <cassert>
#include <optional>
#include <utility>
#include <vector>

#include "raftmc/node.hpp"

namespace raftmc {

namespace detail {

// Shared by vote counting and the single-node corner case: a candidate that
// holds a majority of votes takes office and re-initialises the replication
// cursors from its own log.
inline void promote_if_majority(NodeState& n, const Config& cfg) {
  if (n.role != Role::Candidate) return;
  if (n.voter_log.size() < majority(cfg.number_of_servers)) return;
  n.role = Role::Leader;
  n.next_index.assign(cfg.number_of_servers, n.log.size() + 1);
  n.match_index.assign(cfg.number_of_servers, 0);
  n.match_index[n.id] = n.log.size();
}

}  // namespace detail

// Election timer fires: start (another) candidacy one term up. Not enabled
// for leaders, crashed nodes, or once the term ceiling is reached. Any
// unsent reply is abandoned.
inline std::optional<NodeState> timeout(NodeState n, const Config& cfg) {
  if (n.role == Role::Leader || n.role == Role::Crashed) return std::nullopt;
  if (n.current_term >= cfg.max_term) return std::nullopt;
  n.role = Role::Candidate;
  n.current_term += 1;
  n.voted_for = n.id;
  n.voter_log = NodeIdSet{};
  n.voter_log.insert(n.id);
  n.reply_to_send.reset();
  return n;
}

// The full set of vote requests a candidate is entitled to send: one to
// every node that is not already in its voter log. Sorted (receivers are
// ascending), so the result is canonical.
inline std::vector<NetworkPayload> create_request_vote_set(const NodeState& n,
                                                           const Config& cfg) {
  assert(n.role == Role::Candidate);
  std::vector<NetworkPayload> out;
  RequestVoteRequest req{n.current_term, n.log.size(), n.log.last_term()};
  for (NodeId r = 0; r < cfg.number_of_servers; ++r)
    if (r != n.id && !n.voter_log.contains(r))
      out.push_back({n.id, req, r});
  return out;
}

// Seeing a newer term in any message: revert to follower and forget the
// election bookkeeping. Log, commit index and replication cursors stay.
inline NodeState step_down_if_newer_term(NodeState n, Term msg_term) {
  assert(msg_term > n.current_term);
  n.role = Role::Follower;
  n.current_term = msg_term;
  n.voted_for.reset();
  n.voter_log = NodeIdSet{};
  return n;
}

// Pure decision: would this node grant its vote? The caller has already
// normalised terms (request term == current term).
inline bool grant_vote(const NodeState& n, const RequestVoteRequest& req,
                       NodeId candidate, const ProtocolFaults& faults = {}) {
  bool free_to_vote =
      faults.allow_double_vote || !n.voted_for || *n.voted_for == candidate;
  bool log_ok = faults.ignore_up_to_date ||
                req.last_log_term > n.log.last_term() ||
                (req.last_log_term == n.log.last_term() &&
                 req.last_log_index >= n.log.size());
  return free_to_vote && log_ok;
}

namespace detail {

inline void handle_request_vote(NodeState& n, const RequestVoteRequest& req,
                                NodeId sender, const ProtocolFaults& faults) {
  bool granted = grant_vote(n, req, sender, faults);
  if (granted) n.voted_for = sender;
  n.reply_to_send =
      NetworkPayload{n.id, RequestVoteResponse{n.current_term, granted}, sender};
}

inline void handle_vote_response(NodeState& n, const RequestVoteResponse& resp,
                                 NodeId sender, const Config& cfg) {
  if (n.role != Role::Candidate) return;  // late or duplicate, ignore
  if (resp.vote_granted) n.voter_log.insert(sender);
  promote_if_majority(n, cfg);
}

inline void handle_append_request(NodeState& n, const AppendEntriesRequest& req,
                                  NodeId sender, const ProtocolFaults& faults) {
  if (n.role == Role::Candidate) n.role = Role::Follower;

  bool log_ok = req.prev_log_index == 0 ||
                (req.prev_log_index <= n.log.size() &&
                 n.log.at(req.prev_log_index).term == req.prev_log_term);
  if (!log_ok) {
    n.reply_to_send = NetworkPayload{
        n.id, AppendEntriesResponse{n.current_term, false, 0}, sender};
    return;
  }

  if (req.entry) {
    Index pos = req.prev_log_index + 1;
    if (pos > n.log.size()) {
      n.log.append(*req.entry);
    } else if (n.log.at(pos) != *req.entry) {
      if (faults.skip_conflict_truncation) {
        if (!n.log.contains(*req.entry)) n.log.append(*req.entry);
      } else {
        n.log.truncate(req.prev_log_index);
        n.log.append(*req.entry);
      }
    }
    // else: the entry is already in place; the suffix behind it is not
    // touched (it may hold committed entries this request knows nothing
    // about).
  }

  n.commit_index = std::max(
      n.commit_index, std::min(req.leader_commit, n.log.size()));
  Index match = req.prev_log_index + (req.entry ? 1 : 0);
  n.reply_to_send = NetworkPayload{
      n.id, AppendEntriesResponse{n.current_term, true, match}, sender};
}

inline void handle_append_response(NodeState& n,
                                   const AppendEntriesResponse& resp,
                                   NodeId sender) {
  if (n.role != Role::Leader) return;  // stale leadership, ignore
  if (resp.success) {
    n.next_index[sender] = resp.match_index + 1;
    n.match_index[sender] = resp.match_index;
  } else {
    n.next_index[sender] = std::max<Index>(1, n.next_index[sender] - 1);
  }
}

}  // namespace detail

// Receive one message and compute the entire reaction in one step: term
// normalisation, the role-specific rule, and (for requests) the buffered
// reply. Messages from older terms are dropped on the floor - requests and
// responses alike, with no reply to the sender.
inline NodeState handle_message(NodeState n, const NetworkPayload& payload,
                                const Config& cfg,
                                const ProtocolFaults& faults = {}) {
  assert(payload.receiver == n.id);
  assert(n.role != Role::Crashed);
  assert(!n.reply_to_send);

  Term msg_term = rpc_term(payload.rpc);
  if (msg_term < n.current_term) return n;
  if (msg_term > n.current_term) n = step_down_if_newer_term(n, msg_term);

  std::visit(
      [&](const auto& rpc) {
        using T = std::decay_t<decltype(rpc)>;
        if constexpr (std::is_same_v<T, RequestVoteRequest>)
          detail::handle_request_vote(n, rpc, payload.sender, faults);
        else if constexpr (std::is_same_v<T, RequestVoteResponse>)
          detail::handle_vote_response(n, rpc, payload.sender, cfg);
        else if constexpr (std::is_same_v<T, AppendEntriesRequest>)
          detail::handle_append_request(n, rpc, payload.sender, faults);
        else
          detail::handle_append_response(n, rpc, payload.sender);
      },
      payload.rpc);
  return n;
}

// A leader takes a client command into its log. Anyone else refuses, which
// blocks the (synchronous) client until a leader exists.
inline std::optional<NodeState> client_request(NodeState n, CommandId command) {
  if (n.role != Role::Leader) return std::nullopt;
  n.log.append({n.current_term, command});
  return n;
}

// The replication message for one peer: the entry at next_index if there is
// one, otherwise a heartbeat. The advertised commit index is clamped by
// next_index so the peer is never told to commit past what this message
// certifies.
inline NetworkPayload leader_send_append_entries(const NodeState& n,
                                                 NodeId target) {
  assert(n.role == Role::Leader);
  assert(target != n.id);
  Index ni = n.next_index[target];
  AppendEntriesRequest req;
  req.term = n.current_term;
  req.prev_log_index = ni - 1;
  req.prev_log_term = ni > 1 ? n.log.at(ni - 1).term : 0;
  if (ni <= n.log.size()) req.entry = n.log.at(ni);
  req.leader_commit = std::min(n.commit_index, ni);
  return {n.id, req, target};
}

// The full round of replication messages a leader broadcasts in one step:
// one append-entries request per peer, each tailored to that peer's
// next_index (an empty-entry heartbeat once the peer is caught up).
// Receivers ascend, so the result is canonical. Empty only in a single-node
// cluster, where there is nobody to replicate to.
inline std::vector<NetworkPayload> create_append_entries_set(
    const NodeState& n, const Config& cfg) {
  assert(n.role == Role::Leader);
  std::vector<NetworkPayload> out;
  for (NodeId r = 0; r < cfg.number_of_servers; ++r)
    if (r != n.id) out.push_back(leader_send_append_entries(n, r));
  return out;
}

// Highest log position replicated on a majority, counting the leader itself
// unconditionally. 0 when no position qualifies.
inline Index max_agree_index(const NodeState& n, const Config& cfg) {
  for (Index i = n.log.size(); i >= 1; --i) {
    std::uint32_t agree = 1;
    for (NodeId j = 0; j < cfg.number_of_servers; ++j)
      if (j != n.id && n.match_index[j] >= i) ++agree;
    if (agree >= majority(cfg.number_of_servers)) return i;
  }
  return 0;
}

// Move the leader's commit index to the highest majority-replicated
// position, provided the entry there is from the leader's own term. Returns
// the new state plus a record of what was committed.
inline std::optional<std::pair<NodeState, CommitInfo>> advance_commit_index(
    NodeState n, const Config& cfg, const ProtocolFaults& faults = {}) {
  if (n.role != Role::Leader) return std::nullopt;
  Index agreed = max_agree_index(n, cfg);
  if (agreed <= n.commit_index) return std::nullopt;
  if (!faults.commit_any_term && n.log.at(agreed).term != n.current_term)
    return std::nullopt;
  CommitInfo info{n.commit_index, agreed, n.current_term, n.log};
  n.commit_index = agreed;
  return std::pair{std::move(n), std::move(info)};
}

// Power off: everything is frozen in place until resume.
inline std::optional<NodeState> crash(NodeState n) {
  if (n.role == Role::Crashed) return std::nullopt;
  n.role = Role::Crashed;
  return n;
}

// Power back on: term, vote and log were on disk; the rest starts over.
inline std::optional<NodeState> resume(NodeState n, const Config& cfg) {
  if (n.role != Role::Crashed) return std::nullopt;
  n.role = Role::Follower;
  n.commit_index = 0;
  n.voter_log = NodeIdSet{};
  n.next_index.assign(cfg.number_of_servers, 1);
  n.match_index.assign(cfg.number_of_servers, 0);
  n.reply_to_send.reset();
  return n;
}

}  // namespace raftmc
