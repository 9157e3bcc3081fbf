#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "raftmc/config.hpp"
#include "raftmc/log.hpp"
#include "raftmc/rpc.hpp"

namespace raftmc {

enum class Role : std::uint8_t { Follower, Candidate, Leader, Crashed };

// Small set of node ids (ids are < 64 by Config validation). Kept as a
// bitmask so copying node states while enumerating successors stays cheap.
class NodeIdSet {
 public:
  NodeIdSet() = default;

  void insert(NodeId id) { bits_ |= mask(id); }
  void erase(NodeId id) { bits_ &= ~mask(id); }
  bool contains(NodeId id) const { return bits_ & mask(id); }
  std::uint32_t size() const { return std::popcount(bits_); }
  bool empty() const { return bits_ == 0; }
  std::uint64_t bits() const { return bits_; }

  template <typename F>
  void for_each(F&& f) const {  // ascending id order
    for (std::uint64_t rest = bits_; rest;) {
      NodeId id = static_cast<NodeId>(std::countr_zero(rest));
      f(id);
      rest &= rest - 1;
    }
  }

  friend auto operator<=>(const NodeIdSet&, const NodeIdSet&) = default;

 private:
  static std::uint64_t mask(NodeId id) { return std::uint64_t{1} << id; }
  std::uint64_t bits_ = 0;
};

// Everything one server knows. current_term, voted_for and log survive a
// crash; the rest is volatile and reset on resume. next_index/match_index
// are the usual leader-side replication cursors, indexed by node id (the
// entries for the node itself are kept for uniformity).
struct NodeState {
  NodeId id = 0;
  Role role = Role::Follower;
  Term current_term = 0;
  Log log;
  Index commit_index = 0;
  std::optional<NodeId> voted_for;
  NodeIdSet voter_log;
  std::vector<Index> next_index;
  std::vector<Index> match_index;
  // A reply computed while handling a message, waiting to be handed to the
  // network. While it is pending the node does not accept further messages.
  std::optional<NetworkPayload> reply_to_send;

  friend auto operator<=>(const NodeState&, const NodeState&) = default;
};

// Carried on every commit transition: what moved, under which term, and the
// leader log that justified it.
struct CommitInfo {
  Index old_commit_index = 0;
  Index new_commit_index = 0;
  Term term = 0;
  Log log;

  friend auto operator<=>(const CommitInfo&, const CommitInfo&) = default;
};

// Deliberate rule breakages, used to validate that the property checks can
// catch real protocol bugs. All off by default.
struct ProtocolFaults {
  bool allow_double_vote = false;        // ignore voted_for when granting
  bool skip_conflict_truncation = false;  // append without clearing conflicts
  bool commit_any_term = false;           // commit entries from older terms
  bool ignore_up_to_date = false;         // grant votes to stale-log candidates

  bool any() const {
    return allow_double_vote || skip_conflict_truncation || commit_any_term ||
           ignore_up_to_date;
  }
};

// Structural well-formedness of a single node. Throws std::logic_error with
// a description of the first violated condition.
inline void validate(const NodeState& node, const Config& cfg) {
  auto fail = [&](const char* what) { throw std::logic_error(what); };
  const std::uint32_t n = cfg.number_of_servers;
  if (node.id >= n) fail("node id out of range");
  if (node.commit_index > node.log.size()) fail("commit index beyond log end");
  if (node.voted_for && *node.voted_for >= n) fail("voted_for out of range");
  if (node.voter_log.bits() >> n) fail("voter_log contains unknown node");
  if (node.next_index.size() != n) fail("next_index size mismatch");
  if (node.match_index.size() != n) fail("match_index size mismatch");
  if (node.role == Role::Leader) {
    // Only meaningful while in office; stale cursors on ex-leaders may point
    // past a log that has since been truncated under a newer leader.
    for (Index ni : node.next_index)
      if (ni < 1 || ni > node.log.size() + 1) fail("next_index out of range");
    for (Index mi : node.match_index)
      if (mi > node.log.size()) fail("match_index out of range");
  }
  for (Index ni : node.next_index)
    if (ni < 1) fail("next_index below 1");
  for (Term prev = 0; const LogEntry& e : node.log.entries) {
    if (e.term < 1) fail("log entry with term 0");
    if (e.term < prev) fail("log entry terms decrease");
    if (e.term > node.current_term) fail("log entry from the future");
    prev = e.term;
  }
  if (node.role == Role::Leader && node.voter_log.size() < majority(n))
    fail("leader without a majority of votes");
  if (node.role == Role::Candidate || node.role == Role::Leader) {
    if (node.voted_for != node.id) fail("candidate/leader not voting for self");
    if (!node.voter_log.contains(node.id)) fail("own vote missing");
  }
  if (node.reply_to_send) {
    if (node.reply_to_send->sender != node.id) fail("pending reply not ours");
    if (node.reply_to_send->receiver >= n ||
        node.reply_to_send->receiver == node.id)
      fail("pending reply badly addressed");
  }
}

}  // namespace raftmc
