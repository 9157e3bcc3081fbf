#pragma once

#include <algorithm>
#include <vector>

#include "raftmc/state.hpp"
#include "raftmc/transitions.hpp"

namespace raftmc {

struct Successor {
  ActionLabel label;
  GlobalState state;

  friend auto operator<=>(const Successor&, const Successor&) = default;
};

// All transitions enabled in `s`, in a fixed canonical order (action kind
// first - the variant order of ActionLabel - then label payload, then target
// state), with exact duplicates removed. Joint actions pair a node-side rule
// with its environment-side counterpart: a send only happens if the network
// accepts, a receive consumes the message it handles, a client command needs
// a leader to take it.
inline std::vector<Successor> successors(const GlobalState& s,
                                         const Config& cfg,
                                         const ProtocolFaults& faults = {}) {
  std::vector<Successor> out;

  auto with_node = [&](const GlobalState& base, NodeState&& n) {
    GlobalState next = base;
    next.nodes[n.id] = std::move(n);
    return next;
  };

  // Election timers.
  for (const NodeState& n : s.nodes)
    if (auto after = timeout(n, cfg))
      out.push_back({TimeoutLabel{n.id}, with_node(s, std::move(*after))});

  // Single sends: a buffered reply goes out on its own, one message at a
  // time, whenever the network has room.
  for (const NodeState& n : s.nodes) {
    if (n.role == Role::Crashed || !n.reply_to_send) continue;
    if (auto net = network_accept(s.network, *n.reply_to_send, cfg)) {
      NodeState cleared = n;
      cleared.reply_to_send.reset();
      GlobalState next = with_node(s, std::move(cleared));
      next.network = std::move(*net);
      out.push_back({SendRpcLabel{*n.reply_to_send}, std::move(next)});
    }
  }

  // Broadcasts: a candidate's vote requests and a leader's replication round
  // (heartbeats included) each enter the network as one atomic set, or not
  // at all. A leader with no peers has nothing to broadcast.
  for (const NodeState& n : s.nodes) {
    if (n.role == Role::Candidate) {
      std::vector<NetworkPayload> set = create_request_vote_set(n, cfg);
      if (auto net = network_accept_set(s.network, set, cfg)) {
        NodeState after = n;
        detail::promote_if_majority(after, cfg);  // only bites when N == 1
        GlobalState next = with_node(s, std::move(after));
        next.network = std::move(*net);
        out.push_back({SendRpcSetLabel{std::move(set)}, std::move(next)});
      }
    } else if (n.role == Role::Leader) {
      std::vector<NetworkPayload> set = create_append_entries_set(n, cfg);
      if (set.empty()) continue;
      if (auto net = network_accept_set(s.network, set, cfg)) {
        GlobalState next = s;
        next.network = std::move(*net);
        out.push_back({SendRpcSetLabel{std::move(set)}, std::move(next)});
      }
    }
  }

  // Deliveries: remove from the network and react, atomically. A node that
  // still owes a reply does not pick up anything new.
  for (const NetworkPayload& p : s.network.messages) {
    const NodeState& receiver = s.nodes[p.receiver];
    if (receiver.role == Role::Crashed || receiver.reply_to_send) continue;
    GlobalState next = with_node(s, handle_message(receiver, p, cfg, faults));
    next.network = network_deliver(next.network, p);
    out.push_back({ReceiveRpcLabel{p}, std::move(next)});
  }

  // The synchronous client: one joint step with whichever leader takes it.
  if (auto stepped = client_step(s.client, cfg)) {
    for (const NodeState& n : s.nodes) {
      if (auto after = client_request(n, stepped->second)) {
        GlobalState next = with_node(s, std::move(*after));
        next.client = stepped->first;
        out.push_back({ClientCommandLabel{stepped->second}, std::move(next)});
      }
    }
  }

  // Leader-side commits.
  for (const NodeState& n : s.nodes)
    if (auto advanced = advance_commit_index(n, cfg, faults))
      out.push_back({AdvanceCommitLabel{std::move(advanced->second)},
                     with_node(s, std::move(advanced->first))});

  // Crashes and recoveries.
  if (cfg.crashes_enabled) {
    for (const NodeState& n : s.nodes) {
      if (auto down = crash(n))
        out.push_back({CrashLabel{n.id}, with_node(s, std::move(*down))});
      if (auto up = resume(n, cfg))
        out.push_back({ResumeLabel{n.id}, with_node(s, std::move(*up))});
    }
  }

  // Message loss. The label says only that *something* was dropped.
  if (cfg.lossy_network) {
    for (const NetworkPayload& p : s.network.messages) {
      GlobalState next = s;
      next.network = network_deliver(next.network, p);
      out.push_back({LoseLabel{}, std::move(next)});
    }
  }

  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace raftmc
