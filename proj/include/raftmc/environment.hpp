#pragma once

#include <algorithm>
#include <cassert>
#include <compare>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "raftmc/config.hpp"
#include "raftmc/rpc.hpp"

namespace raftmc {

// The network is a bounded *set* of in-flight messages: re-sending a message
// that is already in flight collapses into it. Messages are kept sorted so
// iteration order (and hence every downstream encoding) is canonical.
struct NetworkState {
  std::vector<NetworkPayload> messages;  // sorted, no duplicates

  std::uint32_t size() const { return static_cast<std::uint32_t>(messages.size()); }

  bool contains(const NetworkPayload& p) const {
    return std::binary_search(messages.begin(), messages.end(), p);
  }

  void insert(const NetworkPayload& p) {
    auto it = std::lower_bound(messages.begin(), messages.end(), p);
    if (it == messages.end() || *it != p) messages.insert(it, p);
  }

  void erase(const NetworkPayload& p) {
    auto it = std::lower_bound(messages.begin(), messages.end(), p);
    assert(it != messages.end() && *it == p);
    messages.erase(it);
  }

  friend auto operator<=>(const NetworkState&, const NetworkState&) = default;
};

// Accept one message. Not enabled when the buffer is full; inserting a
// duplicate succeeds and leaves the set unchanged.
inline std::optional<NetworkState> network_accept(NetworkState net,
                                                  const NetworkPayload& p,
                                                  const Config& cfg) {
  if (net.size() >= cfg.network_capacity) return std::nullopt;
  net.insert(p);
  return net;
}

// Accept a whole broadcast at once. The guard is deliberately conservative:
// it reserves room for one message per server regardless of how many the
// set actually holds.
inline std::optional<NetworkState> network_accept_set(
    NetworkState net, std::span<const NetworkPayload> msgs, const Config& cfg) {
  if (net.size() + cfg.number_of_servers >= cfg.network_capacity + 1)
    return std::nullopt;
  for (const NetworkPayload& p : msgs) net.insert(p);
  return net;
}

// Hand a message to its receiver (the receiver-side effect happens in the
// same joint transition; here only the removal).
inline NetworkState network_deliver(NetworkState net, const NetworkPayload& p) {
  net.erase(p);
  return net;
}

// Drop a message on the floor. Only enabled on a lossy network.
inline std::optional<NetworkState> network_lose(NetworkState net,
                                                const NetworkPayload& p,
                                                const Config& cfg) {
  if (!cfg.lossy_network) return std::nullopt;
  if (!net.contains(p)) return std::nullopt;
  net.erase(p);
  return net;
}

inline void validate(const NetworkState& net, const Config& cfg) {
  if (net.size() > cfg.network_capacity)
    throw std::logic_error("network over capacity");
  if (!std::is_sorted(net.messages.begin(), net.messages.end()))
    throw std::logic_error("network set not sorted");
  if (std::adjacent_find(net.messages.begin(), net.messages.end()) !=
      net.messages.end())
    throw std::logic_error("duplicate message in network set");
  for (const NetworkPayload& p : net.messages) {
    if (p.sender >= cfg.number_of_servers || p.receiver >= cfg.number_of_servers)
      throw std::logic_error("message endpoint out of range");
    if (p.sender == p.receiver) throw std::logic_error("self-addressed message");
  }
}

// The synchronous client: one outstanding command at a time, ids handed out
// in increasing order starting at 1.
struct ClientState {
  CommandId next_command = 1;

  friend auto operator<=>(const ClientState&, const ClientState&) = default;
};

// Emit the next command id. Not enabled once the workload is exhausted.
// Whether some leader actually takes the command is the caller's side of
// the joint transition.
inline std::optional<std::pair<ClientState, CommandId>> client_step(
    ClientState client, const Config& cfg) {
  if (client.next_command > cfg.number_of_client_requests) return std::nullopt;
  CommandId issued = client.next_command;
  client.next_command += 1;
  return std::pair{client, issued};
}

inline void validate(const ClientState& client, const Config& cfg) {
  if (client.next_command < 1 ||
      client.next_command > cfg.number_of_client_requests + 1)
    throw std::logic_error("client command counter out of range");
}

}  // namespace raftmc
