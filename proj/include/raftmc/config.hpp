#pragma once

#include <cassert>
#include <cstdint>
#include <stdexcept>

namespace raftmc {

using NodeId = std::uint32_t;
using Term = std::uint32_t;
using Index = std::uint32_t;  // 1-based log position, 0 meaning "nothing"
using CommandId = std::uint32_t;

// Model parameters: cluster size, workload bounds, and fault switches.
// The defaults give the smallest interesting cluster.
struct Config {
  std::uint32_t number_of_servers = 3;
  std::uint32_t number_of_client_requests = 2;
  Term max_term = 1;
  std::uint32_t network_capacity = 3;
  bool lossy_network = false;
  bool crashes_enabled = false;

  friend bool operator==(const Config&, const Config&) = default;
};

// Smallest strict majority of an n-node cluster: floor(n/2) + 1.
constexpr std::uint32_t majority(std::uint32_t n) { return n / 2 + 1; }

// Throws std::invalid_argument when the configuration is unusable.
inline void validate(const Config& cfg) {
  if (cfg.number_of_servers < 1)
    throw std::invalid_argument("need at least one server");
  if (cfg.number_of_servers > 64)
    throw std::invalid_argument("at most 64 servers supported");
  if (cfg.max_term < 1) throw std::invalid_argument("max term must be >= 1");
  if (cfg.network_capacity < 1)
    throw std::invalid_argument("network capacity must be >= 1");
}

}  // namespace raftmc
