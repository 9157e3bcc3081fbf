#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "raftmc/state.hpp"

namespace raftmc {

// Canonical byte form of a GlobalState: the deduplication key of the
// explorer. Injective (every variable-length piece is length-prefixed, sets
// are serialised in their sorted order) and stable - the leading version
// byte is bumped if the layout ever changes.
inline constexpr std::uint8_t kStateEncodingVersion = 1;

namespace detail {

inline void put_varint(std::string& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<char>((v & 0x7f) | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v));
}

inline void put_bool(std::string& out, bool b) { out.push_back(b ? 1 : 0); }

inline void put_log(std::string& out, const Log& log) {
  put_varint(out, log.size());
  for (const LogEntry& e : log.entries) {
    put_varint(out, e.term);
    put_varint(out, e.command);
  }
}

inline void put_payload(std::string& out, const NetworkPayload& p) {
  put_varint(out, p.sender);
  put_varint(out, p.receiver);
  put_varint(out, p.rpc.index());
  std::visit(
      [&](const auto& rpc) {
        using T = std::decay_t<decltype(rpc)>;
        if constexpr (std::is_same_v<T, RequestVoteRequest>) {
          put_varint(out, rpc.term);
          put_varint(out, rpc.last_log_index);
          put_varint(out, rpc.last_log_term);
        } else if constexpr (std::is_same_v<T, RequestVoteResponse>) {
          put_varint(out, rpc.term);
          put_bool(out, rpc.vote_granted);
        } else if constexpr (std::is_same_v<T, AppendEntriesRequest>) {
          put_varint(out, rpc.term);
          put_varint(out, rpc.prev_log_index);
          put_varint(out, rpc.prev_log_term);
          put_bool(out, rpc.entry.has_value());
          if (rpc.entry) {
            put_varint(out, rpc.entry->term);
            put_varint(out, rpc.entry->command);
          }
          put_varint(out, rpc.leader_commit);
        } else {
          put_varint(out, rpc.term);
          put_bool(out, rpc.success);
          put_varint(out, rpc.match_index);
        }
      },
      p.rpc);
}

struct ByteReader {
  std::string_view data;
  std::size_t pos = 0;

  std::uint8_t byte() {
    if (pos >= data.size()) throw std::invalid_argument("truncated encoding");
    return static_cast<std::uint8_t>(data[pos++]);
  }

  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0;; shift += 7) {
      std::uint8_t b = byte();
      v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
      if (!(b & 0x80)) return v;
      if (shift > 56) throw std::invalid_argument("varint too long");
    }
  }

  std::uint32_t u32() { return static_cast<std::uint32_t>(varint()); }
  bool flag() { return byte() != 0; }

  Log log() {
    Log out;
    std::uint64_t len = varint();
    out.entries.reserve(len);
    for (std::uint64_t i = 0; i < len; ++i) {
      Term t = u32();
      CommandId c = u32();
      out.entries.push_back({t, c});
    }
    return out;
  }

  NetworkPayload payload() {
    NetworkPayload p;
    p.sender = u32();
    p.receiver = u32();
    switch (varint()) {
      case 0: {
        RequestVoteRequest r;
        r.term = u32();
        r.last_log_index = u32();
        r.last_log_term = u32();
        p.rpc = r;
        break;
      }
      case 1: {
        RequestVoteResponse r;
        r.term = u32();
        r.vote_granted = flag();
        p.rpc = r;
        break;
      }
      case 2: {
        AppendEntriesRequest r;
        r.term = u32();
        r.prev_log_index = u32();
        r.prev_log_term = u32();
        if (flag()) {
          Term t = u32();
          CommandId c = u32();
          r.entry = LogEntry{t, c};
        }
        r.leader_commit = u32();
        p.rpc = r;
        break;
      }
      case 3: {
        AppendEntriesResponse r;
        r.term = u32();
        r.success = flag();
        r.match_index = u32();
        p.rpc = r;
        break;
      }
      default:
        throw std::invalid_argument("unknown rpc tag");
    }
    return p;
  }
};

}  // namespace detail

inline std::string encode_state(const GlobalState& s) {
  std::string out;
  out.push_back(static_cast<char>(kStateEncodingVersion));
  detail::put_varint(out, s.client.next_command);
  detail::put_varint(out, s.network.messages.size());
  for (const NetworkPayload& p : s.network.messages) detail::put_payload(out, p);
  detail::put_varint(out, s.nodes.size());
  for (const NodeState& n : s.nodes) {
    out.push_back(static_cast<char>(n.role));
    detail::put_varint(out, n.current_term);
    detail::put_log(out, n.log);
    detail::put_varint(out, n.commit_index);
    detail::put_bool(out, n.voted_for.has_value());
    if (n.voted_for) detail::put_varint(out, *n.voted_for);
    detail::put_varint(out, n.voter_log.bits());
    for (Index ni : n.next_index) detail::put_varint(out, ni);
    for (Index mi : n.match_index) detail::put_varint(out, mi);
    detail::put_bool(out, n.reply_to_send.has_value());
    if (n.reply_to_send) detail::put_payload(out, *n.reply_to_send);
  }
  return out;
}

inline GlobalState decode_state(std::string_view bytes) {
  detail::ByteReader in{bytes};
  if (in.byte() != kStateEncodingVersion)
    throw std::invalid_argument("unknown state encoding version");
  GlobalState s;
  s.client.next_command = in.u32();
  std::uint64_t msg_count = in.varint();
  for (std::uint64_t i = 0; i < msg_count; ++i)
    s.network.messages.push_back(in.payload());
  std::uint64_t node_count = in.varint();
  s.nodes.resize(node_count);
  for (std::uint64_t id = 0; id < node_count; ++id) {
    NodeState& n = s.nodes[id];
    n.id = static_cast<NodeId>(id);
    n.role = static_cast<Role>(in.byte());
    n.current_term = in.u32();
    n.log = in.log();
    n.commit_index = in.u32();
    if (in.flag()) n.voted_for = in.u32();
    for (std::uint64_t bits = in.varint(); bits;) {
      NodeId v = static_cast<NodeId>(std::countr_zero(bits));
      n.voter_log.insert(v);
      bits &= bits - 1;
    }
    n.next_index.resize(node_count);
    for (Index& ni : n.next_index) ni = in.u32();
    n.match_index.resize(node_count);
    for (Index& mi : n.match_index) mi = in.u32();
    if (in.flag()) n.reply_to_send = in.payload();
  }
  if (in.pos != bytes.size())
    throw std::invalid_argument("trailing bytes in encoding");
  return s;
}

}  // namespace raftmc
