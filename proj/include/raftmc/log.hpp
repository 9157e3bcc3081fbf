#pragma once

#include <cassert>
#include <compare>
#include <vector>

#include "raftmc/config.hpp"

namespace raftmc {

struct LogEntry {
  Term term = 0;
  CommandId command = 0;

  friend auto operator<=>(const LogEntry&, const LogEntry&) = default;
};

// A replicated log. Positions are 1-based throughout, matching the usual
// Raft presentation; position 0 stands for "before the first entry".
struct Log {
  std::vector<LogEntry> entries;

  Log() = default;
  Log(std::initializer_list<LogEntry> init) : entries(init) {}

  Index size() const { return static_cast<Index>(entries.size()); }
  bool empty() const { return entries.empty(); }

  const LogEntry& at(Index pos) const {
    assert(pos >= 1 && pos <= size());
    return entries[pos - 1];
  }

  // Term of the last entry, 0 when the log is empty.
  Term last_term() const { return entries.empty() ? 0 : entries.back().term; }

  Log prefix(Index len) const {
    assert(len <= size());
    Log out;
    out.entries.assign(entries.begin(), entries.begin() + len);
    return out;
  }

  // Drop every entry above position len.
  void truncate(Index len) {
    assert(len <= size());
    entries.resize(len);
  }

  void append(LogEntry e) { entries.push_back(e); }

  bool contains(const LogEntry& e) const {
    for (const LogEntry& have : entries)
      if (have == e) return true;
    return false;
  }

  friend auto operator<=>(const Log&, const Log&) = default;
};

}  // namespace raftmc
