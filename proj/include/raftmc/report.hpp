#pragma once

#include <array>
#include <chrono>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "raftmc/properties.hpp"
#include "raftmc/render.hpp"

namespace raftmc {

// ---------------------------------------------------------------------------
// Check registry. Universal checks fail on a violation (counterexample);
// existential ones fail when no witness exists.

enum class CheckKind { Universal, Existential };
enum class CheckStatus { Passed, Failed, Skipped };

struct CheckInfo {
  std::string_view name;
  CheckKind kind;
};

inline constexpr std::array<CheckInfo, 8> kChecks = {{
    {"election-safety", CheckKind::Universal},
    {"log-matching", CheckKind::Universal},
    {"leader-completeness", CheckKind::Universal},
    {"state-machine-safety", CheckKind::Universal},
    {"leader-liveness", CheckKind::Existential},
    {"distinct-leaders", CheckKind::Existential},
    {"leader-alternation", CheckKind::Existential},
    {"sms-non-vacuity", CheckKind::Existential},
}};

inline const CheckInfo* find_check(std::string_view name) {
  for (const CheckInfo& c : kChecks)
    if (c.name == name) return &c;
  return nullptr;
}

// Documented precondition gates: a skipped check is reported but never
// counts as a failure.
inline std::optional<std::string> skip_reason(std::string_view name,
                                              const Config& cfg) {
  if (name == "distinct-leaders" &&
      (cfg.max_term < 2 || cfg.number_of_servers < 2))
    return "precondition unmet: needs maxTerm >= 2 and numberOfServers >= 2";
  return std::nullopt;
}

inline Verdict run_check(std::string_view name, const Lts& lts,
                         ObservationIndex& obs, const Config& cfg) {
  if (name == "election-safety") return check_election_safety(lts, obs);
  if (name == "log-matching") return check_log_matching(lts, obs);
  if (name == "leader-completeness") return check_leader_completeness(lts, obs);
  if (name == "state-machine-safety")
    return check_state_machine_safety(lts, obs);
  if (name == "leader-liveness") return check_leader_liveness(lts, obs);
  if (name == "distinct-leaders") return check_distinct_leaders(lts, obs);
  if (name == "leader-alternation")
    return check_leader_alternation(lts, obs, cfg);
  if (name == "sms-non-vacuity") return check_sms_non_vacuity(lts, obs);
  throw std::invalid_argument("unknown check: " + std::string(name));
}

// ---------------------------------------------------------------------------
// Run report: config echo, exploration size/time, per-check outcomes.

struct CheckOutcome {
  std::string name;
  CheckKind kind = CheckKind::Universal;
  CheckStatus status = CheckStatus::Skipped;
  std::string note;          // skip reason, or empty
  std::optional<Path> path;  // counterexample (failed universal) or witness
  double wall_clock_seconds = 0.0;
};

inline CheckOutcome evaluate_check(std::string_view name, const Lts& lts,
                                   ObservationIndex& obs, const Config& cfg) {
  const CheckInfo* info = find_check(name);
  if (!info) throw std::invalid_argument("unknown check: " + std::string(name));
  CheckOutcome out;
  out.name = std::string(name);
  out.kind = info->kind;
  if (auto reason = skip_reason(name, cfg)) {
    out.status = CheckStatus::Skipped;
    out.note = *reason;
    return out;
  }
  auto t0 = std::chrono::steady_clock::now();
  Verdict v = run_check(name, lts, obs, cfg);
  out.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  out.status = v.holds ? CheckStatus::Passed : CheckStatus::Failed;
  out.path = v.holds ? std::move(v.witness) : std::move(v.counterexample);
  return out;
}

struct ExplorationSummary {
  std::uint64_t state_count = 0;
  std::uint64_t transition_count = 0;
  bool state_limit_hit = false;
  std::uint64_t frontier_remaining = 0;
  double wall_clock_seconds = 0.0;
};

struct RunReport {
  Config config;
  ExplorationSummary exploration;
  std::vector<CheckOutcome> checks;
  std::string aut_path;    // empty when not exported
  std::string trace_path;  // empty when no traces written
};

// Exit status contract: usage errors (2) are decided before a report exists.
inline int exit_code(const RunReport& report) {
  if (report.exploration.state_limit_hit) return 3;
  for (const CheckOutcome& c : report.checks)
    if (c.status == CheckStatus::Failed) return 1;
  return 0;
}

// ---------------------------------------------------------------------------
// JSON: canonical field names; parsing also accepts the flag-style aliases
// so a config document can mirror the command line.

inline nlohmann::json config_to_json(const Config& cfg) {
  return {{"numberOfServers", cfg.number_of_servers},
          {"numberOfClientRequests", cfg.number_of_client_requests},
          {"maxTerm", cfg.max_term},
          {"networkCapacity", cfg.network_capacity},
          {"lossyNetwork", cfg.lossy_network},
          {"crashesEnabled", cfg.crashes_enabled}};
}

inline Config config_from_json(const nlohmann::json& doc) {
  static const struct {
    std::string_view canonical, alias;
  } kKeys[] = {{"numberOfServers", "nodes"},
               {"numberOfClientRequests", "commands"},
               {"maxTerm", "max-term"},
               {"networkCapacity", "net-capacity"},
               {"lossyNetwork", "lossy"},
               {"crashesEnabled", "crashes"}};
  if (!doc.is_object()) throw std::invalid_argument("config must be an object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    bool known = false;
    for (const auto& k : kKeys)
      known |= it.key() == k.canonical || it.key() == k.alias;
    if (!known) throw std::invalid_argument("unknown config key: " + it.key());
  }
  Config cfg;
  auto pick = [&](std::size_t i) -> const nlohmann::json* {
    if (auto it = doc.find(kKeys[i].canonical); it != doc.end()) return &*it;
    if (auto it = doc.find(kKeys[i].alias); it != doc.end()) return &*it;
    return nullptr;
  };
  if (auto* v = pick(0)) cfg.number_of_servers = v->get<std::uint32_t>();
  if (auto* v = pick(1)) cfg.number_of_client_requests = v->get<std::uint32_t>();
  if (auto* v = pick(2)) cfg.max_term = v->get<std::uint32_t>();
  if (auto* v = pick(3)) cfg.network_capacity = v->get<std::uint32_t>();
  if (auto* v = pick(4)) cfg.lossy_network = v->get<bool>();
  if (auto* v = pick(5)) cfg.crashes_enabled = v->get<bool>();
  return cfg;
}

inline std::string_view status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Passed: return "passed";
    case CheckStatus::Failed: return "failed";
    case CheckStatus::Skipped: return "skipped";
  }
  return "";
}

inline nlohmann::json report_to_json(const RunReport& report, const Lts& lts) {
  nlohmann::json checks = nlohmann::json::array();
  for (const CheckOutcome& c : report.checks) {
    nlohmann::json entry = {
        {"name", c.name},
        {"kind", c.kind == CheckKind::Universal ? "universal" : "existential"},
        {"status", status_name(c.status)},
        {"wallClockSeconds", c.wall_clock_seconds},
    };
    if (c.status != CheckStatus::Skipped)
      entry["holds"] = c.status == CheckStatus::Passed;
    if (!c.note.empty()) entry["note"] = c.note;
    if (c.path) {
      nlohmann::json labels = nlohmann::json::array();
      for (LabelId l : c.path->labels) labels.push_back(render(lts.labels[l]));
      entry[c.kind == CheckKind::Universal ? "counterexample" : "witness"] = {
          {"labels", std::move(labels)},
          {"triggerIndex", c.path->trigger_index ? nlohmann::json(*c.path->trigger_index)
                                                 : nlohmann::json()},
      };
    }
    checks.push_back(std::move(entry));
  }
  nlohmann::json doc = {
      {"config", config_to_json(report.config)},
      {"exploration",
       {{"stateCount", report.exploration.state_count},
        {"transitionCount", report.exploration.transition_count},
        {"stateLimitHit", report.exploration.state_limit_hit},
        {"frontierRemaining", report.exploration.frontier_remaining},
        {"wallClockSeconds", report.exploration.wall_clock_seconds}}},
      {"checks", std::move(checks)},
  };
  nlohmann::json artifacts = nlohmann::json::object();
  if (!report.aut_path.empty()) artifacts["aut"] = report.aut_path;
  if (!report.trace_path.empty()) artifacts["trace"] = report.trace_path;
  if (!artifacts.empty()) doc["artifacts"] = std::move(artifacts);
  return doc;
}

// The round-trip surface: config plus per-check verdict booleans
// (absent for skipped checks).
struct ParsedReport {
  Config config;
  std::vector<std::pair<std::string, std::optional<bool>>> verdicts;
};

inline ParsedReport parse_report(const nlohmann::json& doc) {
  ParsedReport parsed;
  parsed.config = config_from_json(doc.at("config"));
  for (const auto& entry : doc.at("checks")) {
    std::optional<bool> holds;
    if (entry.contains("holds")) holds = entry.at("holds").get<bool>();
    parsed.verdicts.emplace_back(entry.at("name").get<std::string>(), holds);
  }
  return parsed;
}

// Strips volatile timing fields so two reports of the same run compare equal.
inline nlohmann::json without_timing(nlohmann::json doc) {
  if (doc.is_object()) {
    doc.erase("wallClockSeconds");
    for (auto& [key, value] : doc.items()) value = without_timing(value);
  } else if (doc.is_array()) {
    for (auto& value : doc) value = without_timing(value);
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Human-readable summary, one row per check.

inline std::string render_table(const RunReport& report) {
  std::ostringstream out;
  out << "configuration: " << config_to_json(report.config).dump() << "\n";
  out << "states: " << report.exploration.state_count
      << "  transitions: " << report.exploration.transition_count;
  if (report.exploration.state_limit_hit)
    out << "  [state limit hit; frontier remaining: "
        << report.exploration.frontier_remaining << "]";
  out << "\n";
  if (!report.checks.empty()) {
    out << "\n";
    std::size_t width = 0;
    for (const CheckOutcome& c : report.checks)
      width = std::max(width, c.name.size());
    for (const CheckOutcome& c : report.checks) {
      out << "  " << c.name << std::string(width - c.name.size() + 2, ' ');
      switch (c.status) {
        case CheckStatus::Passed: out << "PASS"; break;
        case CheckStatus::Failed: out << "FAIL"; break;
        case CheckStatus::Skipped: out << "SKIP"; break;
      }
      if (c.path)
        out << "  ("
            << (c.kind == CheckKind::Universal ? "counterexample"
                                               : "witness")
            << " length " << c.path->labels.size() << ")";
      if (!c.note.empty()) out << "  " << c.note;
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace raftmc
