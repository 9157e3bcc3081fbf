// Command-line front end: explore a configuration, run checks, emit reports
// and artifacts.
//
// Exit codes: 0 all selected checks pass (skips allowed), 1 violation or
// missing witness, 2 usage error, 3 state limit exceeded.

#include <chrono>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <raftmc/raftmc.hpp>

namespace {

struct Options {
  std::string check = "all";
  std::string config_path;
  std::string export_aut_path;
  std::string trace_path;
  std::string report_path;
  std::uint64_t max_states = 0;  // 0 = unlimited
};

int usage_error(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return 2;
}

void write_traces(const raftmc::RunReport& report, const raftmc::Lts& lts,
                  const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open trace file: " + path);
  bool first = true;
  for (const raftmc::CheckOutcome& c : report.checks) {
    if (!c.path) continue;
    if (!first) out << "\n";
    first = false;
    out << "# " << c.name << " "
        << (c.kind == raftmc::CheckKind::Universal ? "counterexample"
                                                   : "witness")
        << " length " << c.path->labels.size();
    if (c.path->trigger_index)
      out << " trigger-at " << *c.path->trigger_index;
    out << "\n";
    for (raftmc::LabelId label : c.path->labels)
      out << raftmc::render(lts.labels[label]) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Explicit-state exploration and property checking for a Raft cluster "
      "model"};
  app.get_formatter()->column_width(28);

  raftmc::Config flags;
  Options opt;
  app.add_option("--nodes", flags.number_of_servers, "Cluster size");
  app.add_option("--commands", flags.number_of_client_requests,
                 "Client requests to issue");
  app.add_option("--max-term", flags.max_term, "Highest election term");
  app.add_option("--net-capacity", flags.network_capacity,
                 "In-flight message bound");
  app.add_flag("--lossy", flags.lossy_network, "Allow message loss");
  app.add_flag("--crashes", flags.crashes_enabled, "Allow crash and recovery");
  app.add_option("--check", opt.check, "Check to run: a check name, or 'all'");
  app.add_option("--config", opt.config_path, "JSON configuration file");
  app.add_option("--export-aut", opt.export_aut_path,
                 "Write the explored LTS in Aldebaran format");
  app.add_option("--max-states", opt.max_states,
                 "Abort exploration beyond this many states (0 = unlimited)");
  app.add_option("--trace", opt.trace_path,
                 "Write counterexample/witness traces (one action per line)");
  app.add_option("--report", opt.report_path,
                 "Write the JSON report here instead of standard output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  raftmc::Config cfg;
  try {
    if (!opt.config_path.empty()) {
      std::ifstream in(opt.config_path);
      if (!in) return usage_error("cannot open config file: " + opt.config_path);
      nlohmann::json doc;
      in >> doc;
      cfg = raftmc::config_from_json(doc);
    }
    // Flags override file values.
    if (app.count("--nodes")) cfg.number_of_servers = flags.number_of_servers;
    if (app.count("--commands"))
      cfg.number_of_client_requests = flags.number_of_client_requests;
    if (app.count("--max-term")) cfg.max_term = flags.max_term;
    if (app.count("--net-capacity"))
      cfg.network_capacity = flags.network_capacity;
    if (app.count("--lossy")) cfg.lossy_network = flags.lossy_network;
    if (app.count("--crashes")) cfg.crashes_enabled = flags.crashes_enabled;
    raftmc::validate(cfg);
  } catch (const std::exception& e) {
    return usage_error(e.what());
  }

  if (opt.check != "all" && !raftmc::find_check(opt.check)) {
    std::string names;
    for (const raftmc::CheckInfo& c : raftmc::kChecks)
      names += "\n  " + std::string(c.name);
    return usage_error("unknown check '" + opt.check + "'; choose 'all' or:" +
                       names);
  }

  try {
    raftmc::ExploreLimits limits;
    if (opt.max_states > 0) limits.max_states = opt.max_states;
    auto t0 = std::chrono::steady_clock::now();
    raftmc::ExploreResult result = raftmc::explore(cfg, limits);
    double explore_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    raftmc::RunReport report;
    report.config = cfg;
    report.exploration = {result.lts.states.size(),
                          result.lts.transitions.size(),
                          result.state_limit_hit, result.frontier_remaining,
                          explore_seconds};

    raftmc::ObservationIndex obs(result.lts);
    for (const raftmc::CheckInfo& c : raftmc::kChecks) {
      if (opt.check != "all" && opt.check != c.name) continue;
      report.checks.push_back(
          raftmc::evaluate_check(c.name, result.lts, obs, cfg));
    }

    if (!opt.export_aut_path.empty()) {
      std::ofstream out(opt.export_aut_path, std::ios::binary);
      if (!out)
        throw std::runtime_error("cannot open aut file: " +
                                 opt.export_aut_path);
      raftmc::export_aut(result.lts, out);
      report.aut_path = opt.export_aut_path;
    }
    if (!opt.trace_path.empty()) {
      write_traces(report, result.lts, opt.trace_path);
      report.trace_path = opt.trace_path;
    }

    std::cout << raftmc::render_table(report);
    nlohmann::json doc = raftmc::report_to_json(report, result.lts);
    if (opt.report_path.empty()) {
      std::cout << "\n" << doc.dump(2) << "\n";
    } else {
      std::ofstream out(opt.report_path, std::ios::binary);
      if (!out)
        throw std::runtime_error("cannot open report file: " +
                                 opt.report_path);
      out << doc.dump(2) << "\n";
    }
    return raftmc::exit_code(report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
