// Regression traps for the seeded protocol faults. Two of them have their
// shortest violations too deep for exhaustive search on test hardware, so
// those are driven along hand-written scripts instead. The resulting chain
// is a genuine sub-LTS of the mutant's state space - the driver takes every
// step from successors(), refusing any step that is ambiguous or
// unavailable - so a violation found on the chain is a violation of the
// mutant, and replaying the counterexample closes the loop.

#include <string>

#include "doctest.h"
#include "mutant_scripts.hpp"
#include "raftmc/raftmc.hpp"

using namespace raftmc;
using script::Drive;

TEST_CASE("script driver rejects a step no successor matches") {
  Config cfg = mutant::no_truncate_config();
  cfg.crashes_enabled = false;
  Drive d = script::drive(cfg, {},
                          {script::timeout_of(0), script::crash_of(0)});
  REQUIRE(!d.ok);
  CHECK(d.error.find("step 1") != std::string::npos);
  CHECK(d.error.find("0 successors") != std::string::npos);
}

TEST_CASE("removing conflict truncation corrupts the state machine") {
  Config cfg = mutant::no_truncate_config();
  ProtocolFaults faults{.skip_conflict_truncation = true};
  Drive d = script::drive(cfg, faults, mutant::no_truncate_script());
  REQUIRE(d.ok);
  INFO(d.error);

  // The scripted endpoint: nodes 0 and 1 both report position 1 committed,
  // node 0 with the term-1 entry underneath, node 1 with the term-2 one.
  const NodeState& n0 = d.last.nodes[0];
  const NodeState& n1 = d.last.nodes[1];
  CHECK(n0.commit_index == 1);
  CHECK(n0.log.at(1).term == 1);
  CHECK(n1.commit_index == 1);
  CHECK(n1.log.at(1).term == 2);

  ObservationIndex obs(d.chain);
  Verdict v = check_state_machine_safety(d.chain, obs);
  REQUIRE(!v.holds);
  REQUIRE(v.counterexample.has_value());
  CHECK(validate_path(d.chain, *v.counterexample, cfg, faults));

  // Elections themselves stayed clean; only the log handling is broken.
  CHECK(check_election_safety(d.chain, obs).holds);

  // The honest successor function refuses the same trace: the append that
  // stacks the conflicting entry is not an honest transition.
  CHECK(!validate_path(d.chain, d.path, cfg));
}

TEST_CASE("removing the commit term guard loses a committed entry") {
  Config cfg = mutant::any_term_config();
  ProtocolFaults faults{.commit_any_term = true};
  Drive d = script::drive(cfg, faults, mutant::any_term_script());
  REQUIRE(d.ok);
  INFO(d.error);

  // Endpoint: node 2 leads term 4 and has committed the term-2 entry at
  // position 1, the slot where the term-1 entry was committed earlier.
  const NodeState& n2 = d.last.nodes[2];
  CHECK(n2.role == Role::Leader);
  CHECK(n2.commit_index == 1);
  CHECK(n2.log.at(1).term == 2);

  ObservationIndex obs(d.chain);
  Verdict v = check_state_machine_safety(d.chain, obs);
  REQUIRE(!v.holds);
  REQUIRE(v.counterexample.has_value());
  CHECK(validate_path(d.chain, *v.counterexample, cfg, faults));
  CHECK(!validate_path(d.chain, d.path, cfg));

  // The trigger state of the counterexample shows the forbidden sight
  // itself: an old-term entry counted as committed.
  REQUIRE(v.counterexample->trigger_index.has_value());
  GlobalState trig = d.chain.state_at(
      v.counterexample->states[*v.counterexample->trigger_index]);
  bool old_term_committed = false;
  for (const NodeState& n : trig.nodes)
    old_term_committed |=
        n.commit_index >= 1 && n.log.at(1).term < n.current_term;
  CHECK(old_term_committed);
}

TEST_CASE("granting votes without the freshness check strands a commit") {
  // Small enough to catch exhaustively, though not shallow: the first
  // violation sits 18 transitions deep, past the millionth state.
  Config cfg;
  cfg.number_of_servers = 3;
  cfg.number_of_client_requests = 1;
  cfg.max_term = 2;
  cfg.network_capacity = 3;
  cfg.crashes_enabled = true;
  ProtocolFaults faults{.ignore_up_to_date = true};
  auto result = explore(cfg, {.max_states = 1200000}, faults);
  ObservationIndex obs(result.lts);

  Verdict v = check_leader_completeness(result.lts, obs);
  REQUIRE(!v.holds);
  REQUIRE(v.counterexample.has_value());
  CHECK(validate_path(result.lts, *v.counterexample, cfg, faults));
}
