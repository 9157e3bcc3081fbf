#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "raftmc/explore.hpp"
#include "raftmc/properties.hpp"
#include "raftmc/successors.hpp"

using namespace raftmc;

namespace {

Config tiny(std::uint32_t nodes, std::uint32_t commands, std::uint32_t terms,
            std::uint32_t capacity, bool lossy = false, bool crashes = false) {
  Config cfg;
  cfg.number_of_servers = nodes;
  cfg.number_of_client_requests = commands;
  cfg.max_term = terms;
  cfg.network_capacity = capacity;
  cfg.lossy_network = lossy;
  cfg.crashes_enabled = crashes;
  return cfg;
}

}  // namespace

TEST_CASE("three-state chain yields the full counterexample path") {
  auto toy = oracle::make_toy(3, {{0, 1}, {1, 2}}, {0, 0, 1});
  std::vector<Trigger<int>> triggers = {{7, {TriggerKind::State, 0}}};
  auto follow = [&](const int&, std::uint32_t s) { return toy.marker[s] == 0; };

  Verdict v = check_leads_to_invariant(toy.lts, triggers, follow);
  REQUIRE(!v.holds);
  REQUIRE(v.counterexample.has_value());
  CHECK(v.counterexample->states == std::vector<StateId>{0, 1, 2});
  CHECK(v.counterexample->labels.size() == 2);
  CHECK(v.counterexample->trigger_index == 0);
  CHECK(!v.witness.has_value());
}

TEST_CASE("vacuous and constantly-true instances hold") {
  auto toy = oracle::make_toy(3, {{0, 1}, {1, 2}}, {1, 1, 1});
  std::vector<Trigger<int>> none;
  CHECK(check_leads_to_invariant(toy.lts, none,
                                 [](const int&, std::uint32_t) { return false; })
            .holds);

  std::vector<Trigger<int>> some = {{1, {TriggerKind::State, 1}}};
  CHECK(check_leads_to_invariant(toy.lts, some,
                                 [](const int&, std::uint32_t) { return true; })
            .holds);
}

TEST_CASE("transition triggers start checking at the landing state") {
  auto toy = oracle::make_toy(3, {{0, 1}, {1, 2}}, {9, 0, 0});
  // Trigger on the edge 0 -> 1; the bad marker at state 0 is behind us.
  std::vector<Trigger<int>> triggers = {{5, {TriggerKind::Transition, 0}}};
  auto bad_at_zero = [&](const int&, std::uint32_t s) {
    return toy.marker[s] != 9;
  };
  CHECK(check_leads_to_invariant(toy.lts, triggers, bad_at_zero).holds);

  auto bad_at_one = [&](const int&, std::uint32_t s) { return s != 1; };
  Verdict v = check_leads_to_invariant(toy.lts, triggers, bad_at_one);
  REQUIRE(!v.holds);
  CHECK(v.counterexample->states == std::vector<StateId>{0, 1});
  CHECK(v.counterexample->trigger_index == 1);
}

TEST_CASE("counterexamples take the shortest route") {
  // Two occurrences of the same value; the violation sits one hop from the
  // nearer one and four hops from the farther one.
  auto toy = oracle::make_toy(
      7, {{0, 1}, {0, 2}, {1, 3}, {3, 4}, {4, 5}, {5, 6}, {2, 6}},
      {0, 0, 0, 0, 0, 0, 1});
  std::vector<Trigger<int>> triggers = {{3, {TriggerKind::State, 1}},
                                        {3, {TriggerKind::State, 2}}};
  auto follow = [&](const int&, std::uint32_t s) { return toy.marker[s] == 0; };
  Verdict v = check_leads_to_invariant(toy.lts, triggers, follow);
  REQUIRE(!v.holds);
  CHECK(v.counterexample->states == std::vector<StateId>{0, 2, 6});
  CHECK(v.counterexample->trigger_index == 1);
}

TEST_CASE("existential engine finds a witness through the trigger") {
  auto toy = oracle::make_toy(4, {{0, 1}, {1, 2}, {2, 3}}, {0, 1, 0, 2});
  std::vector<Trigger<int>> triggers = {{1, {TriggerKind::State, 1}}};
  Verdict v = check_exists_leads_to(
      toy.lts, triggers,
      [&](const int&, std::uint32_t s) { return toy.marker[s] == 2; });
  REQUIRE(v.holds);
  REQUIRE(v.witness.has_value());
  CHECK(v.witness->states == std::vector<StateId>{0, 1, 2, 3});
  CHECK(v.witness->trigger_index == 1);

  Verdict miss = check_exists_leads_to(
      toy.lts, triggers,
      [&](const int&, std::uint32_t s) { return toy.marker[s] == 7; });
  CHECK(!miss.holds);
  CHECK(!miss.witness.has_value());
}

TEST_CASE("engine agrees with the quadratic oracle on random toy systems") {
  std::mt19937 rng(20260815);
  for (int round = 0; round < 5; ++round) {
    oracle::ToyLts toy = oracle::random_toy(rng);
    for (int i = 0; i < 3; ++i) {
      oracle::ToyInstance inst = oracle::random_instance(toy, rng);
      auto follow = oracle::toy_follow(toy, inst);
      bool expected = oracle::holds_for_all(toy.lts, inst.triggers, follow);
      bool actual =
          check_leads_to_invariant(toy.lts, inst.triggers, follow).holds;
      CHECK(expected == actual);

      // Also cross-check occurrence by occurrence.
      for (const Trigger<int>& t : inst.triggers) {
        std::vector<Trigger<int>> one = {t};
        CHECK(oracle::holds_for_occurrence(toy.lts, t, follow) ==
              check_leads_to_invariant(toy.lts, one, follow).holds);
      }
    }
  }
}

TEST_CASE("observation index mirrors the state projection") {
  Config cfg = tiny(2, 1, 2, 2, false, true);
  auto result = explore(cfg, {.max_states = 3000});
  ObservationIndex obs(result.lts);
  for (StateId s = 0; s < result.lts.states.size(); ++s) {
    GlobalState g = result.lts.state_at(s);
    Observation expected = observe(g);
    auto facts = obs.facts(s);

    REQUIRE(facts.size() == expected.logs.size());
    std::size_t leaders = 0;
    for (std::size_t i = 0; i < facts.size(); ++i) {
      const LogFact& log_fact = expected.logs[i];
      CHECK(facts[i].id == log_fact.id);
      CHECK(facts[i].term == log_fact.term);
      CHECK(facts[i].commit == log_fact.commit_index);
      CHECK(obs.log(facts[i].log) == log_fact.log);
      leaders += facts[i].leader;
    }
    CHECK(leaders == expected.leaders.size());
  }
}

TEST_CASE("interned log helpers compute prefix relations correctly") {
  Lts empty_lts;
  empty_lts.states.push_back(encode_state(initial_state(tiny(1, 1, 1, 1))));
  ObservationIndex obs(empty_lts);

  std::uint32_t a = obs.intern(Log{{1, 1}, {1, 2}, {2, 3}});
  std::uint32_t b = obs.intern(Log{{1, 1}, {1, 2}, {3, 4}});
  std::uint32_t c = obs.intern(Log{{1, 1}, {2, 5}});
  std::uint32_t d = obs.intern(Log{});
  std::uint32_t e = obs.intern(Log{{2, 9}, {1, 2}});

  CHECK(obs.intern(Log{{1, 1}, {1, 2}, {2, 3}}) == a);
  CHECK(obs.common_prefix(a, b) == 2);
  CHECK(obs.common_prefix(a, c) == 1);
  CHECK(obs.common_prefix(a, d) == 0);
  CHECK(obs.common_prefix(a, a) == 3);

  CHECK(obs.consistent(a, b));      // diverge after the shared prefix
  CHECK(obs.consistent(a, c));
  CHECK(obs.consistent(a, d));      // empty log never conflicts
  CHECK(!obs.consistent(a, e));     // same entry (1,2) at position 2, but
                                    // different first entries
}

TEST_CASE("all checks give the expected verdicts on the degenerate cluster") {
  Config cfg = tiny(1, 1, 1, 1);
  auto result = explore(cfg);
  ObservationIndex obs(result.lts);

  CHECK(check_election_safety(result.lts, obs).holds);
  CHECK(check_log_matching(result.lts, obs).holds);
  CHECK(check_leader_completeness(result.lts, obs).holds);
  CHECK(check_state_machine_safety(result.lts, obs).holds);

  Verdict liveness = check_leader_liveness(result.lts, obs);
  REQUIRE(liveness.holds);
  REQUIRE(liveness.witness.has_value());
  CHECK(liveness.witness->labels.size() == 2);  // timeout, then the broadcast
  CHECK(validate_path(result.lts, *liveness.witness, cfg));

  CHECK(!check_distinct_leaders(result.lts, obs).holds);  // only one node
  CHECK(check_leader_alternation(result.lts, obs, cfg).holds);
  CHECK(!check_sms_non_vacuity(result.lts, obs).holds);  // no second node
}

TEST_CASE("a system that never elects anyone fails the liveness witnesses") {
  Lts lts;
  lts.states.push_back(encode_state(initial_state(tiny(2, 1, 1, 2))));
  ObservationIndex obs(lts);
  CHECK(!check_leader_liveness(lts, obs).holds);
  CHECK(!check_distinct_leaders(lts, obs).holds);
  CHECK(!check_sms_non_vacuity(lts, obs).holds);
}

TEST_CASE("zero client requests: safety vacuous, commit witness missing") {
  Config cfg = tiny(3, 0, 1, 3);
  auto result = explore(cfg);
  ObservationIndex obs(result.lts);
  CHECK(check_state_machine_safety(result.lts, obs).holds);
  CHECK(!check_sms_non_vacuity(result.lts, obs).holds);
  CHECK(check_leader_liveness(result.lts, obs).holds);
}

TEST_CASE("two-node cluster: commits propagate and safety holds") {
  Config cfg = tiny(2, 1, 1, 2);
  auto result = explore(cfg);
  REQUIRE(!result.state_limit_hit);
  ObservationIndex obs(result.lts);

  CHECK(check_election_safety(result.lts, obs).holds);
  CHECK(check_log_matching(result.lts, obs).holds);
  CHECK(check_leader_completeness(result.lts, obs).holds);
  CHECK(check_state_machine_safety(result.lts, obs).holds);

  Verdict vacuity = check_sms_non_vacuity(result.lts, obs);
  REQUIRE(vacuity.holds);
  REQUIRE(vacuity.witness.has_value());
  CHECK(validate_path(result.lts, *vacuity.witness, cfg));
}

TEST_CASE("alternating leaders exist once two terms are allowed") {
  Config cfg = tiny(2, 1, 2, 2);
  auto result = explore(cfg);
  REQUIRE(!result.state_limit_hit);
  ObservationIndex obs(result.lts);

  Verdict distinct = check_distinct_leaders(result.lts, obs);
  REQUIRE(distinct.holds);
  CHECK(validate_path(result.lts, *distinct.witness, cfg));

  Verdict alt = check_leader_alternation(result.lts, obs, cfg);
  REQUIRE(alt.holds);
  REQUIRE(alt.witness.has_value());
  CHECK(validate_path(result.lts, *alt.witness, cfg));

  // The witness really ends after the final alternating sighting: replaying
  // it must show two different leaders along the way.
  std::set<NodeId> seen;
  for (StateId s : alt.witness->states) {
    GlobalState g = result.lts.state_at(s);
    for (const NodeState& n : g.nodes)
      if (n.role == Role::Leader) seen.insert(n.id);
  }
  CHECK(seen.size() == 2);
}

TEST_CASE("double-vote mutant breaks election safety with a replayable trace") {
  Config cfg = tiny(3, 1, 2, 3);
  ProtocolFaults faults{.allow_double_vote = true};
  auto result = explore(cfg, {.max_states = 200000}, faults);
  ObservationIndex obs(result.lts);

  Verdict v = check_election_safety(result.lts, obs);
  REQUIRE(!v.holds);
  REQUIRE(v.counterexample.has_value());
  CHECK(validate_path(result.lts, *v.counterexample, cfg, faults));

  // The final state of the counterexample really shows the violation.
  GlobalState bad = result.lts.state_at(v.counterexample->states.back());
  std::map<Term, std::set<NodeId>> leaders;
  for (const NodeState& n : bad.nodes)
    if (n.role == Role::Leader) leaders[n.current_term].insert(n.id);
  bool two_same_term = false;
  for (const auto& [term, ids] : leaders) two_same_term |= ids.size() >= 2;
  CHECK(two_same_term);

  // The honest protocol on the same configuration stays safe.
  auto honest = explore(cfg, {.max_states = 200000});
  ObservationIndex honest_obs(honest.lts);
  CHECK(check_election_safety(honest.lts, honest_obs).holds);
}
