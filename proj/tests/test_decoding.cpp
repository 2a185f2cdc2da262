#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "plansafe/decoding.hpp"
#include "plansafe/environment.hpp"
#include "plansafe/error.hpp"
#include "plansafe/parser.hpp"
#include "plansafe/policies.hpp"
#include "plansafe/trace.hpp"
#include "support.hpp"

using namespace plansafe;
using namespace plansafe::decoding;

namespace {

env::Environment two_room_nav() {
  env::EnvironmentConfig cfg;
  cfg.kind = env::DomainKind::navigation;
  cfg.landmarks = {env::Entity{"A_landmark", {1.0, 0.0, 0.0}},
                   env::Entity{"B_landmark", {2.0, 0.0, 0.0}}};
  cfg.initial_position = {0.0, 0.0, 0.0};
  cfg.travel_speed = 1.0;
  cfg.action_overhead = 1.0;
  cfg.bounds_min = {0.0, 0.0, 0.0};
  cfg.bounds_max = {5.0, 5.0, 5.0};
  return env::Environment(std::move(cfg));
}

env::Environment one_room_nav() {
  env::EnvironmentConfig cfg;
  cfg.kind = env::DomainKind::navigation;
  cfg.landmarks = {env::Entity{"room", {1.0, 0.0, 0.0}}};
  cfg.initial_position = {0.0, 0.0, 0.0};
  cfg.travel_speed = 1.0;
  cfg.action_overhead = 1.0;
  cfg.bounds_min = {0.0, 0.0, 0.0};
  cfg.bounds_max = {5.0, 5.0, 5.0};
  return env::Environment(std::move(cfg));
}

double probability_of(const ActionDistribution& d, std::string_view action) {
  for (const WeightedAction& e : d.entries()) {
    if (e.action == action) return e.probability;
  }
  return -1.0;
}

}  // namespace

TEST_CASE("masking zeroes an action and renormalizes the rest") {
  ActionDistribution d({{"A", 0.75}, {"B", 0.19}, {"D", 0.04}});
  // With 0.75 of the mass masked away, 0.19 and 0.04 rescale by 1/0.23.
  ActionDistribution m = mask_and_renormalize(d, {"A"});
  REQUIRE(m.size() == 2);
  CHECK(std::abs(probability_of(m, "B") - 0.8261) < 1e-4);
  CHECK(std::abs(probability_of(m, "D") - 0.1739) < 1e-4);
  CHECK(m.entries()[0].action == "B");  // order preserved
}

TEST_CASE("masking nothing is the identity") {
  ActionDistribution d({{"A", 0.6}, {"B", 0.4}});
  ActionDistribution m = mask_and_renormalize(d, {});
  REQUIRE(m.size() == 2);
  CHECK(probability_of(m, "A") == doctest::Approx(0.6));
  CHECK(probability_of(m, "B") == doctest::Approx(0.4));
}

TEST_CASE("masking everything is a dead end") {
  ActionDistribution d({{"X", 0.5}, {"Y", 0.5}});
  try {
    mask_and_renormalize(d, {"X", "Y"});
    FAIL("expected dead-end");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::dead_end);
  }
}

TEST_CASE("action distributions are validated and normalized") {
  CHECK_THROWS_AS(ActionDistribution({}), Error);
  CHECK_THROWS_AS(ActionDistribution({{"A", 0.5}, {"A", 0.5}}), Error);
  CHECK_THROWS_AS(ActionDistribution({{"A", -0.1}, {"B", 1.1}}), Error);
  CHECK_THROWS_AS(ActionDistribution({{"A", 0.0}, {"B", 0.0}}), Error);
  CHECK_NOTHROW(ActionDistribution({{"A", 1.0}}));
  // Raw weights are scaled into probabilities.
  ActionDistribution d({{"A", 3.0}, {"B", 1.0}});
  CHECK(probability_of(d, "A") == doctest::Approx(0.75));
  CHECK(probability_of(d, "B") == doctest::Approx(0.25));
}

TEST_CASE("an action leading to a dead state is masked and the runner-up "
          "commits") {
  env::Environment e = two_room_nav();
  // Entering A_landmark is forbidden outright, so its automaton successor
  // is dead; the favored 0.75 candidate must be masked.
  ltl::Formula spec = ltl::parse_infix("G !A_landmark & F B_landmark");
  automaton::TraceAutomaton monitor = automaton::compile(
      spec, e.propositions(), automaton::AlphabetMode::one_hot);

  ScriptedPolicy policy(std::vector<std::vector<WeightedAction>>{
      {{"Goto A_landmark", 0.75}, {"Goto B_landmark", 0.25}}});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    DecodingSession session(e, "visit B, avoid A", monitor, seed, 16);
    std::string committed = session.step(policy);
    CHECK(committed == "Goto B_landmark");
    for (const MaskedAction& m : session.masked_log()) {
      CHECK(m.action == "Goto A_landmark");
      CHECK(m.pre_mask_probability == doctest::Approx(0.75));
    }
  }
  // At least one of those seeds must actually have sampled the 0.75 branch.
  DecodingSession session(e, "visit B, avoid A", monitor, 1, 16);
  session.step(policy);
  bool any_masked = !session.masked_log().empty();
  for (std::uint64_t seed = 2; seed < 20 && !any_masked; ++seed) {
    DecodingSession s2(e, "visit B, avoid A", monitor, seed, 16);
    s2.step(policy);
    any_masked = !s2.masked_log().empty();
  }
  CHECK(any_masked);
}

TEST_CASE("with a trivial spec the engine never masks and sampling matches "
          "the policy") {
  env::Environment e = two_room_nav();
  automaton::TraceAutomaton monitor =
      automaton::compile(ltl::Formula::make_true(), e.propositions(),
                         automaton::AlphabetMode::one_hot);
  UniformPolicy policy;
  // First-step candidate set: Goto A, Goto B, DONE — all valid.
  std::map<std::string, int> counts;
  const int kSamples = 10000;
  for (int i = 0; i < kSamples; ++i) {
    DecodingSession session(e, "", monitor, 1000 + i, 8);
    counts[session.step(policy)] += 1;
    CHECK(session.masked_log().empty());
  }
  // Pearson chi-squared against the uniform null, df = 2; 13.82 is the
  // 0.999 quantile.
  const double expected = kSamples / 3.0;
  double chi2 = 0.0;
  for (const auto& [action, n] : counts) {
    chi2 += (n - expected) * (n - expected) / expected;
  }
  CHECK(counts.size() == 3);
  CHECK(chi2 < 13.82);
}

TEST_CASE("DONE is masked while the spec is still unsatisfied") {
  env::Environment e = one_room_nav();
  automaton::TraceAutomaton monitor = automaton::compile(
      ltl::parse_infix("F room"), e.propositions(),
      automaton::AlphabetMode::one_hot);
  UniformPolicy policy;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    DecodingSession session(e, "visit the room", monitor, seed, 64);
    // Candidates are {Goto room, DONE}; DONE is invalid at the start.
    CHECK(session.step(policy) == "Goto room");
  }
  // Some seed must have sampled DONE first and logged the mask.
  bool saw_done_masked = false;
  for (std::uint64_t seed = 0; seed < 50 && !saw_done_masked; ++seed) {
    DecodingSession session(e, "visit the room", monitor, seed, 64);
    session.step(policy);
    for (const MaskedAction& m : session.masked_log()) {
      saw_done_masked = saw_done_masked || m.action == "DONE";
    }
  }
  CHECK(saw_done_masked);
}

TEST_CASE("run returns once the policy samples DONE under a trivial spec") {
  env::Environment e = two_room_nav();
  ScriptedPolicy policy(std::vector<std::string>{"DONE"});
  env::Plan plan =
      run(e, "", ltl::Formula::make_true(), policy, 7, 8);
  REQUIRE(plan.size() == 1);
  CHECK(plan[0] == "DONE");
}

TEST_CASE("an unsatisfiable spec fails before any step") {
  env::Environment e = two_room_nav();
  UniformPolicy policy;
  try {
    run(e, "", ltl::Formula::make_false(), policy, 1, 8);
    FAIL("expected unsatisfiable-spec");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::unsatisfiable_spec);
  }
  // Semantically impossible (not just syntactically false) specs too.
  try {
    run(e, "", ltl::parse_infix("G !A_landmark & F A_landmark"), policy, 1,
        8);
    FAIL("expected unsatisfiable-spec");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::unsatisfiable_spec);
  }
}

TEST_CASE("every returned plan satisfies its spec under direct evaluation") {
  std::mt19937_64 rng(404);
  UniformPolicy policy;
  int returned = 0;
  for (int i = 0; i < 200; ++i) {
    const auto kind = (i % 2 == 0) ? env::DomainKind::navigation
                                   : env::DomainKind::manipulation;
    env::Environment e = env::random_environment(kind, 9000 + i);
    // Small random spec over a few environment propositions.
    std::vector<std::string> atoms;
    for (int k = 0; k < 3; ++k) {
      atoms.push_back(
          e.propositions()[testsupport::pick(rng, e.propositions().size())]);
    }
    ltl::Formula spec = testsupport::random_formula(rng, 4, atoms);
    env::Plan plan;
    try {
      plan = run(e, "", spec, policy, 5000 + i, 48);
    } catch (const Error&) {
      continue;  // unsatisfiable / dead end / step limit: nothing returned
    }
    ++returned;
    env::SimulationResult sim = env::simulate(e, plan);
    REQUIRE(ltl::evaluate(spec, sim.trace));
  }
  // The guarantee must have been exercised on a healthy fraction of tasks.
  CHECK(returned > 100);
}

TEST_CASE("committed first actions follow the conditional distribution") {
  env::Environment e = two_room_nav();
  automaton::TraceAutomaton monitor = automaton::compile(
      ltl::parse_infix("F A_landmark"), e.propositions(),
      automaton::AlphabetMode::one_hot);
  // DONE (p=0.5) is invalid at the start; conditioned on the valid set the
  // two Goto actions have probabilities 0.2/0.5 = 0.4 and 0.3/0.5 = 0.6.
  ScriptedPolicy policy(std::vector<std::vector<WeightedAction>>{
      {{"Goto A_landmark", 0.2},
       {"Goto B_landmark", 0.3},
       {"DONE", 0.5}}});
  int a_count = 0;
  const int kSamples = 10000;
  for (int i = 0; i < kSamples; ++i) {
    DecodingSession session(e, "", monitor, 31337 + i, 8);
    if (session.step(policy) == "Goto A_landmark") ++a_count;
  }
  const double expected_a = 0.4 * kSamples;
  const double expected_b = 0.6 * kSamples;
  const double chi2 =
      (a_count - expected_a) * (a_count - expected_a) / expected_a +
      (kSamples - a_count - expected_b) * (kSamples - a_count - expected_b) /
          expected_b;
  CHECK(chi2 < 10.83);  // df = 1, 0.999 quantile
}

TEST_CASE("identical seeds give identical plans") {
  env::Environment e = env::random_environment(env::DomainKind::navigation, 3);
  ltl::Formula spec = ltl::parse_infix("F red_room & (!red_room U blue_room)");
  UniformPolicy policy;
  env::Plan a = run(e, "task", spec, policy, 99, 64);
  env::Plan b = run(e, "task", spec, policy, 99, 64);
  CHECK(a == b);
  env::Plan c = run(e, "task", spec, policy, 100, 64);
  // Different seeds are allowed to differ (and here do).
  CHECK(a != c);
}

TEST_CASE("a policy proposing non-candidate actions is rejected") {
  env::Environment e = two_room_nav();
  automaton::TraceAutomaton monitor =
      automaton::compile(ltl::Formula::make_true(), e.propositions(),
                         automaton::AlphabetMode::one_hot);
  ScriptedPolicy policy(std::vector<std::string>{"Goto attic"});
  DecodingSession session(e, "", monitor, 1, 8);
  try {
    session.step(policy);
    FAIL("expected invalid-action");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::invalid_action);
  }
}

TEST_CASE("a scripted policy with only invalid choices hits a dead end") {
  env::Environment e = two_room_nav();
  ltl::Formula spec = ltl::parse_infix("G !A_landmark");
  ScriptedPolicy policy(std::vector<std::string>{"Goto A_landmark"});
  try {
    run(e, "", spec, policy, 1, 8);
    FAIL("expected dead-end");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::dead_end);
  }
}

TEST_CASE("the step limit is enforced") {
  env::Environment e = two_room_nav();
  // The policy never proposes DONE, so the session cannot finish.
  ScriptedPolicy policy(std::vector<std::vector<WeightedAction>>(
      8, {{"Goto A_landmark", 1.0}}));
  try {
    run(e, "", ltl::parse_infix("F B_landmark"), policy, 1, 5);
    FAIL("expected step-limit");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::step_limit);
  }
  CHECK(default_max_steps(e) == 8);  // 4 x 2 entities
}

TEST_CASE("unconstrained runs commit spec-violating actions") {
  env::Environment e = two_room_nav();
  ltl::Formula spec = ltl::parse_infix("G !A_landmark & F B_landmark");
  ScriptedPolicy policy(
      std::vector<std::string>{"Goto A_landmark", "Goto B_landmark", "DONE"});
  env::Plan plan = run_unconstrained(e, "", spec, policy, 1, 8);
  REQUIRE(plan.size() == 3);
  CHECK(plan[0] == "Goto A_landmark");
  CHECK_FALSE(ltl::evaluate(spec, env::simulate(e, plan).trace));
}

TEST_CASE("subprocess policies speak the line protocol") {
  // A tiny shell fixture: for every request line, emit fixed weights.
  const std::string script = "decoding_policy_fixture.sh";
  {
    std::ofstream out(script);
    out << "#!/bin/sh\n"
           "while read line; do\n"
           "  printf '{\"weights\":[{\"action\":\"Goto room\",\"weight\":3},"
           "{\"action\":\"DONE\",\"weight\":1}]}\\n'\n"
           "done\n";
  }
  SubprocessPolicy policy({"/bin/sh", script});
  env::Environment e = one_room_nav();
  env::Plan plan = run(e, "visit the room", ltl::parse_infix("F room"),
                       policy, 11, 32);
  REQUIRE(plan.size() >= 2);
  CHECK(plan.front() == "Goto room");
  CHECK(plan.back() == "DONE");
  CHECK(ltl::evaluate(ltl::parse_infix("F room"),
                      env::simulate(e, plan).trace));
  std::remove(script.c_str());
}

TEST_CASE("malformed subprocess replies are protocol errors") {
  env::Environment e = one_room_nav();
  automaton::TraceAutomaton monitor =
      automaton::compile(ltl::Formula::make_true(), e.propositions(),
                         automaton::AlphabetMode::one_hot);

  // /bin/cat echoes the request back: valid JSON, but no "weights" field.
  SubprocessPolicy echo({"/bin/cat"});
  DecodingSession session(e, "", monitor, 1, 8);
  try {
    session.step(echo);
    FAIL("expected protocol-error");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::protocol_error);
  }

  // A child that exits immediately yields an empty reply.
  SubprocessPolicy dead({"/bin/true"});
  DecodingSession session2(e, "", monitor, 1, 8);
  try {
    session2.step(dead);
    FAIL("expected protocol-error");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::protocol_error);
  }
}
