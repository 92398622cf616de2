#include <string>

#include "doctest.h"
#include "zkfl/attacks.hpp"

using namespace zkfl;

namespace {

ExperimentConfig small_federation() {
    ExperimentConfig cfg;
    cfg.num_sites = 6;
    cfg.per_site = 24;
    cfg.feature_dim = 12;
    cfg.skew = 0.3;
    cfg.seed = 7;
    cfg.policy.quorum = 3;
    cfg.training.local_epochs = 1;
    cfg.rounds = 2;
    cfg.holdout_size = 64;
    return cfg;
}

DetectionReport run(ScenarioKind kind, bool disable_defense = false) {
    AttackScenario s;
    s.kind = kind;
    s.rng_seed = 11;
    s.disable_defense = disable_defense;
    return run_scenario(s, small_federation());
}

}  // namespace

TEST_CASE("scenario names round-trip") {
    for (ScenarioKind k : required_scenarios()) CHECK(scenario_from_name(scenario_name(k)) == k);
    CHECK(scenario_from_name("honest-baseline") == ScenarioKind::HonestBaseline);
    CHECK_THROWS_AS(scenario_from_name("frobnicate"), Error);
    CHECK(required_scenarios().size() == 9);
}

TEST_CASE("honest baseline raises no flags") {
    DetectionReport r = run(ScenarioKind::HonestBaseline);
    CHECK(!r.detected);
    CHECK(!r.expected_detected);
    CHECK(!r.honest_side_effects);
    CHECK(r.as_expected());
}

TEST_CASE("each required scenario is detected at its designated layer") {
    for (ScenarioKind k : required_scenarios()) {
        CAPTURE(scenario_name(k));
        DetectionReport r = run(k);
        CHECK(r.detected);
        CHECK(r.expected_detected);
        CHECK(!r.honest_side_effects);
        CHECK(r.detecting_layer == designated_layer(k));
        CHECK(r.as_expected());
    }
}

TEST_CASE("semantic poisoning passes every integrity layer, by design") {
    DetectionReport r = run(ScenarioKind::SemanticPoison);
    CHECK(!r.detected);
    CHECK(!r.expected_detected);
    CHECK(r.as_expected());
}

TEST_CASE("disabling a defense turns its scenario red") {
    for (ScenarioKind k : {ScenarioKind::TamperDelta, ScenarioKind::NormPoison,
                           ScenarioKind::SybilUnregistered, ScenarioKind::LedgerMutation,
                           ScenarioKind::EquivocateModel}) {
        CAPTURE(scenario_name(k));
        DetectionReport r = run(k, /*disable_defense=*/true);
        CHECK(!r.detected);
        CHECK(r.expected_detected);
        CHECK(!r.as_expected());
    }
}

TEST_CASE("determinism: the same seed reproduces the same report") {
    DetectionReport a = run(ScenarioKind::TamperDelta);
    DetectionReport b = run(ScenarioKind::TamperDelta);
    CHECK(a.detected == b.detected);
    CHECK(a.evidence == b.evidence);
    CHECK(a.detecting_layer == b.detecting_layer);
}

TEST_CASE("run_all covers baseline, the nine scenarios, and the control") {
    ExperimentConfig cfg = small_federation();
    AttackSuiteResult suite = run_all(cfg);
    CHECK(suite.reports.size() == 11);
    CHECK(suite.complete);
    CHECK(suite.reports.front().kind == ScenarioKind::HonestBaseline);
    CHECK(suite.reports.back().kind == ScenarioKind::SemanticPoison);

    std::string json = reports_json(suite);
    CHECK(json.find("\"complete\": true") != std::string::npos);
    std::string table = reports_table(suite);
    CHECK(table.find("suite: complete") != std::string::npos);
    CHECK(table.find("MISMATCH") == std::string::npos);
}

TEST_CASE("self-test mode makes the suite fail loudly") {
    ExperimentConfig cfg = small_federation();
    cfg.attack.self_test = true;
    AttackSuiteResult suite = run_all(cfg);
    CHECK(!suite.complete);
}

TEST_CASE("scenario subset selection honors the config list") {
    ExperimentConfig cfg = small_federation();
    cfg.attack.scenarios = {"sybil-unregistered", "norm-poison"};
    AttackSuiteResult suite = run_all(cfg);
    CHECK(suite.reports.size() == 2);
    CHECK(suite.complete);
}
