#pragma once

#include "zkfl/experiment.hpp"

namespace zkfl {

enum class ScenarioKind : std::uint8_t {
    TamperDelta,
    ExcludeClient,
    InjectFabricated,
    ReplayUpdate,
    SybilUnregistered,
    DuplicateSubmission,
    NormPoison,
    EquivocateModel,
    LedgerMutation,
    SemanticPoison,   // control: valid-norm poisoning is NOT detectable here
    HonestBaseline,
};

const char* scenario_name(ScenarioKind kind);
ScenarioKind scenario_from_name(const std::string& name);

/// The nine required threat-matrix scenarios, in matrix order.
std::vector<ScenarioKind> required_scenarios();

enum class DetectionLayer : std::uint8_t {
    None,
    EnclaveIngest,
    ContractVerify,
    ClientDistributionCheck,
    Auditor,
};

const char* detection_layer_name(DetectionLayer layer);

/// Layer each scenario must be caught at, per the threat matrix.
DetectionLayer designated_layer(ScenarioKind kind);

struct AttackScenario {
    ScenarioKind kind = ScenarioKind::HonestBaseline;
    std::uint64_t rng_seed = 0;
    bool disable_defense = false;  // self-test: skip the defense, expect a red report
};

struct DetectionReport {
    std::string scenario;
    ScenarioKind kind = ScenarioKind::HonestBaseline;
    bool detected = false;
    bool expected_detected = false;
    DetectionLayer detecting_layer = DetectionLayer::None;
    std::string evidence;
    bool honest_side_effects = false;  // any rejection hit an honest participant
    bool as_expected() const { return detected == expected_detected && !honest_side_effects; }
};

DetectionReport run_scenario(const AttackScenario& scenario, const ExperimentConfig& federation);

struct AttackSuiteResult {
    std::vector<DetectionReport> reports;
    bool complete = false;  // every report matched its expected outcome and layer
};

AttackSuiteResult run_all(const ExperimentConfig& federation);

std::string reports_json(const AttackSuiteResult& result);
std::string reports_table(const AttackSuiteResult& result);

}  // namespace zkfl
