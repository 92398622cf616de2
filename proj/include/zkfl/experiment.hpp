#pragma once

#include <string>
#include <vector>

#include "zkfl/ledger.hpp"

namespace zkfl {

struct AttackSuiteConfig {
    std::vector<std::string> scenarios;  // empty = full default set
    std::uint32_t repetitions = 1;
    bool self_test = false;  // deliberately disable one defense to check the harness fails
};

struct ExperimentConfig {
    std::uint32_t schema_version = 1;

    // federation
    std::uint32_t num_sites = 8;
    std::uint32_t per_site = 64;
    std::uint32_t feature_dim = 127;
    double skew = 0.3;
    std::uint64_t seed = 1;

    // model
    ModelKind model_kind = ModelKind::LogisticRegression;
    std::uint32_t hidden_units = 8;

    // training
    TrainConfig training;

    // policy
    AggregationPolicy policy{std::uint64_t(64) << 16, 4, 1000};

    // encoding
    std::uint32_t fractional_bits = 16;
    double clamp_magnitude = 8.0;

    ProofBackend backend = ProofBackend::Transparent;
    double mock_time_scale = 1.0;
    std::uint32_t rounds = 20;
    std::uint32_t workers = 1;
    std::uint32_t holdout_size = 2000;

    AttackSuiteConfig attack;

    ModelSpec model_spec() const;
    FixedPointConfig fixed_point() const;
    void validate() const;

    static ExperimentConfig from_json(const std::string& text);
    static ExperimentConfig from_file(const std::string& path);
    std::string to_json() const;
};

struct RoundMetrics {
    std::uint64_t round_t = 0;
    double accuracy = 0;
    double auc = 0;
    bool auc_defined = false;
    double prove_ms = 0;
    double verify_ms = 0;
    std::size_t proof_bytes = 0;
    std::uint64_t ledger_txs = 0;
    std::uint64_t finality_ticks = 0;
    double parity_gap_l1 = 0;  // vs float aggregation of the same round's updates
};

struct ExperimentResult {
    bool all_rounds_finalized = false;
    std::string failure;
    std::uint32_t rounds_finalized = 0;
    std::vector<RoundMetrics> metrics;
    double final_accuracy = 0;
    double shadow_accuracy = 0;  // seed-matched plain FedAvg run
    ModelParams final_model;
    ModelParams shadow_model;
    Bytes chain;
    GenesisConfig genesis;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Runs the experiment and writes chain, genesis, metrics CSV, models, and a
/// manifest with output hashes into out_dir. Wall-clock timings go to a
/// separate timings file so the deterministic artifacts stay byte-reproducible.
ExperimentResult run_experiment_to_dir(const ExperimentConfig& cfg, const std::string& out_dir);

std::string metrics_csv(const std::vector<RoundMetrics>& rows, ProofBackend backend);

struct BenchRow {
    ProofBackend backend = ProofBackend::Transparent;
    std::uint32_t dimension = 0;
    std::uint32_t clients = 0;
    double prove_ms = 0;
    double verify_ms = 0;
    std::size_t proof_bytes = 0;
    bool prove_replayed = false;  // mock backend figures are replayed, not measured
};

struct BenchConfig {
    std::vector<std::uint32_t> dimensions = {64, 256, 1024, 4096};
    std::vector<std::uint32_t> clients = {2, 8, 16};
    std::vector<ProofBackend> backends = {ProofBackend::Transparent, ProofBackend::Mock};
    double mock_time_scale = 1.0;
    std::uint64_t seed = 42;
    std::uint32_t ledger_tps_txs = 2000;

    static BenchConfig from_json(const std::string& text);
};

struct BenchResult {
    std::vector<BenchRow> rows;
    ThroughputReport ledger;
};

BenchResult run_bench(const BenchConfig& cfg);
std::string bench_csv(const BenchResult& result);

/// One synthetic verified round without any model training; the building
/// block for bench sweeps and soundness trials.
struct SyntheticRound {
    PedersenParams params;
    AggregationStatement statement;
    AggregationProof proof;
    Attestation attestation;
    RegistrySnapshot registry;
    FixedPointConfig fp;
    AggregationPolicy policy;
    GroupElement enclave_sig_key;
    RoundHeader header;
    double prove_ms = 0;
};

SyntheticRound make_synthetic_round(std::uint32_t dimension, std::uint32_t clients,
                                    ProofBackend backend, std::uint64_t seed,
                                    double mock_time_scale = 1.0);

bool verify_synthetic_round(const SyntheticRound& round);

}  // namespace zkfl
