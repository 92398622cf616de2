#include "zkfl/zkfl.h"

#include <cstdio>
#include <cstring>
#include <string>

#include "zkfl/attacks.hpp"
#include "zkfl/encoding.hpp"
#include "zkfl/experiment.hpp"

namespace {

thread_local std::string g_last_error = "ok";

zkfl_status map_code(zkfl::ErrorCode code) {
    using zkfl::ErrorCode;
    switch (code) {
        case ErrorCode::ConfigInvalid:
        case ErrorCode::ConfigMismatch:
        case ErrorCode::ParseError:
        case ErrorCode::UnknownScenario: return ZKFL_ERR_CONFIG;
        case ErrorCode::IoError: return ZKFL_ERR_IO;
        case ErrorCode::RoundFailedQuorum:
        case ErrorCode::RoundNotFinalized: return ZKFL_ERR_ROUND_FAILED;
        case ErrorCode::InvalidDimension:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::NonFiniteValue:
        case ErrorCode::OverflowRisk:
        case ErrorCode::ShapeError: return ZKFL_ERR_INVALID_ARG;
        default: return ZKFL_ERR_INTERNAL;
    }
}

template <typename Fn>
zkfl_status guarded(Fn&& fn) {
    try {
        zkfl_status s = fn();
        if (s == ZKFL_OK) g_last_error = "ok";
        return s;
    } catch (const zkfl::Error& e) {
        g_last_error = e.what();
        return map_code(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return ZKFL_ERR_INTERNAL;
    }
}

zkfl_status fail(zkfl_status s, const char* msg) {
    g_last_error = msg;
    return s;
}

}  // namespace

struct zkfl_params {
    zkfl::PedersenParams inner;
};

extern "C" {

const char* zkfl_version(void) { return "zkfl 0.1.0"; }

const char* zkfl_last_error(void) { return g_last_error.c_str(); }

zkfl_status zkfl_run(const char* config_path, const char* out_dir,
                     const zkfl_run_options* options, uint32_t* rounds_finalized) {
    if (!config_path || !out_dir) return fail(ZKFL_ERR_INVALID_ARG, "config_path and out_dir required");
    return guarded([&]() -> zkfl_status {
        zkfl::ExperimentConfig cfg = zkfl::ExperimentConfig::from_file(config_path);
        if (options) {
            if (options->seed >= 0) cfg.seed = static_cast<std::uint64_t>(options->seed);
            if (options->workers > 0) cfg.workers = static_cast<std::uint32_t>(options->workers);
            if (options->rounds > 0) cfg.rounds = static_cast<std::uint32_t>(options->rounds);
            if (options->backend) {
                std::string b = options->backend;
                if (b == "transparent")
                    cfg.backend = zkfl::ProofBackend::Transparent;
                else if (b == "mock")
                    cfg.backend = zkfl::ProofBackend::Mock;
                else
                    return fail(ZKFL_ERR_CONFIG, "backend must be 'transparent' or 'mock'");
            }
            cfg.validate();
        }
        zkfl::ExperimentResult res = zkfl::run_experiment_to_dir(cfg, out_dir);
        if (rounds_finalized) *rounds_finalized = res.rounds_finalized;
        if (!res.all_rounds_finalized) return fail(ZKFL_ERR_ROUND_FAILED, res.failure.c_str());
        return ZKFL_OK;
    });
}

zkfl_status zkfl_attack(const char* config_path, const char* report_path, int self_test,
                        int print_table, int* suite_complete) {
    if (!config_path) return fail(ZKFL_ERR_INVALID_ARG, "config_path required");
    return guarded([&]() -> zkfl_status {
        zkfl::ExperimentConfig cfg = zkfl::ExperimentConfig::from_file(config_path);
        if (self_test) cfg.attack.self_test = true;
        zkfl::AttackSuiteResult suite = zkfl::run_all(cfg);
        if (report_path) {
            std::string json = zkfl::reports_json(suite);
            zkfl::write_file(report_path, zkfl::to_bytes(json));
        }
        if (print_table) std::fputs(zkfl::reports_table(suite).c_str(), stdout);
        if (suite_complete) *suite_complete = suite.complete ? 1 : 0;
        if (!suite.complete)
            return fail(ZKFL_ERR_DETECTION, "at least one scenario mismatched its expected outcome");
        return ZKFL_OK;
    });
}

zkfl_status zkfl_audit(const char* chain_path, const char* genesis_json_path, int* chain_valid,
                       uint64_t* first_bad_height) {
    if (!chain_path || !genesis_json_path)
        return fail(ZKFL_ERR_INVALID_ARG, "chain_path and genesis_json_path required");
    return guarded([&]() -> zkfl_status {
        zkfl::AuditReport report = zkfl::audit_chain_file(chain_path, genesis_json_path);
        if (chain_valid) *chain_valid = report.chain_valid ? 1 : 0;
        if (first_bad_height)
            *first_bad_height = report.first_bad_height ? *report.first_bad_height : UINT64_MAX;
        if (!report.chain_valid) {
            std::string msg = "chain invalid";
            if (!report.findings.empty()) msg += ": " + report.findings.front().description;
            return fail(ZKFL_ERR_AUDIT, msg.c_str());
        }
        return ZKFL_OK;
    });
}

zkfl_status zkfl_bench(const char* config_path, const char* csv_path) {
    if (!csv_path) return fail(ZKFL_ERR_INVALID_ARG, "csv_path required");
    return guarded([&]() -> zkfl_status {
        zkfl::BenchConfig cfg;
        if (config_path) {
            zkfl::Bytes data = zkfl::read_file(config_path);
            cfg = zkfl::BenchConfig::from_json(std::string(data.begin(), data.end()));
        }
        zkfl::BenchResult result = zkfl::run_bench(cfg);
        zkfl::write_file(csv_path, zkfl::to_bytes(zkfl::bench_csv(result)));
        return ZKFL_OK;
    });
}

zkfl_status zkfl_params_create(uint32_t dimension, const uint8_t* seed, size_t seed_len,
                               zkfl_params_t** out) {
    if (!out || (!seed && seed_len > 0)) return fail(ZKFL_ERR_INVALID_ARG, "bad arguments");
    *out = nullptr;
    return guarded([&]() -> zkfl_status {
        auto* handle = new zkfl_params{zkfl::setup_params(
            dimension, std::span<const std::uint8_t>(seed, seed_len))};
        *out = handle;
        return ZKFL_OK;
    });
}

void zkfl_params_destroy(zkfl_params_t* params) { delete params; }

zkfl_status zkfl_commit(const zkfl_params_t* params, const int64_t* values, size_t len,
                        const uint8_t blinding[32], uint8_t commitment[32]) {
    if (!params || !blinding || !commitment || (!values && len > 0))
        return fail(ZKFL_ERR_INVALID_ARG, "bad arguments");
    return guarded([&]() -> zkfl_status {
        std::vector<zkfl::Scalar> encoded(len);
        for (size_t i = 0; i < len; ++i) encoded[i] = zkfl::encode_scalar(values[i]);
        zkfl::Scalar r;
        std::memcpy(r.bytes.data(), blinding, 32);
        zkfl::Commitment c = zkfl::commit_vector(params->inner, encoded, r);
        std::memcpy(commitment, c.point.bytes.data(), 32);
        return ZKFL_OK;
    });
}

zkfl_status zkfl_verify_opening(const zkfl_params_t* params, const uint8_t commitment[32],
                                const int64_t* values, size_t len, const uint8_t blinding[32],
                                int* valid) {
    if (!params || !commitment || !blinding || !valid || (!values && len > 0))
        return fail(ZKFL_ERR_INVALID_ARG, "bad arguments");
    return guarded([&]() -> zkfl_status {
        std::vector<zkfl::Scalar> encoded(len);
        for (size_t i = 0; i < len; ++i) encoded[i] = zkfl::encode_scalar(values[i]);
        zkfl::Scalar r;
        std::memcpy(r.bytes.data(), blinding, 32);
        zkfl::Commitment c;
        std::memcpy(c.point.bytes.data(), commitment, 32);
        *valid = zkfl::verify_opening(params->inner, c, encoded, r) ? 1 : 0;
        return ZKFL_OK;
    });
}

}  // extern "C"
