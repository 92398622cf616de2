#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zkfl/group.hpp"

namespace zkfl {

enum class ModelKind : std::uint8_t { LogisticRegression = 0, Mlp = 1 };

/// Model family and shape. `dimension()` is the flat parameter count.
struct ModelSpec {
    ModelKind kind = ModelKind::LogisticRegression;
    std::uint32_t feature_dim = 0;
    std::uint32_t hidden_units = 8;  // MLP only

    std::uint32_t dimension() const;

    Bytes serialize() const;
    static ModelSpec deserialize(std::span<const std::uint8_t> data);
};

struct ModelParams {
    std::vector<double> weights;

    Bytes serialize() const;
    static ModelParams deserialize(std::span<const std::uint8_t> data);
    Digest hash() const;
};

struct Dataset {
    std::vector<std::vector<double>> features;
    std::vector<std::uint8_t> labels;
    std::string site_id;

    std::size_t size() const { return labels.size(); }
    Bytes serialize() const;
    static Dataset deserialize(std::span<const std::uint8_t> data);
};

struct TrainConfig {
    double learning_rate = 0.1;
    std::uint32_t local_epochs = 1;
    std::uint32_t batch_size = 32;
    std::uint64_t rng_seed = 0;
    std::optional<double> clip_norm;
};

struct AggregationPolicy {
    std::uint64_t norm_bound = 0;  // B, in quantized units; enforce ||q||^2 <= B^2
    std::uint32_t quorum = 1;
    std::uint64_t round_timeout_ticks = 1000;

    Bytes serialize() const;
    static AggregationPolicy deserialize(std::span<const std::uint8_t> data);
    Digest policy_id() const;
};

struct Metrics {
    double accuracy = 0;
    double loss = 0;
    std::optional<double> auc;  // empty when ranking is degenerate
};

/// w_i = LocalTrain(W, D) - W. Deterministic given cfg.rng_seed; optional
/// L2 clipping applied to the delta.
std::vector<double> local_train(const ModelSpec& spec, const ModelParams& global,
                                const Dataset& data, const TrainConfig& cfg);

/// Mean loss and flat analytic gradient over the given rows.
std::pair<double, std::vector<double>> loss_and_grad(const ModelSpec& spec,
                                                     std::span<const double> weights,
                                                     const Dataset& data,
                                                     std::span<const std::uint32_t> rows);

double predict(const ModelSpec& spec, std::span<const double> weights,
               std::span<const double> features);

std::vector<double> fedavg_aggregate(std::span<const std::vector<double>> updates,
                                     std::span<const std::uint64_t> weights);

ModelParams apply_update(const ModelParams& model, std::span<const double> delta);

Metrics evaluate(const ModelSpec& spec, const ModelParams& model, const Dataset& data);

std::vector<Dataset> make_federation(std::uint64_t seed, std::uint32_t num_sites,
                                     std::uint32_t per_site, std::uint32_t feature_dim,
                                     double skew);

/// Held-out test set drawn from the same global distribution.
Dataset make_holdout(std::uint64_t seed, std::uint32_t n, std::uint32_t feature_dim);

}  // namespace zkfl
