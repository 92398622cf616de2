#include "zkfl/flcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace zkfl {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double clamped_log(double p) { return std::log(std::max(p, 1e-12)); }

/// Deterministic standard normals via Box-Muller over the project RNG.
class Gaussian {
public:
    explicit Gaussian(Rng rng) : rng_(std::move(rng)) {}

    double uniform() {
        return (static_cast<double>(rng_.next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    Rng& rng() { return rng_; }

private:
    Rng rng_;
    double spare_ = 0;
    bool have_spare_ = false;
};

void check_finite(std::span<const double> v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteValue, what);
}

}  // namespace

std::uint32_t ModelSpec::dimension() const {
    switch (kind) {
        case ModelKind::LogisticRegression:
            return feature_dim + 1;
        case ModelKind::Mlp:
            return hidden_units * feature_dim + 2 * hidden_units + 1;
    }
    throw Error(ErrorCode::ConfigInvalid, "unknown model kind");
}

Bytes ModelSpec::serialize() const {
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(kind));
    w.u32(feature_dim);
    w.u32(hidden_units);
    return w.take();
}

ModelSpec ModelSpec::deserialize(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    ModelSpec s;
    s.kind = static_cast<ModelKind>(r.u8());
    s.feature_dim = r.u32();
    s.hidden_units = r.u32();
    r.expect_end();
    return s;
}

Bytes ModelParams::serialize() const {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(weights.size()));
    for (double v : weights) w.f64(v);
    return w.take();
}

ModelParams ModelParams::deserialize(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    ModelParams m;
    std::uint32_t n = r.u32();
    m.weights.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) m.weights.push_back(r.f64());
    r.expect_end();
    return m;
}

Digest ModelParams::hash() const { return hash_commit(serialize(), {}, domain::kModelHash); }

Bytes Dataset::serialize() const {
    ByteWriter w;
    w.str(site_id);
    w.u32(static_cast<std::uint32_t>(features.size()));
    w.u32(features.empty() ? 0 : static_cast<std::uint32_t>(features[0].size()));
    for (const auto& row : features)
        for (double v : row) w.f64(v);
    for (auto y : labels) w.u8(y);
    return w.take();
}

Dataset Dataset::deserialize(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    Dataset d;
    d.site_id = r.str();
    std::uint32_t n = r.u32();
    std::uint32_t k = r.u32();
    d.features.assign(n, std::vector<double>(k));
    for (auto& row : d.features)
        for (auto& v : row) v = r.f64();
    d.labels.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) d.labels.push_back(r.u8());
    r.expect_end();
    return d;
}

Bytes AggregationPolicy::serialize() const {
    ByteWriter w;
    w.u64(norm_bound);
    w.u32(quorum);
    w.u64(round_timeout_ticks);
    return w.take();
}

AggregationPolicy AggregationPolicy::deserialize(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    AggregationPolicy p;
    p.norm_bound = r.u64();
    p.quorum = r.u32();
    p.round_timeout_ticks = r.u64();
    r.expect_end();
    if (p.quorum < 1) throw Error(ErrorCode::ConfigInvalid, "quorum must be >= 1");
    if (p.norm_bound == 0) throw Error(ErrorCode::ConfigInvalid, "norm bound must be > 0");
    return p;
}

Digest AggregationPolicy::policy_id() const { return hash_commit(serialize(), {}, domain::kPolicyId); }

double predict(const ModelSpec& spec, std::span<const double> weights,
               std::span<const double> features) {
    const std::uint32_t k = spec.feature_dim;
    if (features.size() != k) throw Error(ErrorCode::ShapeError, "feature dimension mismatch");
    switch (spec.kind) {
        case ModelKind::LogisticRegression: {
            double z = weights[k];
            for (std::uint32_t j = 0; j < k; ++j) z += weights[j] * features[j];
            return sigmoid(z);
        }
        case ModelKind::Mlp: {
            const std::uint32_t h = spec.hidden_units;
            const double* w1 = weights.data();           // h x k
            const double* b1 = w1 + std::size_t(h) * k;  // h
            const double* w2 = b1 + h;                   // h
            const double b2 = w2[h];
            double z = b2;
            for (std::uint32_t i = 0; i < h; ++i) {
                double a = b1[i];
                for (std::uint32_t j = 0; j < k; ++j) a += w1[std::size_t(i) * k + j] * features[j];
                z += w2[i] * std::tanh(a);
            }
            return sigmoid(z);
        }
    }
    throw Error(ErrorCode::ConfigInvalid, "unknown model kind");
}

std::pair<double, std::vector<double>> loss_and_grad(const ModelSpec& spec,
                                                     std::span<const double> weights,
                                                     const Dataset& data,
                                                     std::span<const std::uint32_t> rows) {
    const std::uint32_t k = spec.feature_dim;
    const std::uint32_t d = spec.dimension();
    if (weights.size() != d) throw Error(ErrorCode::ShapeError, "weight dimension mismatch");
    std::vector<double> grad(d, 0.0);
    double loss = 0.0;
    const double inv_n = 1.0 / static_cast<double>(rows.size());

    for (auto row : rows) {
        if (row >= data.size()) throw Error(ErrorCode::ShapeError, "row index out of range");
        const auto& x = data.features[row];
        const double y = static_cast<double>(data.labels[row]);
        switch (spec.kind) {
            case ModelKind::LogisticRegression: {
                double p = predict(spec, weights, x);
                loss += -(y * clamped_log(p) + (1 - y) * clamped_log(1 - p));
                double e = (p - y) * inv_n;
                for (std::uint32_t j = 0; j < k; ++j) grad[j] += e * x[j];
                grad[k] += e;
                break;
            }
            case ModelKind::Mlp: {
                const std::uint32_t h = spec.hidden_units;
                const double* w1 = weights.data();
                const double* b1 = w1 + std::size_t(h) * k;
                const double* w2 = b1 + h;
                const double b2 = w2[h];
                std::vector<double> act(h);
                double z = b2;
                for (std::uint32_t i = 0; i < h; ++i) {
                    double a = b1[i];
                    for (std::uint32_t j = 0; j < k; ++j) a += w1[std::size_t(i) * k + j] * x[j];
                    act[i] = std::tanh(a);
                    z += w2[i] * act[i];
                }
                double p = sigmoid(z);
                loss += -(y * clamped_log(p) + (1 - y) * clamped_log(1 - p));
                double e = (p - y) * inv_n;
                double* g1 = grad.data();
                double* gb1 = g1 + std::size_t(h) * k;
                double* g2 = gb1 + h;
                for (std::uint32_t i = 0; i < h; ++i) {
                    g2[i] += e * act[i];
                    double back = e * w2[i] * (1.0 - act[i] * act[i]);
                    gb1[i] += back;
                    for (std::uint32_t j = 0; j < k; ++j) g1[std::size_t(i) * k + j] += back * x[j];
                }
                g2[h] += e;
                break;
            }
        }
    }
    return {loss * inv_n, std::move(grad)};
}

std::vector<double> local_train(const ModelSpec& spec, const ModelParams& global,
                                const Dataset& data, const TrainConfig& cfg) {
    const std::uint32_t d = spec.dimension();
    if (global.weights.size() != d) throw Error(ErrorCode::ShapeError, "model dimension mismatch");
    if (data.size() == 0) throw Error(ErrorCode::ShapeError, "empty dataset");
    check_finite(global.weights, "non-finite model weight");

    std::vector<double> w = global.weights;
    std::vector<std::uint32_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(cfg.rng_seed);

    const std::uint32_t batch = std::max<std::uint32_t>(1, cfg.batch_size);
    for (std::uint32_t epoch = 0; epoch < cfg.local_epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.next_u64() % i]);
        for (std::size_t start = 0; start < order.size(); start += batch) {
            std::size_t len = std::min<std::size_t>(batch, order.size() - start);
            auto [loss, grad] = loss_and_grad(spec, w, data,
                                              std::span(order).subspan(start, len));
            (void)loss;
            for (std::uint32_t j = 0; j < d; ++j) w[j] -= cfg.learning_rate * grad[j];
        }
    }

    std::vector<double> delta(d);
    for (std::uint32_t j = 0; j < d; ++j) delta[j] = w[j] - global.weights[j];

    if (cfg.clip_norm) {
        double norm_sq = 0;
        for (double v : delta) norm_sq += v * v;
        double norm = std::sqrt(norm_sq);
        if (norm > *cfg.clip_norm && norm > 0) {
            double f = *cfg.clip_norm / norm;
            for (double& v : delta) v *= f;
        }
    }
    return delta;
}

std::vector<double> fedavg_aggregate(std::span<const std::vector<double>> updates,
                                     std::span<const std::uint64_t> weights) {
    if (updates.empty()) throw Error(ErrorCode::EmptyRound, "no updates to aggregate");
    if (updates.size() != weights.size())
        throw Error(ErrorCode::ShapeError, "updates/weights length mismatch");
    const std::size_t d = updates[0].size();
    double total = 0;
    for (auto n : weights) {
        if (n == 0) throw Error(ErrorCode::ShapeError, "weights must be positive");
        total += static_cast<double>(n);
    }
    std::vector<double> delta(d, 0.0);
    for (std::size_t i = 0; i < updates.size(); ++i) {
        if (updates[i].size() != d) throw Error(ErrorCode::ShapeError, "update dimension mismatch");
        const double a = static_cast<double>(weights[i]) / total;
        for (std::size_t j = 0; j < d; ++j) delta[j] += a * updates[i][j];
    }
    return delta;
}

ModelParams apply_update(const ModelParams& model, std::span<const double> delta) {
    if (model.weights.size() != delta.size())
        throw Error(ErrorCode::ShapeError, "delta dimension mismatch");
    ModelParams out = model;
    for (std::size_t j = 0; j < delta.size(); ++j) out.weights[j] += delta[j];
    return out;
}

Metrics evaluate(const ModelSpec& spec, const ModelParams& model, const Dataset& data) {
    Metrics m;
    const std::size_t n = data.size();
    if (n == 0) throw Error(ErrorCode::ShapeError, "empty dataset");
    std::vector<double> scores(n);
    std::size_t correct = 0, positives = 0;
    double loss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double p = predict(spec, model.weights, data.features[i]);
        scores[i] = p;
        double y = static_cast<double>(data.labels[i]);
        loss += -(y * clamped_log(p) + (1 - y) * clamped_log(1 - p));
        if ((p >= 0.5) == (data.labels[i] == 1)) ++correct;
        positives += data.labels[i];
    }
    m.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    m.loss = loss / static_cast<double>(n);

    const std::size_t negatives = n - positives;
    bool all_same = std::all_of(scores.begin(), scores.end(),
                                [&](double s) { return s == scores[0]; });
    if (positives == 0 || negatives == 0 || all_same) {
        m.auc = std::nullopt;  // ranking degenerate
        return m;
    }
    // Mann-Whitney rank statistic with midrank ties.
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double rank_sum_pos = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
        double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t)
            if (data.labels[idx[t]] == 1) rank_sum_pos += midrank;
        i = j;
    }
    double np = static_cast<double>(positives), nn = static_cast<double>(negatives);
    m.auc = (rank_sum_pos - np * (np + 1) / 2.0) / (np * nn);
    return m;
}

namespace {

Dataset sample_site(Gaussian& g, const std::vector<double>& direction, double mean_shift,
                    std::uint32_t n, std::uint32_t k, double label_prob, std::string site_id) {
    Dataset d;
    d.site_id = std::move(site_id);
    d.features.reserve(n);
    d.labels.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        std::uint8_t y = g.uniform() < label_prob ? 1 : 0;
        double sign = y == 1 ? 1.0 : -1.0;
        std::vector<double> x(k);
        for (std::uint32_t j = 0; j < k; ++j)
            x[j] = sign * mean_shift * direction[j] + g.normal();
        d.features.push_back(std::move(x));
        d.labels.push_back(y);
    }
    return d;
}

std::vector<double> task_direction(std::uint64_t seed, std::uint32_t k) {
    Gaussian g(Rng(seed).fork("task-direction"));
    std::vector<double> u(k);
    double norm_sq = 0;
    for (auto& v : u) {
        v = g.normal();
        norm_sq += v * v;
    }
    double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& v : u) v *= inv;
    return u;
}

constexpr double kMeanShift = 2.0;

}  // namespace

std::vector<Dataset> make_federation(std::uint64_t seed, std::uint32_t num_sites,
                                     std::uint32_t per_site, std::uint32_t feature_dim,
                                     double skew) {
    if (num_sites == 0) throw Error(ErrorCode::ConfigInvalid, "need at least one site");
    if (skew < 0 || skew > 1) throw Error(ErrorCode::ConfigInvalid, "skew must be in [0,1]");
    auto direction = task_direction(seed, feature_dim);
    std::vector<Dataset> sites;
    sites.reserve(num_sites);
    for (std::uint32_t i = 0; i < num_sites; ++i) {
        // label-ratio divergence alternates around 0.5; skew 1 pins each site
        // to a single class.
        double sign = (i % 2 == 0) ? 1.0 : -1.0;
        double p = std::clamp(0.5 + 0.5 * skew * sign, 0.0, 1.0);
        Gaussian g(Rng(seed).fork("site-" + std::to_string(i)));
        sites.push_back(sample_site(g, direction, kMeanShift, per_site, feature_dim, p,
                                    "site-" + std::to_string(i)));
    }
    return sites;
}

Dataset make_holdout(std::uint64_t seed, std::uint32_t n, std::uint32_t feature_dim) {
    auto direction = task_direction(seed, feature_dim);
    Gaussian g(Rng(seed).fork("holdout"));
    return sample_site(g, direction, kMeanShift, n, feature_dim, 0.5, "holdout");
}

}  // namespace zkfl
