#include <cmath>

#include "doctest.h"
#include "zkfl/flcore.hpp"

using namespace zkfl;

namespace {

ModelSpec logreg(std::uint32_t k) {
    ModelSpec s;
    s.kind = ModelKind::LogisticRegression;
    s.feature_dim = k;
    return s;
}

Dataset random_dataset(std::uint64_t seed, std::uint32_t n, std::uint32_t k) {
    Rng rng(seed);
    Dataset d;
    d.site_id = "test";
    for (std::uint32_t i = 0; i < n; ++i) {
        std::vector<double> row(k);
        for (auto& x : row) x = double(rng.next_u64() % 2001) / 1000.0 - 1.0;
        d.features.push_back(row);
        d.labels.push_back(rng.next_u64() & 1);
    }
    return d;
}

}  // namespace

TEST_CASE("model dimensions match their layouts") {
    CHECK(logreg(127).dimension() == 128);
    ModelSpec mlp;
    mlp.kind = ModelKind::Mlp;
    mlp.feature_dim = 10;
    mlp.hidden_units = 4;
    CHECK(mlp.dimension() == 4 * 10 + 2 * 4 + 1);
}

TEST_CASE("zero epochs produce a zero delta") {
    ModelSpec spec = logreg(3);
    ModelParams w{std::vector<double>(spec.dimension(), 0.25)};
    TrainConfig tc;
    tc.local_epochs = 0;
    auto delta = local_train(spec, w, random_dataset(1, 8, 3), tc);
    for (double v : delta) CHECK(v == 0.0);
}

TEST_CASE("training is deterministic under a fixed seed") {
    ModelSpec spec = logreg(5);
    ModelParams w{std::vector<double>(spec.dimension(), 0.0)};
    Dataset data = random_dataset(2, 32, 5);
    TrainConfig tc;
    tc.rng_seed = 42;
    tc.local_epochs = 3;
    CHECK(local_train(spec, w, data, tc) == local_train(spec, w, data, tc));
}

TEST_CASE("one full-batch step equals minus lr times the finite-difference gradient") {
    for (int kind = 0; kind < 2; ++kind) {
        ModelSpec spec;
        spec.feature_dim = 4;
        spec.hidden_units = 3;
        spec.kind = kind == 0 ? ModelKind::LogisticRegression : ModelKind::Mlp;
        Rng rng(kind + 10);
        ModelParams w{std::vector<double>(spec.dimension())};
        for (auto& x : w.weights) x = double(rng.next_u64() % 2001) / 1000.0 - 1.0;
        Dataset data = random_dataset(kind + 20, 16, 4);

        TrainConfig tc;
        tc.learning_rate = 0.05;
        tc.local_epochs = 1;
        tc.batch_size = 16;  // one full batch
        auto delta = local_train(spec, w, data, tc);

        std::vector<std::uint32_t> rows(data.size());
        for (std::uint32_t i = 0; i < rows.size(); ++i) rows[i] = i;
        const double h = 1e-6;
        for (std::uint32_t j = 0; j < spec.dimension(); ++j) {
            std::vector<double> wp = w.weights, wm = w.weights;
            wp[j] += h;
            wm[j] -= h;
            double fd = (loss_and_grad(spec, wp, data, rows).first -
                         loss_and_grad(spec, wm, data, rows).first) /
                        (2 * h);
            double expected = -tc.learning_rate * fd;
            CHECK(std::abs(delta[j] - expected) <=
                  1e-4 * std::max(1.0, std::abs(expected)) + 1e-9);
        }
    }
}

TEST_CASE("fedavg matches hand-computed weighted means") {
    std::vector<std::vector<double>> one = {{1.0, -2.0}};
    std::vector<std::uint64_t> n1 = {7};
    CHECK(fedavg_aggregate(one, n1) == one[0]);

    std::vector<std::vector<double>> same = {{0.5, 0.5}, {0.5, 0.5}};
    std::vector<std::uint64_t> n2 = {3, 11};
    CHECK(fedavg_aggregate(same, n2) == same[0]);

    std::vector<std::vector<double>> two = {{1.0, 0.0}, {0.0, 1.0}};
    std::vector<std::uint64_t> n3 = {1, 3};
    auto avg = fedavg_aggregate(two, n3);
    CHECK(avg[0] == doctest::Approx(0.25));
    CHECK(avg[1] == doctest::Approx(0.75));

    CHECK_THROWS_AS(fedavg_aggregate(std::vector<std::vector<double>>{}, std::vector<std::uint64_t>{}),
                    Error);
}

TEST_CASE("apply_update composes additively") {
    ModelParams w{{1.0, 2.0}};
    std::vector<double> zero = {0.0, 0.0};
    CHECK(apply_update(w, zero).weights == w.weights);

    std::vector<double> d1 = {0.5, -1.0};
    auto w2 = apply_update(w, d1);
    CHECK(w2.weights[0] == doctest::Approx(1.5));
    CHECK(w2.weights[1] == doctest::Approx(1.0));

    std::vector<double> d2 = {0.25, 0.25};
    std::vector<double> both = {0.75, -0.75};
    CHECK(apply_update(apply_update(w, d1), d2).weights == apply_update(w, both).weights);
}

TEST_CASE("evaluate scores a perfect separator perfectly") {
    ModelSpec spec = logreg(1);
    Dataset data;
    for (int i = 0; i < 50; ++i) {
        data.features.push_back({i < 25 ? -1.0 : 1.0});
        data.labels.push_back(i < 25 ? 0 : 1);
    }
    ModelParams w{{10.0, 0.0}};
    Metrics m = evaluate(spec, w, data);
    CHECK(m.accuracy == doctest::Approx(1.0));
    REQUIRE(m.auc.has_value());
    CHECK(*m.auc == doctest::Approx(1.0));
}

TEST_CASE("random scores give auc near one half") {
    ModelSpec spec = logreg(1);
    Rng rng(8);
    Dataset data;
    for (int i = 0; i < 10000; ++i) {
        data.features.push_back({double(rng.next_u64() % 20001) / 10000.0 - 1.0});
        data.labels.push_back(rng.next_u64() & 1);
    }
    ModelParams w{{1.0, 0.0}};
    Metrics m = evaluate(spec, w, data);
    REQUIRE(m.auc.has_value());
    CHECK(std::abs(*m.auc - 0.5) < 0.02);
}

TEST_CASE("degenerate rankings flag auc as undefined") {
    ModelSpec spec = logreg(1);
    Dataset data;
    for (int i = 0; i < 10; ++i) {
        data.features.push_back({1.0});
        data.labels.push_back(i & 1);
    }
    ModelParams w{{0.0, 0.0}};  // identical score everywhere
    CHECK(!evaluate(spec, w, data).auc.has_value());

    Dataset single;
    single.features.push_back({0.3});
    single.labels.push_back(1);
    CHECK(!evaluate(spec, w, single).auc.has_value());
}

TEST_CASE("federation skew controls per-site label balance") {
    const std::uint32_t sites = 8, per_site = 400, k = 6;

    auto ratios = [](const std::vector<Dataset>& f) {
        std::vector<double> out;
        for (const auto& d : f) {
            double pos = 0;
            for (auto y : d.labels) pos += y;
            out.push_back(pos / double(d.size()));
        }
        return out;
    };

    // skew 0: each site's label ratio within 3 sigma of one half
    auto flat = make_federation(3, sites, per_site, k, 0.0);
    double sigma = std::sqrt(0.25 / per_site);
    for (double r : ratios(flat)) CHECK(std::abs(r - 0.5) <= 3 * sigma);

    // skew 1: at least one site at least 90 percent single-class
    auto skewed = make_federation(3, sites, per_site, k, 1.0);
    bool extreme = false;
    for (double r : ratios(skewed))
        if (r >= 0.9 || r <= 0.1) extreme = true;
    CHECK(extreme);

    // determinism
    auto again = make_federation(3, sites, per_site, k, 1.0);
    for (std::uint32_t i = 0; i < sites; ++i) CHECK(skewed[i].serialize() == again[i].serialize());

    CHECK_THROWS_AS(make_federation(3, sites, per_site, k, 1.5), Error);
}

TEST_CASE("holdout generation is deterministic") {
    Dataset a = make_holdout(9, 128, 6);
    Dataset b = make_holdout(9, 128, 6);
    CHECK(a.serialize() == b.serialize());
    CHECK(a.size() == 128);
}

TEST_CASE("model hashing is content-sensitive") {
    ModelParams a{{1.0, 2.0}};
    ModelParams b{{1.0, 2.0}};
    ModelParams c{{1.0, 2.0000001}};
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
    CHECK(ModelParams::deserialize(a.serialize()).weights == a.weights);
}

TEST_CASE("policy id binds every field") {
    AggregationPolicy p{1000, 4, 500};
    AggregationPolicy q{1000, 4, 500};
    CHECK(p.policy_id() == q.policy_id());
    CHECK(p.serialize().size() == 20);
    q.norm_bound = 1001;
    CHECK(p.policy_id() != q.policy_id());
    q = p;
    q.quorum = 5;
    CHECK(p.policy_id() != q.policy_id());
    q = p;
    q.round_timeout_ticks = 501;
    CHECK(p.policy_id() != q.policy_id());
}
