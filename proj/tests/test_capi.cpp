#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "zkfl/zkfl.h"

namespace {

namespace fs = std::filesystem;

fs::path scratch() {
    fs::path dir = fs::temp_directory_path() / "zkfl_capi_test";
    fs::create_directories(dir);
    return dir;
}

std::string write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    out << text;
    return path.string();
}

std::vector<std::uint8_t> slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

std::string tiny_config() {
    return write_text(scratch() / "config.json", R"({
        "schema_version": 1,
        "federation": {"num_sites": 5, "per_site": 16, "feature_dim": 8, "skew": 0.2, "seed": 3},
        "policy": {"quorum": 3},
        "rounds": 2,
        "holdout_size": 32,
        "backend": "transparent"
    })");
}

}  // namespace

TEST_CASE("version and last_error are always available") {
    REQUIRE(zkfl_version() != nullptr);
    CHECK(std::strlen(zkfl_version()) > 0);
    REQUIRE(zkfl_last_error() != nullptr);
}

TEST_CASE("commitment handles round-trip and reject bad openings") {
    const std::uint8_t seed[] = "capi-params";
    zkfl_params_t* params = nullptr;
    REQUIRE(zkfl_params_create(4, seed, sizeof seed - 1, &params) == ZKFL_OK);
    REQUIRE(params != nullptr);

    std::int64_t values[4] = {5, -3, 0, 1 << 20};
    std::uint8_t blinding[32] = {};
    blinding[0] = 9;
    std::uint8_t commitment[32];
    REQUIRE(zkfl_commit(params, values, 4, blinding, commitment) == ZKFL_OK);

    int valid = 0;
    REQUIRE(zkfl_verify_opening(params, commitment, values, 4, blinding, &valid) == ZKFL_OK);
    CHECK(valid == 1);

    values[1] += 1;
    REQUIRE(zkfl_verify_opening(params, commitment, values, 4, blinding, &valid) == ZKFL_OK);
    CHECK(valid == 0);
    values[1] -= 1;

    blinding[0] ^= 1;
    REQUIRE(zkfl_verify_opening(params, commitment, values, 4, blinding, &valid) == ZKFL_OK);
    CHECK(valid == 0);

    zkfl_params_destroy(params);
}

TEST_CASE("zero-dimension params are refused with a message") {
    zkfl_params_t* params = nullptr;
    CHECK(zkfl_params_create(0, nullptr, 0, &params) == ZKFL_ERR_INVALID_ARG);
    CHECK(params == nullptr);
    CHECK(std::strlen(zkfl_last_error()) > 0);
}

TEST_CASE("null arguments are refused") {
    CHECK(zkfl_run(nullptr, "out", nullptr, nullptr) == ZKFL_ERR_INVALID_ARG);
    CHECK(zkfl_audit(nullptr, nullptr, nullptr, nullptr) == ZKFL_ERR_INVALID_ARG);
    CHECK(zkfl_bench(nullptr, nullptr) == ZKFL_ERR_INVALID_ARG);
    CHECK(zkfl_attack(nullptr, nullptr, 0, 0, nullptr) == ZKFL_ERR_INVALID_ARG);
}

TEST_CASE("run produces artifacts, determinism, and a clean audit") {
    std::string config = tiny_config();
    fs::path out1 = scratch() / "run1";
    fs::path out2 = scratch() / "run2";

    uint32_t rounds = 0;
    REQUIRE(zkfl_run(config.c_str(), out1.string().c_str(), nullptr, &rounds) == ZKFL_OK);
    CHECK(rounds == 2);
    for (const char* name : {"chain.bin", "genesis.json", "metrics.csv", "manifest.json",
                             "model_final.bin", "timings.json", "config.json"})
        CHECK(fs::exists(out1 / name));

    REQUIRE(zkfl_run(config.c_str(), out2.string().c_str(), nullptr, &rounds) == ZKFL_OK);
    CHECK(slurp(out1 / "chain.bin") == slurp(out2 / "chain.bin"));
    CHECK(slurp(out1 / "metrics.csv") == slurp(out2 / "metrics.csv"));

    int valid = 0;
    uint64_t bad = 0;
    REQUIRE(zkfl_audit((out1 / "chain.bin").string().c_str(),
                       (out1 / "genesis.json").string().c_str(), &valid, &bad) == ZKFL_OK);
    CHECK(valid == 1);
    CHECK(bad == UINT64_MAX);

    auto chain = slurp(out1 / "chain.bin");
    chain[chain.size() / 2] ^= 0x10;
    fs::path mutated = scratch() / "chain_mutated.bin";
    std::ofstream(mutated, std::ios::binary)
        .write(reinterpret_cast<const char*>(chain.data()), std::streamsize(chain.size()));
    CHECK(zkfl_audit(mutated.string().c_str(), (out1 / "genesis.json").string().c_str(), &valid,
                     &bad) == ZKFL_ERR_AUDIT);
    CHECK(valid == 0);
    CHECK(bad != UINT64_MAX);
}

TEST_CASE("run reports an impossible quorum as a round failure") {
    std::string config = write_text(scratch() / "badquorum.json", R"({
        "federation": {"num_sites": 4, "per_site": 16, "feature_dim": 8, "seed": 3},
        "policy": {"quorum": 9},
        "rounds": 1,
        "holdout_size": 32
    })");
    fs::path out = scratch() / "runq";
    uint32_t rounds = 99;
    CHECK(zkfl_run(config.c_str(), out.string().c_str(), nullptr, &rounds) ==
          ZKFL_ERR_ROUND_FAILED);
    CHECK(rounds == 0);
}

TEST_CASE("run seed override changes the chain") {
    std::string config = tiny_config();
    fs::path out = scratch() / "run_seeded";
    zkfl_run_options opts{/*seed=*/99, nullptr, 0, 0};
    uint32_t rounds = 0;
    REQUIRE(zkfl_run(config.c_str(), out.string().c_str(), &opts, &rounds) == ZKFL_OK);
    CHECK(slurp(out / "chain.bin") != slurp(scratch() / "run1" / "chain.bin"));
}

TEST_CASE("missing or malformed configs map to distinct statuses") {
    CHECK(zkfl_run("/no/such/config.json", (scratch() / "x").string().c_str(), nullptr, nullptr) ==
          ZKFL_ERR_IO);
    std::string broken = write_text(scratch() / "broken.json", "{not json");
    CHECK(zkfl_run(broken.c_str(), (scratch() / "x").string().c_str(), nullptr, nullptr) ==
          ZKFL_ERR_CONFIG);
    zkfl_run_options opts{-1, "quantum", 0, 0};
    CHECK(zkfl_run(tiny_config().c_str(), (scratch() / "x").string().c_str(), &opts, nullptr) ==
          ZKFL_ERR_CONFIG);
}

TEST_CASE("attack subset runs green through the C surface") {
    std::string config = write_text(scratch() / "attack.json", R"({
        "federation": {"num_sites": 5, "per_site": 16, "feature_dim": 8, "skew": 0.2, "seed": 3},
        "policy": {"quorum": 3},
        "holdout_size": 32,
        "attack": {"scenarios": ["sybil-unregistered", "tamper-delta"]}
    })");
    fs::path report = scratch() / "attack_report.json";
    int complete = 0;
    REQUIRE(zkfl_attack(config.c_str(), report.string().c_str(), 0, 0, &complete) == ZKFL_OK);
    CHECK(complete == 1);
    CHECK(fs::exists(report));
}

TEST_CASE("bench writes a CSV for a small grid") {
    std::string config = write_text(scratch() / "bench.json", R"({
        "dimensions": [16],
        "clients": [2],
        "backends": ["transparent"],
        "ledger_tps_txs": 64,
        "seed": 5
    })");
    fs::path csv = scratch() / "bench.csv";
    REQUIRE(zkfl_bench(config.c_str(), csv.string().c_str()) == ZKFL_OK);
    auto data = slurp(csv);
    std::string text(data.begin(), data.end());
    CHECK(text.find("backend,dimension,clients") != std::string::npos);
    CHECK(text.find("transparent,16,2") != std::string::npos);
}
