#include "zkfl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <filesystem>
#include <future>
#include <sstream>

#include "json.hpp"

namespace zkfl {

namespace {

using nlohmann::json;

std::string fmt(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

/// Fan client work out over a bounded worker count; deterministic because
/// each slot owns its inputs and result.
void parallel_for(std::uint32_t n, std::uint32_t workers, const std::function<void(std::uint32_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::uint32_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::uint32_t> next{0};
    std::vector<std::future<void>> tasks;
    for (std::uint32_t w = 0; w < std::min(workers, n); ++w) {
        tasks.push_back(std::async(std::launch::async, [&] {
            for (std::uint32_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        }));
    }
    for (auto& t : tasks) t.get();
}

}  // namespace

ModelSpec ExperimentConfig::model_spec() const {
    ModelSpec s;
    s.kind = model_kind;
    s.feature_dim = feature_dim;
    s.hidden_units = hidden_units;
    return s;
}

FixedPointConfig ExperimentConfig::fixed_point() const {
    std::uint64_t max_weight = std::max<std::uint64_t>(per_site, 1);
    return FixedPointConfig::make(fractional_bits, clamp_magnitude, model_spec().dimension(),
                                  std::max(num_sites, 1u), max_weight);
}

void ExperimentConfig::validate() const {
    if (schema_version != 1) throw Error(ErrorCode::ConfigInvalid, "unsupported schema_version");
    if (num_sites < 1) throw Error(ErrorCode::ConfigInvalid, "num_sites must be >= 1");
    if (per_site < 1) throw Error(ErrorCode::ConfigInvalid, "per_site must be >= 1");
    if (feature_dim < 1) throw Error(ErrorCode::ConfigInvalid, "feature_dim must be >= 1");
    if (skew < 0 || skew > 1) throw Error(ErrorCode::ConfigInvalid, "skew must be in [0,1]");
    if (!(training.learning_rate > 0))
        throw Error(ErrorCode::ConfigInvalid, "learning_rate must be > 0");
    if (training.local_epochs < 1) throw Error(ErrorCode::ConfigInvalid, "local_epochs must be >= 1");
    if (policy.quorum < 1) throw Error(ErrorCode::ConfigInvalid, "quorum must be >= 1");
    if (policy.norm_bound == 0) throw Error(ErrorCode::ConfigInvalid, "norm_bound must be > 0");
    if (rounds < 1) throw Error(ErrorCode::ConfigInvalid, "rounds must be >= 1");
    if (model_kind == ModelKind::Mlp && hidden_units < 1)
        throw Error(ErrorCode::ConfigInvalid, "hidden_units must be >= 1");
    fixed_point();  // throws on aggregate-safety violation
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigInvalid, std::string("bad JSON: ") + e.what());
    }
    ExperimentConfig c;
    try {
        c.schema_version = j.value("schema_version", 1u);
        if (j.contains("federation")) {
            const auto& f = j["federation"];
            c.num_sites = f.value("num_sites", c.num_sites);
            c.per_site = f.value("per_site", c.per_site);
            c.feature_dim = f.value("feature_dim", c.feature_dim);
            c.skew = f.value("skew", c.skew);
            c.seed = f.value("seed", c.seed);
        }
        if (j.contains("model")) {
            const auto& m = j["model"];
            std::string kind = m.value("kind", "logreg");
            if (kind == "logreg")
                c.model_kind = ModelKind::LogisticRegression;
            else if (kind == "mlp")
                c.model_kind = ModelKind::Mlp;
            else
                throw Error(ErrorCode::ConfigInvalid, "unknown model kind: " + kind);
            c.hidden_units = m.value("hidden_units", c.hidden_units);
        }
        if (j.contains("training")) {
            const auto& t = j["training"];
            c.training.learning_rate = t.value("learning_rate", c.training.learning_rate);
            c.training.local_epochs = t.value("local_epochs", c.training.local_epochs);
            c.training.batch_size = t.value("batch_size", c.training.batch_size);
            if (t.contains("clip_norm") && !t["clip_norm"].is_null())
                c.training.clip_norm = t["clip_norm"].get<double>();
        }
        if (j.contains("policy")) {
            const auto& p = j["policy"];
            c.policy.norm_bound = p.value("norm_bound", c.policy.norm_bound);
            c.policy.quorum = p.value("quorum", c.policy.quorum);
            c.policy.round_timeout_ticks = p.value("round_timeout_ticks", c.policy.round_timeout_ticks);
        }
        if (j.contains("encoding")) {
            const auto& e = j["encoding"];
            c.fractional_bits = e.value("fractional_bits", c.fractional_bits);
            c.clamp_magnitude = e.value("clamp_magnitude", c.clamp_magnitude);
        }
        std::string backend = j.value("backend", "transparent");
        if (backend == "transparent")
            c.backend = ProofBackend::Transparent;
        else if (backend == "mock")
            c.backend = ProofBackend::Mock;
        else
            throw Error(ErrorCode::ConfigInvalid, "unknown backend: " + backend);
        c.mock_time_scale = j.value("mock_time_scale", c.mock_time_scale);
        c.rounds = j.value("rounds", c.rounds);
        c.workers = j.value("workers", c.workers);
        c.holdout_size = j.value("holdout_size", c.holdout_size);
        if (j.contains("attack")) {
            const auto& a = j["attack"];
            if (a.contains("scenarios"))
                c.attack.scenarios = a["scenarios"].get<std::vector<std::string>>();
            c.attack.repetitions = a.value("repetitions", c.attack.repetitions);
            c.attack.self_test = a.value("self_test", c.attack.self_test);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigInvalid, std::string("bad config field: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    Bytes data = read_file(path);
    return from_json(std::string(data.begin(), data.end()));
}

std::string ExperimentConfig::to_json() const {
    json j;
    j["schema_version"] = schema_version;
    j["federation"] = {{"num_sites", num_sites}, {"per_site", per_site},
                       {"feature_dim", feature_dim}, {"skew", skew}, {"seed", seed}};
    j["model"] = {{"kind", model_kind == ModelKind::Mlp ? "mlp" : "logreg"},
                  {"hidden_units", hidden_units}};
    json t = {{"learning_rate", training.learning_rate},
              {"local_epochs", training.local_epochs},
              {"batch_size", training.batch_size}};
    if (training.clip_norm) t["clip_norm"] = *training.clip_norm;
    j["training"] = t;
    j["policy"] = {{"norm_bound", policy.norm_bound}, {"quorum", policy.quorum},
                   {"round_timeout_ticks", policy.round_timeout_ticks}};
    j["encoding"] = {{"fractional_bits", fractional_bits}, {"clamp_magnitude", clamp_magnitude}};
    j["backend"] = backend == ProofBackend::Mock ? "mock" : "transparent";
    j["mock_time_scale"] = mock_time_scale;
    j["rounds"] = rounds;
    j["workers"] = workers;
    j["holdout_size"] = holdout_size;
    if (!attack.scenarios.empty() || attack.self_test) {
        j["attack"] = {{"scenarios", attack.scenarios}, {"repetitions", attack.repetitions},
                       {"self_test", attack.self_test}};
    }
    return j.dump(2);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const ModelSpec spec = cfg.model_spec();
    const FixedPointConfig fp = cfg.fixed_point();
    const std::uint32_t d = spec.dimension();

    Rng root(cfg.seed);
    auto sites = make_federation(cfg.seed, cfg.num_sites, cfg.per_site, cfg.feature_dim, cfg.skew);
    Dataset holdout = make_holdout(cfg.seed, cfg.holdout_size, cfg.feature_dim);

    ByteWriter seed_w;
    seed_w.str("zkfl-params");
    seed_w.u64(cfg.seed);
    Bytes pedersen_seed = seed_w.take();
    PedersenParams params = setup_params(d, pedersen_seed);

    ProofBackendConfig backend{cfg.backend, 45200.0, 10.0, cfg.mock_time_scale};
    ModelParams model{std::vector<double>(d, 0.0)};

    Enclave enclave(params, cfg.policy, fp, {}, backend, root.fork("enclave"));

    GenesisConfig genesis;
    genesis.policy = cfg.policy;
    genesis.fp = fp;
    genesis.pedersen_seed = pedersen_seed;
    genesis.enclave_sig_key = enclave.sig_public_key();
    std::copy(enclave.seal_public_key().begin(), enclave.seal_public_key().end(),
              genesis.enclave_seal_key.begin());
    genesis.enclave_measurement = enclave.measurement();
    genesis.initial_model_hash = model.hash();
    genesis.first_deadline_ticks = cfg.policy.round_timeout_ticks;

    Ledger ledger(genesis);
    Rng operator_rng = root.fork("operator");
    KeyPair operator_keys = keygen(operator_rng);

    std::vector<ClientIdentity> clients;
    clients.reserve(cfg.num_sites);
    for (std::uint32_t i = 0; i < cfg.num_sites; ++i) {
        Rng crng = root.fork("client-" + std::to_string(i));
        clients.push_back(ClientIdentity::create(crng));
        TxResult res = ledger.submit_tx(Tx::register_identity(clients.back().keypair));
        if (!res.accepted) throw Error(ErrorCode::Internal, "client registration rejected");
        clients.back().registered = true;
    }
    enclave.update_registry(ledger.registry_snapshot());

    ExperimentResult out;
    out.genesis = genesis;
    ModelParams shadow = model;

    for (std::uint32_t r = 1; r <= cfg.rounds; ++r) {
        RoundHeader header = ledger.open_round();
        std::uint64_t txs_before = ledger.height();

        std::vector<std::vector<double>> deltas(cfg.num_sites), shadow_deltas(cfg.num_sites);
        parallel_for(cfg.num_sites, cfg.workers, [&](std::uint32_t i) {
            TrainConfig tc = cfg.training;
            ByteWriter sw;
            sw.str("local-train");
            sw.u64(cfg.seed);
            sw.u64(r);
            sw.u32(i);
            Digest h = sha256(sw.data());
            std::memcpy(&tc.rng_seed, h.bytes.data(), sizeof tc.rng_seed);
            deltas[i] = local_train(spec, model, sites[i], tc);
            shadow_deltas[i] = local_train(spec, shadow, sites[i], tc);
        });

        std::vector<std::uint64_t> weights(cfg.num_sites);
        for (std::uint32_t i = 0; i < cfg.num_sites; ++i) weights[i] = sites[i].size();

        enclave.open_round(header);
        for (std::uint32_t i = 0; i < cfg.num_sites; ++i) {
            Rng srng = root.fork("submit-" + std::to_string(r) + "-" + std::to_string(i));
            PreparedSubmission prep = client_prepare_submission(
                clients[i], deltas[i], header, ledger.open_round_t(), enclave.seal_public_key(),
                fp, params, weights[i], srng);
            TxResult post = ledger.submit_tx(Tx::post_commitment(clients[i], prep.submission));
            if (!post.accepted)
                throw Error(ErrorCode::Internal, std::string("anchor rejected: ") +
                                                     reject_name(post.reason));
            IngestResult ing = enclave.ingest(prep.submission);
            if (!ing.accepted)
                throw Error(ErrorCode::Internal, std::string("honest submission rejected: ") +
                                                     reject_name(ing.reason));
        }

        RoundResult round;
        try {
            round = enclave.aggregate_and_prove();
        } catch (const Error& e) {
            if (e.code() == ErrorCode::RoundFailedQuorum) {
                out.failure = "round-failed-quorum";
                out.chain = ledger.serialize_chain();
                out.final_model = model;
                out.shadow_model = shadow;
                return out;
            }
            throw;
        }

        ModelParams next_model = apply_update(model, round.delta);
        Tx fin = Tx::finalize_round(round, next_model.hash(), operator_keys);
        auto v0 = std::chrono::steady_clock::now();
        TxResult res = ledger.submit_tx(fin);
        double verify_wall_ms = std::chrono::duration<double, std::milli>(
                                    std::chrono::steady_clock::now() - v0).count();
        if (!res.accepted) {
            out.failure = std::string("finalize rejected: ") + reject_name(res.reason);
            out.chain = ledger.serialize_chain();
            out.final_model = model;
            out.shadow_model = shadow;
            return out;
        }

        model = next_model;
        if (!client_verify_distribution(r, model, ledger)) {
            out.failure = "distribution hash mismatch";
            out.chain = ledger.serialize_chain();
            return out;
        }

        std::vector<double> float_delta = fedavg_aggregate(deltas, weights);
        shadow = apply_update(shadow, fedavg_aggregate(shadow_deltas, weights));

        RoundMetrics m;
        m.round_t = r;
        Metrics em = evaluate(spec, model, holdout);
        m.accuracy = em.accuracy;
        m.auc_defined = em.auc.has_value();
        m.auc = em.auc.value_or(0.0);
        m.proof_bytes = round.proof.payload_size();
        m.ledger_txs = ledger.height() - txs_before;
        m.finality_ticks = 1;
        if (cfg.backend == ProofBackend::Mock) {
            m.prove_ms = round.proof.simulated_prove_ms;
            m.verify_ms = round.proof.simulated_verify_ms;
        } else {
            m.prove_ms = round.prove_ms;
            m.verify_ms = verify_wall_ms;
        }
        double gap = 0;
        for (std::uint32_t j = 0; j < d; ++j) gap += std::abs(round.delta[j] - float_delta[j]);
        m.parity_gap_l1 = gap;
        out.metrics.push_back(m);
        out.rounds_finalized = r;
    }

    out.all_rounds_finalized = true;
    out.final_model = model;
    out.shadow_model = shadow;
    out.final_accuracy = evaluate(spec, model, holdout).accuracy;
    out.shadow_accuracy = evaluate(spec, shadow, holdout).accuracy;
    out.chain = ledger.serialize_chain();
    return out;
}

std::string metrics_csv(const std::vector<RoundMetrics>& rows, ProofBackend backend) {
    std::ostringstream os;
    os << "round_t,accuracy,auc,prove_ms,verify_ms,proof_bytes,ledger_txs,finality_ticks,"
          "parity_gap_l1\n";
    const bool deterministic_timings = backend == ProofBackend::Mock;
    for (const auto& m : rows) {
        os << m.round_t << ',' << fmt(m.accuracy) << ',';
        if (m.auc_defined) os << fmt(m.auc);
        os << ',';
        // transparent-backend timings are wall-clock measurements; they live
        // in timings.json so this file stays byte-reproducible
        if (deterministic_timings) os << fmt(m.prove_ms, 3);
        os << ',';
        if (deterministic_timings) os << fmt(m.verify_ms, 3);
        os << ',' << m.proof_bytes << ',' << m.ledger_txs << ',' << m.finality_ticks << ','
           << fmt(m.parity_gap_l1, 9) << '\n';
    }
    return os.str();
}

ExperimentResult run_experiment_to_dir(const ExperimentConfig& cfg, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + out_dir);

    ExperimentResult res = run_experiment(cfg);
    auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

    write_file(path("chain.bin"), res.chain);
    Bytes gj = to_bytes(res.genesis.to_json());
    write_file(path("genesis.json"), gj);
    Bytes csv = to_bytes(metrics_csv(res.metrics, cfg.backend));
    write_file(path("metrics.csv"), csv);
    Bytes cj = to_bytes(cfg.to_json());
    write_file(path("config.json"), cj);
    write_file(path("model_final.bin"), res.final_model.serialize());
    write_file(path("model_shadow.bin"), res.shadow_model.serialize());

    json timings = json::array();
    for (const auto& m : res.metrics)
        timings.push_back({{"round_t", m.round_t}, {"prove_ms", m.prove_ms},
                           {"verify_ms", m.verify_ms},
                           {"replayed", cfg.backend == ProofBackend::Mock}});
    json tj;
    tj["note"] = cfg.backend == ProofBackend::Mock
                     ? "timings replayed from reference figures, not measured"
                     : "wall-clock measurements; excluded from deterministic artifacts";
    tj["rounds"] = timings;
    Bytes tb = to_bytes(tj.dump(2));
    write_file(path("timings.json"), tb);

    json manifest;
    manifest["seed"] = cfg.seed;
    manifest["code_version"] = "zkfl 0.1.0";
    manifest["backend"] = cfg.backend == ProofBackend::Mock ? "mock" : "transparent";
    manifest["notes"] = {
        "shadow model is a seed-matched plain FedAvg run; the accuracy gap is the "
        "desk-scale utility-parity measurement",
        "mock-backend prove/verify figures are replayed from reference hardware, not measured"};
    json hashes;
    hashes["chain.bin"] = sha256(res.chain).hex();
    hashes["genesis.json"] = sha256(gj).hex();
    hashes["metrics.csv"] = sha256(csv).hex();
    hashes["config.json"] = sha256(cj).hex();
    hashes["model_final.bin"] = sha256(res.final_model.serialize()).hex();
    hashes["model_shadow.bin"] = sha256(res.shadow_model.serialize()).hex();
    hashes["timings.json"] = sha256(tb).hex();
    manifest["output_hashes"] = hashes;
    manifest["status"] = res.all_rounds_finalized ? "ok" : res.failure;
    write_file(path("manifest.json"), to_bytes(manifest.dump(2)));
    return res;
}

SyntheticRound make_synthetic_round(std::uint32_t dimension, std::uint32_t clients,
                                    ProofBackend backend, std::uint64_t seed,
                                    double mock_time_scale) {
    if (clients == 0) throw Error(ErrorCode::ConfigInvalid, "need at least one client");
    Rng root(seed);

    SyntheticRound out;
    out.fp = FixedPointConfig::make(16, 8.0, dimension, std::max(clients, 1u), 1u << 16);
    out.policy = AggregationPolicy{std::uint64_t(256) << 16, std::min(2u, clients), 1000};
    ByteWriter sw;
    sw.str("synthetic");
    sw.u64(seed);
    out.params = setup_params(dimension, sw.data());

    ProofBackendConfig bc{backend, 45200.0, 10.0, mock_time_scale};
    Enclave enclave(out.params, out.policy, out.fp, {}, bc, root.fork("enclave"));
    out.enclave_sig_key = enclave.sig_public_key();

    std::vector<ClientIdentity> ids;
    RegistrySnapshot reg;
    for (std::uint32_t i = 0; i < clients; ++i) {
        Rng crng = root.fork("client-" + std::to_string(i));
        ids.push_back(ClientIdentity::create(crng));
        ids.back().registered = true;
        reg.members[ids.back().client_id] = ids.back().keypair.public_key;
    }
    enclave.update_registry(reg);
    out.registry = reg;

    RoundHeader header;
    header.round_t = 1;
    Rng nrng = root.fork("nonce");
    nrng.fill(header.round_nonce);
    header.policy_id = out.policy.policy_id();
    header.deadline = 1000;
    out.header = header;
    enclave.open_round(header);

    for (std::uint32_t i = 0; i < clients; ++i) {
        Rng urng = root.fork("update-" + std::to_string(i));
        std::vector<double> update(dimension);
        for (auto& v : update)
            v = (static_cast<double>(urng.next_u64() >> 11) * 0x1.0p-53 - 0.5) * 2.0;
        Rng srng = root.fork("submit-" + std::to_string(i));
        std::uint64_t weight = 1 + urng.next_u64() % 64;
        PreparedSubmission prep =
            client_prepare_submission(ids[i], update, header, header.round_t,
                                      enclave.seal_public_key(), out.fp, out.params, weight, srng);
        IngestResult res = enclave.ingest(prep.submission);
        if (!res.accepted)
            throw Error(ErrorCode::Internal, std::string("synthetic submission rejected: ") +
                                                 reject_name(res.reason));
    }

    RoundResult round = enclave.aggregate_and_prove();
    out.statement = round.statement;
    out.proof = round.proof;
    out.attestation = round.attestation;
    out.prove_ms = round.prove_ms;
    return out;
}

bool verify_synthetic_round(const SyntheticRound& round) {
    VerifyContext ctx;
    ctx.params = &round.params;
    ctx.policy = round.policy;
    ctx.fp = round.fp;
    ctx.registry = round.registry;
    ctx.expected_header = round.header;
    ctx.enclave_sig_key = round.enclave_sig_key;
    return verify_aggregation(round.statement, round.proof, ctx);
}

BenchConfig BenchConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigInvalid, std::string("bad JSON: ") + e.what());
    }
    BenchConfig c;
    try {
        if (j.contains("dimensions")) c.dimensions = j["dimensions"].get<std::vector<std::uint32_t>>();
        if (j.contains("clients")) c.clients = j["clients"].get<std::vector<std::uint32_t>>();
        if (j.contains("backends")) {
            c.backends.clear();
            for (const auto& b : j["backends"]) {
                std::string name = b.get<std::string>();
                if (name == "transparent")
                    c.backends.push_back(ProofBackend::Transparent);
                else if (name == "mock")
                    c.backends.push_back(ProofBackend::Mock);
                else
                    throw Error(ErrorCode::ConfigInvalid, "unknown backend: " + name);
            }
        }
        c.mock_time_scale = j.value("mock_time_scale", c.mock_time_scale);
        c.seed = j.value("seed", c.seed);
        c.ledger_tps_txs = j.value("ledger_tps_txs", c.ledger_tps_txs);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigInvalid, std::string("bad bench field: ") + e.what());
    }
    return c;
}

BenchResult run_bench(const BenchConfig& cfg) {
    BenchResult out;
    for (ProofBackend backend : cfg.backends) {
        for (std::uint32_t d : cfg.dimensions) {
            for (std::uint32_t n : cfg.clients) {
                SyntheticRound round = make_synthetic_round(d, n, backend, cfg.seed, cfg.mock_time_scale);
                auto t0 = std::chrono::steady_clock::now();
                bool ok = verify_synthetic_round(round);
                double verify_ms = std::chrono::duration<double, std::milli>(
                                       std::chrono::steady_clock::now() - t0).count();
                if (!ok) throw Error(ErrorCode::Internal, "bench round failed verification");
                BenchRow row;
                row.backend = backend;
                row.dimension = d;
                row.clients = n;
                row.proof_bytes = round.proof.payload_size();
                row.prove_replayed = backend == ProofBackend::Mock;
                row.prove_ms = backend == ProofBackend::Mock ? round.proof.simulated_prove_ms
                                                             : round.prove_ms;
                row.verify_ms = backend == ProofBackend::Mock ? round.proof.simulated_verify_ms
                                                              : verify_ms;
                out.rows.push_back(row);
            }
        }
    }
    out.ledger = measure_throughput(0, cfg.ledger_tps_txs, cfg.seed);
    return out;
}

std::string bench_csv(const BenchResult& result) {
    std::ostringstream os;
    os << "backend,dimension,clients,prove_ms,verify_ms,proof_bytes,prove_source,ledger_tps\n";
    for (const auto& r : result.rows) {
        os << (r.backend == ProofBackend::Mock ? "mock" : "transparent") << ',' << r.dimension
           << ',' << r.clients << ',' << fmt(r.prove_ms, 3) << ',' << fmt(r.verify_ms, 3) << ','
           << r.proof_bytes << ',' << (r.prove_replayed ? "replayed-from-reference" : "measured")
           << ',' << fmt(result.ledger.tps, 1) << '\n';
    }
    return os.str();
}

}  // namespace zkfl
