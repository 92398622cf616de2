#include <algorithm>

#include "doctest.h"
#include "support.hpp"

using namespace zkfl;

namespace {

/// Ledger fixture: genesis, registered clients, and helpers for whole rounds.
struct Chain {
    std::uint32_t dim;
    FixedPointConfig fp;
    AggregationPolicy policy;
    PedersenParams params;
    Rng root;
    std::unique_ptr<Enclave> enclave;
    GenesisConfig genesis;
    std::unique_ptr<Ledger> ledger;
    std::vector<ClientIdentity> clients;
    KeyPair operator_keys;
    ModelParams model;

    Chain(std::uint32_t dimension, std::uint32_t num_clients, std::uint64_t seed = 1,
          std::uint32_t quorum = 1)
        : dim(dimension),
          fp(FixedPointConfig::make(16, 8.0, dimension, std::max(num_clients, 1u), 1u << 16)),
          policy{std::uint64_t(256) << 16, quorum, 1000},
          params(setup_params(dimension, to_bytes("ledger-fixture"))),
          root(seed) {
        ProofBackendConfig bc{ProofBackend::Transparent, 45200.0, 10.0, 1.0};
        enclave = std::make_unique<Enclave>(params, policy, fp, RegistrySnapshot{}, bc,
                                            root.fork("enclave"));
        model.weights.assign(dim, 0.0);

        genesis.policy = policy;
        genesis.fp = fp;
        genesis.pedersen_seed = to_bytes("ledger-fixture");
        genesis.enclave_sig_key = enclave->sig_public_key();
        auto seal = enclave->seal_public_key();
        std::copy(seal.begin(), seal.end(), genesis.enclave_seal_key.begin());
        genesis.enclave_measurement = enclave->measurement();
        genesis.initial_model_hash = model.hash();
        ledger = std::make_unique<Ledger>(genesis);

        Rng orng = root.fork("operator");
        operator_keys = keygen(orng);

        for (std::uint32_t i = 0; i < num_clients; ++i) {
            Rng crng = root.fork("client-" + std::to_string(i));
            clients.push_back(ClientIdentity::create(crng));
            REQUIRE(ledger->submit_tx(Tx::register_identity(clients.back().keypair)).accepted);
            clients.back().registered = true;
        }
        enclave->update_registry(ledger->registry_snapshot());
    }

    std::vector<double> random_update(std::uint64_t seed) {
        Rng rng(seed);
        std::vector<double> u(dim);
        for (auto& v : u) v = double(rng.next_u64() % 2001) / 10000.0 - 0.1;
        return u;
    }

    PreparedSubmission prepare(std::uint32_t i) {
        RoundHeader header = ledger->open_round();
        Rng srng = root.fork("submit-" + std::to_string(header.round_t) + "-" + std::to_string(i));
        return client_prepare_submission(clients[i], random_update(header.round_t * 100 + i),
                                         header, header.round_t, enclave->seal_public_key(), fp,
                                         params, i + 1, srng);
    }

    /// One full honest round; returns the finalize receipt.
    TxResult honest_round() {
        enclave->open_round(ledger->open_round());
        for (std::uint32_t i = 0; i < clients.size(); ++i) {
            PreparedSubmission prep = prepare(i);
            REQUIRE(ledger->submit_tx(Tx::post_commitment(clients[i], prep.submission)).accepted);
            REQUIRE(enclave->ingest(prep.submission).accepted);
        }
        RoundResult round = enclave->aggregate_and_prove();
        ModelParams next = apply_update(model, round.delta);
        TxResult res = ledger->submit_tx(Tx::finalize_round(round, next.hash(), operator_keys));
        if (res.accepted) model = next;
        return res;
    }
};

}  // namespace

TEST_CASE("registration is gated and idempotent-rejecting") {
    Chain c(2, 1);
    TxResult dup = c.ledger->submit_tx(Tx::register_identity(c.clients[0].keypair));
    CHECK(!dup.accepted);
    CHECK(dup.reason == Reject::AlreadyRegistered);
    CHECK(c.ledger->registry().size() == 1);
}

TEST_CASE("post_commitment enforces identity, freshness, and uniqueness") {
    Chain c(2, 2);
    c.enclave->open_round(c.ledger->open_round());
    PreparedSubmission prep = c.prepare(0);

    Rng rng(123);
    ClientIdentity ghost = ClientIdentity::create(rng);
    ghost.registered = true;  // self-asserted; never on the ledger
    Rng grng(124);
    PreparedSubmission ghost_prep = client_prepare_submission(
        ghost, c.random_update(1), c.ledger->open_round(), c.ledger->open_round_t(),
        c.enclave->seal_public_key(), c.fp, c.params, 1, grng);
    TxResult res = c.ledger->submit_tx(Tx::post_commitment(ghost, ghost_prep.submission));
    CHECK(!res.accepted);
    CHECK(res.reason == Reject::UnknownIdentity);

    Tx forged = Tx::post_commitment(c.clients[0], prep.submission);
    forged.sign_as(c.clients[1].keypair.secret);
    res = c.ledger->submit_tx(forged);
    CHECK(!res.accepted);
    CHECK(res.reason == Reject::BadSignature);

    Tx stale = Tx::post_commitment(c.clients[0], prep.submission);
    stale.round_t = 7;
    stale.sign_as(c.clients[0].keypair.secret);
    res = c.ledger->submit_tx(stale);
    CHECK(!res.accepted);
    CHECK(res.reason == Reject::StaleRound);

    REQUIRE(c.ledger->submit_tx(Tx::post_commitment(c.clients[0], prep.submission)).accepted);
    res = c.ledger->submit_tx(Tx::post_commitment(c.clients[0], prep.submission));
    CHECK(!res.accepted);
    CHECK(res.reason == Reject::DuplicateCommitment);
}

TEST_CASE("a full round finalizes and advances the chain") {
    Chain c(3, 2, 1, 2);
    std::uint64_t round1 = c.ledger->open_round_t();
    TxResult res = c.honest_round();
    CHECK(res.accepted);
    CHECK(c.ledger->open_round_t() == round1 + 1);
    CHECK(c.ledger->get_model_hash(round1) == c.model.hash());
    CHECK(client_verify_distribution(round1, c.model, *c.ledger));

    ModelParams wrong = c.model;
    wrong.weights[0] += 1.0;
    CHECK(!client_verify_distribution(round1, wrong, *c.ledger));

    CHECK_THROWS_AS(c.ledger->get_model_hash(c.ledger->open_round_t()), Error);

    auto anchors = c.ledger->commitments(round1);
    CHECK(anchors.size() == 2);
    CHECK(std::is_sorted(anchors.begin(), anchors.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; }));
}

TEST_CASE("finalize rejects a statement that omits an on-chain participant") {
    Chain c(2, 2, 1, 1);
    c.enclave->open_round(c.ledger->open_round());
    PreparedSubmission keep = c.prepare(0);
    PreparedSubmission drop = c.prepare(1);
    REQUIRE(c.ledger->submit_tx(Tx::post_commitment(c.clients[0], keep.submission)).accepted);
    REQUIRE(c.ledger->submit_tx(Tx::post_commitment(c.clients[1], drop.submission)).accepted);
    REQUIRE(c.enclave->ingest(keep.submission).accepted);
    // drop's submission never reaches the enclave, so no rejection receipt covers it
    RoundResult round = c.enclave->aggregate_and_prove();
    ModelParams next = apply_update(c.model, round.delta);
    TxResult res = c.ledger->submit_tx(Tx::finalize_round(round, next.hash(), c.operator_keys));
    CHECK(!res.accepted);
    CHECK(res.reason == Reject::AnchorMismatch);
}

TEST_CASE("finalize below quorum is rejected on-chain") {
    Chain c(2, 1, 1, 1);
    c.enclave->open_round(c.ledger->open_round());
    PreparedSubmission prep = c.prepare(0);
    REQUIRE(c.ledger->submit_tx(Tx::post_commitment(c.clients[0], prep.submission)).accepted);
    REQUIRE(c.enclave->ingest(prep.submission).accepted);
    RoundResult round = c.enclave->aggregate_and_prove();
    round.statement.participants.clear();
    round.statement.total_weight = 0;
    round.statement.aggregate_quantized.assign(2, 0);
    TxResult res = c.ledger->submit_tx(Tx::finalize_round(round, c.model.hash(), c.operator_keys));
    CHECK(!res.accepted);
    CHECK(res.reason == Reject::BelowQuorum);
}

TEST_CASE("genesis config round-trips through JSON and rejects foreign hashes") {
    Chain c(2, 1);
    std::string js = c.genesis.to_json();
    GenesisConfig back = GenesisConfig::from_json(js);
    CHECK(back.digest() == c.genesis.digest());

    std::string bad = js;
    auto pos = bad.find("sha256");
    REQUIRE(pos != std::string::npos);
    bad.replace(pos, 6, "sha512");
    CHECK_THROWS_AS(GenesisConfig::from_json(bad), Error);
}

TEST_CASE("honest chains audit clean") {
    Chain c(3, 2, 1, 2);
    for (int r = 0; r < 3; ++r) REQUIRE(c.honest_round().accepted);
    AuditReport report = audit_chain(c.ledger->serialize_chain(), c.genesis);
    CHECK(report.chain_valid);
    CHECK(!report.first_bad_height.has_value());
    CHECK(report.findings.empty());
    CHECK(report.blocks_checked == c.ledger->height());
    CHECK(report.rounds.size() == 3);
    for (const auto& round : report.rounds) {
        CHECK(round.proof_reverified);
        CHECK(round.anchors_match);
        CHECK(round.gating_respected);
    }
}

TEST_CASE("a flipped byte is localized to its block") {
    Chain c(3, 2, 1, 2);
    for (int r = 0; r < 3; ++r) REQUIRE(c.honest_round().accepted);
    Bytes chain = c.ledger->serialize_chain();

    // flip one byte inside the middle block's record
    std::size_t offset = 0;
    std::uint64_t target_height = c.ledger->height() / 2;
    for (std::uint64_t h = 0; h < target_height; ++h) {
        std::uint32_t len = std::uint32_t(chain[offset]) | std::uint32_t(chain[offset + 1]) << 8 |
                            std::uint32_t(chain[offset + 2]) << 16 |
                            std::uint32_t(chain[offset + 3]) << 24;
        offset += 4 + len;  // len covers the body and the trailing hash
    }
    chain[offset + 10] ^= 0x01;

    AuditReport report = audit_chain(chain, c.genesis);
    CHECK(!report.chain_valid);
    REQUIRE(report.first_bad_height.has_value());
    CHECK(*report.first_bad_height == target_height);
    CHECK(!report.findings.empty());
}

TEST_CASE("a proof spliced from another round fails the audit") {
    Chain c(2, 2, 1, 2);
    for (int r = 0; r < 2; ++r) REQUIRE(c.honest_round().accepted);

    std::vector<Block> blocks = c.ledger->blocks();
    std::vector<std::size_t> finals;
    for (std::size_t i = 0; i < blocks.size(); ++i)
        if (blocks[i].txs.size() == 1 && blocks[i].txs[0].kind == TxKind::FinalizeRound)
            finals.push_back(i);
    REQUIRE(finals.size() == 2);

    // graft round 1's proof onto round 2's finalize and re-link the chain
    blocks[finals[1]].txs[0].proof = blocks[finals[0]].txs[0].proof;
    blocks[finals[1]].txs[0].sign_as(c.operator_keys.secret);
    for (std::size_t i = 1; i < blocks.size(); ++i) {
        blocks[i].prev_hash = blocks[i - 1].block_hash;
        blocks[i].block_hash = blocks[i].compute_hash();
    }
    Bytes spliced;
    for (const auto& b : blocks) {
        Bytes rec = b.serialize();
        spliced.insert(spliced.end(), rec.begin(), rec.end());
    }
    AuditReport report = audit_chain(spliced, c.genesis);
    CHECK(!report.chain_valid);
    REQUIRE(report.first_bad_height.has_value());
    CHECK(*report.first_bad_height == std::uint64_t(finals[1]));
}

TEST_CASE("truncated chains fail the audit without crashing") {
    Chain c(2, 1);
    REQUIRE(c.honest_round().accepted);
    Bytes chain = c.ledger->serialize_chain();
    chain.resize(chain.size() - 7);
    AuditReport report = audit_chain(chain, c.genesis);
    CHECK(!report.chain_valid);
    CHECK(!report.findings.empty());

    AuditReport empty = audit_chain(Bytes{}, c.genesis);
    CHECK(!empty.chain_valid);
}

TEST_CASE("throughput measurement behaves at the edges") {
    ThroughputReport none = measure_throughput(0, 0, 1);
    CHECK(none.tps == 0);
    CHECK(none.txs_committed == 0);

    ThroughputReport small = measure_throughput(0, 64, 1);
    CHECK(small.txs_committed == 64);
    CHECK(small.tps > 0);
    CHECK(small.finality_latency_ticks == 1);
}

TEST_CASE("tx serialization round-trips for every kind") {
    Chain c(2, 2, 1, 2);
    REQUIRE(c.honest_round().accepted);
    for (const auto& block : c.ledger->blocks())
        for (const auto& tx : block.txs) {
            Bytes wire = tx.serialize();
            CHECK(Tx::deserialize(wire).serialize() == wire);
        }
}
