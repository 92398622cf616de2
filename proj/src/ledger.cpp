#include "zkfl/ledger.hpp"

#include <chrono>
#include <fstream>
#include <memory>

#include "json.hpp"

namespace zkfl {

namespace {

Digest digest_from_span(std::span<const std::uint8_t> s) {
    Digest d;
    std::copy(s.begin(), s.end(), d.bytes.begin());
    return d;
}

Bytes hex_to_bytes(const std::string& hex) {
    if (hex.size() % 2 != 0) throw Error(ErrorCode::ParseError, "odd hex length");
    Bytes out;
    out.reserve(hex.size() / 2);
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw Error(ErrorCode::ParseError, "bad hex digit");
    };
    for (std::size_t i = 0; i < hex.size(); i += 2)
        out.push_back(static_cast<std::uint8_t>(nib(hex[i]) * 16 + nib(hex[i + 1])));
    return out;
}

}  // namespace

Bytes Tx::body() const {
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(kind));
    switch (kind) {
        case TxKind::RegisterIdentity:
            w.raw(new_public_key.bytes);
            w.bytes(metadata);
            break;
        case TxKind::PostCommitment:
            w.raw(client_id.bytes);
            w.u64(round_t);
            w.raw(anchor.bytes);
            break;
        case TxKind::FinalizeRound:
            w.bytes(statement.serialize());
            w.bytes(proof.serialize());
            w.bytes(attestation.serialize());
            w.raw(model_hash.bytes);
            w.u32(static_cast<std::uint32_t>(rejection_receipts.size()));
            for (const auto& r : rejection_receipts) w.raw(r.serialize());
            break;
    }
    return w.take();
}

void Tx::sign_as(const Scalar& secret) {
    submitter = GroupElement::base_point_mul(secret);
    submitter_sig = sign(secret, body(), domain::kTx);
}

Bytes Tx::serialize() const {
    ByteWriter w;
    w.bytes(body());
    w.raw(submitter.bytes);
    w.raw(submitter_sig.serialize());
    return w.take();
}

Tx Tx::deserialize(std::span<const std::uint8_t> data) {
    ByteReader outer(data);
    Bytes b = outer.bytes();
    Tx tx;
    ByteReader r(b);
    tx.kind = static_cast<TxKind>(r.u8());
    switch (tx.kind) {
        case TxKind::RegisterIdentity: {
            auto pk = r.raw(32);
            std::copy(pk.begin(), pk.end(), tx.new_public_key.bytes.begin());
            tx.metadata = r.bytes();
            break;
        }
        case TxKind::PostCommitment: {
            tx.client_id = digest_from_span(r.raw(32));
            tx.round_t = r.u64();
            tx.anchor = digest_from_span(r.raw(32));
            break;
        }
        case TxKind::FinalizeRound: {
            tx.statement = AggregationStatement::deserialize(r.bytes());
            tx.proof = AggregationProof::deserialize(r.bytes());
            tx.attestation = Attestation::deserialize(r.bytes());
            tx.model_hash = digest_from_span(r.raw(32));
            std::uint32_t n = r.u32();
            for (std::uint32_t i = 0; i < n; ++i)
                tx.rejection_receipts.push_back(SubmissionReceipt::deserialize(r.raw(42 + 64)));
            break;
        }
        default:
            throw Error(ErrorCode::ParseError, "unknown tx kind");
    }
    r.expect_end();
    auto pk = outer.raw(32);
    std::copy(pk.begin(), pk.end(), tx.submitter.bytes.begin());
    tx.submitter_sig = Signature::deserialize(outer.raw(64));
    outer.expect_end();
    return tx;
}

Tx Tx::register_identity(const KeyPair& keys, Bytes metadata) {
    Tx tx;
    tx.kind = TxKind::RegisterIdentity;
    tx.new_public_key = keys.public_key;
    tx.metadata = std::move(metadata);
    tx.sign_as(keys.secret);
    return tx;
}

Tx Tx::post_commitment(const ClientIdentity& identity, const ClientSubmission& submission) {
    Tx tx;
    tx.kind = TxKind::PostCommitment;
    tx.client_id = submission.client_id;
    tx.round_t = submission.round_t;
    tx.anchor = submission.anchor;
    tx.sign_as(identity.keypair.secret);
    return tx;
}

Tx Tx::finalize_round(const RoundResult& round, const Digest& model_hash,
                      const KeyPair& operator_keys) {
    Tx tx;
    tx.kind = TxKind::FinalizeRound;
    tx.statement = round.statement;
    tx.proof = round.proof;
    tx.attestation = round.attestation;
    tx.model_hash = model_hash;
    tx.rejection_receipts = round.rejection_receipts;
    tx.sign_as(operator_keys.secret);
    return tx;
}

Bytes Block::body() const {
    ByteWriter w;
    w.u64(height);
    w.raw(prev_hash.bytes);
    w.u64(timestamp);
    w.u32(static_cast<std::uint32_t>(txs.size()));
    for (const auto& tx : txs) w.bytes(tx.serialize());
    return w.take();
}

Digest Block::compute_hash() const { return hash_commit(body(), {}, domain::kBlock); }

Bytes Block::serialize() const {
    Bytes b = body();
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(b.size() + 32));
    w.raw(b);
    w.raw(block_hash.bytes);
    return w.take();
}

Bytes GenesisConfig::serialize() const {
    ByteWriter w;
    w.u32(schema_version);
    w.str(hash_algo);
    w.raw(policy.serialize());
    w.raw(fp.serialize());
    w.bytes(pedersen_seed);
    w.raw(enclave_sig_key.bytes);
    w.raw(enclave_seal_key);
    w.raw(enclave_measurement.bytes);
    w.raw(initial_model_hash.bytes);
    w.u64(first_deadline_ticks);
    return w.take();
}

GenesisConfig GenesisConfig::deserialize(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    GenesisConfig g;
    g.schema_version = r.u32();
    g.hash_algo = r.str();
    g.policy = AggregationPolicy::deserialize(r.raw(20));
    g.fp = FixedPointConfig::deserialize(r.raw(28));
    g.pedersen_seed = r.bytes();
    auto sk = r.raw(32);
    std::copy(sk.begin(), sk.end(), g.enclave_sig_key.bytes.begin());
    auto bk = r.raw(32);
    std::copy(bk.begin(), bk.end(), g.enclave_seal_key.begin());
    g.enclave_measurement = digest_from_span(r.raw(32));
    g.initial_model_hash = digest_from_span(r.raw(32));
    g.first_deadline_ticks = r.u64();
    r.expect_end();
    return g;
}

std::string GenesisConfig::to_json() const {
    nlohmann::json j;
    j["schema_version"] = schema_version;
    j["hash_algo"] = hash_algo;
    j["policy"] = {{"norm_bound", policy.norm_bound},
                   {"quorum", policy.quorum},
                   {"round_timeout_ticks", policy.round_timeout_ticks}};
    j["fixed_point"] = {{"fractional_bits", fp.fractional_bits},
                        {"clamp_magnitude", fp.clamp_magnitude},
                        {"dimension", fp.dimension},
                        {"max_clients", fp.max_clients},
                        {"max_weight", fp.max_weight}};
    j["pedersen_seed"] = to_hex(pedersen_seed);
    j["enclave_sig_key"] = to_hex(enclave_sig_key.bytes);
    j["enclave_seal_key"] = to_hex(enclave_seal_key);
    j["enclave_measurement"] = enclave_measurement.hex();
    j["initial_model_hash"] = initial_model_hash.hex();
    j["first_deadline_ticks"] = first_deadline_ticks;
    return j.dump(2);
}

GenesisConfig GenesisConfig::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    GenesisConfig g;
    g.schema_version = j.at("schema_version").get<std::uint32_t>();
    g.hash_algo = j.at("hash_algo").get<std::string>();
    if (g.hash_algo != "sha256")
        throw Error(ErrorCode::ConfigInvalid, "unsupported hash algorithm: " + g.hash_algo);
    const auto& p = j.at("policy");
    g.policy.norm_bound = p.at("norm_bound").get<std::uint64_t>();
    g.policy.quorum = p.at("quorum").get<std::uint32_t>();
    g.policy.round_timeout_ticks = p.at("round_timeout_ticks").get<std::uint64_t>();
    const auto& f = j.at("fixed_point");
    g.fp = FixedPointConfig::make(f.at("fractional_bits").get<std::uint32_t>(),
                                  f.at("clamp_magnitude").get<double>(),
                                  f.at("dimension").get<std::uint32_t>(),
                                  f.at("max_clients").get<std::uint32_t>(),
                                  f.at("max_weight").get<std::uint64_t>());
    g.pedersen_seed = hex_to_bytes(j.at("pedersen_seed").get<std::string>());
    Bytes sk = hex_to_bytes(j.at("enclave_sig_key").get<std::string>());
    Bytes bk = hex_to_bytes(j.at("enclave_seal_key").get<std::string>());
    Bytes em = hex_to_bytes(j.at("enclave_measurement").get<std::string>());
    Bytes mh = hex_to_bytes(j.at("initial_model_hash").get<std::string>());
    if (sk.size() != 32 || bk.size() != 32 || em.size() != 32 || mh.size() != 32)
        throw Error(ErrorCode::ConfigInvalid, "bad key/digest length in genesis");
    std::copy(sk.begin(), sk.end(), g.enclave_sig_key.bytes.begin());
    std::copy(bk.begin(), bk.end(), g.enclave_seal_key.begin());
    std::copy(em.begin(), em.end(), g.enclave_measurement.bytes.begin());
    std::copy(mh.begin(), mh.end(), g.initial_model_hash.bytes.begin());
    g.first_deadline_ticks = j.at("first_deadline_ticks").get<std::uint64_t>();
    return g;
}

Digest GenesisConfig::digest() const { return sha256(serialize()); }

namespace {

RoundHeader derive_header(std::uint64_t round_t, const Digest& tip, const Digest& policy_id,
                          const Digest& prev_model_hash, std::uint64_t deadline) {
    RoundHeader h;
    h.round_t = round_t;
    ByteWriter w;
    w.raw(tip.bytes);
    w.u64(round_t);
    Digest n = hash_commit(w.data(), {}, domain::kRoundNonce);
    std::copy(n.bytes.begin(), n.bytes.begin() + 16, h.round_nonce.begin());
    h.policy_id = policy_id;
    h.prev_model_hash = prev_model_hash;
    h.deadline = deadline;
    return h;
}

}  // namespace

Ledger::Ledger(GenesisConfig genesis) : genesis_(std::move(genesis)) {
    if (genesis_.hash_algo != "sha256")
        throw Error(ErrorCode::ConfigInvalid, "unsupported hash algorithm");
    params_ = setup_params(genesis_.fp.dimension, genesis_.pedersen_seed);

    Block g;
    g.height = 0;
    g.prev_hash = Digest{};  // fixed all-zero parent
    g.timestamp = tick_++;
    Tx marker;
    marker.kind = TxKind::RegisterIdentity;
    Digest gd = genesis_.digest();
    marker.metadata = Bytes(gd.bytes.begin(), gd.bytes.end());
    marker.new_public_key = genesis_.enclave_sig_key;
    marker.submitter = genesis_.enclave_sig_key;
    g.txs.push_back(marker);
    g.block_hash = g.compute_hash();
    blocks_.push_back(std::move(g));

    open_round_ = derive_header(1, blocks_[0].block_hash, genesis_.policy.policy_id(),
                                genesis_.initial_model_hash, genesis_.first_deadline_ticks);
}

RegistrySnapshot Ledger::registry_snapshot() const {
    RegistrySnapshot s;
    s.members = registry_;
    return s;
}

std::vector<std::pair<Digest, Digest>> Ledger::commitments(std::uint64_t round_t) const {
    auto it = anchors_.find(round_t);
    if (it == anchors_.end()) throw Error(ErrorCode::UnknownRound, "no commitments for round");
    return {it->second.begin(), it->second.end()};
}

const FinalizedRound& Ledger::finalized(std::uint64_t round_t) const {
    auto it = finalized_.find(round_t);
    if (it == finalized_.end()) throw Error(ErrorCode::UnknownRound, "round not finalized");
    return it->second;
}

Digest Ledger::get_model_hash(std::uint64_t round_t) const { return finalized(round_t).model_hash; }

Reject Ledger::validate(const Tx& tx) const {
    if (!verify_sig(tx.submitter, tx.body(), tx.submitter_sig, domain::kTx))
        return Reject::BadSignature;

    switch (tx.kind) {
        case TxKind::RegisterIdentity: {
            // bootstrap tx: self-signed by the key being registered
            if (tx.submitter != tx.new_public_key) return Reject::BadSignature;
            if (registry_.count(sha256(tx.new_public_key.bytes))) return Reject::AlreadyRegistered;
            return Reject::None;
        }
        case TxKind::PostCommitment: {
            auto member = registry_.find(tx.client_id);
            if (member == registry_.end()) return Reject::UnknownIdentity;
            if (member->second != tx.submitter) return Reject::BadSignature;
            if (tx.round_t != open_round_.round_t) return Reject::StaleRound;
            auto round_anchors = anchors_.find(tx.round_t);
            if (round_anchors != anchors_.end() && round_anchors->second.count(tx.client_id))
                return Reject::DuplicateCommitment;
            return Reject::None;
        }
        case TxKind::FinalizeRound: {
            if (tx.statement.header != open_round_) return Reject::StaleRound;
            if (tx.statement.participants.size() < genesis_.policy.quorum)
                return Reject::BelowQuorum;

            VerifyContext ctx;
            ctx.params = &params_;
            ctx.policy = genesis_.policy;
            ctx.fp = genesis_.fp;
            ctx.registry = registry_snapshot();
            ctx.expected_header = open_round_;
            ctx.enclave_sig_key = genesis_.enclave_sig_key;
            if (!verify_aggregation(tx.statement, tx.proof, ctx)) return Reject::ProofInvalid;
            if (!verify_attestation(tx.attestation, tx.statement, genesis_.enclave_sig_key,
                                    genesis_.enclave_measurement))
                return Reject::AttestationInvalid;

            // Inclusion rule: every statement participant posted an anchor
            // matching its commitment; every other on-chain anchor is covered
            // by a signed enclave rejection receipt.
            std::map<Digest, Digest> round_anchors;
            if (auto it = anchors_.find(open_round_.round_t); it != anchors_.end())
                round_anchors = it->second;
            for (const auto& p : tx.statement.participants) {
                auto a = round_anchors.find(p.client_id);
                if (a == round_anchors.end()) return Reject::AnchorMismatch;
                if (a->second != compute_anchor(p.commitment, open_round_))
                    return Reject::AnchorMismatch;
                round_anchors.erase(a);
            }
            for (const auto& [client, anchor] : round_anchors) {
                bool covered = false;
                for (const auto& rec : tx.rejection_receipts) {
                    if (rec.client_id == client && rec.round_t == open_round_.round_t &&
                        !rec.accepted &&
                        verify_sig(genesis_.enclave_sig_key, rec.signed_body(), rec.signature,
                                   domain::kReceipt)) {
                        covered = true;
                        break;
                    }
                }
                if (!covered) return Reject::AnchorMismatch;
            }
            return Reject::None;
        }
    }
    return Reject::Malformed;
}

void Ledger::append_block(const Tx& tx) {
    Block b;
    b.height = blocks_.size();
    b.prev_hash = blocks_.back().block_hash;
    b.timestamp = tick_++;
    b.txs.push_back(tx);
    b.block_hash = b.compute_hash();
    blocks_.push_back(std::move(b));
}

TxResult Ledger::submit_tx(const Tx& tx) {
    TxResult res;
    res.reason = validate(tx);
    if (res.reason != Reject::None) return res;

    append_block(tx);
    switch (tx.kind) {
        case TxKind::RegisterIdentity:
            registry_.emplace(sha256(tx.new_public_key.bytes), tx.new_public_key);
            break;
        case TxKind::PostCommitment:
            anchors_[tx.round_t][tx.client_id] = tx.anchor;
            break;
        case TxKind::FinalizeRound: {
            FinalizedRound fr;
            fr.statement_hash = tx.statement.hash();
            fr.model_hash = tx.model_hash;
            fr.block_height = blocks_.back().height;
            fr.statement_bytes = tx.statement.serialize();
            finalized_.emplace(open_round_.round_t, std::move(fr));
            advance_round(blocks_.back().block_hash, tx.model_hash);
            break;
        }
    }
    res.accepted = true;
    res.receipt = {blocks_.back().height, blocks_.back().block_hash};
    return res;
}

void Ledger::advance_round(const Digest& tip, const Digest& model_hash) {
    open_round_ = derive_header(open_round_.round_t + 1, tip, genesis_.policy.policy_id(),
                                model_hash, tick_ + genesis_.policy.round_timeout_ticks);
}

Bytes Ledger::serialize_chain() const {
    ByteWriter w;
    for (const auto& b : blocks_) w.raw(b.serialize());
    return w.take();
}

void Ledger::save_chain(const std::string& path) const {
    write_file(path, serialize_chain());
}

bool client_verify_distribution(std::uint64_t round_t, const ModelParams& model,
                                const Ledger& ledger) {
    return ledger.get_model_hash(round_t) == model.hash();  // throws if not finalized
}

AuditReport audit_chain(std::span<const std::uint8_t> chain_bytes, const GenesisConfig& genesis) {
    AuditReport report;
    auto fail = [&](std::uint64_t height, std::string what) {
        report.chain_valid = false;
        if (!report.first_bad_height) report.first_bad_height = height;
        report.findings.push_back({height, std::move(what)});
    };

    std::unique_ptr<Ledger> replica;
    try {
        replica = std::make_unique<Ledger>(genesis);
    } catch (const std::exception& e) {
        fail(0, std::string("genesis invalid: ") + e.what());
        return report;
    }

    std::size_t pos = 0;
    std::uint64_t expected_height = 0;
    Digest prev_hash{};
    bool genesis_block = true;

    while (pos < chain_bytes.size()) {
        // record framing: [u32 len][body || 32-byte hash]
        if (chain_bytes.size() - pos < 4) {
            fail(expected_height, "malformed: truncated record length");
            return report;
        }
        std::uint32_t len = 0;
        for (int i = 0; i < 4; ++i) len |= std::uint32_t(chain_bytes[pos + i]) << (8 * i);
        pos += 4;
        if (len < 32 || len > chain_bytes.size() - pos) {
            fail(expected_height, "malformed: bad record length");
            return report;
        }
        auto body = chain_bytes.subspan(pos, len - 32);
        auto stored_hash = chain_bytes.subspan(pos + len - 32, 32);
        pos += len;

        Digest recomputed = hash_commit(body, {}, domain::kBlock);
        if (!std::equal(recomputed.bytes.begin(), recomputed.bytes.end(), stored_hash.begin())) {
            fail(expected_height, "block hash mismatch");
            return report;
        }

        Block b;
        try {
            ByteReader r(body);
            b.height = r.u64();
            auto ph = r.raw(32);
            std::copy(ph.begin(), ph.end(), b.prev_hash.bytes.begin());
            b.timestamp = r.u64();
            std::uint32_t ntx = r.u32();
            for (std::uint32_t i = 0; i < ntx; ++i) b.txs.push_back(Tx::deserialize(r.bytes()));
            r.expect_end();
        } catch (const std::exception& e) {
            fail(expected_height, std::string("malformed block: ") + e.what());
            return report;
        }
        b.block_hash = recomputed;

        if (b.height != expected_height) {
            fail(expected_height, "height discontinuity");
            return report;
        }
        if (b.prev_hash != prev_hash) {
            fail(b.height, "hash-link broken");
            return report;
        }

        if (genesis_block) {
            // the genesis marker must bind this chain to the given config
            Digest want = genesis.digest();
            if (b.txs.size() != 1 ||
                b.txs[0].metadata != Bytes(want.bytes.begin(), want.bytes.end())) {
                fail(0, "genesis block does not match genesis config");
                return report;
            }
            if (replica->blocks()[0].block_hash != b.block_hash) {
                fail(0, "genesis block bytes differ from canonical form");
                return report;
            }
            genesis_block = false;
        } else {
            for (const auto& tx : b.txs) {
                std::uint64_t round_before = replica->open_round_t();
                TxResult res = replica->submit_tx(tx);
                if (!res.accepted) {
                    fail(b.height, std::string("replayed tx rejected: ") + reject_name(res.reason));
                    return report;
                }
                if (tx.kind == TxKind::FinalizeRound) {
                    RoundAudit ra;
                    ra.round_t = round_before;
                    ra.proof_reverified = true;   // submit_tx re-ran verify_aggregation
                    ra.anchors_match = true;      // and the inclusion rule
                    ra.gating_respected = true;   // registry gating enforced on replay
                    report.rounds.push_back(ra);
                }
            }
            // canonical reproduction: the replica must rebuild this block byte for byte
            const Block& rebuilt = replica->blocks().back();
            if (rebuilt.block_hash != b.block_hash || rebuilt.serialize() != Bytes(
                    chain_bytes.begin() + (pos - len - 4), chain_bytes.begin() + pos)) {
                fail(b.height, "replayed block differs from persisted bytes");
                return report;
            }
        }

        prev_hash = b.block_hash;
        ++expected_height;
        ++report.blocks_checked;
    }

    if (report.blocks_checked == 0) {
        fail(0, "empty chain");
        return report;
    }
    report.chain_valid = report.findings.empty();
    return report;
}

AuditReport audit_chain_file(const std::string& chain_path, const std::string& genesis_json_path) {
    Bytes chain = read_file(chain_path);
    Bytes gj = read_file(genesis_json_path);
    GenesisConfig genesis = GenesisConfig::from_json(std::string(gj.begin(), gj.end()));
    return audit_chain(chain, genesis);
}

ThroughputReport measure_throughput(std::uint32_t num_clients, std::uint32_t num_txs,
                                    std::uint64_t seed) {
    ThroughputReport rep;
    if (num_txs == 0) return rep;

    Rng rng(seed);
    GenesisConfig genesis;
    genesis.policy = {1u << 20, 1, 1000};
    genesis.fp = FixedPointConfig::make(16, 8.0, 4);
    genesis.pedersen_seed = to_bytes("zkfl-throughput");
    Rng enclave_rng = rng.fork("enclave");
    KeyPair enclave_keys = keygen(enclave_rng);
    genesis.enclave_sig_key = enclave_keys.public_key;
    genesis.enclave_measurement = Digest{};
    genesis.initial_model_hash = Digest{};
    Ledger ledger(genesis);

    // one commitment slot per (client, round); with num_clients == 0 give every
    // tx its own client so none is rejected as a duplicate
    std::uint32_t pool = num_clients == 0 ? num_txs : num_clients;
    std::vector<ClientIdentity> ids;
    for (std::uint32_t i = 0; i < pool; ++i) {
        Rng crng = rng.fork("client-" + std::to_string(i));
        ids.push_back(ClientIdentity::create(crng));
        ledger.submit_tx(Tx::register_identity(ids.back().keypair));
    }

    // synthetic PostCommitment workload; one distinct (client, round) slot per tx
    // is not possible within one round, so rotate anchors across clients and
    // count only accepted txs.
    std::vector<Tx> txs;
    txs.reserve(num_txs);
    for (std::uint32_t i = 0; i < num_txs; ++i) {
        const auto& id = ids[i % ids.size()];
        Tx tx;
        tx.kind = TxKind::PostCommitment;
        tx.client_id = id.client_id;
        tx.round_t = ledger.open_round_t();
        Digest a;
        Rng arng = rng.fork("anchor-" + std::to_string(i));
        arng.fill(a.bytes);
        tx.anchor = a;
        tx.sign_as(id.keypair.secret);
        txs.push_back(std::move(tx));
    }

    auto t0 = std::chrono::steady_clock::now();
    std::uint64_t committed = 0;
    for (const auto& tx : txs)
        if (ledger.submit_tx(tx).accepted) ++committed;
    auto t1 = std::chrono::steady_clock::now();

    rep.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    rep.txs_committed = committed;
    rep.tps = rep.wall_seconds > 0 ? static_cast<double>(committed) / rep.wall_seconds : 0;
    rep.finality_latency_ticks = 1;  // single-writer simulator commits per tx
    return rep;
}

Bytes read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, std::span<const std::uint8_t> data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

}  // namespace zkfl
