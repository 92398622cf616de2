#include "zkfl/protocol.hpp"

#include <sodium.h>

#include <algorithm>
#include <chrono>

namespace zkfl {

const char* reject_name(Reject r) {
    switch (r) {
        case Reject::None: return "none";
        case Reject::BadSignature: return "bad-signature";
        case Reject::CommitmentMismatch: return "commitment-mismatch";
        case Reject::NormExceeded: return "norm-exceeded";
        case Reject::DuplicateClient: return "duplicate-client";
        case Reject::UnknownClient: return "unknown-client";
        case Reject::RoundClosed: return "round-closed";
        case Reject::AlreadyRegistered: return "already-registered";
        case Reject::UnknownIdentity: return "unknown-identity";
        case Reject::DuplicateCommitment: return "duplicate-commitment";
        case Reject::StaleRound: return "stale-round";
        case Reject::ProofInvalid: return "proof-invalid";
        case Reject::AnchorMismatch: return "anchor-mismatch";
        case Reject::AttestationInvalid: return "attestation-invalid";
        case Reject::BelowQuorum: return "below-quorum";
        case Reject::Malformed: return "malformed";
    }
    return "unknown";
}

ClientIdentity ClientIdentity::create(Rng& rng) {
    ClientIdentity id;
    id.keypair = keygen(rng);
    id.client_id = sha256(id.keypair.public_key.bytes);
    return id;
}

Bytes RoundHeader::serialize() const {
    ByteWriter w;
    w.u64(round_t);
    w.raw(round_nonce);
    w.raw(policy_id.bytes);
    w.raw(prev_model_hash.bytes);
    w.u64(deadline);
    return w.take();
}

RoundHeader RoundHeader::deserialize(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    RoundHeader h;
    h.round_t = r.u64();
    auto n = r.raw(16);
    std::copy(n.begin(), n.end(), h.round_nonce.begin());
    auto p = r.raw(32);
    std::copy(p.begin(), p.end(), h.policy_id.bytes.begin());
    auto m = r.raw(32);
    std::copy(m.begin(), m.end(), h.prev_model_hash.bytes.begin());
    h.deadline = r.u64();
    r.expect_end();
    return h;
}

Digest compute_anchor(const Commitment& c, const RoundHeader& header) {
    ByteWriter w;
    w.raw(c.point.bytes);
    w.u64(header.round_t);
    w.raw(header.policy_id.bytes);
    return hash_commit(w.data(), header.round_nonce, domain::kCommitAnchor);
}

Bytes ClientSubmission::serialize() const {
    ByteWriter w;
    w.raw(client_id.bytes);
    w.u64(round_t);
    w.raw(pedersen_commitment.point.bytes);
    w.raw(anchor.bytes);
    w.bytes(sealed_payload);
    w.raw(signature.serialize());
    w.u64(declared_weight);
    return w.take();
}

ClientSubmission ClientSubmission::deserialize(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    ClientSubmission s;
    auto id = r.raw(32);
    std::copy(id.begin(), id.end(), s.client_id.bytes.begin());
    s.round_t = r.u64();
    auto c = r.raw(32);
    std::copy(c.begin(), c.end(), s.pedersen_commitment.point.bytes.begin());
    auto a = r.raw(32);
    std::copy(a.begin(), a.end(), s.anchor.bytes.begin());
    s.sealed_payload = r.bytes();
    s.signature = Signature::deserialize(r.raw(64));
    s.declared_weight = r.u64();
    r.expect_end();
    return s;
}

Bytes AggregationStatement::serialize() const {
    ByteWriter w;
    w.raw(header.serialize());
    w.u32(static_cast<std::uint32_t>(participants.size()));
    for (const auto& p : participants) {
        w.raw(p.client_id.bytes);
        w.raw(p.commitment.point.bytes);
        w.u64(p.weight);
    }
    w.u64(total_weight);
    w.u32(static_cast<std::uint32_t>(aggregate_quantized.size()));
    for (auto v : aggregate_quantized) w.i64(v);
    w.raw(aggregate_commitment.point.bytes);
    w.raw(policy_id.bytes);
    return w.take();
}

AggregationStatement AggregationStatement::deserialize(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    AggregationStatement s;
    s.header = RoundHeader::deserialize(r.raw(96));
    std::uint32_t n = r.u32();
    s.participants.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        Participant p;
        auto id = r.raw(32);
        std::copy(id.begin(), id.end(), p.client_id.bytes.begin());
        auto c = r.raw(32);
        std::copy(c.begin(), c.end(), p.commitment.point.bytes.begin());
        p.weight = r.u64();
        s.participants.push_back(p);
    }
    s.total_weight = r.u64();
    std::uint32_t d = r.u32();
    s.aggregate_quantized.reserve(d);
    for (std::uint32_t i = 0; i < d; ++i) s.aggregate_quantized.push_back(r.i64());
    auto ac = r.raw(32);
    std::copy(ac.begin(), ac.end(), s.aggregate_commitment.point.bytes.begin());
    auto pid = r.raw(32);
    std::copy(pid.begin(), pid.end(), s.policy_id.bytes.begin());
    r.expect_end();
    return s;
}

Digest AggregationStatement::hash() const {
    return hash_commit(serialize(), {}, domain::kStatement);
}

std::size_t AggregationProof::payload_size() const {
    return backend == ProofBackend::Transparent ? 32 : opaque.size();
}

Bytes AggregationProof::serialize() const {
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(backend));
    if (backend == ProofBackend::Transparent) {
        w.raw(aggregate_blinding.bytes);
    } else {
        w.bytes(opaque);
        w.f64(simulated_prove_ms);
        w.f64(simulated_verify_ms);
    }
    return w.take();
}

AggregationProof AggregationProof::deserialize(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    AggregationProof p;
    p.backend = static_cast<ProofBackend>(r.u8());
    if (p.backend == ProofBackend::Transparent) {
        auto s = r.raw(32);
        std::copy(s.begin(), s.end(), p.aggregate_blinding.bytes.begin());
    } else if (p.backend == ProofBackend::Mock) {
        p.opaque = r.bytes();
        p.simulated_prove_ms = r.f64();
        p.simulated_verify_ms = r.f64();
    } else {
        throw Error(ErrorCode::ParseError, "unknown proof backend tag");
    }
    r.expect_end();
    return p;
}

Bytes Attestation::serialize() const {
    ByteWriter w;
    w.raw(enclave_measurement.bytes);
    w.raw(statement_hash.bytes);
    w.u8(norm_checks_passed ? 1 : 0);
    w.raw(signature.serialize());
    return w.take();
}

Attestation Attestation::deserialize(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    Attestation a;
    auto m = r.raw(32);
    std::copy(m.begin(), m.end(), a.enclave_measurement.bytes.begin());
    auto s = r.raw(32);
    std::copy(s.begin(), s.end(), a.statement_hash.bytes.begin());
    a.norm_checks_passed = r.u8() != 0;
    a.signature = Signature::deserialize(r.raw(64));
    r.expect_end();
    return a;
}

Bytes SubmissionReceipt::signed_body() const {
    ByteWriter w;
    w.u64(round_t);
    w.raw(client_id.bytes);
    w.u8(accepted ? 1 : 0);
    w.u8(static_cast<std::uint8_t>(reason));
    return w.take();
}

Bytes SubmissionReceipt::serialize() const {
    ByteWriter w;
    w.raw(signed_body());
    w.raw(signature.serialize());
    return w.take();
}

SubmissionReceipt SubmissionReceipt::deserialize(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    SubmissionReceipt rec;
    rec.round_t = r.u64();
    auto id = r.raw(32);
    std::copy(id.begin(), id.end(), rec.client_id.bytes.begin());
    rec.accepted = r.u8() != 0;
    rec.reason = static_cast<Reject>(r.u8());
    rec.signature = Signature::deserialize(r.raw(64));
    r.expect_end();
    return rec;
}

Digest RegistrySnapshot::digest() const {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(members.size()));
    for (const auto& [id, pk] : members) {
        w.raw(id.bytes);
        w.raw(pk.bytes);
    }
    return sha256(w.data());
}

SealKeyPair SealKeyPair::create(Rng& rng) {
    SealKeyPair kp;
    rng.fill(kp.secret);
    crypto_scalarmult_base(kp.public_key.data(), kp.secret.data());
    return kp;
}

Bytes seal_to(std::span<const std::uint8_t, 32> recipient_pk,
              std::span<const std::uint8_t> plaintext, Rng& rng) {
    std::array<std::uint8_t, 32> eph_sk{};
    rng.fill(eph_sk);
    std::array<std::uint8_t, 32> eph_pk{};
    crypto_scalarmult_base(eph_pk.data(), eph_sk.data());
    std::array<std::uint8_t, 32> shared{};
    if (crypto_scalarmult(shared.data(), eph_sk.data(), recipient_pk.data()) != 0)
        throw Error(ErrorCode::Internal, "seal key exchange failed");
    ByteWriter kw;
    kw.str(domain::kSeal);
    kw.raw(eph_pk);
    kw.raw(recipient_pk);
    kw.raw(shared);
    Digest key = sha256(kw.data());

    Bytes out(eph_pk.begin(), eph_pk.end());
    out.resize(32 + crypto_secretbox_MACBYTES + plaintext.size());
    std::uint8_t nonce[crypto_secretbox_NONCEBYTES] = {0};  // key is single-use
    crypto_secretbox_easy(out.data() + 32, plaintext.data(), plaintext.size(), nonce,
                          key.bytes.data());
    return out;
}

std::optional<Bytes> open_sealed(const SealKeyPair& keys, std::span<const std::uint8_t> sealed) {
    if (sealed.size() < 32 + crypto_secretbox_MACBYTES) return std::nullopt;
    std::array<std::uint8_t, 32> shared{};
    if (crypto_scalarmult(shared.data(), keys.secret.data(), sealed.data()) != 0)
        return std::nullopt;
    ByteWriter kw;
    kw.str(domain::kSeal);
    kw.raw(sealed.subspan(0, 32));
    kw.raw(keys.public_key);
    kw.raw(shared);
    Digest key = sha256(kw.data());

    Bytes plain(sealed.size() - 32 - crypto_secretbox_MACBYTES);
    std::uint8_t nonce[crypto_secretbox_NONCEBYTES] = {0};
    if (crypto_secretbox_open_easy(plain.data(), sealed.data() + 32, sealed.size() - 32, nonce,
                                   key.bytes.data()) != 0)
        return std::nullopt;
    return plain;
}

PreparedSubmission client_prepare_submission(const ClientIdentity& identity,
                                             std::span<const double> update,
                                             const RoundHeader& header,
                                             std::uint64_t current_round_t,
                                             std::span<const std::uint8_t, 32> enclave_seal_pk,
                                             const FixedPointConfig& fp,
                                             const PedersenParams& params,
                                             std::uint64_t declared_weight, Rng& rng) {
    if (!identity.registered)
        throw Error(ErrorCode::NotRegistered, "client identity is not registered");
    if (header.round_t != current_round_t)
        throw Error(ErrorCode::StaleRound, "round header is not current");

    PreparedSubmission out;
    out.quantized = quantize(update, fp, header.round_t);
    out.blinding = rng.next_scalar();
    auto scalars = encode_to_scalars(out.quantized.values, fp);
    Commitment c = commit_vector(params, scalars, out.blinding);

    ClientSubmission& s = out.submission;
    s.client_id = identity.client_id;
    s.round_t = header.round_t;
    s.pedersen_commitment = c;
    s.anchor = compute_anchor(c, header);
    s.declared_weight = declared_weight;

    ByteWriter payload;
    payload.bytes(out.quantized.serialize());
    payload.raw(out.blinding.bytes);
    s.sealed_payload = seal_to(enclave_seal_pk, payload.data(), rng);

    ByteWriter msg;
    msg.raw(header.serialize());
    msg.raw(s.anchor.bytes);
    s.signature = sign(identity.keypair.secret, msg.data());
    return out;
}

Enclave::Enclave(PedersenParams params, AggregationPolicy policy, FixedPointConfig fp,
                 RegistrySnapshot registry, ProofBackendConfig backend, Rng rng)
    : params_(std::move(params)),
      policy_(std::move(policy)),
      fp_(fp),
      registry_(std::move(registry)),
      backend_(backend) {
    Rng sig_rng = rng.fork("enclave-sig");
    sig_keys_ = keygen(sig_rng);
    Rng seal_rng = rng.fork("enclave-seal");
    seal_keys_ = SealKeyPair::create(seal_rng);
}

Digest Enclave::measurement() const {
    ByteWriter w;
    w.str("zkfl-enclave-v1");
    w.raw(policy_.serialize());
    w.raw(fp_.serialize());
    w.u8(static_cast<std::uint8_t>(backend_.kind));
    return sha256(w.data());
}

void Enclave::open_round(const RoundHeader& header) {
    if (header.policy_id != policy_.policy_id())
        throw Error(ErrorCode::ConfigMismatch, "round header bound to a different policy");
    round_ = header;
    accepted_.clear();
    rejections_.clear();
}

void Enclave::update_registry(RegistrySnapshot registry) { registry_ = std::move(registry); }

SubmissionReceipt Enclave::make_receipt(std::uint64_t round_t, const Digest& client_id,
                                        bool accepted, Reject reason) const {
    SubmissionReceipt rec;
    rec.round_t = round_t;
    rec.client_id = client_id;
    rec.accepted = accepted;
    rec.reason = reason;
    rec.signature = sign(sig_keys_.secret, rec.signed_body(), domain::kReceipt);
    return rec;
}

IngestResult Enclave::ingest(const ClientSubmission& submission) {
    auto reject = [&](Reject reason) {
        IngestResult r;
        r.accepted = false;
        r.reason = reason;
        r.receipt = make_receipt(submission.round_t, submission.client_id, false, reason);
        rejections_.push_back(r.receipt);
        return r;
    };

    if (!round_) return reject(Reject::RoundClosed);
    if (submission.round_t != round_->round_t) return reject(Reject::StaleRound);

    auto member = registry_.members.find(submission.client_id);
    if (member == registry_.members.end()) return reject(Reject::UnknownClient);

    // first submission wins
    if (accepted_.count(submission.client_id)) return reject(Reject::DuplicateClient);

    ByteWriter msg;
    msg.raw(round_->serialize());
    msg.raw(submission.anchor.bytes);
    if (!verify_sig(member->second, msg.data(), submission.signature))
        return reject(Reject::BadSignature);
    if (compute_anchor(submission.pedersen_commitment, *round_) != submission.anchor)
        return reject(Reject::CommitmentMismatch);

    auto plain = open_sealed(seal_keys_, submission.sealed_payload);
    if (!plain) return reject(Reject::CommitmentMismatch);

    QuantizedUpdate qu;
    Scalar blinding;
    try {
        ByteReader r(*plain);
        qu = QuantizedUpdate::deserialize(r.bytes());
        auto b = r.raw(32);
        std::copy(b.begin(), b.end(), blinding.bytes.begin());
        r.expect_end();
    } catch (const Error&) {
        return reject(Reject::Malformed);
    }

    if (qu.values.size() != fp_.dimension || qu.config_id != fp_.config_id())
        return reject(Reject::CommitmentMismatch);
    std::vector<Scalar> scalars;
    try {
        scalars = encode_to_scalars(qu.values, fp_);
    } catch (const Error&) {
        return reject(Reject::CommitmentMismatch);
    }
    if (commit_vector(params_, scalars, blinding) != submission.pedersen_commitment)
        return reject(Reject::CommitmentMismatch);

    // policy norm bound, in quantized units
    unsigned __int128 bound =
        static_cast<unsigned __int128>(policy_.norm_bound) * policy_.norm_bound;
    if (static_cast<unsigned __int128>(l2_norm_squared(qu)) > bound)
        return reject(Reject::NormExceeded);

    if (submission.declared_weight == 0 || submission.declared_weight > fp_.max_weight)
        return reject(Reject::Malformed);

    AcceptedEntry entry{std::move(qu), blinding, submission.pedersen_commitment,
                        submission.declared_weight};
    accepted_.emplace(submission.client_id, std::move(entry));

    IngestResult r;
    r.accepted = true;
    r.receipt = make_receipt(submission.round_t, submission.client_id, true, Reject::None);
    return r;
}

AggregationProof Enclave::prove(const AggregationStatement& statement, const Scalar& r_agg,
                                double* prove_ms) const {
    AggregationProof proof;
    proof.backend = backend_.kind;
    if (backend_.kind == ProofBackend::Transparent) {
        proof.aggregate_blinding = r_agg;
        return proof;
    }
    // Mock SNARK: a 128-byte enclave-keyed tag over the statement hash.
    // Integrity only; not sound against the enclave itself.
    Digest sh = statement.hash();
    Signature tag = sign(sig_keys_.secret, sh.bytes, domain::kMockProof);
    Bytes tag_bytes = tag.serialize();
    ByteWriter fw;
    fw.raw(tag_bytes);
    fw.raw(sh.bytes);
    Digest f1 = hash_commit(fw.data(), {}, domain::kMockProof);
    Digest f2 = hash_commit(f1.bytes, {}, domain::kMockProof);
    proof.opaque = tag_bytes;
    proof.opaque.insert(proof.opaque.end(), f1.bytes.begin(), f1.bytes.end());
    proof.opaque.insert(proof.opaque.end(), f2.bytes.begin(), f2.bytes.end());
    proof.simulated_prove_ms = backend_.mock_prove_ms * backend_.mock_time_scale;
    proof.simulated_verify_ms = backend_.mock_verify_ms * backend_.mock_time_scale;
    *prove_ms = proof.simulated_prove_ms;
    return proof;
}

RoundResult Enclave::aggregate_and_prove() {
    if (!round_) throw Error(ErrorCode::RoundClosed, "no open round");
    if (accepted_.size() < policy_.quorum)
        throw Error(ErrorCode::RoundFailedQuorum,
                    "accepted " + std::to_string(accepted_.size()) + " < quorum " +
                        std::to_string(policy_.quorum));

    const std::uint32_t d = fp_.dimension;
    std::vector<__int128> acc(d, 0);
    Scalar r_agg = Scalar::zero();
    std::uint64_t total_weight = 0;

    RoundResult out;
    out.statement.header = *round_;
    out.statement.policy_id = policy_.policy_id();

    // std::map iteration is already canonical client_id order
    for (const auto& [id, e] : accepted_) {
        Scalar wn = Scalar::from_u64(e.weight);
        r_agg = r_agg.add(wn.mul(e.blinding));
        for (std::uint32_t j = 0; j < d; ++j)
            acc[j] += static_cast<__int128>(e.weight) * e.update.values[j];
        total_weight += e.weight;
        out.statement.participants.push_back({id, e.commitment, e.weight});
    }
    out.statement.total_weight = total_weight;

    out.statement.aggregate_quantized.resize(d);
    constexpr __int128 limit = static_cast<__int128>(1) << 62;
    for (std::uint32_t j = 0; j < d; ++j) {
        if (acc[j] >= limit || acc[j] <= -limit)
            throw Error(ErrorCode::OverflowRisk, "aggregate exceeds safety bound");
        out.statement.aggregate_quantized[j] = static_cast<std::int64_t>(acc[j]);
    }

    Commitment agg = Commitment{GroupElement::identity()};
    for (const auto& p : out.statement.participants)
        agg.point = agg.point.add(p.commitment.point.mul(Scalar::from_u64(p.weight)));
    out.statement.aggregate_commitment = agg;

    auto t0 = std::chrono::steady_clock::now();
    out.proof = prove(out.statement, r_agg, &out.prove_ms);
    if (backend_.kind == ProofBackend::Transparent)
        out.prove_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0).count();

    Attestation att;
    att.enclave_measurement = measurement();
    att.statement_hash = out.statement.hash();
    att.norm_checks_passed = true;
    ByteWriter aw;
    aw.raw(att.enclave_measurement.bytes);
    aw.raw(att.statement_hash.bytes);
    aw.u8(1);
    att.signature = sign(sig_keys_.secret, aw.data(), domain::kAttest);
    out.attestation = att;

    // weighted mean over total_weight; the proved statement stays integral
    const double scale = static_cast<double>(fp_.scale());
    out.delta.resize(d);
    for (std::uint32_t j = 0; j < d; ++j)
        out.delta[j] = static_cast<double>(out.statement.aggregate_quantized[j]) /
                       (scale * static_cast<double>(total_weight));

    out.rejection_receipts = rejections_;
    round_.reset();
    return out;
}

bool verify_aggregation(const AggregationStatement& statement, const AggregationProof& proof,
                        const VerifyContext& ctx) {
    try {
        if (ctx.params == nullptr) return false;
        if (statement.policy_id != ctx.policy.policy_id()) return false;
        if (statement.header.policy_id != statement.policy_id) return false;
        if (ctx.expected_header && statement.header != *ctx.expected_header) return false;

        // canonical order, uniqueness, registration, weights
        if (statement.participants.size() < ctx.policy.quorum) return false;
        const Digest* prev = nullptr;
        std::uint64_t total = 0;
        for (const auto& p : statement.participants) {
            if (prev && !(*prev < p.client_id)) return false;
            prev = &p.client_id;
            if (!ctx.registry.contains(p.client_id)) return false;
            if (p.weight == 0 || p.weight > ctx.fp.max_weight) return false;
            if (!p.commitment.point.is_valid()) return false;
            total += p.weight;
        }
        if (total != statement.total_weight) return false;
        if (statement.aggregate_quantized.size() != ctx.params->dimension) return false;

        Commitment agg{GroupElement::identity()};
        for (const auto& p : statement.participants)
            agg.point = agg.point.add(p.commitment.point.mul(Scalar::from_u64(p.weight)));
        if (agg != statement.aggregate_commitment) return false;

        if (proof.backend == ProofBackend::Transparent) {
            auto scalars = encode_to_scalars(statement.aggregate_quantized, ctx.fp);
            return commit_vector(*ctx.params, scalars, proof.aggregate_blinding) == agg;
        }
        if (proof.backend == ProofBackend::Mock) {
            if (proof.opaque.size() != 128) return false;
            Digest sh = statement.hash();
            Signature tag = Signature::deserialize(std::span(proof.opaque).subspan(0, 64));
            if (!verify_sig(ctx.enclave_sig_key, sh.bytes, tag, domain::kMockProof)) return false;
            ByteWriter fw;
            fw.raw(std::span(proof.opaque).subspan(0, 64));
            fw.raw(sh.bytes);
            Digest f1 = hash_commit(fw.data(), {}, domain::kMockProof);
            Digest f2 = hash_commit(f1.bytes, {}, domain::kMockProof);
            return std::equal(f1.bytes.begin(), f1.bytes.end(), proof.opaque.begin() + 64) &&
                   std::equal(f2.bytes.begin(), f2.bytes.end(), proof.opaque.begin() + 96);
        }
        return false;
    } catch (const Error&) {
        return false;
    }
}

bool verify_attestation(const Attestation& att, const AggregationStatement& statement,
                        const GroupElement& enclave_sig_key, const Digest& expected_measurement) {
    if (att.enclave_measurement != expected_measurement) return false;
    if (att.statement_hash != statement.hash()) return false;
    if (!att.norm_checks_passed) return false;
    ByteWriter aw;
    aw.raw(att.enclave_measurement.bytes);
    aw.raw(att.statement_hash.bytes);
    aw.u8(1);
    return verify_sig(enclave_sig_key, aw.data(), att.signature, domain::kAttest);
}

}  // namespace zkfl
