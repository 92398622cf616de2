#include "zkfl/group.hpp"

#include <sodium.h>

#include <cstdio>
#include <mutex>

namespace zkfl {

namespace {

void ensure_sodium() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0) throw Error(ErrorCode::Internal, "libsodium init failed");
    });
}

}  // namespace

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidDimension: return "invalid-dimension";
        case ErrorCode::DimensionMismatch: return "dimension-mismatch";
        case ErrorCode::MissingDomainTag: return "missing-domain-tag";
        case ErrorCode::NonFiniteValue: return "non-finite-value";
        case ErrorCode::ConfigMismatch: return "config-mismatch";
        case ErrorCode::OverflowRisk: return "overflow-risk";
        case ErrorCode::ShapeError: return "shape-error";
        case ErrorCode::EmptyRound: return "empty-round";
        case ErrorCode::NotRegistered: return "not-registered";
        case ErrorCode::StaleRound: return "stale-round";
        case ErrorCode::RoundClosed: return "round-closed";
        case ErrorCode::RoundFailedQuorum: return "round-failed-quorum";
        case ErrorCode::RoundNotFinalized: return "round-not-finalized";
        case ErrorCode::UnknownRound: return "unknown-round";
        case ErrorCode::UnknownScenario: return "unknown-scenario";
        case ErrorCode::ConfigInvalid: return "config-invalid";
        case ErrorCode::ParseError: return "parse-error";
        case ErrorCode::IoError: return "io-error";
        case ErrorCode::Internal: return "internal";
    }
    return "unknown";
}

std::string to_hex(std::span<const std::uint8_t> data) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

Digest sha256(std::span<const std::uint8_t> data) {
    ensure_sodium();
    Digest d;
    crypto_hash_sha256(d.bytes.data(), data.data(), data.size());
    return d;
}

Digest hash_commit(std::span<const std::uint8_t> payload,
                   std::span<const std::uint8_t> nonce,
                   std::string_view domain_tag) {
    if (domain_tag.empty()) throw Error(ErrorCode::MissingDomainTag, "hash_commit requires a domain tag");
    ByteWriter w;
    w.raw(to_bytes(domain_tag));
    w.u64(payload.size());
    w.raw(payload);
    w.raw(nonce);
    return sha256(w.data());
}

Scalar Scalar::one() { return from_u64(1); }

Scalar Scalar::from_u64(std::uint64_t v) {
    Scalar s;
    for (int i = 0; i < 8; ++i) s.bytes[i] = static_cast<std::uint8_t>(v >> (8 * i));
    return s;
}

Scalar Scalar::from_wide(std::span<const std::uint8_t> wide64) {
    ensure_sodium();
    if (wide64.size() != 64) throw Error(ErrorCode::ParseError, "wide scalar input must be 64 bytes");
    Scalar s;
    crypto_core_ristretto255_scalar_reduce(s.bytes.data(), wide64.data());
    return s;
}

Scalar Scalar::hash_to_scalar(std::span<const std::uint8_t> data, std::string_view domain_tag) {
    ensure_sodium();
    ByteWriter w;
    w.str(domain_tag);
    w.raw(data);
    std::uint8_t wide[64];
    crypto_hash_sha512(wide, w.data().data(), w.data().size());
    return from_wide(wide);
}

Scalar Scalar::add(const Scalar& o) const {
    ensure_sodium();
    Scalar out;
    crypto_core_ristretto255_scalar_add(out.bytes.data(), bytes.data(), o.bytes.data());
    return out;
}

Scalar Scalar::sub(const Scalar& o) const {
    ensure_sodium();
    Scalar out;
    crypto_core_ristretto255_scalar_sub(out.bytes.data(), bytes.data(), o.bytes.data());
    return out;
}

Scalar Scalar::mul(const Scalar& o) const {
    ensure_sodium();
    Scalar out;
    crypto_core_ristretto255_scalar_mul(out.bytes.data(), bytes.data(), o.bytes.data());
    return out;
}

Scalar Scalar::negate() const {
    ensure_sodium();
    Scalar out;
    crypto_core_ristretto255_scalar_negate(out.bytes.data(), bytes.data());
    return out;
}

bool Scalar::is_zero() const {
    for (auto b : bytes)
        if (b != 0) return false;
    return true;
}

GroupElement GroupElement::base_point_mul(const Scalar& s) {
    ensure_sodium();
    GroupElement out;
    if (crypto_scalarmult_ristretto255_base(out.bytes.data(), s.bytes.data()) != 0)
        return identity();  // scalar == 0
    return out;
}

GroupElement GroupElement::hash_to_group(std::span<const std::uint8_t> data, std::string_view domain_tag) {
    ensure_sodium();
    ByteWriter w;
    w.str(domain_tag);
    w.raw(data);
    std::uint8_t wide[64];
    crypto_hash_sha512(wide, w.data().data(), w.data().size());
    GroupElement out;
    crypto_core_ristretto255_from_hash(out.bytes.data(), wide);
    return out;
}

GroupElement GroupElement::add(const GroupElement& o) const {
    ensure_sodium();
    GroupElement out;
    if (crypto_core_ristretto255_add(out.bytes.data(), bytes.data(), o.bytes.data()) != 0)
        throw Error(ErrorCode::Internal, "invalid group element in add");
    return out;
}

GroupElement GroupElement::sub(const GroupElement& o) const {
    ensure_sodium();
    GroupElement out;
    if (crypto_core_ristretto255_sub(out.bytes.data(), bytes.data(), o.bytes.data()) != 0)
        throw Error(ErrorCode::Internal, "invalid group element in sub");
    return out;
}

GroupElement GroupElement::mul(const Scalar& s) const {
    ensure_sodium();
    GroupElement out;
    // libsodium signals an identity result (zero scalar or identity input)
    // through the return code; the identity encoding is still well defined.
    if (crypto_scalarmult_ristretto255(out.bytes.data(), s.bytes.data(), bytes.data()) != 0)
        return identity();
    return out;
}

bool GroupElement::is_identity() const { return *this == identity(); }

bool GroupElement::is_valid() const {
    ensure_sodium();
    return crypto_core_ristretto255_is_valid_point(bytes.data()) == 1;
}

Bytes PedersenParams::serialize() const {
    ByteWriter w;
    w.u32(dimension);
    for (const auto& g : generators) w.raw(g.bytes);
    w.raw(blinding_generator.bytes);
    w.bytes(seed);
    return w.take();
}

PedersenParams PedersenParams::deserialize(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    PedersenParams p;
    p.dimension = r.u32();
    p.generators.resize(p.dimension);
    for (auto& g : p.generators) {
        auto s = r.raw(32);
        std::copy(s.begin(), s.end(), g.bytes.begin());
    }
    auto h = r.raw(32);
    std::copy(h.begin(), h.end(), p.blinding_generator.bytes.begin());
    p.seed = r.bytes();
    r.expect_end();
    return p;
}

PedersenParams setup_params(std::uint32_t dimension, std::span<const std::uint8_t> seed) {
    if (dimension == 0) throw Error(ErrorCode::InvalidDimension, "Pedersen dimension must be >= 1");
    PedersenParams p;
    p.dimension = dimension;
    p.seed.assign(seed.begin(), seed.end());
    p.generators.reserve(dimension);
    // index 0 is the blinding generator h, 1..d the vector generators.
    auto derive = [&](std::uint32_t index) {
        ByteWriter w;
        w.bytes(seed);
        w.u32(index);
        GroupElement g = GroupElement::hash_to_group(w.data(), domain::kGenerator);
        if (g.is_identity()) throw Error(ErrorCode::Internal, "derived identity generator");
        return g;
    };
    p.blinding_generator = derive(0);
    for (std::uint32_t i = 1; i <= dimension; ++i) p.generators.push_back(derive(i));
    return p;
}

Commitment commit_vector(const PedersenParams& params, std::span<const Scalar> v, const Scalar& r) {
    if (v.size() != params.dimension)
        throw Error(ErrorCode::DimensionMismatch, "vector length does not match Pedersen dimension");
    GroupElement acc = params.blinding_generator.mul(r);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i].is_zero()) continue;
        acc = acc.add(params.generators[i].mul(v[i]));
    }
    return Commitment{acc};
}

bool verify_opening(const PedersenParams& params, const Commitment& c,
                    std::span<const Scalar> v, const Scalar& r) {
    if (v.size() != params.dimension) return false;
    return commit_vector(params, v, r) == c;
}

Bytes Signature::serialize() const {
    ByteWriter w;
    w.raw(challenge.bytes);
    w.raw(response.bytes);
    return w.take();
}

Signature Signature::deserialize(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    Signature s;
    auto c = r.raw(32);
    std::copy(c.begin(), c.end(), s.challenge.bytes.begin());
    auto z = r.raw(32);
    std::copy(z.begin(), z.end(), s.response.bytes.begin());
    r.expect_end();
    return s;
}

Rng::Rng(std::uint64_t seed) {
    ensure_sodium();
    ByteWriter w;
    w.str("zkfl/rng");
    w.u64(seed);
    key_ = sha256(w.data()).bytes;
}

Rng::Rng(const Digest& seed) {
    ensure_sodium();
    key_ = seed.bytes;
}

void Rng::fill(std::span<std::uint8_t> out) {
    ByteWriter w;
    w.raw(key_);
    w.u64(counter_++);
    Digest sub = sha256(w.data());
    std::uint8_t subkey[randombytes_SEEDBYTES];
    std::copy(sub.bytes.begin(), sub.bytes.end(), subkey);
    randombytes_buf_deterministic(out.data(), out.size(), subkey);
}

std::uint64_t Rng::next_u64() {
    std::uint8_t buf[8];
    fill(buf);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

Scalar Rng::next_scalar() {
    std::uint8_t wide[64];
    fill(wide);
    return Scalar::from_wide(wide);
}

Rng Rng::fork(std::string_view label) {
    ByteWriter w;
    w.raw(key_);
    w.str(label);
    w.u64(counter_++);
    return Rng(sha256(w.data()));
}

KeyPair keygen(Rng& rng) { return keygen_from_secret(rng.next_scalar()); }

KeyPair keygen_from_secret(const Scalar& secret) {
    return KeyPair{secret, GroupElement::base_point_mul(secret)};
}

namespace {

Scalar schnorr_challenge(const GroupElement& nonce_point, const GroupElement& public_key,
                         std::span<const std::uint8_t> message, std::string_view domain_tag) {
    ByteWriter w;
    w.raw(nonce_point.bytes);
    w.raw(public_key.bytes);
    w.raw(message);
    return Scalar::hash_to_scalar(w.data(), domain_tag);
}

}  // namespace

Signature sign(const Scalar& secret, std::span<const std::uint8_t> message, std::string_view domain_tag) {
    GroupElement public_key = GroupElement::base_point_mul(secret);
    // Deterministic nonce bound to key, message, and domain.
    ByteWriter nw;
    nw.raw(secret.bytes);
    nw.str(domain_tag);
    nw.raw(message);
    Scalar k = Scalar::hash_to_scalar(nw.data(), "zkfl/schnorr-nonce");
    GroupElement nonce_point = GroupElement::base_point_mul(k);
    Scalar e = schnorr_challenge(nonce_point, public_key, message, domain_tag);
    Scalar s = k.add(e.mul(secret));
    return Signature{e, s};
}

bool verify_sig(const GroupElement& public_key, std::span<const std::uint8_t> message,
                const Signature& sig, std::string_view domain_tag) {
    if (!public_key.is_valid()) return false;
    // R' = s*B - e*X ; accept iff H(R', X, m) == e.
    try {
        GroupElement r_prime =
            GroupElement::base_point_mul(sig.response).sub(public_key.mul(sig.challenge));
        return schnorr_challenge(r_prime, public_key, message, domain_tag) == sig.challenge;
    } catch (const Error&) {
        return false;
    }
}

}  // namespace zkfl
