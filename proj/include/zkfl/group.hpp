#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "zkfl/bytes.hpp"
#include "zkfl/error.hpp"

namespace zkfl {

// Domain tags. One 256-bit hash everywhere, distinct ASCII tag per use.
namespace domain {
inline constexpr std::string_view kSignature = "zkfl/sig";
inline constexpr std::string_view kCommitAnchor = "zkfl/commit-anchor";
inline constexpr std::string_view kAttest = "zkfl/attest";
inline constexpr std::string_view kBlock = "zkfl/block";
inline constexpr std::string_view kTx = "zkfl/tx";
inline constexpr std::string_view kGenerator = "zkfl/pedersen-gen";
inline constexpr std::string_view kRoundNonce = "zkfl/round-nonce";
inline constexpr std::string_view kStatement = "zkfl/statement";
inline constexpr std::string_view kMockProof = "zkfl/mock-proof";
inline constexpr std::string_view kReceipt = "zkfl/receipt";
inline constexpr std::string_view kSeal = "zkfl/seal";
inline constexpr std::string_view kConfigId = "zkfl/config-id";
inline constexpr std::string_view kPolicyId = "zkfl/policy-id";
inline constexpr std::string_view kModelHash = "zkfl/model";
}  // namespace domain

/// 32-byte SHA-256 output.
struct Digest {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const Digest&) const = default;
    std::string hex() const { return to_hex(bytes); }
};

Digest sha256(std::span<const std::uint8_t> data);

/// H(domain_tag || len64(payload) || payload || nonce). The length prefix
/// separates (payload, nonce) pairs that would otherwise concatenate equal.
Digest hash_commit(std::span<const std::uint8_t> payload,
                   std::span<const std::uint8_t> nonce,
                   std::string_view domain_tag);

/// Scalar in Z_q, q the ristretto255 group order. Canonical 32-byte LE.
struct Scalar {
    std::array<std::uint8_t, 32> bytes{};

    static Scalar zero() { return {}; }
    static Scalar one();
    static Scalar from_u64(std::uint64_t v);
    /// Reduce 64 uniform bytes mod q.
    static Scalar from_wide(std::span<const std::uint8_t> wide64);
    /// Hash arbitrary bytes to a scalar under a domain tag.
    static Scalar hash_to_scalar(std::span<const std::uint8_t> data, std::string_view domain_tag);

    Scalar add(const Scalar& o) const;
    Scalar sub(const Scalar& o) const;
    Scalar mul(const Scalar& o) const;
    Scalar negate() const;
    bool is_zero() const;

    auto operator<=>(const Scalar&) const = default;
};

/// Element of the ristretto255 prime-order group, canonical compressed form.
struct GroupElement {
    std::array<std::uint8_t, 32> bytes{};

    static GroupElement identity() { return {}; }
    static GroupElement base_point_mul(const Scalar& s);
    static GroupElement hash_to_group(std::span<const std::uint8_t> data, std::string_view domain_tag);

    GroupElement add(const GroupElement& o) const;
    GroupElement sub(const GroupElement& o) const;
    GroupElement mul(const Scalar& s) const;
    bool is_identity() const;
    bool is_valid() const;

    auto operator<=>(const GroupElement&) const = default;
};

struct PedersenParams {
    std::uint32_t dimension = 0;
    std::vector<GroupElement> generators;  // g_1 .. g_d
    GroupElement blinding_generator;       // h
    Bytes seed;

    Bytes serialize() const;
    static PedersenParams deserialize(std::span<const std::uint8_t> data);
};

struct Commitment {
    GroupElement point;

    auto operator<=>(const Commitment&) const = default;
};

/// Deterministic generator derivation: hash-to-group over (seed, index).
/// Nothing-up-my-sleeve; no party knows discrete-log relations.
PedersenParams setup_params(std::uint32_t dimension, std::span<const std::uint8_t> seed);

Commitment commit_vector(const PedersenParams& params, std::span<const Scalar> v, const Scalar& r);
bool verify_opening(const PedersenParams& params, const Commitment& c,
                    std::span<const Scalar> v, const Scalar& r);

struct Signature {
    Scalar challenge;
    Scalar response;

    auto operator<=>(const Signature&) const = default;
    Bytes serialize() const;
    static Signature deserialize(std::span<const std::uint8_t> data);
};

struct KeyPair {
    Scalar secret;
    GroupElement public_key;
};

/// Deterministic byte stream expanded from a 32-byte seed. Injected wherever
/// randomness is needed; never a global RNG.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    explicit Rng(const Digest& seed);

    void fill(std::span<std::uint8_t> out);
    std::uint64_t next_u64();
    Scalar next_scalar();
    /// Independent child stream, forked by label.
    Rng fork(std::string_view label);

private:
    std::array<std::uint8_t, 32> key_{};
    std::uint64_t counter_ = 0;
};

KeyPair keygen(Rng& rng);
KeyPair keygen_from_secret(const Scalar& secret);

/// Schnorr over ristretto255; deterministic nonce, Fiat-Shamir challenge
/// domain-separated by `domain_tag` (default protocol signature domain).
Signature sign(const Scalar& secret, std::span<const std::uint8_t> message,
               std::string_view domain_tag = domain::kSignature);
bool verify_sig(const GroupElement& public_key, std::span<const std::uint8_t> message,
                const Signature& sig, std::string_view domain_tag = domain::kSignature);

}  // namespace zkfl
