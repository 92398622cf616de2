#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "zkfl/encoding.hpp"
#include "zkfl/flcore.hpp"
#include "zkfl/group.hpp"

namespace zkfl {

enum class Reject : std::uint8_t {
    None = 0,
    BadSignature,
    CommitmentMismatch,
    NormExceeded,
    DuplicateClient,
    UnknownClient,
    RoundClosed,
    AlreadyRegistered,
    UnknownIdentity,
    DuplicateCommitment,
    StaleRound,
    ProofInvalid,
    AnchorMismatch,
    AttestationInvalid,
    BelowQuorum,
    Malformed,
};

const char* reject_name(Reject r);

struct ClientIdentity {
    Digest client_id;  // digest of the serialized public key
    KeyPair keypair;
    bool registered = false;

    static ClientIdentity create(Rng& rng);
};

struct RoundHeader {
    std::uint64_t round_t = 0;
    std::array<std::uint8_t, 16> round_nonce{};
    Digest policy_id;
    Digest prev_model_hash;
    std::uint64_t deadline = 0;  // logical ticks

    Bytes serialize() const;
    static RoundHeader deserialize(std::span<const std::uint8_t> data);
    auto operator<=>(const RoundHeader&) const = default;
};

struct ClientSubmission {
    Digest client_id;
    std::uint64_t round_t = 0;
    Commitment pedersen_commitment;
    Digest anchor;
    Bytes sealed_payload;  // (QuantizedUpdate, blinding r) encrypted to the enclave
    Signature signature;   // over (round header || anchor)
    std::uint64_t declared_weight = 0;

    Bytes serialize() const;
    static ClientSubmission deserialize(std::span<const std::uint8_t> data);
};

/// On-chain anchor binding a Pedersen commitment to a round.
Digest compute_anchor(const Commitment& c, const RoundHeader& header);

struct Participant {
    Digest client_id;
    Commitment commitment;
    std::uint64_t weight = 0;

    auto operator<=>(const Participant&) const = default;
};

struct AggregationStatement {
    RoundHeader header;
    std::vector<Participant> participants;  // canonical order: sorted by client_id
    std::uint64_t total_weight = 0;
    std::vector<std::int64_t> aggregate_quantized;
    Commitment aggregate_commitment;
    Digest policy_id;

    Bytes serialize() const;
    static AggregationStatement deserialize(std::span<const std::uint8_t> data);
    Digest hash() const;
};

enum class ProofBackend : std::uint8_t { Transparent = 0, Mock = 1 };

struct AggregationProof {
    ProofBackend backend = ProofBackend::Transparent;
    Scalar aggregate_blinding;          // transparent: r_agg
    Bytes opaque;                       // mock: 128-byte enclave-keyed tag
    double simulated_prove_ms = 0;      // mock only, replayed figures
    double simulated_verify_ms = 0;

    /// Size of the proof payload as it would ship on the wire.
    std::size_t payload_size() const;
    Bytes serialize() const;
    static AggregationProof deserialize(std::span<const std::uint8_t> data);
};

struct Attestation {
    Digest enclave_measurement;
    Digest statement_hash;
    bool norm_checks_passed = false;
    Signature signature;

    Bytes serialize() const;
    static Attestation deserialize(std::span<const std::uint8_t> data);
};

/// Signed enclave receipt for a processed submission; rejection receipts
/// justify omissions from the finalized statement.
struct SubmissionReceipt {
    std::uint64_t round_t = 0;
    Digest client_id;
    bool accepted = false;
    Reject reason = Reject::None;
    Signature signature;  // enclave key, domain zkfl/receipt

    Bytes signed_body() const;
    Bytes serialize() const;
    static SubmissionReceipt deserialize(std::span<const std::uint8_t> data);
};

struct ProofBackendConfig {
    ProofBackend kind = ProofBackend::Transparent;
    double mock_prove_ms = 45200.0;  // replayed reference figures
    double mock_verify_ms = 10.0;
    double mock_time_scale = 1.0;
};

struct RegistrySnapshot {
    std::map<Digest, GroupElement> members;  // client_id -> public key

    bool contains(const Digest& id) const { return members.count(id) != 0; }
    Digest digest() const;
};

struct VerifyContext {
    const PedersenParams* params = nullptr;
    AggregationPolicy policy;
    FixedPointConfig fp;
    RegistrySnapshot registry;
    std::optional<RoundHeader> expected_header;
    GroupElement enclave_sig_key;  // mock backend tag verification
};

bool verify_aggregation(const AggregationStatement& statement, const AggregationProof& proof,
                        const VerifyContext& ctx);

bool verify_attestation(const Attestation& att, const AggregationStatement& statement,
                        const GroupElement& enclave_sig_key, const Digest& expected_measurement);

// X25519 sealing to the enclave. Deterministic given the injected RNG.
struct SealKeyPair {
    std::array<std::uint8_t, 32> secret{};
    std::array<std::uint8_t, 32> public_key{};

    static SealKeyPair create(Rng& rng);
};

Bytes seal_to(std::span<const std::uint8_t, 32> recipient_pk, std::span<const std::uint8_t> plaintext,
              Rng& rng);
std::optional<Bytes> open_sealed(const SealKeyPair& keys, std::span<const std::uint8_t> sealed);

struct PreparedSubmission {
    ClientSubmission submission;
    QuantizedUpdate quantized;
    Scalar blinding;
};

PreparedSubmission client_prepare_submission(const ClientIdentity& identity,
                                             std::span<const double> update,
                                             const RoundHeader& header,
                                             std::uint64_t current_round_t,
                                             std::span<const std::uint8_t, 32> enclave_seal_pk,
                                             const FixedPointConfig& fp,
                                             const PedersenParams& params,
                                             std::uint64_t declared_weight, Rng& rng);

struct IngestResult {
    bool accepted = false;
    Reject reason = Reject::None;
    SubmissionReceipt receipt;
};

struct RoundResult {
    std::vector<double> delta;
    AggregationStatement statement;
    AggregationProof proof;
    Attestation attestation;
    std::vector<SubmissionReceipt> rejection_receipts;
    double prove_ms = 0;  // measured (transparent) or replayed (mock)
};

/// Sealed-state aggregator. Inputs: submissions. Outputs: (delta, statement,
/// proof, attestation) plus signed receipts. Updates and blindings never leave.
class Enclave {
public:
    Enclave(PedersenParams params, AggregationPolicy policy, FixedPointConfig fp,
            RegistrySnapshot registry, ProofBackendConfig backend, Rng rng);

    const GroupElement& sig_public_key() const { return sig_keys_.public_key; }
    std::span<const std::uint8_t, 32> seal_public_key() const {
        return std::span<const std::uint8_t, 32>(seal_keys_.public_key);
    }
    Digest measurement() const;

    void open_round(const RoundHeader& header);
    void update_registry(RegistrySnapshot registry);
    IngestResult ingest(const ClientSubmission& submission);
    RoundResult aggregate_and_prove();
    std::size_t accepted_count() const { return accepted_.size(); }

private:
    struct AcceptedEntry {
        QuantizedUpdate update;
        Scalar blinding;
        Commitment commitment;
        std::uint64_t weight = 0;
    };

    SubmissionReceipt make_receipt(std::uint64_t round_t, const Digest& client_id, bool accepted,
                                   Reject reason) const;
    AggregationProof prove(const AggregationStatement& statement, const Scalar& r_agg,
                           double* prove_ms) const;

    PedersenParams params_;
    AggregationPolicy policy_;
    FixedPointConfig fp_;
    RegistrySnapshot registry_;
    ProofBackendConfig backend_;
    KeyPair sig_keys_;
    SealKeyPair seal_keys_;
    std::optional<RoundHeader> round_;
    std::map<Digest, AcceptedEntry> accepted_;
    std::vector<SubmissionReceipt> rejections_;
};

}  // namespace zkfl
