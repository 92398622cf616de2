#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zkfl/protocol.hpp"

namespace zkfl {

enum class TxKind : std::uint8_t { RegisterIdentity = 0, PostCommitment = 1, FinalizeRound = 2 };

struct Tx {
    TxKind kind = TxKind::RegisterIdentity;

    // RegisterIdentity
    GroupElement new_public_key;
    Bytes metadata;

    // PostCommitment
    Digest client_id;
    std::uint64_t round_t = 0;
    Digest anchor;

    // FinalizeRound
    AggregationStatement statement;
    AggregationProof proof;
    Attestation attestation;
    Digest model_hash;
    std::vector<SubmissionReceipt> rejection_receipts;

    GroupElement submitter;
    Signature submitter_sig;  // over body(), domain zkfl/tx

    Bytes body() const;
    void sign_as(const Scalar& secret);
    Bytes serialize() const;
    static Tx deserialize(std::span<const std::uint8_t> data);

    static Tx register_identity(const KeyPair& keys, Bytes metadata = {});
    static Tx post_commitment(const ClientIdentity& identity, const ClientSubmission& submission);
    /// Submitted by the (untrusted) aggregator operator; integrity rests on
    /// the proof and attestation, not on who carried the tx.
    static Tx finalize_round(const RoundResult& round, const Digest& model_hash,
                             const KeyPair& operator_keys);
};

struct Block {
    std::uint64_t height = 0;
    Digest prev_hash;
    std::vector<Tx> txs;
    std::uint64_t timestamp = 0;  // logical ticks
    Digest block_hash;

    Bytes body() const;
    Digest compute_hash() const;
    Bytes serialize() const;  // length-prefixed record: [u32 len][body||hash]
};

struct GenesisConfig {
    std::uint32_t schema_version = 1;
    std::string hash_algo = "sha256";
    AggregationPolicy policy;
    FixedPointConfig fp;
    Bytes pedersen_seed;
    GroupElement enclave_sig_key;
    std::array<std::uint8_t, 32> enclave_seal_key{};
    Digest enclave_measurement;
    Digest initial_model_hash;
    std::uint64_t first_deadline_ticks = 1000;

    Bytes serialize() const;
    static GenesisConfig deserialize(std::span<const std::uint8_t> data);
    std::string to_json() const;
    static GenesisConfig from_json(const std::string& text);
    Digest digest() const;
};

struct FinalizedRound {
    Digest statement_hash;
    Digest model_hash;
    std::uint64_t block_height = 0;
    Bytes statement_bytes;
};

struct Receipt {
    std::uint64_t block_height = 0;
    Digest block_hash;
};

struct TxResult {
    bool accepted = false;
    Reject reason = Reject::None;
    Receipt receipt;
};

struct RoundAudit {
    std::uint64_t round_t = 0;
    bool proof_reverified = false;
    bool anchors_match = false;
    bool gating_respected = false;
};

struct AuditFinding {
    std::uint64_t height = 0;
    std::string description;
};

struct AuditReport {
    bool chain_valid = false;
    std::optional<std::uint64_t> first_bad_height;
    std::vector<AuditFinding> findings;
    std::vector<RoundAudit> rounds;
    std::uint64_t blocks_checked = 0;
};

/// Single-writer deterministic consortium-ledger simulator. One block per
/// accepted tx; logical-tick timestamps; deterministic round nonces derived
/// from the chain tip. The block producer is the seam where a BFT engine
/// would plug in.
class Ledger {
public:
    explicit Ledger(GenesisConfig genesis);

    TxResult submit_tx(const Tx& tx);

    // read-only views
    const RoundHeader& open_round() const { return open_round_; }
    const std::map<Digest, GroupElement>& registry() const { return registry_; }
    RegistrySnapshot registry_snapshot() const;
    std::vector<std::pair<Digest, Digest>> commitments(std::uint64_t round_t) const;
    const FinalizedRound& finalized(std::uint64_t round_t) const;
    Digest get_model_hash(std::uint64_t round_t) const;
    std::uint64_t open_round_t() const { return open_round_.round_t; }
    std::size_t height() const { return blocks_.size(); }
    const std::vector<Block>& blocks() const { return blocks_; }
    const GenesisConfig& genesis() const { return genesis_; }
    const PedersenParams& params() const { return params_; }

    Bytes serialize_chain() const;
    void save_chain(const std::string& path) const;

private:
    Reject validate(const Tx& tx) const;
    void advance_round(const Digest& tip, const Digest& model_hash);
    void append_block(const Tx& tx);

    GenesisConfig genesis_;
    PedersenParams params_;
    std::vector<Block> blocks_;
    std::map<Digest, GroupElement> registry_;
    RoundHeader open_round_;
    std::map<std::uint64_t, std::map<Digest, Digest>> anchors_;  // round -> client -> anchor
    std::map<std::uint64_t, FinalizedRound> finalized_;
    std::uint64_t tick_ = 0;
};

/// §IV-F check: the distributed model matches the hash finalized on-chain.
bool client_verify_distribution(std::uint64_t round_t, const ModelParams& model,
                                const Ledger& ledger);

/// Full replay audit over raw chain bytes. Total: malformed input yields an
/// invalid report, never a crash.
AuditReport audit_chain(std::span<const std::uint8_t> chain_bytes, const GenesisConfig& genesis);

AuditReport audit_chain_file(const std::string& chain_path, const std::string& genesis_json_path);

struct ThroughputReport {
    double tps = 0;
    double finality_latency_ticks = 0;
    std::uint64_t txs_committed = 0;
    double wall_seconds = 0;
};

ThroughputReport measure_throughput(std::uint32_t num_clients, std::uint32_t num_txs,
                                    std::uint64_t seed);

Bytes read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> data);

}  // namespace zkfl
