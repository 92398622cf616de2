/* C API for the zkfl verifiable federated learning library.
 *
 * All functions return zkfl_status; on any non-OK status a thread-local
 * message is available from zkfl_last_error(). Handles are opaque and must
 * be released with their destroy function.
 */
#ifndef ZKFL_H
#define ZKFL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum zkfl_status {
    ZKFL_OK = 0,
    ZKFL_ERR_CONFIG = 1,       /* bad or unreadable configuration */
    ZKFL_ERR_IO = 2,           /* file read/write failure */
    ZKFL_ERR_ROUND_FAILED = 3, /* a federation round did not finalize */
    ZKFL_ERR_DETECTION = 4,    /* adversary suite outcome mismatched expectations */
    ZKFL_ERR_AUDIT = 5,        /* chain audit found an invalid block */
    ZKFL_ERR_INVALID_ARG = 6,
    ZKFL_ERR_INTERNAL = 7
} zkfl_status;

const char* zkfl_version(void);

/* Message for the most recent failure on this thread. Never NULL. */
const char* zkfl_last_error(void);

typedef struct zkfl_run_options {
    int64_t seed;        /* -1 keeps the seed from the config file */
    const char* backend; /* "transparent", "mock", or NULL to keep the config value */
    int32_t workers;     /* 0 keeps the config value */
    int32_t rounds;      /* 0 keeps the config value */
} zkfl_run_options;

/* Run a federation from a JSON config, writing chain, metrics, models, and a
 * manifest into out_dir. options may be NULL. */
zkfl_status zkfl_run(const char* config_path, const char* out_dir,
                     const zkfl_run_options* options, uint32_t* rounds_finalized);

/* Run the adversary suite. Writes a JSON report to report_path (may be NULL),
 * prints a summary table to stdout when print_table is nonzero. Returns
 * ZKFL_ERR_DETECTION if any scenario outcome mismatched its expectation;
 * suite_complete (may be NULL) receives 1 on a fully green suite. */
zkfl_status zkfl_attack(const char* config_path, const char* report_path, int self_test,
                        int print_table, int* suite_complete);

/* Replay-audit a serialized chain against its genesis config. chain_valid
 * receives 0/1; first_bad_height receives the lowest inconsistent block
 * height, or UINT64_MAX when the chain is clean. Returns ZKFL_ERR_AUDIT when
 * the chain is invalid. */
zkfl_status zkfl_audit(const char* chain_path, const char* genesis_json_path, int* chain_valid,
                       uint64_t* first_bad_height);

/* Proving/verification sweep plus ledger throughput. config_path may be NULL
 * for the default grid; results are written as CSV to csv_path. */
zkfl_status zkfl_bench(const char* config_path, const char* csv_path);

/* Pedersen vector commitments over quantized (int64) updates. */
typedef struct zkfl_params zkfl_params_t;

zkfl_status zkfl_params_create(uint32_t dimension, const uint8_t* seed, size_t seed_len,
                               zkfl_params_t** out);
void zkfl_params_destroy(zkfl_params_t* params);

/* blinding is a canonical 32-byte scalar; commitment is the 32-byte
 * compressed group element. Each value must have magnitude below 2^62. */
zkfl_status zkfl_commit(const zkfl_params_t* params, const int64_t* values, size_t len,
                        const uint8_t blinding[32], uint8_t commitment[32]);

zkfl_status zkfl_verify_opening(const zkfl_params_t* params, const uint8_t commitment[32],
                                const int64_t* values, size_t len, const uint8_t blinding[32],
                                int* valid);

#ifdef __cplusplus
}
#endif

#endif /* ZKFL_H */
