#pragma once

#include <memory>
#include <string>
#include <vector>

#include "zkfl/ledger.hpp"

namespace zkfl::testsup {

/// Small protocol fixture: params, enclave, registered clients, one open round.
struct Proto {
    std::uint32_t dim;
    FixedPointConfig fp;
    AggregationPolicy policy;
    PedersenParams params;
    Rng root;
    std::unique_ptr<Enclave> enclave;
    std::vector<ClientIdentity> clients;
    RegistrySnapshot registry;
    RoundHeader header;

    Proto(std::uint32_t dimension, std::uint32_t num_clients, std::uint64_t seed = 1,
          ProofBackend backend = ProofBackend::Transparent,
          std::uint64_t norm_bound = std::uint64_t(256) << 16, std::uint32_t quorum = 1)
        : dim(dimension),
          fp(FixedPointConfig::make(16, 8.0, dimension, std::max(num_clients, 1u), 1u << 16)),
          policy{norm_bound, quorum, 1000},
          params(setup_params(dimension, to_bytes("proto-fixture"))),
          root(seed) {
        ProofBackendConfig bc{backend, 45200.0, 10.0, 1.0};
        enclave = std::make_unique<Enclave>(params, policy, fp, RegistrySnapshot{}, bc,
                                            root.fork("enclave"));
        for (std::uint32_t i = 0; i < num_clients; ++i) {
            Rng crng = root.fork("client-" + std::to_string(i));
            clients.push_back(ClientIdentity::create(crng));
            clients.back().registered = true;
            registry.members[clients.back().client_id] = clients.back().keypair.public_key;
        }
        enclave->update_registry(registry);

        header.round_t = 1;
        Rng nrng = root.fork("nonce");
        nrng.fill(header.round_nonce);
        header.policy_id = policy.policy_id();
        header.deadline = 1000;
        enclave->open_round(header);
    }

    PreparedSubmission prepare(std::uint32_t i, std::span<const double> update,
                               std::uint64_t weight = 1, std::string_view label = "submit") {
        Rng srng = root.fork(std::string(label) + std::to_string(i));
        return client_prepare_submission(clients[i], update, header, header.round_t,
                                         enclave->seal_public_key(), fp, params, weight, srng);
    }

    std::vector<double> random_update(std::uint64_t seed) {
        Rng rng(seed);
        std::vector<double> u(dim);
        for (auto& v : u) v = double(rng.next_u64() % 2001) / 10000.0 - 0.1;
        return u;
    }

    VerifyContext ctx() const {
        VerifyContext c;
        c.params = &params;
        c.policy = policy;
        c.fp = fp;
        c.registry = registry;
        c.expected_header = header;
        c.enclave_sig_key = enclave->sig_public_key();
        return c;
    }
};

}  // namespace zkfl::testsup
