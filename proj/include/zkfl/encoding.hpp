#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "zkfl/group.hpp"

namespace zkfl {

/// Fixed-point quantization parameters. Scale S = 2^fractional_bits;
/// coordinates clamp to [-M*S, M*S] in quantized units.
struct FixedPointConfig {
    std::uint32_t fractional_bits = 16;
    double clamp_magnitude = 8.0;
    std::uint32_t dimension = 0;
    // Aggregate-safety envelope: max_clients * max_weight * M * S must stay
    // far below both int64 range and q/2, so field sums never wrap.
    std::uint32_t max_clients = 64;
    std::uint64_t max_weight = 1u << 20;

    static FixedPointConfig make(std::uint32_t fractional_bits, double clamp_magnitude,
                                 std::uint32_t dimension, std::uint32_t max_clients = 64,
                                 std::uint64_t max_weight = 1u << 20);

    std::int64_t scale() const { return std::int64_t(1) << fractional_bits; }
    std::int64_t clamp_units() const;

    Bytes serialize() const;
    static FixedPointConfig deserialize(std::span<const std::uint8_t> data);
    Digest config_id() const;
};

struct QuantizedUpdate {
    std::vector<std::int64_t> values;
    Digest config_id;
    std::uint64_t round = 0;

    Bytes serialize() const;
    static QuantizedUpdate deserialize(std::span<const std::uint8_t> data);
};

QuantizedUpdate quantize(std::span<const double> update, const FixedPointConfig& cfg,
                         std::uint64_t round = 0);
std::vector<double> dequantize(const QuantizedUpdate& qu, const FixedPointConfig& cfg);

std::vector<Scalar> encode_to_scalars(std::span<const std::int64_t> values,
                                      const FixedPointConfig& cfg);
std::vector<std::int64_t> decode_from_scalars(std::span<const Scalar> scalars,
                                              const FixedPointConfig& cfg);

Scalar encode_scalar(std::int64_t value);
std::int64_t decode_scalar(const Scalar& s);

std::uint64_t l2_norm_squared(const QuantizedUpdate& qu);

}  // namespace zkfl
