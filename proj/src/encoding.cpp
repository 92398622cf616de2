#include "zkfl/encoding.hpp"

#include <algorithm>
#include <cmath>

namespace zkfl {

namespace {

// Magnitudes this far below 2^63 also sit far below q/2 (q ~ 2^252), so one
// bound covers int64 aggregation and field wrap-around at once.
constexpr unsigned __int128 kSafeLimit = (static_cast<unsigned __int128>(1) << 62);

}  // namespace

FixedPointConfig FixedPointConfig::make(std::uint32_t fractional_bits, double clamp_magnitude,
                                        std::uint32_t dimension, std::uint32_t max_clients,
                                        std::uint64_t max_weight) {
    if (dimension == 0) throw Error(ErrorCode::InvalidDimension, "dimension must be >= 1");
    if (fractional_bits > 40) throw Error(ErrorCode::ConfigInvalid, "fractional_bits too large");
    if (!(clamp_magnitude > 0) || !std::isfinite(clamp_magnitude))
        throw Error(ErrorCode::ConfigInvalid, "clamp_magnitude must be positive and finite");
    if (max_clients == 0 || max_weight == 0)
        throw Error(ErrorCode::ConfigInvalid, "aggregate-safety limits must be positive");
    FixedPointConfig cfg{fractional_bits, clamp_magnitude, dimension, max_clients, max_weight};
    unsigned __int128 bound = static_cast<unsigned __int128>(max_clients) * max_weight;
    bound *= static_cast<unsigned __int128>(cfg.clamp_units());
    if (bound >= kSafeLimit)
        throw Error(ErrorCode::OverflowRisk, "aggregate-safety bound violated: N_max*w_max*M*S too large");
    return cfg;
}

std::int64_t FixedPointConfig::clamp_units() const {
    double limit = clamp_magnitude * static_cast<double>(scale());
    return static_cast<std::int64_t>(std::ceil(limit));
}

Bytes FixedPointConfig::serialize() const {
    ByteWriter w;
    w.u32(fractional_bits);
    w.f64(clamp_magnitude);
    w.u32(dimension);
    w.u32(max_clients);
    w.u64(max_weight);
    return w.take();
}

FixedPointConfig FixedPointConfig::deserialize(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    std::uint32_t f = r.u32();
    double m = r.f64();
    std::uint32_t d = r.u32();
    std::uint32_t nc = r.u32();
    std::uint64_t nw = r.u64();
    r.expect_end();
    return make(f, m, d, nc, nw);
}

Digest FixedPointConfig::config_id() const {
    return hash_commit(serialize(), {}, domain::kConfigId);
}

Bytes QuantizedUpdate::serialize() const {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(values.size()));
    for (auto v : values) w.i64(v);
    w.raw(config_id.bytes);
    w.u64(round);
    return w.take();
}

QuantizedUpdate QuantizedUpdate::deserialize(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    QuantizedUpdate qu;
    std::uint32_t n = r.u32();
    qu.values.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) qu.values.push_back(r.i64());
    auto c = r.raw(32);
    std::copy(c.begin(), c.end(), qu.config_id.bytes.begin());
    qu.round = r.u64();
    r.expect_end();
    return qu;
}

QuantizedUpdate quantize(std::span<const double> update, const FixedPointConfig& cfg,
                         std::uint64_t round) {
    if (update.size() != cfg.dimension)
        throw Error(ErrorCode::DimensionMismatch, "update length does not match config dimension");
    QuantizedUpdate qu;
    qu.values.reserve(update.size());
    qu.config_id = cfg.config_id();
    qu.round = round;
    const double scale = static_cast<double>(cfg.scale());
    const std::int64_t limit = cfg.clamp_units();
    for (double x : update) {
        if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteValue, "non-finite update coordinate");
        // round-half-to-even, then clamp (mirrors L2-clipping practice)
        double scaled = std::nearbyint(x * scale);
        std::int64_t v;
        if (scaled >= static_cast<double>(limit))
            v = limit;
        else if (scaled <= -static_cast<double>(limit))
            v = -limit;
        else
            v = static_cast<std::int64_t>(scaled);
        qu.values.push_back(v);
    }
    return qu;
}

std::vector<double> dequantize(const QuantizedUpdate& qu, const FixedPointConfig& cfg) {
    if (qu.config_id != cfg.config_id())
        throw Error(ErrorCode::ConfigMismatch, "quantized update was produced under a different config");
    std::vector<double> out;
    out.reserve(qu.values.size());
    const double scale = static_cast<double>(cfg.scale());
    for (auto v : qu.values) out.push_back(static_cast<double>(v) / scale);
    return out;
}

Scalar encode_scalar(std::int64_t value) {
    if (value >= 0) return Scalar::from_u64(static_cast<std::uint64_t>(value));
    return Scalar::from_u64(static_cast<std::uint64_t>(-value)).negate();
}

std::int64_t decode_scalar(const Scalar& s) {
    auto small_u64 = [](const Scalar& x) -> std::int64_t {
        for (std::size_t i = 8; i < 32; ++i)
            if (x.bytes[i] != 0) return -1;
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(x.bytes[i]) << (8 * i);
        if (v > (std::uint64_t(1) << 62)) return -1;
        return static_cast<std::int64_t>(v);
    };
    if (std::int64_t v = small_u64(s); v >= 0) return v;
    if (std::int64_t v = small_u64(s.negate()); v >= 0) return -v;
    throw Error(ErrorCode::OverflowRisk, "scalar magnitude outside representable range");
}

std::vector<Scalar> encode_to_scalars(std::span<const std::int64_t> values,
                                      const FixedPointConfig& cfg) {
    unsigned __int128 cap = static_cast<unsigned __int128>(cfg.max_clients) * cfg.max_weight;
    cap *= static_cast<unsigned __int128>(cfg.clamp_units());
    std::vector<Scalar> out;
    out.reserve(values.size());
    for (auto v : values) {
        unsigned __int128 mag = v >= 0 ? static_cast<unsigned __int128>(v)
                                       : static_cast<unsigned __int128>(-(v + 1)) + 1;
        if (mag > cap) throw Error(ErrorCode::OverflowRisk, "value exceeds aggregate-safety bound");
        out.push_back(encode_scalar(v));
    }
    return out;
}

std::vector<std::int64_t> decode_from_scalars(std::span<const Scalar> scalars,
                                              const FixedPointConfig&) {
    std::vector<std::int64_t> out;
    out.reserve(scalars.size());
    for (const auto& s : scalars) out.push_back(decode_scalar(s));
    return out;
}

std::uint64_t l2_norm_squared(const QuantizedUpdate& qu) {
    unsigned __int128 sum = 0;
    for (auto v : qu.values) {
        unsigned __int128 mag = v >= 0 ? static_cast<unsigned __int128>(v)
                                       : static_cast<unsigned __int128>(-(v + 1)) + 1;
        sum += mag * mag;
        if (sum > static_cast<unsigned __int128>(UINT64_MAX))
            throw Error(ErrorCode::OverflowRisk, "squared norm exceeds 64 bits");
    }
    return static_cast<std::uint64_t>(sum);
}

}  // namespace zkfl
