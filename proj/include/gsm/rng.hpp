/**
 * @file rng.hpp
 * @brief Counter-based random streams for reproducible Monte Carlo.
 *
 * Every replicate of every scenario owns an independent substream addressed
 * by (base_seed, stream_id, replicate). Draws depend only on that address and
 * on the draw position, never on execution order or thread count.
 *
 * The block generator is Philox4x32-10 (Salmon et al., SC'11). Standard
 * normals are produced by the Box-Muller transform: each Philox block yields
 * two 53-bit uniforms and therefore two normals.
 */
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace gsm {

/// Philox4x32 with 10 rounds.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter generate(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            ctr = single_round(ctr, key);
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr Counter single_round(const Counter& c, const Key& k) noexcept {
        const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/// SplitMix64 finalizer; used only to turn seeds into Philox keys.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// FNV-1a 64-bit hash, stable across platforms.
constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const char ch : text) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001B3ull;
    }
    return h;
}

/// Address of one independent substream.
struct StreamAddress {
    std::uint64_t base_seed = 0;
    std::uint64_t stream_id = 0;
    std::uint64_t replicate = 0;
};

/**
 * @brief Sequential view of one substream as i.i.d. N(0,1) draws.
 *
 * The key is derived from (base_seed, stream_id); the replicate index occupies
 * the upper half of the counter and the block index the lower half.
 */
class NormalStream {
public:
    explicit NormalStream(const StreamAddress& address) noexcept {
        const std::uint64_t k = mix64(mix64(address.base_seed) ^ address.stream_id);
        key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
        replicate_lo_ = static_cast<std::uint32_t>(address.replicate);
        replicate_hi_ = static_cast<std::uint32_t>(address.replicate >> 32);
    }

    double operator()() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const auto out = Philox4x32::generate(
            {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
             replicate_lo_, replicate_hi_},
            key_);
        ++block_;
        const std::uint64_t a = (std::uint64_t{out[0]} << 32) | out[1];
        const std::uint64_t b = (std::uint64_t{out[2]} << 32) | out[3];
        // u1 in (0, 1], u2 in [0, 1)
        const double u1 = static_cast<double>((a >> 11) + 1) * 0x1.0p-53;
        const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    Philox4x32::Key key_{};
    std::uint32_t replicate_lo_ = 0;
    std::uint32_t replicate_hi_ = 0;
    std::uint64_t block_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace gsm
