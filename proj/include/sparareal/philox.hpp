#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// Every draw is a pure function of (key, counter), so the order in which
// draws are requested never affects their values.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace sparareal {

class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter generate(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            ctr = single_round(ctr, key);
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr Counter single_round(const Counter& c, const Key& k) noexcept {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/// Stream domains keep Brownian draws and sampling draws disjoint even when
/// the same seed is reused for both.
enum class StreamDomain : std::uint32_t {
    brownian = 0x42574e31u,
    sample_normal = 0x534e4f52u,
    sample_uniform = 0x53554e49u,
};

/// Deterministic variates addressed by (seed, domain, three indices).
class KeyedStream {
public:
    constexpr KeyedStream(std::uint64_t seed, StreamDomain domain) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          domain_(static_cast<std::uint32_t>(domain)) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform(std::uint64_t i, std::uint32_t j, std::uint32_t l) const noexcept {
        const auto w = block(i, j, l);
        return to_unit_open_right(w[0], w[1]);
    }

    /// Standard normal via the Box-Muller cosine branch.
    double normal(std::uint64_t i, std::uint32_t j, std::uint32_t l) const noexcept {
        const auto w = block(i, j, l);
        // u1 in (0, 1] so the logarithm is finite.
        const double u1 = to_unit_open_right(w[0], w[1]) + 0x1.0p-53;
        const double u2 = to_unit_open_right(w[2], w[3]);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    Philox4x32::Counter block(std::uint64_t i, std::uint32_t j, std::uint32_t l) const noexcept {
        // The high half of i is folded into the domain word so that 64-bit
        // path indices stay distinct.
        const auto lo = static_cast<std::uint32_t>(i);
        const auto hi = static_cast<std::uint32_t>(i >> 32);
        return Philox4x32::generate({lo, j, l, domain_ ^ (hi * 0x9E3779B9u)}, key_);
    }

    static double to_unit_open_right(std::uint32_t a, std::uint32_t b) noexcept {
        const std::uint64_t bits = (static_cast<std::uint64_t>(a) << 32) | b;
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    }

    Philox4x32::Key key_;
    std::uint32_t domain_;
};

/// SplitMix64 finalizer, used to derive per-run seeds from a base seed.
constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) noexcept {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace sparareal
