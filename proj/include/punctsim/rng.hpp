#pragma once

// Counter-based PRNG (Philox 4x64-10) plus the distribution helpers the
// simulator needs. Counter-based generation gives cheap, independent,
// reproducible streams keyed by (seed, purpose, user, slot), so parallel
// and serial runs consume identical randomness.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace punctsim {

struct Philox4x64 {
    static constexpr std::uint64_t M0 = 0xD2E7470EE14C6C93ULL;
    static constexpr std::uint64_t M1 = 0xCA5A826395121157ULL;
    static constexpr std::uint64_t W0 = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t W1 = 0xBB67AE8584CAA73BULL;

    static inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                               std::uint64_t& lo) {
        __uint128_t p = static_cast<__uint128_t>(a) * b;
        hi = static_cast<std::uint64_t>(p >> 64);
        lo = static_cast<std::uint64_t>(p);
    }

    static std::array<std::uint64_t, 4> block(std::array<std::uint64_t, 4> ctr,
                                              std::array<std::uint64_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            std::uint64_t hi0, lo0, hi1, lo1;
            mulhilo(M0, ctr[0], hi0, lo0);
            mulhilo(M1, ctr[2], hi1, lo1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += W0;
            key[1] += W1;
        }
        return ctr;
    }
};

/// One independent stream of a keyed Philox generator. Streams with distinct
/// (seed, stream_id) pairs never overlap.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t substream = 0)
        : key_{seed, stream_id}, base_{substream, 0, 0, 0} {}

    std::uint64_t next_u64() {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

    /// Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // Lemire-style rejection; bias negligible for our n but kept exact.
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            std::uint64_t t = -n % n;
            while (lo < t) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Standard normal via Box-Muller (two at a time).
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Poisson by inversion; fine for the small means used here (< ~30).
    int next_poisson(double mean) {
        double L = std::exp(-mean);
        double p = 1.0;
        int k = 0;
        do {
            ++k;
            p *= next_double();
        } while (p > L);
        return k - 1;
    }

private:
    void refill() {
        std::array<std::uint64_t, 4> ctr = base_;
        ctr[1] = counter_++;
        buf_ = Philox4x64::block(ctr, key_);
        pos_ = 0;
    }

    std::array<std::uint64_t, 2> key_;
    std::array<std::uint64_t, 4> base_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 4> buf_{};
    int pos_ = 4;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Well-spread stream ids from semantic coordinates.
inline std::uint64_t stream_id(std::uint64_t purpose, std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = purpose * 0x9E3779B97F4A7C15ULL;
    h ^= a + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    h *= 0xBF58476D1CE4E5B9ULL;
    h ^= b + 0x94D049BB133111EBULL + (h << 6) + (h >> 2);
    h *= 0x94D049BB133111EBULL;
    return h ^ (h >> 31);
}

namespace streams {
constexpr std::uint64_t embb_symbols = 1;
constexpr std::uint64_t urllc_bits = 2;
constexpr std::uint64_t arrivals = 3;
constexpr std::uint64_t fading = 4;
constexpr std::uint64_t noise_embb = 5;
constexpr std::uint64_t noise_urllc = 6;
constexpr std::uint64_t oracle = 7;
constexpr std::uint64_t placement = 8;
} // namespace streams

} // namespace punctsim
