#pragma once

// Reproducible random streams. Every replication of every experiment owns a
// stream keyed by (seed, domain, index); keys are mixed with SplitMix64 and
// the stream itself is xoshiro256++. No stream is shared between threads.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace sbfw {

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Domain tags: one per experiment kind so that streams never collide
/// across operations run with the same user seed.
enum class StreamDomain : std::uint64_t {
    supercrit = 1,
    bsc = 2,
    donsker = 3,
    doob_meyer = 4,
    local_time = 5,
    oracle_walk = 6,
    oracle_graph = 7,
    dump = 8,
    test = 99,
};

class Stream {
public:
    using result_type = std::uint64_t;

    explicit Stream(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    /// Stream for replication `index` of an operation in `domain`.
    static Stream derive(std::uint64_t seed, StreamDomain domain, std::uint64_t index) {
        std::uint64_t k = seed;
        std::uint64_t h = splitmix64(k);
        k = h ^ (static_cast<std::uint64_t>(domain) * 0xd1b54a32d192ed03ULL);
        h = splitmix64(k);
        k = h ^ (index * 0x8cb92ba72f3d8dd7ULL + 0x632be59bd9b4e019ULL);
        return Stream(splitmix64(k));
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on (0, 1], 53 random bits.
    double uniform_open0() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

    /// Exponential with rate 1.
    double exponential() { return -std::log(uniform_open0()); }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
};

/// n i.i.d. Exponential(1) variables, in draw order.
std::vector<double> draw_exponentials(std::size_t n, Stream& rng);

/// The order statistics of n i.i.d. Exponential(1) variables, ascending,
/// generated in O(n) through the Renyi representation
/// E_(k) = sum_{j<=k} Y_j / (n - j + 1) with Y_j i.i.d. Exponential(1).
std::vector<double> draw_sorted_exponentials(std::size_t n, Stream& rng);

/// Standard normal via the Marsaglia polar method; deterministic per stream.
class NormalSampler {
public:
    double operator()(Stream& rng);

private:
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace sbfw
