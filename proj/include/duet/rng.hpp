#pragma once

// Seeded, portable random streams.
//
// Generator: xoshiro256++ (Blackman & Vigna), state expanded from a 64-bit
// key with splitmix64.  Substreams are derived from (seed, purpose tag,
// index) so that e.g. the BS layout stream and the fading stream of one
// experiment never overlap.  Every sampler below is written out explicitly
// instead of using <random> distributions, which are implementation-defined
// and would break bit-identical replay across standard libraries.

#include <cstdint>
#include <cmath>
#include <string_view>

namespace duet::rng {

inline constexpr std::uint64_t golden64 = 0x9e3779b97f4a7c15ull;

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += golden64);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

class Stream {
public:
    Stream() : Stream(0, "default") {}

    Stream(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0) {
        std::uint64_t key = seed ^ fnv1a64(tag) ^ (index * golden64);
        for (auto& w : s_) w = splitmix64(key);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = golden64;
    }

    std::uint64_t next_u64() {
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

    // uniform in [0,1), 53-bit resolution
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in (0,1], safe as a log() argument
    double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // unbiased integer in [0, n), Lemire's multiply-shift rejection
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t x = next_u64();
        unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                x = next_u64();
                m = static_cast<unsigned __int128>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    double exponential() { return -std::log(uniform_pos()); }

    // Box-Muller, one value per call (pair caching would make draw counts
    // depend on call history, which complicates substream reasoning)
    double normal() {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Gamma(shape, 1) for integer shape: -ln of a product of uniforms, the
    // same law as summing exponentials but one log per chunk. Chunks of 5
    // keep the product above 2^-265, so it can never underflow.
    double gamma_int(int shape) {
        double acc = 0.0;
        while (shape > 0) {
            const int chunk = shape > 5 ? 5 : shape;
            double prod = uniform_pos();
            for (int i = 1; i < chunk; ++i) prod *= uniform_pos();
            acc -= std::log(prod);
            shape -= chunk;
        }
        return acc;
    }

    // Knuth's product method, chunked so exp() never underflows
    std::uint64_t poisson(double mean) {
        std::uint64_t k = 0;
        double remaining = mean;
        while (remaining > 0.0) {
            const double chunk = remaining > 30.0 ? 30.0 : remaining;
            remaining -= chunk;
            const double limit = std::exp(-chunk);
            double prod = uniform_pos();
            while (prod > limit) {
                ++k;
                prod *= uniform_pos();
            }
        }
        return k;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
};

} // namespace duet::rng
