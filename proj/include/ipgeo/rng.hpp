#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace ipgeo {

// Deterministic RNG with explicit named streams. Synthetic datasets must
// be byte-identical across runs and toolchains, so distributions are
// implemented here rather than with std::<distribution> (whose outputs
// are implementation-defined).
//
// Core generator: xoshiro256++, seeded via splitmix64. Streams are
// derived by hashing (seed, stream tag, index), so e.g. adding devices
// does not perturb the subnet layout stream.
class Rng {
public:
    Rng(uint64_t seed, std::string_view stream_tag, uint64_t index = 0) {
        uint64_t h = seed ^ 0x9e3779b97f4a7c15ull;
        for (char c : stream_tag) h = mix(h ^ uint64_t(uint8_t(c)));
        h = mix(h ^ index);
        for (auto& word : s_) {
            h = mix(h);
            word = h;
        }
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // [0, 1) with 53 random bits
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, n)
    uint64_t uniform_int(uint64_t n) {
        if (n <= 1) return 0;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Box-Muller; one value returned per call, u == 0 redrawn.
    double normal() {
        double u = uniform(), v = uniform();
        while (u <= 0.0) u = uniform();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925286766559 * v);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    // Parameterized by its median (exp(mu)) and log-scale sigma.
    double lognormal_median(double median, double sigma) {
        return median * std::exp(sigma * normal());
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    static uint64_t mix(uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    uint64_t s_[4];
};

} // namespace ipgeo
