#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace concfn {

// ---------------------------------------------------------------------------
// Deterministic random number generation. The generators below are fixed
// algorithms (splitmix64 for seeding / stream derivation, xoshiro256++ for
// the main stream) so that results are bit-identical across platforms and
// standard library versions. Distribution sampling is hand-rolled for the
// same reason: std::poisson_distribution et al. are implementation-defined.
// ---------------------------------------------------------------------------

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Substream seed for chunk/cell `index` of a run with master seed `master`.
// Fixed arithmetic; independent of thread scheduling.
inline uint64_t derive_seed(uint64_t master, uint64_t index) {
    uint64_t s = master ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    splitmix64(s);
    return splitmix64(s);
}

class Xoshiro256 {
public:
    explicit Xoshiro256(uint64_t seed = 0) {
        uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }

    uint64_t next() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform on [lo, hi].
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Uniform integer in [0, n).
    uint64_t uniform_index(uint64_t n) {
        return next() % n;  // modulo bias irrelevant at test scale
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t state_[4];
};

// Poisson sampling via Knuth's product method. Means above 64 are split
// into chunks (a sum of independent Poissons is Poisson) to keep
// exp(-mean) away from underflow.
inline uint64_t sample_poisson(Xoshiro256& rng, double mean) {
    if (mean <= 0.0) return 0;
    uint64_t total = 0;
    while (mean > 64.0) {
        double chunk = 64.0;
        const double limit = std::exp(-chunk);
        double p = 1.0;
        uint64_t k = 0;
        do {
            ++k;
            p *= rng.uniform01();
        } while (p > limit);
        total += k - 1;
        mean -= chunk;
    }
    const double limit = std::exp(-mean);
    double p = 1.0;
    uint64_t k = 0;
    do {
        ++k;
        p *= rng.uniform01();
    } while (p > limit);
    return total + k - 1;
}

}  // namespace concfn
