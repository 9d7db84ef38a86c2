#pragma once

#include <cstdint>

namespace surfsim {

// xoshiro256++ with splitmix64 seeding. Streams are derived by hashing a
// key tuple, so any (seed, d, p_index, trial) combination gets an
// independent generator regardless of scheduling order.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class Rng {
public:
    using result_type = uint64_t;

    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    // Derive a stream from a key tuple; mixes every component through
    // splitmix so nearby keys give unrelated streams.
    static Rng from_key(uint64_t master_seed, uint64_t a, uint64_t b, uint64_t c) {
        uint64_t sm = master_seed;
        uint64_t h = splitmix64(sm);
        sm ^= a * 0x9e3779b97f4a7c15ull;
        h ^= splitmix64(sm);
        sm ^= b * 0xc2b2ae3d27d4eb4full;
        h ^= splitmix64(sm);
        sm ^= c * 0x165667b19e3779f9ull;
        h ^= splitmix64(sm);
        return Rng(h);
    }

    uint64_t operator()() {
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

    static constexpr uint64_t min() { return 0; }
    static constexpr uint64_t max() { return ~0ull; }

    // Uniform double in [0, 1).
    double uniform() { return ((*this)() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    uint64_t below(uint64_t n) {
        // Lemire's multiply-shift rejection method.
        uint64_t x = (*this)();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        uint64_t l = static_cast<uint64_t>(m);
        if (l < n) {
            uint64_t t = (-n) % n;
            while (l < t) {
                x = (*this)();
                m = static_cast<__uint128_t>(x) * n;
                l = static_cast<uint64_t>(m);
            }
        }
        return static_cast<uint64_t>(m >> 64);
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
};

}  // namespace surfsim
