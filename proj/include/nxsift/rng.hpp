#pragma once

#include <cstdint>
#include <vector>

namespace nxsift {

// splitmix64, used for state seeding and stream derivation.
inline uint64_t splitmix64_next(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256** (Blackman/Vigna). All randomness in the project flows
// through this generator so corpora, models and benchmarks replay
// byte-identically for a given seed.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64_next(sm);
    }

    // Independent substream: stream 0, 1, 2, ... of a base seed.
    static Rng stream(uint64_t seed, uint64_t stream_id) {
        uint64_t sm = seed;
        uint64_t a = splitmix64_next(sm);
        sm = stream_id + 0x9e3779b97f4a7c15ULL;
        uint64_t b = splitmix64_next(sm);
        return Rng(a ^ b);
    }

    uint64_t next() {
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, bound) without modulo bias (Lemire reduction).
    uint64_t next_below(uint64_t bound) {
        while (true) {
            uint64_t x = next();
            __uint128_t m = static_cast<__uint128_t>(x) * bound;
            uint64_t lo = static_cast<uint64_t>(m);
            if (lo >= bound || lo >= (-bound) % bound) {
                return static_cast<uint64_t>(m >> 64);
            }
        }
    }

    // Inclusive range.
    int64_t next_int(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(next_below(static_cast<uint64_t>(hi - lo + 1)));
    }

    double next_double() {  // [0, 1)
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Deterministic Fisher-Yates (std::shuffle is not portable across
    // standard libraries).
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
};

}  // namespace nxsift
