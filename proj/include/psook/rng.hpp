#pragma once

#include <cmath>
#include <cstdint>

// Deterministic, portable RNG streams. std::mt19937_64 is portable but the
// standard distributions are not (implementation-defined algorithms), and
// byte-identical reruns are part of the contract, so uniform/normal
// generation is spelled out here. xoshiro256** seeded via splitmix64.

namespace psook {

struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

/// Folds stream identifiers into a master seed; used to derive independent
/// per-frame / per-candidate streams so parallel schedules cannot change
/// results.
inline uint64_t derive_seed(uint64_t master, uint64_t key1, uint64_t key2 = 0) {
    SplitMix64 sm(master);
    sm.state ^= sm.next() + key1;
    sm.state ^= sm.next() + key2;
    return sm.next();
}

class Rng {
public:
    explicit Rng(uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;  // all-zero is invalid
    }

    uint64_t u64() {
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

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n); n > 0.
    uint64_t below(uint64_t n) {
        return static_cast<uint64_t>(
            (static_cast<unsigned __int128>(u64()) * n) >> 64);
    }

    int bit() { return static_cast<int>(u64() >> 63); }

    /// Standard normal via the polar (Marsaglia) method; no trig functions,
    /// so results depend only on sqrt/log of this libm.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace psook
