#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace tagaug {

// Deterministic random source used everywhere randomness is needed.
// All derived draws (bounded ints, uniform reals, shuffles) are spelled
// out here instead of going through std distributions, so that a given
// seed produces the same stream on every platform and toolchain.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, n). Rejection sampling keeps the draw unbiased.
    uint64_t below(uint64_t n) {
        if (n == 0) return 0;
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform01() { return double(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    // Fisher-Yates; unlike std::shuffle the permutation only depends on
    // the engine stream, not on the standard library implementation.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = size_t(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// FNV-1a over raw bytes. Used for manifest artifact digests and for
// deriving per-stage seeds from a run seed.
inline uint64_t fnv1a64(const void* data, size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    uint64_t h = 1469598103934665603ull;
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

// Stage seeds come from one run seed plus the stage name, so adding or
// reordering stages never shifts the randomness of the others.
inline uint64_t derive_seed(uint64_t run_seed, const std::string& stage) {
    uint64_t h = fnv1a64(stage) ^ run_seed;
    // splitmix64 finalizer to decorrelate nearby run seeds
    h += 0x9e3779b97f4a7c15ull;
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
    return h ^ (h >> 31);
}

} // namespace tagaug
