#pragma once

#include <cstdint>
#include <vector>

namespace qkdwdm {

// splitmix64: tiny counter-friendly generator. Stateless derivation from
// (seed, index) gives reproducible per-item streams independent of call order,
// which is what keeps sharded simulation and shuffles bit-identical across
// thread counts and platforms (no std:: distribution involved anywhere).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_u64(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index));
}

// 53-bit mantissa in [0,1)
inline double to_unit_double(std::uint64_t r) {
    return static_cast<double>(r >> 11) * 0x1.0p-53;
}

class SplitMix {
  public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double next_double() { return to_unit_double(next()); }
    // unbiased bounded draw (rejection on the top range)
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = bound * ((~0ULL) / bound);
        std::uint64_t r;
        do {
            r = next();
        } while (r >= limit);
        return r % bound;
    }

  private:
    std::uint64_t state_;
};

// Deterministic Fisher-Yates permutation of {0, ..., n-1}.
inline std::vector<std::uint32_t> seeded_permutation(std::uint32_t n, std::uint64_t seed) {
    std::vector<std::uint32_t> perm(n);
    for (std::uint32_t i = 0; i < n; ++i) perm[i] = i;
    SplitMix rng(seed);
    for (std::uint32_t i = n; i > 1; --i) {
        const auto j = static_cast<std::uint32_t>(rng.next_below(i));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

} // namespace qkdwdm
