#pragma once

#include <cstddef>
#include <cstdint>

#include "qkdwdm/bitblock.hpp"

namespace qkdwdm {

// Seed for an m x n binary Toeplitz-family matrix with T[i][j] = seed[i + j]
// (row i is the contiguous seed window [i, i + n)); seed length n + m - 1.
// Row 0 carries the first matrix row, bits [0, m) the first column.
struct ToeplitzSeed {
    BitBlock bits;
    std::size_t input_length = 0;  // n
    std::size_t output_length = 0; // m

    static ToeplitzSeed random(std::size_t n, std::size_t m, std::uint64_t seed);
    void validate() const;
};

// y = T x over GF(2). Output has seed.output_length bits.
BitBlock toeplitz_hash(const BitBlock& input, const ToeplitzSeed& seed);

} // namespace qkdwdm
