#include "qkdwdm/toeplitz.hpp"

#include <bit>
#include <stdexcept>

namespace qkdwdm {

ToeplitzSeed ToeplitzSeed::random(std::size_t n, std::size_t m, std::uint64_t seed_value) {
    ToeplitzSeed s;
    s.input_length = n;
    s.output_length = m;
    s.bits = BitBlock::random(n + m - 1, seed_value);
    return s;
}

void ToeplitzSeed::validate() const {
    if (output_length == 0 || input_length == 0)
        throw std::invalid_argument("Toeplitz dimensions must be positive");
    if (output_length > input_length)
        throw std::invalid_argument("Toeplitz output length exceeds input length");
    if (bits.size() != input_length + output_length - 1)
        throw std::invalid_argument("Toeplitz seed must hold n + m - 1 bits");
}

BitBlock toeplitz_hash(const BitBlock& input, const ToeplitzSeed& seed) {
    seed.validate();
    if (input.size() != seed.input_length)
        throw std::invalid_argument("Toeplitz input length mismatch");

    const auto& x = input.words();
    const auto& s = seed.bits.words();
    const std::size_t n_words = x.size();

    BitBlock out(seed.output_length);
    for (std::size_t i = 0; i < seed.output_length; ++i) {
        // row i = seed bits [i, i + n): extract the window word-by-word,
        // AND with the input, accumulate parity
        const std::size_t word = i >> 6;
        const unsigned shift = i & 63;
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < n_words; ++w) {
            std::uint64_t row = s[word + w] >> shift;
            if (shift != 0 && word + w + 1 < s.size()) {
                row |= s[word + w + 1] << (64 - shift);
            }
            acc ^= row & x[w];
        }
        // bits of x beyond n are zero, so no tail masking is needed
        if (std::popcount(acc) & 1) out.set(i, true);
    }
    return out;
}

} // namespace qkdwdm
