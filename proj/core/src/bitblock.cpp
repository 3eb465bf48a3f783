#include "qkdwdm/bitblock.hpp"

#include <bit>
#include <stdexcept>

#include "qkdwdm/rng.hpp"

namespace qkdwdm {

BitBlock BitBlock::random(std::size_t n, std::uint64_t seed) {
    BitBlock b(n);
    SplitMix rng(seed);
    for (auto& w : b.words_) w = rng.next();
    if (n & 63) b.words_.back() &= (1ULL << (n & 63)) - 1;
    return b;
}

BitBlock BitBlock::from_bytes(const std::vector<std::uint8_t>& bytes, std::size_t n_bits) {
    if (n_bits > bytes.size() * 8) throw std::invalid_argument("byte buffer too short");
    BitBlock b(n_bits);
    for (std::size_t i = 0; i < n_bits; ++i) {
        if ((bytes[i >> 3] >> (i & 7)) & 1) b.set(i, true);
    }
    return b;
}

void BitBlock::xor_with(const BitBlock& other) {
    if (size_ != other.size_) throw std::invalid_argument("BitBlock size mismatch");
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
}

std::size_t BitBlock::count_ones() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

std::size_t BitBlock::hamming_distance(const BitBlock& other) const {
    if (size_ != other.size_) throw std::invalid_argument("BitBlock size mismatch");
    std::size_t n = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) {
        n += static_cast<std::size_t>(std::popcount(words_[i] ^ other.words_[i]));
    }
    return n;
}

std::vector<std::uint8_t> BitBlock::to_bytes() const {
    std::vector<std::uint8_t> out((size_ + 7) / 8, 0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>(words_[i >> 3] >> ((i & 7) * 8));
    }
    return out;
}

} // namespace qkdwdm
