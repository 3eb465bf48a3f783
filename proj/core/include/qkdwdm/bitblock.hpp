#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace qkdwdm {

// Packed bit sequence. Bit i lives in word i/64 at bit i%64; byte export is
// LSB-first within each byte.
class BitBlock {
  public:
    BitBlock() = default;
    explicit BitBlock(std::size_t n) : words_((n + 63) / 64, 0), size_(n) {}

    static BitBlock random(std::size_t n, std::uint64_t seed);
    static BitBlock from_bytes(const std::vector<std::uint8_t>& bytes, std::size_t n_bits);

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1ULL; }
    void set(std::size_t i, bool v) {
        const std::uint64_t mask = 1ULL << (i & 63);
        if (v) {
            words_[i >> 6] |= mask;
        } else {
            words_[i >> 6] &= ~mask;
        }
    }
    void flip(std::size_t i) { words_[i >> 6] ^= 1ULL << (i & 63); }

    void push_back(bool v) {
        if ((size_ & 63) == 0) words_.push_back(0);
        if (v) words_[size_ >> 6] |= 1ULL << (size_ & 63);
        ++size_;
    }

    void xor_with(const BitBlock& other);
    std::size_t count_ones() const;
    std::size_t hamming_distance(const BitBlock& other) const;

    std::vector<std::uint8_t> to_bytes() const;

    const std::vector<std::uint64_t>& words() const { return words_; }

    bool operator==(const BitBlock& other) const {
        return size_ == other.size_ && words_ == other.words_;
    }

  private:
    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
};

} // namespace qkdwdm
