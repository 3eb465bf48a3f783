#include "qkdwdm/crc32.hpp"

#include <array>
#include <stdexcept>

namespace qkdwdm {

namespace {

std::array<std::uint32_t, 256> make_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k) {
            c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        }
        table[i] = c;
    }
    return table;
}

const std::array<std::uint32_t, 256> kTable = make_table();

} // namespace

std::uint32_t crc32(const std::vector<std::uint8_t>& bytes) {
    std::uint32_t crc = 0xFFFFFFFFu;
    for (auto b : bytes) {
        crc = kTable[(crc ^ b) & 0xFFu] ^ (crc >> 8);
    }
    return crc ^ 0xFFFFFFFFu;
}

std::uint32_t crc32(const BitBlock& block) { return crc32(block.to_bytes()); }

bool crc_verify(const BitBlock& a, const BitBlock& b) {
    if (a.size() != b.size()) throw std::invalid_argument("crc_verify needs equal lengths");
    return crc32(a) == crc32(b);
}

} // namespace qkdwdm
