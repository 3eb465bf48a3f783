#pragma once

#include <cstdint>
#include <vector>

#include "qkdwdm/bitblock.hpp"

namespace qkdwdm {

// CRC-32 (IEEE 802.3): reflected polynomial 0xEDB88320, init 0xFFFFFFFF,
// final xor 0xFFFFFFFF. CRC of ASCII "123456789" is 0xCBF43926.
std::uint32_t crc32(const std::vector<std::uint8_t>& bytes);
std::uint32_t crc32(const BitBlock& block);

// Error verification step: equal lengths required, equal CRCs accepted.
bool crc_verify(const BitBlock& a, const BitBlock& b);

} // namespace qkdwdm
