#pragma once

#include <cstddef>
#include <cstdint>

#include "qkdwdm/bitblock.hpp"

namespace qkdwdm {

// Toeplitz-family one-time message authenticator over a pre-shared key pool.
// tag = T_k(message) xor pad, where T_k is derived deterministically from the
// pool head and pad is a fresh pool segment consumed per tag. Both sides run
// identical sessions; consuming past the pool aborts rather than reuse.
class AuthSession {
  public:
    explicit AuthSession(BitBlock pre_shared_key, std::size_t tag_bits = 64);

    BitBlock authenticate(const BitBlock& message);

    std::size_t remaining_key_bits() const;
    std::size_t tag_bits() const { return tag_bits_; }

  private:
    BitBlock consume(std::size_t n_bits);

    BitBlock key_;
    std::size_t consumed_ = 0;
    std::size_t tag_bits_;
    std::uint64_t hash_seed_ = 0;
};

} // namespace qkdwdm
