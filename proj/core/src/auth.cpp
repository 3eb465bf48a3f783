#include "qkdwdm/auth.hpp"

#include "qkdwdm/errors.hpp"
#include "qkdwdm/rng.hpp"
#include "qkdwdm/toeplitz.hpp"

namespace qkdwdm {

AuthSession::AuthSession(BitBlock pre_shared_key, std::size_t tag_bits)
    : key_(std::move(pre_shared_key)), tag_bits_(tag_bits) {
    if (tag_bits_ == 0) throw ConfigError("tag length must be positive");
    if (key_.size() < 2 * tag_bits_)
        throw ConfigError("pre-shared key shorter than the hash seed plus one tag");
    // hash-family selector: the first 64 pool bits (consumed once per session)
    const BitBlock head = consume(64);
    for (std::size_t i = 0; i < 64; ++i) {
        if (head.get(i)) hash_seed_ |= 1ULL << i;
    }
}

BitBlock AuthSession::consume(std::size_t n_bits) {
    if (consumed_ + n_bits > key_.size()) {
        throw ProtocolError("authentication key budget exhausted; segment reuse refused");
    }
    BitBlock out(n_bits);
    for (std::size_t i = 0; i < n_bits; ++i) out.set(i, key_.get(consumed_ + i));
    consumed_ += n_bits;
    return out;
}

std::size_t AuthSession::remaining_key_bits() const { return key_.size() - consumed_; }

BitBlock AuthSession::authenticate(const BitBlock& message) {
    if (message.empty()) throw ConfigError("cannot authenticate an empty message");
    const std::size_t m = std::min(tag_bits_, message.size());
    ToeplitzSeed seed = ToeplitzSeed::random(message.size(), m,
                                             splitmix64(hash_seed_ ^ message.size()));
    BitBlock tag = toeplitz_hash(message, seed);
    const BitBlock pad = consume(m);
    tag.xor_with(pad);
    return tag;
}

} // namespace qkdwdm
