#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qkdwdm/bitblock.hpp"

namespace qkdwdm {

struct CascadeConfig {
    int passes = 4;
    std::uint64_t shuffle_seed = 0;
    // first-pass block size as a function of the estimated QBER;
    // default is the classic ceil(0.73 / e)
    std::function<std::size_t(double)> initial_block_fn;

    std::size_t initial_block(double qber, std::size_t n) const;
    void validate() const;
};

// One disclosed parity: which pass/block it belongs to and its value.
// Binary-search parities are recorded against their enclosing block.
struct TranscriptRecord {
    std::uint32_t pass = 0;
    std::uint32_t block = 0;
    std::uint8_t parity = 0;
};

struct ReconcileResult {
    BitBlock corrected_bob;
    std::size_t leakage_bits = 0;
    std::vector<TranscriptRecord> transcript;
};

// Interactive parity reconciliation: shuffled passes with doubling block
// sizes, binary search on mismatched blocks and back-tracking into earlier
// passes. Every parity Alice discloses is one transcript record and one
// leakage bit; disclosing more than the key length aborts.
ReconcileResult cascade_reconcile(const BitBlock& alice, const BitBlock& bob,
                                  double qber_estimate, const CascadeConfig& cfg);

} // namespace qkdwdm
