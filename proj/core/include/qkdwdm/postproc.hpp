#pragma once

#include <cstdint>
#include <string>

#include "qkdwdm/bitblock.hpp"
#include "qkdwdm/cascade.hpp"
#include "qkdwdm/keyrate.hpp"

namespace qkdwdm {

struct FinalKeyRecord {
    BitBlock key;
    std::size_t leakage_bits = 0;
    bool verified = false;
    std::size_t m = 0; // final key length
    std::uint64_t toeplitz_seed_value = 0;
    std::uint64_t shuffle_seed = 0;
    std::string config_digest;
};

// Extractable length after reconciliation:
//   m = floor(n_sifted [Q1 (1 - H2(e1)) + Q0] / Q_mu - leakage - margin)
// clamped at zero; zero whenever the report is not secure.
std::size_t compute_final_length(std::size_t n_sifted, const KeyRateReport& report,
                                 std::size_t leakage_bits, std::size_t security_margin = 64);

struct PostprocConfig {
    CascadeConfig cascade;
    std::uint64_t toeplitz_seed = 1;
    std::size_t security_margin = 64;
};

struct PostprocOutcome {
    FinalKeyRecord alice;
    FinalKeyRecord bob;
    bool verified = false;
    double measured_qber = 0.0;
    std::size_t leakage_bits = 0;
    std::vector<TranscriptRecord> transcript;
};

// cascade -> CRC verification -> Toeplitz privacy amplification on both
// sides. Keys are emitted only when verification succeeds.
PostprocOutcome run_postprocessing(const BitBlock& alice, const BitBlock& bob,
                                   double qber_estimate, const KeyRateReport& report,
                                   const PostprocConfig& cfg);

} // namespace qkdwdm
