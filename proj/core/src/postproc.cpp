#include "qkdwdm/postproc.hpp"

#include <algorithm>
#include <cmath>

#include "qkdwdm/crc32.hpp"
#include "qkdwdm/toeplitz.hpp"

namespace qkdwdm {

std::size_t compute_final_length(std::size_t n_sifted, const KeyRateReport& report,
                                 std::size_t leakage_bits, std::size_t security_margin) {
    if (!report.secure || report.q_mu <= 0.0) return 0;
    // secret fraction of the sifted block: single-photon part minus nothing
    // (error correction is already accounted by the disclosed leakage), plus
    // the vacuum contribution
    const double secret = n_sifted *
                          (report.q1 * (1.0 - binary_entropy(report.e1_upper)) + report.q0) /
                          report.q_mu;
    const double m = std::floor(secret) - static_cast<double>(leakage_bits) -
                     static_cast<double>(security_margin);
    return m > 0.0 ? static_cast<std::size_t>(m) : 0;
}

PostprocOutcome run_postprocessing(const BitBlock& alice, const BitBlock& bob,
                                   double qber_estimate, const KeyRateReport& report,
                                   const PostprocConfig& cfg) {
    PostprocOutcome out;
    ReconcileResult rec = cascade_reconcile(alice, bob, qber_estimate, cfg.cascade);
    out.leakage_bits = rec.leakage_bits;
    out.transcript = std::move(rec.transcript);
    out.measured_qber = alice.empty() ? 0.0
                                      : static_cast<double>(bob.hamming_distance(alice)) /
                                            static_cast<double>(alice.size());
    out.verified = crc_verify(alice, rec.corrected_bob);
    if (!out.verified) return out;

    FinalKeyRecord record;
    record.leakage_bits = out.leakage_bits;
    record.verified = true;
    record.m = compute_final_length(alice.size(), report, out.leakage_bits, cfg.security_margin);
    record.toeplitz_seed_value = cfg.toeplitz_seed;
    record.shuffle_seed = cfg.cascade.shuffle_seed;
    out.alice = record;
    out.bob = record;
    if (record.m > 0) {
        const ToeplitzSeed seed = ToeplitzSeed::random(alice.size(), record.m, cfg.toeplitz_seed);
        out.alice.key = toeplitz_hash(alice, seed);
        out.bob.key = toeplitz_hash(rec.corrected_bob, seed);
    }
    return out;
}

} // namespace qkdwdm
