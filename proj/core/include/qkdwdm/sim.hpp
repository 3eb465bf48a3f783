#pragma once

#include <cstdint>
#include <vector>

#include "qkdwdm/bitblock.hpp"
#include "qkdwdm/keyrate.hpp"
#include "qkdwdm/planner.hpp"

namespace qkdwdm {

// Channel parameters the pulse-level simulator actually samples from.
struct SimChannel {
    double mu = 0.6;
    double nu = 0.2;
    double p_signal = 0.75;
    double p_decoy = 0.125;
    double p_vacuum = 0.125;
    double basis_match_prob = 0.5;
    double eta = 1e-3;
    double y0_per_gate = 1e-6; // total background yield (incl. afterpulse estimate)
    double e_opt = 0.005;
    std::uint32_t dead_gates = 125; // gates blocked after a registered click
};

// Analytic expectations for the same channel, for oracle comparisons. All
// gains carry the global dead-time live fraction.
struct SimExpectation {
    double q_mu = 0.0;
    double q_nu = 0.0;
    double q_vac = 0.0;
    double e_mu = 0.0;
    double live_fraction = 1.0;
};

SimChannel make_sim_channel(const Scenario& scenario, double length_km, double p_launch_w);
SimExpectation analytic_expectation(const SimChannel& ch);

struct RunConfig {
    std::uint64_t n_pulses = 0;
    std::uint64_t seed = 0;
};

struct IntensityTally {
    std::uint64_t sent = 0;
    std::uint64_t detected = 0; // post dead-time, any basis
    std::uint64_t sifted = 0;
    std::uint64_t errors = 0;

    IntensityTally& operator+=(const IntensityTally& o);
};

struct SiftedKeyPair {
    BitBlock alice_bits;
    BitBlock bob_bits;
    IntensityTally signal;
    IntensityTally decoy;
    IntensityTally vacuum;
};

struct SimResult {
    SiftedKeyPair pair;
    ChannelObservables empirical;
};

// Pulse-level BB84-with-decoys run. Per-pulse randomness is derived from
// (seed, pulse index), so shard boundaries and thread counts never change the
// output; dead-time suppression and sifting run as a final serial pass over
// the (sparse) click candidates.
SimResult simulate(const RunConfig& config, const SimChannel& channel, int n_threads = 0);

// Intermediate shard product, exposed for the shard-merge determinism tests.
struct ClickCandidate {
    std::uint64_t pulse = 0;
    std::uint8_t intensity = 0; // 0 = signal, 1 = decoy, 2 = vacuum
    std::uint8_t flags = 0;     // bit0 alice_bit, bit1 match, bit2 noise, bit3 error, bit4 random_bit
};

struct ShardOutput {
    std::vector<ClickCandidate> candidates;
    std::uint64_t sent[3] = {0, 0, 0};
};

ShardOutput simulate_shard(const RunConfig& config, const SimChannel& channel,
                           std::uint64_t first_pulse, std::uint64_t count);
SimResult finalize_shards(const SimChannel& channel, const std::vector<ShardOutput>& shards,
                          std::uint64_t n_pulses);

struct EmpiricalKeyRate {
    KeyRateReport report;
    bool insufficient_block = false;
};

// Empirical observables -> fluctuation adjustment -> secure key rate.
EmpiricalKeyRate empirical_keyrate(const SimResult& result, std::uint64_t n_pulses,
                                   const DecoyProtocol& proto, const QkdSystemSpec& spec);

} // namespace qkdwdm
