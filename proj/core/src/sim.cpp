#include "qkdwdm/sim.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "qkdwdm/errors.hpp"
#include "qkdwdm/rng.hpp"

namespace qkdwdm {

namespace {
constexpr std::uint8_t kFlagAliceBit = 1;
constexpr std::uint8_t kFlagMatch = 2;
constexpr std::uint8_t kFlagNoise = 4;
constexpr std::uint8_t kFlagError = 8;
constexpr std::uint8_t kFlagRandomBit = 16;
} // namespace

IntensityTally& IntensityTally::operator+=(const IntensityTally& o) {
    sent += o.sent;
    detected += o.detected;
    sifted += o.sifted;
    errors += o.errors;
    return *this;
}

SimChannel make_sim_channel(const Scenario& scenario, double length_km, double p_launch_w) {
    const LinkOperatingPoint lop = link_operating_point(scenario, length_km, p_launch_w);
    SimChannel ch;
    ch.mu = scenario.decoy.mu;
    ch.nu = scenario.decoy.nu;
    ch.p_signal = scenario.decoy.p_signal;
    ch.p_decoy = scenario.decoy.p_decoy;
    ch.p_vacuum = scenario.decoy.p_vacuum;
    ch.basis_match_prob = scenario.decoy.basis_match_prob;
    ch.eta = lop.eta;
    ch.y0_per_gate = lop.y0_total;
    ch.e_opt = scenario.system.e_opt;
    ch.dead_gates = static_cast<std::uint32_t>(
        std::llround(scenario.detector.dead_time_s * scenario.detector.gate_rate_hz));
    return ch;
}

SimExpectation analytic_expectation(const SimChannel& ch) {
    const auto click = [&](double lambda) {
        return ch.y0_per_gate + (1.0 - ch.y0_per_gate) * (-std::expm1(-ch.eta * lambda));
    };
    const double q_mu = click(ch.mu);
    const double q_nu = click(ch.nu);
    const double q_vac = ch.y0_per_gate;
    const double mean = ch.p_signal * q_mu + ch.p_decoy * q_nu + ch.p_vacuum * q_vac;
    SimExpectation ex;
    ex.live_fraction = 1.0 / (1.0 + mean * ch.dead_gates);
    ex.q_mu = q_mu * ex.live_fraction;
    ex.q_nu = q_nu * ex.live_fraction;
    ex.q_vac = q_vac * ex.live_fraction;
    const double signal = (1.0 - ch.y0_per_gate) * (-std::expm1(-ch.eta * ch.mu));
    ex.e_mu = (0.5 * ch.y0_per_gate + ch.e_opt * signal) / (ch.y0_per_gate + signal);
    return ex;
}

ShardOutput simulate_shard(const RunConfig& config, const SimChannel& channel,
                           std::uint64_t first_pulse, std::uint64_t count) {
    ShardOutput out;
    // 6:1:1 intensity split maps exactly onto 3 bits
    const double s_click[3] = {
        -std::expm1(-channel.eta * channel.mu),
        -std::expm1(-channel.eta * channel.nu),
        0.0,
    };
    const double y0 = channel.y0_per_gate;
    // 30/32-bit fixed-point thresholds; uint64 comparisons so probability 1 works
    const auto eopt_threshold =
        static_cast<std::uint64_t>(std::llround(channel.e_opt * 1073741824.0)); // 2^30
    const auto match_threshold =
        static_cast<std::uint64_t>(std::llround(channel.basis_match_prob * 4294967296.0)); // 2^32

    for (std::uint64_t p = first_pulse; p < first_pulse + count; ++p) {
        const std::uint64_t r0 = derive_u64(config.seed, 3 * p);
        const std::uint64_t r1 = derive_u64(config.seed, 3 * p + 1);
        const unsigned top = static_cast<unsigned>(r0 >> 61);
        const std::uint8_t intensity = top < 6 ? 0 : (top == 6 ? 1 : 2);
        ++out.sent[intensity];

        // low 61 bits of r0 are independent of the intensity field
        const double u_noise = static_cast<double>(r0 & 0x1FFFFFFFFFFFFFFFULL) * 0x1.0p-61;
        const bool noise = u_noise < y0;
        const bool signal = to_unit_double(r1) < s_click[intensity];
        if (!noise && !signal) continue;

        // r2 bit layout: 0 alice bit, 1 random bit, 2..33 basis match, 34..63 e_opt
        const std::uint64_t r2 = derive_u64(config.seed, 3 * p + 2);
        ClickCandidate cand;
        cand.pulse = p;
        cand.intensity = intensity;
        if (r2 & 1ULL) cand.flags |= kFlagAliceBit;
        if ((r2 >> 1) & 1ULL) cand.flags |= kFlagRandomBit;
        if (((r2 >> 2) & 0xFFFFFFFFULL) < match_threshold) cand.flags |= kFlagMatch;
        if (noise) cand.flags |= kFlagNoise;
        if ((r2 >> 34) < eopt_threshold) cand.flags |= kFlagError;
        out.candidates.push_back(cand);
    }
    return out;
}

SimResult finalize_shards(const SimChannel& channel, const std::vector<ShardOutput>& shards,
                          std::uint64_t n_pulses) {
    SimResult result;
    IntensityTally* tallies[3] = {&result.pair.signal, &result.pair.decoy, &result.pair.vacuum};
    for (const auto& shard : shards) {
        for (int i = 0; i < 3; ++i) tallies[i]->sent += shard.sent[i];
    }

    // serial pass: dead-time suppression, then sifting
    std::uint64_t blocked_until = 0;
    for (const auto& shard : shards) {
        for (const auto& cand : shard.candidates) {
            if (cand.pulse < blocked_until) continue;
            blocked_until = cand.pulse + 1 + channel.dead_gates;
            IntensityTally& t = *tallies[cand.intensity];
            ++t.detected;
            if (!(cand.flags & kFlagMatch)) continue;
            ++t.sifted;
            const bool alice = cand.flags & kFlagAliceBit;
            bool bob;
            if (cand.flags & kFlagNoise) {
                // noise involvement (incl. double clicks) resolves to a random bit
                bob = cand.flags & kFlagRandomBit;
            } else {
                bob = alice ^ static_cast<bool>(cand.flags & kFlagError);
            }
            if (bob != alice) ++t.errors;
            // only signal-intensity bits become key material; decoy and
            // vacuum detections feed parameter estimation
            if (cand.intensity == 0) {
                result.pair.alice_bits.push_back(alice);
                result.pair.bob_bits.push_back(bob);
            }
        }
    }

    const auto rate = [](std::uint64_t num, std::uint64_t den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    const auto& sig = result.pair.signal;
    const auto& dec = result.pair.decoy;
    const auto& vac = result.pair.vacuum;
    result.empirical.q_mu = rate(sig.detected, sig.sent);
    result.empirical.q_nu = rate(dec.detected, dec.sent);
    result.empirical.e_mu = rate(sig.errors, sig.sifted);
    result.empirical.e_nu = rate(dec.errors, dec.sifted);
    result.empirical.y0 = rate(vac.detected, vac.sent);
    result.empirical.eta = channel.eta;
    (void)n_pulses;
    return result;
}

SimResult simulate(const RunConfig& config, const SimChannel& channel, int n_threads) {
    if (config.n_pulses == 0) throw ConfigError("simulation needs at least one pulse");
    unsigned hw = n_threads > 0 ? static_cast<unsigned>(n_threads)
                                : std::max(1u, std::thread::hardware_concurrency());
    // fixed shard geometry so results do not depend on the thread count
    const std::uint64_t shard_size = 1ULL << 22;
    const std::uint64_t n_shards = (config.n_pulses + shard_size - 1) / shard_size;
    hw = static_cast<unsigned>(std::min<std::uint64_t>(hw, n_shards));

    std::vector<ShardOutput> shards(n_shards);
    std::vector<std::thread> workers;
    workers.reserve(hw);
    std::atomic<std::uint64_t> next{0};
    for (unsigned t = 0; t < hw; ++t) {
        workers.emplace_back([&]() {
            while (true) {
                const std::uint64_t idx = next.fetch_add(1);
                if (idx >= n_shards) return;
                const std::uint64_t first = idx * shard_size;
                const std::uint64_t count = std::min(shard_size, config.n_pulses - first);
                shards[idx] = simulate_shard(config, channel, first, count);
            }
        });
    }
    for (auto& w : workers) w.join();
    return finalize_shards(channel, shards, config.n_pulses);
}

EmpiricalKeyRate empirical_keyrate(const SimResult& result, std::uint64_t n_pulses,
                                   const DecoyProtocol& proto, const QkdSystemSpec& spec) {
    if (result.pair.signal.detected == 0 || result.pair.decoy.detected == 0) {
        throw ProtocolError("no detections for signal or decoy intensity; estimation failed");
    }
    EmpiricalKeyRate out;
    out.insufficient_block = static_cast<double>(n_pulses) < spec.block_size;
    const ChannelObservables adjusted = fluctuation_adjust(result.empirical, proto, spec);
    out.report = secure_key_rate(adjusted, proto, spec);
    return out;
}

} // namespace qkdwdm
