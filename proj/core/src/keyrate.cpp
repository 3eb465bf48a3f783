#include "qkdwdm/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qkdwdm/errors.hpp"

namespace qkdwdm {

void DecoyProtocol::validate() const {
    if (!(0.0 < nu && nu < mu)) throw ConfigError("decoy protocol requires 0 < nu < mu");
    const double psum = p_signal + p_decoy + p_vacuum;
    if (std::abs(psum - 1.0) > 1e-9) throw ConfigError("intensity probabilities must sum to 1");
    if (basis_match_prob <= 0.0 || basis_match_prob > 1.0)
        throw ConfigError("basis match probability outside (0,1]");
}

void QkdSystemSpec::validate() const {
    if (clock_hz <= 0.0) throw ConfigError("clock must be positive");
    if (e_opt < 0.0 || e_opt > 0.5) throw ConfigError("e_opt outside [0, 0.5]");
    if (f_ec < 1.0) throw ConfigError("error-correction inefficiency must be >= 1");
    if (block_size < 1.0) throw ConfigError("block size must be positive");
    if (n_sigma < 0.0) throw ConfigError("n_sigma must be >= 0");
}

void ChannelObservables::validate() const {
    if (e_mu < 0.0 || e_mu > 0.5 || e_nu < 0.0 || e_nu > 0.5)
        throw ConfigError("QBER outside [0, 0.5]");
    if (!(y0 <= q_nu && q_nu <= q_mu && q_mu < 1.0))
        throw ConfigError("observables must satisfy y0 <= q_nu <= q_mu < 1");
    if (eta <= 0.0 || eta > 1.0) throw ConfigError("transmittance outside (0, 1]");
}

double binary_entropy(double x) {
    if (x < 0.0 || x > 1.0) throw std::domain_error("binary_entropy argument outside [0,1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

std::pair<double, double> gain_and_qber(double mu, double eta, double y0, double e_opt) {
    const double signal = (1.0 - y0) * (-std::expm1(-eta * mu));
    const double q = y0 + signal;
    if (q <= 0.0) throw std::domain_error("zero gain, QBER undefined");
    const double e = (0.5 * y0 + e_opt * signal) / q;
    return {q, e};
}

DecoyEstimate decoy_bounds(const ChannelObservables& obs, const DecoyProtocol& proto) {
    const double mu = proto.mu;
    const double nu = proto.nu;
    if (!(nu < mu)) throw ConfigError("decoy bounds require nu < mu");

    DecoyEstimate est;
    est.q0 = obs.y0 * std::exp(-mu);

    const double coeff = mu / (mu * nu - nu * nu);
    double y1 = coeff * (obs.q_nu * std::exp(nu) - obs.q_mu * std::exp(mu) * nu * nu / (mu * mu) -
                         ((mu * mu - nu * nu) / (mu * mu)) * obs.y0);
    if (y1 <= 0.0) {
        est.y1_lower = 0.0;
        est.e1_upper = 0.5;
        est.ok = false;
        return est;
    }
    y1 = std::min(y1, 1.0);
    est.y1_lower = y1;

    // numerator < 0 means the observables are mutually inconsistent (possible
    // after adversarial shifts); fall back to the pessimistic extreme rather
    // than credit a clean single-photon channel
    const double e1_num = obs.e_nu * obs.q_nu * std::exp(nu) - 0.5 * obs.y0;
    est.e1_upper = e1_num < 0.0 ? 0.5 : std::min(e1_num / (y1 * nu), 0.5);
    est.q1 = y1 * mu * std::exp(-mu);
    est.ok = true;
    return est;
}

double adversarial_relative_shift(double x, double n, double n_sigma) {
    if (x <= 0.0 || n <= 0.0) return 0.0;
    return n_sigma / std::sqrt(n * x);
}

namespace {

double shift_up(double x, double n, double n_sigma, double cap) {
    return std::min(x * (1.0 + adversarial_relative_shift(x, n, n_sigma)), cap);
}

double shift_down(double x, double n, double n_sigma) {
    return std::max(x * (1.0 - adversarial_relative_shift(x, n, n_sigma)), 0.0);
}

} // namespace

ChannelObservables fluctuation_adjust(const ChannelObservables& obs, const DecoyProtocol& proto,
                                      const QkdSystemSpec& spec) {
    if (spec.block_size <= 0.0) throw ConfigError("block size must be positive");
    if (spec.n_sigma == 0.0 || obs.q_mu <= 0.0) return obs;

    // pulses needed to accumulate block_size sifted signal bits
    const double n_pulses = spec.block_size / (proto.sifting_factor() * obs.q_mu);
    const double n_mu = proto.p_signal * n_pulses;
    const double n_nu = proto.p_decoy * n_pulses;
    const double n_vac = proto.p_vacuum * n_pulses;

    ChannelObservables adj = obs;
    // Q_mu up: it enters both the error-correction cost and with a negative
    // sign in the Y1 lower bound. Q_nu down, error counts up, Y0 up.
    adj.q_mu = shift_up(obs.q_mu, n_mu, spec.n_sigma, 1.0);
    adj.q_nu = shift_down(obs.q_nu, n_nu, spec.n_sigma);
    adj.y0 = std::min(shift_up(obs.y0, n_vac, spec.n_sigma, 1.0), adj.q_nu);
    const double t_mu = shift_up(obs.e_mu * obs.q_mu, n_mu, spec.n_sigma, adj.q_mu);
    const double t_nu = shift_up(obs.e_nu * obs.q_nu, n_nu, spec.n_sigma, adj.q_nu);
    adj.e_mu = adj.q_mu > 0.0 ? std::min(t_mu / adj.q_mu, 0.5) : 0.5;
    adj.e_nu = adj.q_nu > 0.0 ? std::min(t_nu / adj.q_nu, 0.5) : 0.5;
    return adj;
}

KeyRateReport secure_key_rate(const ChannelObservables& obs, const DecoyProtocol& proto,
                              const QkdSystemSpec& spec) {
    KeyRateReport report;
    const DecoyEstimate est = decoy_bounds(obs, proto);
    report.y1_lower = est.y1_lower;
    report.e1_upper = est.e1_upper;
    report.q1 = est.q1;
    report.q0 = est.q0;
    report.q_mu = obs.q_mu;
    report.e_mu = obs.e_mu;
    if (!est.ok) {
        report.estimation_failed = true;
        report.r_per_pulse = 0.0;
        report.r_bps = 0.0;
        report.secure = false;
        return report;
    }
    const double q = proto.sifting_factor();
    report.r_per_pulse = q * (-obs.q_mu * spec.f_ec * binary_entropy(obs.e_mu) +
                              est.q1 * (1.0 - binary_entropy(est.e1_upper)) + est.q0);
    report.secure = report.r_per_pulse > 0.0;
    report.r_bps = std::max(0.0, report.r_per_pulse) * spec.clock_hz;
    return report;
}

} // namespace qkdwdm
