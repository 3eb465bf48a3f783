#pragma once

#include <utility>

namespace qkdwdm {

struct DecoyProtocol {
    double mu = 0.6;  // signal mean photon number
    double nu = 0.2;  // decoy mean photon number
    double p_signal = 0.75;
    double p_decoy = 0.125;
    double p_vacuum = 0.125;
    double basis_match_prob = 0.5;

    // probability that a pulse is a signal pulse and both sides kept it
    double sifting_factor() const { return p_signal * basis_match_prob; }
    void validate() const;
};

struct QkdSystemSpec {
    double clock_hz = 625e6;
    double e_opt = 0.005;   // polarization-contrast error floor
    double f_ec = 1.25;     // error-correction inefficiency
    double block_size = 1e6; // sifted bits per estimation block
    double n_sigma = 5.0;
    double bob_loss_db = 3.0;

    void validate() const;
};

struct ChannelObservables {
    double q_mu = 0.0;
    double q_nu = 0.0;
    double e_mu = 0.0;
    double e_nu = 0.0;
    double y0 = 0.0;  // background yield per gate
    double eta = 0.0; // overall transmittance

    void validate() const;
};

struct KeyRateReport {
    double y1_lower = 0.0;
    double e1_upper = 0.5;
    double q1 = 0.0;
    double q0 = 0.0;
    double q_mu = 0.0; // observed signal gain the estimates refer to
    double e_mu = 0.0;
    double r_per_pulse = 0.0; // raw analytic value, may be negative
    double r_bps = 0.0;       // max(0, r_per_pulse) * clock
    bool secure = false;
    bool estimation_failed = false;
};

// -x log2 x - (1-x) log2 (1-x), with H2(0) = H2(1) = 0
double binary_entropy(double x);

// Gain and QBER of a weak coherent pulse through a lossy channel with
// background yield y0 and optical misalignment e_opt:
//   Q = y0 + (1 - y0)(1 - exp(-eta mu))
//   E = [y0/2 + e_opt (1 - y0)(1 - exp(-eta mu))] / Q
std::pair<double, double> gain_and_qber(double mu, double eta, double y0, double e_opt);

struct DecoyEstimate {
    double y1_lower = 0.0;
    double e1_upper = 0.5;
    double q1 = 0.0;
    double q0 = 0.0;
    bool ok = false; // false when Y1 lower bound collapses to <= 0
};

// Vacuum + weak decoy-state bounds on the single-photon yield and error rate.
DecoyEstimate decoy_bounds(const ChannelObservables& obs, const DecoyProtocol& proto);

// Relative adversarial shift of a rate X estimated from n samples.
double adversarial_relative_shift(double x, double n, double n_sigma);

// Worst-case observables after n_sigma-standard-deviation statistical
// fluctuations. block_size counts sifted signal bits; the pulse counts behind
// each observable follow from the protocol probabilities.
ChannelObservables fluctuation_adjust(const ChannelObservables& obs, const DecoyProtocol& proto,
                                      const QkdSystemSpec& spec);

// R = q { -Q_mu f H2(E_mu) + Q1 [1 - H2(e1)] + Q0 }, clamped at zero for the
// reported bps figure.
KeyRateReport secure_key_rate(const ChannelObservables& obs, const DecoyProtocol& proto,
                              const QkdSystemSpec& spec);

} // namespace qkdwdm
