#include "qkdwdm/classical.hpp"

#include <algorithm>
#include <cmath>

#include "qkdwdm/errors.hpp"
#include "qkdwdm/units.hpp"

namespace qkdwdm {

double QamFormat::bits_per_symbol() const { return std::log2(static_cast<double>(m)); }

double QamFormat::gross_bps() const {
    return baud_ghz * 1e9 * bits_per_symbol() * polarizations;
}

void QamFormat::validate() const {
    if (m != 16 && m != 64) throw ConfigError("QAM order must be 16 or 64");
    if (baud_ghz <= 0.0) throw ConfigError("symbol rate must be positive");
    if (polarizations < 1) throw ConfigError("polarization count must be >= 1");
}

double FrameSpec::efficiency() const {
    return static_cast<double>(data_symbols - pilot_symbols()) /
           static_cast<double>(preamble_symbols + data_symbols);
}

void FrameSpec::validate() const {
    if (preamble_symbols < 0 || data_symbols <= 0) throw ConfigError("bad frame geometry");
    if (block_symbols <= 0 || data_symbols % block_symbols != 0)
        throw ConfigError("data symbols must be a whole number of pilot blocks");
    const double eff = efficiency();
    if (eff <= 0.0 || eff >= 1.0) throw ConfigError("frame efficiency outside (0,1)");
}

FecSpec FecSpec::from_string(const std::string& name) {
    if (name == "hard7") return hard7();
    if (name == "soft20") return soft20();
    throw ConfigError("unknown FEC kind '" + name + "' (expected hard7|soft20)");
}

double net_throughput_bps(const QamFormat& qam, const FrameSpec& frame, const FecSpec& fec,
                          int n_channels) {
    return qam.gross_bps() * frame.efficiency() / (1.0 + fec.overhead) * n_channels;
}

double effective_snr(const ClassicalLinkModel& model, double p_launch_dbm, double length_km) {
    if (!model.calibrated()) throw ConfigError("classical link model is not calibrated");
    const double p = dbm_to_watts(p_launch_dbm);
    const double extra_db = model.atten_db_per_km * (length_km - model.ref_length_km);
    const double p_rx = p * db_to_linear(-extra_db);
    return p_rx / (model.ase_power_w + model.nli_coeff * p * p * p);
}

double qam_ber(double snr, int m) {
    if (m != 16 && m != 64) throw ConfigError("QAM order must be 16 or 64");
    if (snr < 0.0) throw std::domain_error("snr must be >= 0");
    const double md = static_cast<double>(m);
    const double ber = 2.0 / std::log2(md) * (1.0 - 1.0 / std::sqrt(md)) *
                       std::erfc(std::sqrt(3.0 * snr / (2.0 * (md - 1.0))));
    return std::clamp(ber, 0.0, 0.5);
}

double qam_snr_for_ber(double ber, int m) {
    if (ber <= 0.0 || ber >= 0.5) throw CalibrationError("target BER must be in (0, 0.5)");
    double lo = 0.0;
    double hi = 1.0;
    while (qam_ber(hi, m) > ber) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (qam_ber(mid, m) > ber) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

bool fec_gate(double ber_raw, const FecSpec& fec) { return ber_raw <= fec.ber_threshold; }

ClassicalLinkModel calibrate_classical(const ClassicalAnchor& anchor) {
    if (anchor.ber_at_optimum <= 0.0 || anchor.ber_at_optimum >= 0.5)
        throw CalibrationError("anchor BER outside (0, 0.5)");
    const double p_opt = dbm_to_watts(anchor.optimum_power_dbm);
    if (p_opt <= 0.0) throw CalibrationError("anchor power must be positive");
    const double snr_opt = qam_snr_for_ber(anchor.ber_at_optimum, anchor.qam_m);

    ClassicalLinkModel model;
    model.n_channels = anchor.n_channels;
    model.ref_length_km = anchor.length_km;
    model.channel_power_dbm =
        anchor.optimum_power_dbm - linear_to_db(static_cast<double>(anchor.n_channels));
    // dSNR/dP = 0 at p_opt gives ase = 2 nli p^3; substituting into
    // SNR(p_opt) = snr_opt pins nli.
    model.nli_coeff = 1.0 / (3.0 * snr_opt * p_opt * p_opt);
    model.ase_power_w = 2.0 * model.nli_coeff * p_opt * p_opt * p_opt;
    model.wdm_loss_db = anchor.n_channels > 4 ? 2.0 : 1.6;
    return model;
}

} // namespace qkdwdm
