#pragma once

#include <string>

namespace qkdwdm {

struct QamFormat {
    int m = 64; // constellation size, 16 or 64
    double baud_ghz = 28.0;
    int polarizations = 2;

    double bits_per_symbol() const;
    double gross_bps() const; // baud * log2(m) * polarizations
    void validate() const;
};

struct FrameSpec {
    int preamble_symbols = 4696;
    int data_symbols = 102400;
    int pilots_per_block = 2;
    int block_symbols = 512;

    int pilot_symbols() const { return data_symbols / block_symbols * pilots_per_block; }
    // payload over total airtime: (data - pilots) / (preamble + data)
    double efficiency() const;
    void validate() const;
};

struct FecSpec {
    enum class Kind { Hard7, Soft20 };
    Kind kind = Kind::Soft20;
    double ber_threshold = 2.4e-2;
    double overhead = 0.20;

    static FecSpec hard7() { return {Kind::Hard7, 4.5e-3, 0.07}; }
    static FecSpec soft20() { return {Kind::Soft20, 2.4e-2, 0.20}; }
    static FecSpec from_string(const std::string& name);
    const char* name() const { return kind == Kind::Hard7 ? "hard7" : "soft20"; }
};

// Calibrated SNR model for one WDM link:
//   SNR(P) = P_rx / (P_ase + nli * P^3),
// a linear-noise floor plus a cubic nonlinear-interference term, which gives
// the single-minimum BER-vs-power trade-off. Powers are total launch powers.
struct ClassicalLinkModel {
    int n_channels = 4;
    double channel_power_dbm = 0.0; // per-channel launch at the chosen operating point
    double ase_power_w = 0.0;       // calibration constant
    double nli_coeff = 0.0;         // calibration constant, 1/W^2
    double wdm_loss_db = 1.6;       // mux/demux penalty on the classical path
    double ref_length_km = 50.0;    // length the constants were fitted at
    double atten_db_per_km = 0.2;   // classical-band fibre loss

    bool calibrated() const { return ase_power_w > 0.0; }
};

struct ClassicalAnchor {
    double optimum_power_dbm = 4.0; // total launch power minimizing BER
    double ber_at_optimum = 1.4e-3;
    double length_km = 50.0;
    int n_channels = 4;
    int qam_m = 64;
};

// gross * frame_efficiency / (1 + overhead) * n_channels
double net_throughput_bps(const QamFormat& qam, const FrameSpec& frame, const FecSpec& fec,
                          int n_channels);

// SNR at total launch power p_dbm; lengths beyond ref_length_km scale the
// received signal by the extra span loss.
double effective_snr(const ClassicalLinkModel& model, double p_launch_dbm, double length_km);

// Gray-coded square-QAM approximation:
//   BER = (2/log2 m)(1 - 1/sqrt(m)) erfc(sqrt(3 snr / (2(m-1)))),  clamped to [0, 1/2]
double qam_ber(double snr, int m);

// inverse of qam_ber in snr (bisection); ber must be in (0, 0.5)
double qam_snr_for_ber(double ber, int m);

bool fec_gate(double ber_raw, const FecSpec& fec);

// Solve (ase_power_w, nli_coeff) so that the BER minimum sits at the anchor
// power with the anchor BER. Two constraints, two constants, closed form:
//   P* = (ase / (2 nli))^(1/3)  and  SNR(P*) = 1 / (3 nli P*^2).
ClassicalLinkModel calibrate_classical(const ClassicalAnchor& anchor);

} // namespace qkdwdm
