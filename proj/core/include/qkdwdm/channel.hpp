#pragma once

#include <map>
#include <string>
#include <vector>

namespace qkdwdm {

// Propagation direction of the quantum signal relative to the classical
// channels. Co-propagation sees forward-scattered Raman light at the quantum
// receiver, counter-propagation sees the (stronger, saturating) backward wave.
enum class Direction { Co, Counter };

const char* to_string(Direction d);
Direction direction_from_string(const std::string& s);

struct FiberSpec {
    double length_km = 0.0;
    // attenuation in dB/km keyed by wavelength in nm
    std::map<double, double> atten_db_per_km;

    // nearest-key lookup within 0.05 nm; unknown wavelength is a ConfigError
    double attenuation_db_per_km(double wavelength_nm) const;
    bool has_wavelength(double wavelength_nm) const;
    void validate() const;
};

struct WdmFilterSpec {
    double center_nm = 0.0;
    double passband_ghz = 0.0;
    double insertion_loss_db = 0.0;
    double isolation_db = 0.0; // out-of-band suppression at a query wavelength

    void validate() const;
};

struct DetectorSpec {
    double efficiency = 0.1;
    double dark_prob_per_gate = 1e-6;
    double gate_rate_hz = 625e6;
    double gate_width_s = 180e-12;
    double dead_time_s = 200e-9;
    double afterpulse_prob = 0.0;

    double duty_cycle() const { return gate_rate_hz * gate_width_s; }
    void validate() const;
};

// Spontaneous-scattering coefficients fitted from measured count rates.
// rho is the fraction of classical launch power converted per km of fibre and
// per GHz of receiver bandwidth, units 1/(km*GHz).
class RamanCalibration {
  public:
    void set(double classical_nm, double quantum_nm, double rho);
    double rho(double classical_nm, double quantum_nm) const;
    bool has(double classical_nm, double quantum_nm) const;
    struct Entry {
        double classical_nm;
        double quantum_nm;
        double rho;
    };
    const std::vector<Entry>& entries() const { return entries_; }

  private:
    const Entry* find(double classical_nm, double quantum_nm) const;
    std::vector<Entry> entries_;
};

struct NoiseBudget {
    double raman_cps = 0.0;
    double dark_cps = 0.0;
    double crosstalk_cps = 0.0;
    double afterpulse_cps = 0.0;
    double total_y0_per_gate = 0.0;
};

// Everything noise_budget needs to price a WDM scenario at one operating
// point. detection_yield_per_gate is the measured (dead-time corrected) mean
// click probability per gate; afterpulse noise is modeled as a constant
// multiplier on it.
struct NoiseContext {
    double p_launch_w = 0.0;
    const RamanCalibration* calibration = nullptr;
    double classical_nm = 1550.0;
    double quantum_nm = 1310.0;
    FiberSpec fiber;
    WdmFilterSpec quantum_filter;
    DetectorSpec detector;
    Direction direction = Direction::Co;
    // total suppression of the classical launch power into the quantum band
    // at the receiver input (mux leak + demux isolation)
    double crosstalk_isolation_db = 183.0;
    double detection_yield_per_gate = 0.0;
};

// 10^(-(alpha*L + extra)/10); unknown wavelength -> ConfigError
double transmittance(const FiberSpec& fiber, double wavelength_nm, double extra_loss_db = 0.0);

// Raman power collected at the far fibre end (co-propagating with the pump):
//   P * rho * dnu * (exp(-aq L) - exp(-ac L)) / (ac - aq),   a in 1/km,
// with the continuous limit P * rho * dnu * L * exp(-a L) when ac == aq.
double raman_forward_power(double p_launch_w, double rho, double bandwidth_ghz,
                           const FiberSpec& fiber, double classical_nm, double quantum_nm);

// Raman power exiting the launch end (counter-propagating):
//   P * rho * dnu * (1 - exp(-(ac+aq) L)) / (ac + aq)
double raman_backward_power(double p_launch_w, double rho, double bandwidth_ghz,
                            const FiberSpec& fiber, double classical_nm, double quantum_nm);

// Optical power -> registered count rate: photon flux times efficiency and
// gate duty cycle, then non-paralyzable dead-time correction 1/(1 + R*tau).
double power_to_count_rate(double p_w, double wavelength_nm, const DetectorSpec& det);

// Invert power_to_count_rate (dead-time and dark uncorrection included).
double count_rate_to_power(double cps, double wavelength_nm, const DetectorSpec& det);

// Fit rho from one measured count rate behind a known filter. The detector's
// dark rate is subtracted first; a measurement at or below the dark floor is
// a CalibrationError.
double calibrate_raman(double measured_cps, double p_launch_w, const FiberSpec& fiber,
                       const WdmFilterSpec& filter, const DetectorSpec& det,
                       Direction direction, double classical_nm);

// Sum Raman, dark, linear crosstalk and afterpulse contributions into the
// background yield per gate of the QKD receiver clock.
NoiseBudget noise_budget(const NoiseContext& ctx);

} // namespace qkdwdm
