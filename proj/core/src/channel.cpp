#include "qkdwdm/channel.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "qkdwdm/errors.hpp"
#include "qkdwdm/units.hpp"

namespace qkdwdm {

namespace {
constexpr double kWavelengthTolNm = 0.05;
}

const char* to_string(Direction d) { return d == Direction::Co ? "co" : "counter"; }

Direction direction_from_string(const std::string& s) {
    if (s == "co" || s == "forward") return Direction::Co;
    if (s == "counter" || s == "backward") return Direction::Counter;
    throw ConfigError("unknown direction '" + s + "' (expected co|counter)");
}

double FiberSpec::attenuation_db_per_km(double wavelength_nm) const {
    for (const auto& [nm, db] : atten_db_per_km) {
        if (std::abs(nm - wavelength_nm) <= kWavelengthTolNm) return db;
    }
    std::ostringstream os;
    os << "no attenuation entry for wavelength " << wavelength_nm << " nm";
    throw ConfigError(os.str());
}

bool FiberSpec::has_wavelength(double wavelength_nm) const {
    for (const auto& [nm, db] : atten_db_per_km) {
        (void)db;
        if (std::abs(nm - wavelength_nm) <= kWavelengthTolNm) return true;
    }
    return false;
}

void FiberSpec::validate() const {
    if (length_km < 0.0) throw ConfigError("fiber length must be >= 0");
    for (const auto& [nm, db] : atten_db_per_km) {
        if (db <= 0.0 || db >= 1.0) {
            std::ostringstream os;
            os << "attenuation " << db << " dB/km at " << nm << " nm outside (0,1) sanity bound";
            throw ConfigError(os.str());
        }
    }
}

void WdmFilterSpec::validate() const {
    if (passband_ghz <= 0.0) throw ConfigError("filter passband must be positive");
    if (insertion_loss_db < 0.0) throw ConfigError("filter insertion loss must be >= 0");
    if (insertion_loss_db > isolation_db)
        throw ConfigError("filter insertion loss exceeds its isolation");
}

void DetectorSpec::validate() const {
    if (efficiency < 0.0 || efficiency > 1.0) throw ConfigError("detector efficiency outside [0,1]");
    if (dark_prob_per_gate < 0.0 || dark_prob_per_gate >= 1e-3)
        throw ConfigError("dark count probability per gate outside [0, 1e-3)");
    if (gate_rate_hz <= 0.0 || gate_width_s <= 0.0)
        throw ConfigError("gate rate and width must be positive");
    if (duty_cycle() > 1.0) throw ConfigError("gate duty cycle exceeds 1");
    if (dead_time_s < 0.0) throw ConfigError("dead time must be >= 0");
    if (afterpulse_prob < 0.0 || afterpulse_prob > 1.0)
        throw ConfigError("afterpulse probability outside [0,1]");
}

void RamanCalibration::set(double classical_nm, double quantum_nm, double rho) {
    for (auto& e : entries_) {
        if (std::abs(e.classical_nm - classical_nm) <= kWavelengthTolNm &&
            std::abs(e.quantum_nm - quantum_nm) <= kWavelengthTolNm) {
            e.rho = rho;
            return;
        }
    }
    entries_.push_back({classical_nm, quantum_nm, rho});
}

const RamanCalibration::Entry* RamanCalibration::find(double classical_nm,
                                                      double quantum_nm) const {
    for (const auto& e : entries_) {
        if (std::abs(e.classical_nm - classical_nm) <= kWavelengthTolNm &&
            std::abs(e.quantum_nm - quantum_nm) <= kWavelengthTolNm) {
            return &e;
        }
    }
    return nullptr;
}

double RamanCalibration::rho(double classical_nm, double quantum_nm) const {
    const Entry* e = find(classical_nm, quantum_nm);
    if (e == nullptr) {
        std::ostringstream os;
        os << "no Raman calibration for " << classical_nm << " nm -> " << quantum_nm << " nm";
        throw ConfigError(os.str());
    }
    return e->rho;
}

bool RamanCalibration::has(double classical_nm, double quantum_nm) const {
    return find(classical_nm, quantum_nm) != nullptr;
}

double transmittance(const FiberSpec& fiber, double wavelength_nm, double extra_loss_db) {
    const double alpha = fiber.attenuation_db_per_km(wavelength_nm);
    return std::pow(10.0, -(alpha * fiber.length_km + extra_loss_db) / 10.0);
}

namespace {

// integral of generation along the span times propagation to the observer
double forward_geometry_km(double ac, double aq, double length_km) {
    if (std::abs(ac - aq) < 1e-12 * std::max(ac, aq)) {
        return length_km * std::exp(-0.5 * (ac + aq) * length_km);
    }
    return (std::exp(-aq * length_km) - std::exp(-ac * length_km)) / (ac - aq);
}

double backward_geometry_km(double ac, double aq, double length_km) {
    const double sum = ac + aq;
    if (sum <= 0.0) return length_km;
    return (1.0 - std::exp(-sum * length_km)) / sum;
}

} // namespace

double raman_forward_power(double p_launch_w, double rho, double bandwidth_ghz,
                           const FiberSpec& fiber, double classical_nm, double quantum_nm) {
    if (classical_nm == quantum_nm)
        throw ConfigError("classical and quantum wavelengths must differ");
    const double ac = db_per_km_to_nepers(fiber.attenuation_db_per_km(classical_nm));
    const double aq = db_per_km_to_nepers(fiber.attenuation_db_per_km(quantum_nm));
    return p_launch_w * rho * bandwidth_ghz * forward_geometry_km(ac, aq, fiber.length_km);
}

double raman_backward_power(double p_launch_w, double rho, double bandwidth_ghz,
                            const FiberSpec& fiber, double classical_nm, double quantum_nm) {
    if (classical_nm == quantum_nm)
        throw ConfigError("classical and quantum wavelengths must differ");
    const double ac = db_per_km_to_nepers(fiber.attenuation_db_per_km(classical_nm));
    const double aq = db_per_km_to_nepers(fiber.attenuation_db_per_km(quantum_nm));
    return p_launch_w * rho * bandwidth_ghz * backward_geometry_km(ac, aq, fiber.length_km);
}

double power_to_count_rate(double p_w, double wavelength_nm, const DetectorSpec& det) {
    if (p_w < 0.0) throw std::domain_error("optical power must be >= 0");
    const double flux = p_w / photon_energy_j(wavelength_nm);
    const double r = flux * det.efficiency * det.duty_cycle();
    return r / (1.0 + r * det.dead_time_s);
}

double count_rate_to_power(double cps, double wavelength_nm, const DetectorSpec& det) {
    if (cps < 0.0) throw std::domain_error("count rate must be >= 0");
    double r = cps;
    if (det.dead_time_s > 0.0) {
        const double denom = 1.0 - cps * det.dead_time_s;
        if (denom <= 0.0) throw std::domain_error("count rate above dead-time saturation");
        r = cps / denom;
    }
    return r * photon_energy_j(wavelength_nm) / (det.efficiency * det.duty_cycle());
}

double calibrate_raman(double measured_cps, double p_launch_w, const FiberSpec& fiber,
                       const WdmFilterSpec& filter, const DetectorSpec& det,
                       Direction direction, double classical_nm) {
    const double dark_cps = det.dark_prob_per_gate * det.gate_rate_hz;
    if (measured_cps <= dark_cps) {
        throw CalibrationError("measured count rate does not exceed the detector dark floor");
    }
    if (p_launch_w <= 0.0) throw CalibrationError("launch power must be positive");
    const double quantum_nm = filter.center_nm;
    const double p_detector = count_rate_to_power(measured_cps - dark_cps, quantum_nm, det);
    const double p_fibre_end = p_detector * db_to_linear(filter.insertion_loss_db);
    const double ac = db_per_km_to_nepers(fiber.attenuation_db_per_km(classical_nm));
    const double aq = db_per_km_to_nepers(fiber.attenuation_db_per_km(quantum_nm));
    const double geom = direction == Direction::Co
                            ? forward_geometry_km(ac, aq, fiber.length_km)
                            : backward_geometry_km(ac, aq, fiber.length_km);
    if (geom <= 0.0) throw CalibrationError("zero-length fibre cannot be calibrated");
    return p_fibre_end / (p_launch_w * filter.passband_ghz * geom);
}

NoiseBudget noise_budget(const NoiseContext& ctx) {
    if (ctx.calibration == nullptr || !ctx.calibration->has(ctx.classical_nm, ctx.quantum_nm)) {
        std::ostringstream os;
        os << "missing Raman calibration for " << ctx.classical_nm << " -> " << ctx.quantum_nm
           << " nm";
        throw ConfigError(os.str());
    }
    const double rho = ctx.calibration->rho(ctx.classical_nm, ctx.quantum_nm);

    // Components here stay exactly linear in launch power; dead-time
    // suppression is a global live fraction applied by the consumer together
    // with the signal clicks.
    const auto raw_cps = [&ctx](double p_w, double nm) {
        return p_w / photon_energy_j(nm) * ctx.detector.efficiency * ctx.detector.duty_cycle();
    };

    NoiseBudget out;
    // Scattered light traverses the quantum bandpass filter; polarization
    // optics route unpolarized noise to some detector rather than absorb it,
    // so the receiver's bob-side loss does not apply here.
    const double p_raman = ctx.direction == Direction::Co
                               ? raman_forward_power(ctx.p_launch_w, rho,
                                                     ctx.quantum_filter.passband_ghz, ctx.fiber,
                                                     ctx.classical_nm, ctx.quantum_nm)
                               : raman_backward_power(ctx.p_launch_w, rho,
                                                      ctx.quantum_filter.passband_ghz, ctx.fiber,
                                                      ctx.classical_nm, ctx.quantum_nm);
    const double filter_lin = db_to_linear(-ctx.quantum_filter.insertion_loss_db);
    out.raman_cps = raw_cps(p_raman * filter_lin, ctx.quantum_nm);

    out.dark_cps = ctx.detector.dark_prob_per_gate * ctx.detector.gate_rate_hz;

    // in-band leak of the classical launch, attenuated along the fibre at the
    // quantum wavelength and through the quantum filter passband
    const double p_xtalk = ctx.p_launch_w * db_to_linear(-ctx.crosstalk_isolation_db) *
                           transmittance(ctx.fiber, ctx.quantum_nm,
                                         ctx.quantum_filter.insertion_loss_db);
    out.crosstalk_cps = raw_cps(p_xtalk, ctx.quantum_nm);

    out.afterpulse_cps =
        ctx.detector.afterpulse_prob * ctx.detection_yield_per_gate * ctx.detector.gate_rate_hz;

    out.total_y0_per_gate = (out.raman_cps + out.dark_cps + out.crosstalk_cps +
                             out.afterpulse_cps) /
                            ctx.detector.gate_rate_hz;
    return out;
}

} // namespace qkdwdm
