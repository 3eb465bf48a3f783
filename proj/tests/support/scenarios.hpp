#pragma once

// Desk-setup scenario builders shared by the unit and acceptance suites.
// Values mirror configs/paper_4ch.ini.

#include "qkdwdm/channel.hpp"
#include "qkdwdm/planner.hpp"
#include "qkdwdm/units.hpp"

namespace qkdwdm::testsupport {

inline FiberSpec make_fiber(double length_km = 50.0) {
    FiberSpec fiber;
    fiber.length_km = length_km;
    fiber.atten_db_per_km = {{1310.0, 0.33}, {1550.12, 0.20}, {1550.0, 0.20}};
    return fiber;
}

inline DetectorSpec make_qkd_detector(double afterpulse = 0.0275) {
    DetectorSpec det;
    det.efficiency = 0.1;
    det.dark_prob_per_gate = 1e-6;
    det.gate_rate_hz = 625e6;
    det.gate_width_s = 180e-12;
    det.dead_time_s = 200e-9;
    det.afterpulse_prob = afterpulse;
    return det;
}

inline DetectorSpec make_monitor_detector() {
    DetectorSpec det;
    det.efficiency = 0.1;
    det.dark_prob_per_gate = 0.0;
    det.gate_rate_hz = 1.25e9;
    det.gate_width_s = 180e-12;
    det.dead_time_s = 0.0;
    det.afterpulse_prob = 0.0;
    return det;
}

inline WdmFilterSpec make_bpf1310() {
    WdmFilterSpec f;
    f.center_nm = 1310.0;
    f.passband_ghz = 100.0;
    f.insertion_loss_db = 0.5;
    f.isolation_db = 183.0;
    return f;
}

inline WdmFilterSpec make_fbg1550() {
    WdmFilterSpec f;
    f.center_nm = 1550.12;
    f.passband_ghz = 20.0;
    f.insertion_loss_db = 3.2;
    f.isolation_db = 83.0;
    return f;
}

// rho fitted from the measured noise anchors (6.2 kcps at 1310 nm, 440.4 kcps
// at 1550.12 nm; 6 dBm through 13.6 km)
inline RamanCalibration make_calibration() {
    RamanCalibration cal;
    FiberSpec rig = make_fiber(13.6);
    const DetectorSpec mon = make_monitor_detector();
    cal.set(1550.0, 1310.0,
            calibrate_raman(6.2e3, dbm_to_watts(6.0), rig, make_bpf1310(), mon, Direction::Co,
                            1550.0));
    cal.set(1550.0, 1550.12,
            calibrate_raman(440.4e3, dbm_to_watts(6.0), rig, make_fbg1550(), mon, Direction::Co,
                            1550.0));
    return cal;
}

inline ClassicalPlan make_classical_4ch(FecSpec fec = FecSpec::soft20()) {
    ClassicalAnchor anchor;
    anchor.optimum_power_dbm = 4.0;
    anchor.ber_at_optimum = 1.4e-3;
    anchor.length_km = 50.0;
    anchor.n_channels = 4;
    anchor.qam_m = 64;
    ClassicalPlan plan;
    plan.model = calibrate_classical(anchor);
    plan.qam = QamFormat{64, 28.0, 2};
    plan.fec = fec;
    return plan;
}

inline ClassicalPlan make_classical_32ch(FecSpec fec = FecSpec::hard7()) {
    ClassicalAnchor anchor;
    anchor.optimum_power_dbm = 11.0;
    anchor.ber_at_optimum = 1.4e-3;
    anchor.length_km = 50.0;
    anchor.n_channels = 32;
    anchor.qam_m = 16;
    ClassicalPlan plan;
    plan.model = calibrate_classical(anchor);
    plan.qam = QamFormat{16, 28.0, 2};
    plan.fec = fec;
    return plan;
}

inline Scenario make_scenario_1310(Direction dir = Direction::Co, double length_km = 50.0,
                                   double afterpulse = 0.0275) {
    Scenario sc;
    sc.fiber = make_fiber(length_km);
    sc.quantum_nm = 1310.0;
    sc.classical_nm = 1550.0;
    sc.direction = dir;
    sc.detector = make_qkd_detector(afterpulse);
    sc.quantum_filter = make_bpf1310();
    sc.crosstalk_isolation_db = 183.0;
    sc.raman = make_calibration();
    sc.classical = make_classical_4ch();
    return sc;
}

inline Scenario make_scenario_1550(Direction dir = Direction::Co, double length_km = 50.0,
                                   double afterpulse = 0.0275) {
    Scenario sc = make_scenario_1310(dir, length_km, afterpulse);
    sc.quantum_nm = 1550.12;
    sc.quantum_filter = make_fbg1550();
    sc.crosstalk_isolation_db = 83.0;
    return sc;
}

} // namespace qkdwdm::testsupport
