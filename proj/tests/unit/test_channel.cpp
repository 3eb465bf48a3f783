#include <doctest.h>

#include <cmath>

#include "qkdwdm/channel.hpp"
#include "qkdwdm/errors.hpp"
#include "qkdwdm/units.hpp"
#include "support/scenarios.hpp"

using namespace qkdwdm;
namespace ts = qkdwdm::testsupport;

TEST_SUITE_BEGIN("channel");

TEST_CASE("transmittance is decibel arithmetic") {
    FiberSpec fiber = ts::make_fiber(50.0);
    fiber.atten_db_per_km[1550.0] = 0.2;
    CHECK(transmittance(fiber, 1550.0, 0.0) == doctest::Approx(0.1).epsilon(1e-12));

    fiber.length_km = 0.0;
    CHECK(transmittance(fiber, 1550.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));

    fiber.length_km = 80.0;
    const double t = transmittance(fiber, 1310.0, 0.0);
    CHECK(t == doctest::Approx(std::pow(10.0, -2.64)).epsilon(1e-12));
    // measured span loss was 27.1 dB; the nominal fibre is within 1 dB of it
    CHECK(std::abs(-10.0 * std::log10(t) - 27.1) < 1.0);

    CHECK_THROWS_AS(transmittance(fiber, 1490.0, 0.0), ConfigError);
}

TEST_CASE("spec validation catches bad physical parameters") {
    FiberSpec fiber = ts::make_fiber();
    fiber.atten_db_per_km[1310.0] = 1.5;
    CHECK_THROWS_AS(fiber.validate(), ConfigError);

    WdmFilterSpec filter = ts::make_bpf1310();
    filter.insertion_loss_db = filter.isolation_db + 1.0;
    CHECK_THROWS_AS(filter.validate(), ConfigError);

    DetectorSpec det = ts::make_qkd_detector();
    det.gate_width_s = 1.0; // duty cycle far above 1
    CHECK_THROWS_AS(det.validate(), ConfigError);
    det = ts::make_qkd_detector();
    det.dark_prob_per_gate = 1e-2;
    CHECK_THROWS_AS(det.validate(), ConfigError);
}

TEST_CASE("forward Raman: zero length, interior maximum, degenerate limit") {
    FiberSpec fiber = ts::make_fiber(0.0);
    CHECK(raman_forward_power(1e-3, 1e-14, 100.0, fiber, 1550.0, 1310.0) == 0.0);

    // numerical argmax of the closed form vs the analytic location
    const auto power_at = [&](double L) {
        FiberSpec f = ts::make_fiber(L);
        return raman_forward_power(1e-3, 1e-14, 100.0, f, 1550.0, 1310.0);
    };
    double lo = 1.0, hi = 100.0;
    for (int i = 0; i < 200; ++i) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (power_at(m1) < power_at(m2)) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    const double numeric_argmax = 0.5 * (lo + hi);
    const double analytic_argmax = std::log(0.33 / 0.2) /
                                   (db_per_km_to_nepers(0.33) - db_per_km_to_nepers(0.2));
    CHECK(analytic_argmax == doctest::Approx(16.7295341703).epsilon(1e-9));
    CHECK(std::abs(numeric_argmax - analytic_argmax) < 1e-3);

    // unimodal: increments change sign exactly once on a grid
    int sign_changes = 0;
    double prev = power_at(0.5);
    bool rising = true;
    for (double L = 1.0; L <= 120.0; L += 0.5) {
        const double cur = power_at(L);
        if (rising && cur < prev) {
            rising = false;
            ++sign_changes;
        }
        CHECK((rising ? cur >= prev : cur <= prev));
        prev = cur;
    }
    CHECK(sign_changes == 1);

    // equal attenuations reproduce the L e^{-aL} limit
    FiberSpec sym = ts::make_fiber(17.0);
    sym.atten_db_per_km[1549.0] = 0.2;
    const double degenerate = raman_forward_power(1e-3, 1e-14, 20.0, sym, 1549.0, 1550.12);
    const double a = db_per_km_to_nepers(0.2);
    const double closed = 1e-3 * 1e-14 * 20.0 * 17.0 * std::exp(-a * 17.0);
    CHECK(degenerate == doctest::Approx(closed).epsilon(1e-9));
    // and the general branch converges to it as the attenuations approach
    sym.atten_db_per_km[1549.0] = 0.2 + 1e-7;
    const double near = raman_forward_power(1e-3, 1e-14, 20.0, sym, 1549.0, 1550.12);
    CHECK(near == doctest::Approx(degenerate).epsilon(1e-6));
}

TEST_CASE("backward Raman: zero length, saturation, ratio to forward") {
    FiberSpec fiber = ts::make_fiber(0.0);
    CHECK(raman_backward_power(1e-3, 1e-14, 100.0, fiber, 1550.0, 1310.0) == 0.0);

    FiberSpec longf = ts::make_fiber(2000.0);
    const double sat = 1e-3 * 1e-14 * 100.0 /
                       (db_per_km_to_nepers(0.2) + db_per_km_to_nepers(0.33));
    CHECK(raman_backward_power(1e-3, 1e-14, 100.0, longf, 1550.0, 1310.0) ==
          doctest::Approx(sat).epsilon(1e-9));

    // strictly increasing
    double prev = 0.0;
    for (double L = 5.0; L <= 100.0; L += 5.0) {
        FiberSpec f = ts::make_fiber(L);
        const double cur = raman_backward_power(1e-3, 1e-14, 100.0, f, 1550.0, 1310.0);
        CHECK(cur > prev);
        CHECK(cur < sat);
        prev = cur;
    }

    FiberSpec f50 = ts::make_fiber(50.0);
    const double fwd = raman_forward_power(1e-3, 1e-14, 100.0, f50, 1550.0, 1310.0);
    const double bwd = raman_backward_power(1e-3, 1e-14, 100.0, f50, 1550.0, 1310.0);
    CHECK(bwd / fwd == doctest::Approx(3.2).epsilon(0.25));
}

TEST_CASE("Raman powers are exactly linear in launch power and bandwidth") {
    FiberSpec fiber = ts::make_fiber(42.0);
    const double base = raman_forward_power(1e-3, 2e-14, 50.0, fiber, 1550.0, 1310.0);
    CHECK(raman_forward_power(2e-3, 2e-14, 50.0, fiber, 1550.0, 1310.0) == 2.0 * base);
    CHECK(raman_forward_power(1e-3, 2e-14, 100.0, fiber, 1550.0, 1310.0) == 2.0 * base);
    const double bbase = raman_backward_power(1e-3, 2e-14, 50.0, fiber, 1550.0, 1310.0);
    CHECK(raman_backward_power(3e-3, 2e-14, 50.0, fiber, 1550.0, 1310.0) == 3.0 * bbase);
}

TEST_CASE("power to count rate: photon flux arithmetic and dead time") {
    DetectorSpec det = ts::make_monitor_detector(); // eta 0.1, duty 0.225, no dead time
    CHECK(power_to_count_rate(0.0, 1310.0, det) == 0.0);

    // hand oracle: flux = P lambda / (h c)
    const double flux = 1e-15 * 1310e-9 / (kPlanckJs * kSpeedOfLightMs);
    const double oracle = flux * 0.1 * 0.225;
    CHECK(oracle == doctest::Approx(148.380585828).epsilon(1e-9));
    CHECK(power_to_count_rate(1e-15, 1310.0, det) == doctest::Approx(oracle).epsilon(1e-12));

    // 10 dBm behind 180 dB of isolation is immeasurable
    CHECK(power_to_count_rate(1e-23, 1310.0, det) < 0.01);

    CHECK_THROWS_AS(power_to_count_rate(-1e-18, 1310.0, det), std::domain_error);

    // monotone, and the corrected rate never exceeds the gate rate
    DetectorSpec gated = ts::make_qkd_detector();
    double prev = -1.0;
    for (double p = 1e-18; p < 1e-3; p *= 10.0) {
        const double r = power_to_count_rate(p, 1310.0, gated);
        CHECK(r >= prev);
        CHECK(r <= gated.gate_rate_hz);
        prev = r;
    }
}

TEST_CASE("Raman calibration inverts the measurement chain") {
    FiberSpec rig = ts::make_fiber(13.6);
    const DetectorSpec mon = ts::make_monitor_detector();

    // independent oracle: invert the chain by hand for the 1310 anchor
    const double p_det = 6.2e3 * photon_energy_j(1310.0) / (0.1 * 0.225);
    const double p_end = p_det * db_to_linear(0.5);
    const double ac = db_per_km_to_nepers(0.2);
    const double aq = db_per_km_to_nepers(0.33);
    const double geom = (std::exp(-aq * 13.6) - std::exp(-ac * 13.6)) / (ac - aq);
    const double oracle_rho = p_end / (dbm_to_watts(6.0) * 100.0 * geom);

    const double rho1310 = calibrate_raman(6.2e3, dbm_to_watts(6.0), rig, ts::make_bpf1310(),
                                           mon, Direction::Co, 1550.0);
    CHECK(rho1310 == doctest::Approx(oracle_rho).epsilon(1e-12));
    CHECK(rho1310 == doctest::Approx(1.9718818172364084e-14).epsilon(1e-9));

    const double rho1550 = calibrate_raman(440.4e3, dbm_to_watts(6.0), rig, ts::make_fbg1550(),
                                           mon, Direction::Co, 1550.0);
    CHECK(rho1550 == doctest::Approx(9.053308108755995e-12).epsilon(1e-9));

    // after bandwidth normalization the 1550 coefficient is O(100) above 1310
    const double ratio = rho1550 / rho1310;
    CHECK(ratio > 100.0);
    CHECK(ratio < 1000.0);

    // round trip: re-simulating the rig reproduces the measured rate
    const double p_sim = raman_forward_power(dbm_to_watts(6.0), rho1310, 100.0, rig, 1550.0,
                                             1310.0) *
                         db_to_linear(-0.5);
    const double cps = power_to_count_rate(p_sim, 1310.0, mon);
    CHECK(cps == doctest::Approx(6.2e3).epsilon(1e-3));

    // below the dark floor the inversion must refuse
    DetectorSpec dark_mon = mon;
    dark_mon.dark_prob_per_gate = 1e-4; // 125 kcps of dark
    CHECK_THROWS_AS(calibrate_raman(6.2e3, dbm_to_watts(6.0), rig, ts::make_bpf1310(), dark_mon,
                                    Direction::Co, 1550.0),
                    CalibrationError);
}

TEST_CASE("noise budget composition") {
    RamanCalibration cal = ts::make_calibration();
    NoiseContext ctx;
    ctx.calibration = &cal;
    ctx.classical_nm = 1550.0;
    ctx.quantum_nm = 1310.0;
    ctx.fiber = ts::make_fiber(50.0);
    ctx.quantum_filter = ts::make_bpf1310();
    ctx.detector = ts::make_qkd_detector(0.0); // afterpulsing off by default
    ctx.direction = Direction::Co;
    ctx.crosstalk_isolation_db = 183.0;

    SUBCASE("classical light off leaves the dark floor") {
        ctx.p_launch_w = 0.0;
        const NoiseBudget nb = noise_budget(ctx);
        CHECK(nb.raman_cps == 0.0);
        CHECK(nb.crosstalk_cps == 0.0);
        CHECK(nb.total_y0_per_gate == doctest::Approx(1e-6).epsilon(1e-12));
    }

    SUBCASE("Raman counts scale exactly linearly with launch power") {
        ctx.p_launch_w = dbm_to_watts(4.0);
        const NoiseBudget nb1 = noise_budget(ctx);
        ctx.p_launch_w = 2.0 * dbm_to_watts(4.0);
        const NoiseBudget nb2 = noise_budget(ctx);
        CHECK(nb2.raman_cps == 2.0 * nb1.raman_cps);
        CHECK(nb1.raman_cps > 0.0);
    }

    SUBCASE("all sources zero") {
        ctx.p_launch_w = 0.0;
        ctx.detector.dark_prob_per_gate = 0.0;
        const NoiseBudget nb = noise_budget(ctx);
        CHECK(nb.total_y0_per_gate == 0.0);
    }

    SUBCASE("total is the component sum over the gate rate") {
        ctx.p_launch_w = dbm_to_watts(10.0);
        ctx.detection_yield_per_gate = 5e-4;
        ctx.detector.afterpulse_prob = 0.02;
        const NoiseBudget nb = noise_budget(ctx);
        const double sum = nb.raman_cps + nb.dark_cps + nb.crosstalk_cps + nb.afterpulse_cps;
        CHECK(nb.total_y0_per_gate == doctest::Approx(sum / 625e6).epsilon(1e-12));
        CHECK(nb.afterpulse_cps == doctest::Approx(0.02 * 5e-4 * 625e6).epsilon(1e-12));
    }

    SUBCASE("missing calibration pair is a configuration error") {
        ctx.quantum_nm = 1490.0;
        ctx.fiber.atten_db_per_km[1490.0] = 0.25;
        CHECK_THROWS_AS(noise_budget(ctx), ConfigError);
    }
}

TEST_SUITE_END();
