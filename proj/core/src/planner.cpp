#include "qkdwdm/planner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qkdwdm/errors.hpp"
#include "qkdwdm/units.hpp"

namespace qkdwdm {

double Scenario::isolation_db() const {
    if (crosstalk_isolation_db >= 0.0) return crosstalk_isolation_db;
    double sum = 0.0;
    for (const auto& f : demux_filters) sum += f.isolation_db;
    return sum;
}

void Scenario::validate() const {
    fiber.validate();
    decoy.validate();
    system.validate();
    detector.validate();
    quantum_filter.validate();
    if (std::abs(quantum_nm - classical_nm) < 0.05)
        throw ConfigError("quantum wavelength must be distinct from the classical band");
    if (!fiber.has_wavelength(quantum_nm) || !fiber.has_wavelength(classical_nm))
        throw ConfigError("fiber attenuation map must cover both wavelengths");
}

LinkOperatingPoint link_operating_point(const Scenario& scenario, double length_km,
                                        double p_launch_w) {
    FiberSpec fiber = scenario.fiber;
    fiber.length_km = length_km;

    LinkOperatingPoint pt;
    // signal path: fibre + quantum filter insertion + receiver optics + detector
    pt.eta = transmittance(fiber, scenario.quantum_nm,
                           scenario.quantum_filter.insertion_loss_db + scenario.system.bob_loss_db) *
             scenario.detector.efficiency;

    NoiseContext ctx;
    ctx.p_launch_w = p_launch_w;
    ctx.calibration = &scenario.raman;
    ctx.classical_nm = scenario.classical_nm;
    ctx.quantum_nm = scenario.quantum_nm;
    ctx.fiber = fiber;
    ctx.quantum_filter = scenario.quantum_filter;
    ctx.detector = scenario.detector;
    ctx.direction = scenario.direction;
    ctx.crosstalk_isolation_db = scenario.isolation_db();

    // first pass without the afterpulse term to get the click rate it feeds on
    NoiseBudget base = noise_budget(ctx);
    const double y0_bg = base.total_y0_per_gate;

    const auto mean_click = [&](double y0) {
        const auto& d = scenario.decoy;
        const double smu = (1.0 - y0) * (-std::expm1(-pt.eta * d.mu));
        const double snu = (1.0 - y0) * (-std::expm1(-pt.eta * d.nu));
        return d.p_signal * (y0 + smu) + d.p_decoy * (y0 + snu) + d.p_vacuum * y0;
    };

    const double dead_gates = scenario.detector.dead_time_s * scenario.detector.gate_rate_hz;
    const double click0 = mean_click(y0_bg);
    pt.live_fraction = 1.0 / (1.0 + click0 * dead_gates);

    ctx.detection_yield_per_gate = click0 * pt.live_fraction;
    pt.budget = noise_budget(ctx);
    pt.y0_total = pt.budget.total_y0_per_gate;

    const auto [q_mu, e_mu] = gain_and_qber(scenario.decoy.mu, pt.eta, pt.y0_total,
                                            scenario.system.e_opt);
    const auto [q_nu, e_nu] = gain_and_qber(scenario.decoy.nu, pt.eta, pt.y0_total,
                                            scenario.system.e_opt);
    pt.obs.q_mu = q_mu * pt.live_fraction;
    pt.obs.q_nu = q_nu * pt.live_fraction;
    pt.obs.e_mu = e_mu;
    pt.obs.e_nu = e_nu;
    pt.obs.y0 = pt.y0_total * pt.live_fraction;
    pt.obs.eta = pt.eta;
    return pt;
}

PlanPoint evaluate_point(const Scenario& scenario, double length_km, double p_launch_w) {
    const LinkOperatingPoint lop = link_operating_point(scenario, length_km, p_launch_w);

    ChannelObservables obs = lop.obs;
    if (scenario.finite_block) {
        obs = fluctuation_adjust(obs, scenario.decoy, scenario.system);
    }
    const KeyRateReport report = secure_key_rate(obs, scenario.decoy, scenario.system);

    PlanPoint point;
    point.distance_km = length_km;
    point.power_dbm = p_launch_w > 0.0 ? watts_to_dbm(p_launch_w) : -300.0;
    point.y0 = lop.obs.y0;
    point.qber = lop.obs.e_mu;
    point.key_bps = report.r_bps;
    point.secure = report.secure;

    const auto& cl = scenario.classical;
    if (cl.model.calibrated() && p_launch_w > 0.0) {
        const double snr = effective_snr(cl.model, watts_to_dbm(p_launch_w), length_km);
        point.ber_raw = qam_ber(snr, cl.qam.m);
        point.fec_pass = fec_gate(point.ber_raw, cl.fec);
        point.net_bps = point.fec_pass
                            ? net_throughput_bps(cl.qam, cl.frame, cl.fec, cl.model.n_channels)
                            : 0.0;
    }
    return point;
}

PlanReport keyrate_vs_power(const Scenario& scenario, const std::vector<double>& power_dbm_grid) {
    PlanReport report;
    report.points.reserve(power_dbm_grid.size());
    for (double dbm : power_dbm_grid) {
        report.points.push_back(evaluate_point(scenario, scenario.fiber.length_km,
                                               dbm_to_watts(dbm)));
    }
    return report;
}

std::optional<double> crossover_power(const Scenario& a, const Scenario& b, double min_dbm,
                                      double max_dbm) {
    const double length = a.fiber.length_km;
    const auto diff = [&](double dbm) {
        const double w = dbm_to_watts(dbm);
        return evaluate_point(a, length, w).key_bps - evaluate_point(b, length, w).key_bps;
    };

    const double step = 0.5;
    double prev_p = min_dbm;
    double prev_d = diff(min_dbm);
    for (double p = min_dbm + step; p <= max_dbm + 1e-9; p += step) {
        const double d = diff(p);
        if (prev_d > 0.0 && d <= 0.0) {
            double lo = prev_p;
            double hi = p;
            while (hi - lo > 0.01) {
                const double mid = 0.5 * (lo + hi);
                if (diff(mid) > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return 0.5 * (lo + hi);
        }
        prev_p = p;
        prev_d = d;
    }
    return std::nullopt;
}

PlanReport keyrate_vs_distance(const Scenario& scenario, const std::vector<double>& distances_km,
                               const std::map<double, double>& power_schedule_dbm) {
    PlanReport report;
    report.points.reserve(distances_km.size());
    for (double L : distances_km) {
        const auto it = power_schedule_dbm.find(L);
        if (it == power_schedule_dbm.end()) {
            std::ostringstream os;
            os << "power schedule has no entry for distance " << L << " km";
            throw ConfigError(os.str());
        }
        report.points.push_back(evaluate_point(scenario, L, dbm_to_watts(it->second)));
    }
    return report;
}

PlanReport joint_plan(const Scenario& scenario, const std::vector<double>& power_dbm_grid) {
    std::vector<double> grid = power_dbm_grid;
    std::sort(grid.begin(), grid.end());
    PlanReport report = keyrate_vs_power(scenario, grid);

    double best_key = 0.0;
    for (std::size_t i = 0; i < report.points.size(); ++i) {
        const auto& pt = report.points[i];
        if (!pt.fec_pass || !(pt.key_bps > 0.0)) continue;
        // strict > keeps the lowest power on ties (grid is sorted ascending)
        if (!report.chosen_index || pt.key_bps > best_key) {
            best_key = pt.key_bps;
            report.chosen_index = i;
        }
    }
    if (report.chosen_index) {
        report.points[*report.chosen_index].chosen = true;
        report.feasible = true;
    }
    return report;
}

} // namespace qkdwdm
