#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "qkdwdm/channel.hpp"
#include "qkdwdm/classical.hpp"
#include "qkdwdm/keyrate.hpp"

namespace qkdwdm {

struct ClassicalPlan {
    ClassicalLinkModel model;
    QamFormat qam;
    FrameSpec frame;
    FecSpec fec;
};

// One co-existence configuration: fibre, wavelength allocation, QKD stack and
// classical plan. The synchronization channel is excluded from the noise
// arithmetic (its 100 kHz pulse train averages orders of magnitude below the
// data channels).
struct Scenario {
    FiberSpec fiber;
    double quantum_nm = 1310.0;
    double classical_nm = 1550.0;
    Direction direction = Direction::Co;
    DecoyProtocol decoy;
    QkdSystemSpec system;
    DetectorSpec detector;
    WdmFilterSpec quantum_filter;
    std::vector<WdmFilterSpec> demux_filters; // isolation cascade on the quantum path
    // overrides the summed demux isolation when >= 0
    double crosstalk_isolation_db = -1.0;
    RamanCalibration raman;
    ClassicalPlan classical;
    bool finite_block = false; // apply fluctuation_adjust inside sweeps

    double isolation_db() const;
    void validate() const;
};

struct PlanPoint {
    double distance_km = 0.0;
    double power_dbm = 0.0;
    double y0 = 0.0;
    double qber = 0.0;
    double key_bps = 0.0;
    double ber_raw = 0.0;
    bool fec_pass = false;
    double net_bps = 0.0;
    bool secure = false;
    bool chosen = false;
};

struct PlanReport {
    std::vector<PlanPoint> points;
    std::optional<std::size_t> chosen_index;
    bool feasible = false;
};

// Signal transmittance, background yield, dead-time live fraction and the
// asymptotic observables at one operating point. Shared by the analytic
// sweeps and the Monte Carlo front-end so the two stay consistent.
struct LinkOperatingPoint {
    double eta = 0.0;
    NoiseBudget budget;
    double y0_total = 0.0;     // background + afterpulse, per gate
    double live_fraction = 1.0;
    ChannelObservables obs;    // live-scaled
};

LinkOperatingPoint link_operating_point(const Scenario& scenario, double length_km,
                                        double p_launch_w);

PlanPoint evaluate_point(const Scenario& scenario, double length_km, double p_launch_w);

// Key rate and classical figures across a launch-power grid (dBm).
PlanReport keyrate_vs_power(const Scenario& scenario, const std::vector<double>& power_dbm_grid);

// Launch power at which the two scenarios' key rates cross, resolved by
// bisection to 0.01 dB. Empty when one scenario dominates over the search
// range.
std::optional<double> crossover_power(const Scenario& a, const Scenario& b,
                                      double min_dbm = -20.0, double max_dbm = 14.0);

// Distance sweep with an explicit distance -> launch power schedule.
PlanReport keyrate_vs_distance(const Scenario& scenario, const std::vector<double>& distances_km,
                               const std::map<double, double>& power_schedule_dbm);

// Pick the highest-key-rate grid point whose classical BER passes FEC;
// deterministic tie-break toward lower power.
PlanReport joint_plan(const Scenario& scenario, const std::vector<double>& power_dbm_grid);

} // namespace qkdwdm
