#include "cli/commands.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "cli/config.hpp"
#include "qkdwdm/channel.hpp"
#include "qkdwdm/classical.hpp"
#include "qkdwdm/errors.hpp"
#include "qkdwdm/planner.hpp"
#include "qkdwdm/postproc.hpp"
#include "qkdwdm/sim.hpp"
#include "qkdwdm/units.hpp"

namespace qkdwdm::cli {

namespace fs = std::filesystem;

namespace {

// shortest round-trip decimal, locale independent
std::string fmt(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

const std::vector<std::pair<std::string, std::string>> kConfigSchema = {
    {"attenuation", "*"},
    {"fiber", "length_km"},
    {"detector", "efficiency"},
    {"detector", "dark_prob_per_gate"},
    {"detector", "gate_rate_hz"},
    {"detector", "gate_width_s"},
    {"detector", "dead_time_s"},
    {"detector", "afterpulse_prob"},
    {"monitor_detector", "efficiency"},
    {"monitor_detector", "dark_prob_per_gate"},
    {"monitor_detector", "gate_rate_hz"},
    {"monitor_detector", "gate_width_s"},
    {"monitor_detector", "dead_time_s"},
    {"monitor_detector", "afterpulse_prob"},
    {"decoy", "mu"},
    {"decoy", "nu"},
    {"decoy", "p_signal"},
    {"decoy", "p_decoy"},
    {"decoy", "p_vacuum"},
    {"decoy", "basis_match_prob"},
    {"system", "clock_hz"},
    {"system", "e_opt"},
    {"system", "f_ec"},
    {"system", "block_size"},
    {"system", "n_sigma"},
    {"system", "bob_loss_db"},
    {"filter.*", "center_nm"},
    {"filter.*", "passband_ghz"},
    {"filter.*", "insertion_loss_db"},
    {"filter.*", "isolation_db"},
    {"scenario", "quantum_nm"},
    {"scenario", "classical_nm"},
    {"scenario", "direction"},
    {"scenario", "quantum_filter"},
    {"scenario", "crosstalk_isolation_db"},
    {"scenario", "finite_block"},
    {"scenario_alt", "quantum_nm"},
    {"scenario_alt", "quantum_filter"},
    {"scenario_alt", "crosstalk_isolation_db"},
    {"raman_anchor.*", "measured_cps"},
    {"raman_anchor.*", "launch_dbm"},
    {"raman_anchor.*", "length_km"},
    {"raman_anchor.*", "direction"},
    {"raman_anchor.*", "classical_nm"},
    {"raman_anchor.*", "filter"},
    {"classical", "n_channels"},
    {"classical", "qam_m"},
    {"classical", "baud_ghz"},
    {"classical", "fec"},
    {"classical", "wdm_loss_db"},
    {"classical", "optimum_power_dbm"},
    {"classical", "ber_at_optimum"},
    {"classical", "anchor_length_km"},
    {"sweep", "power_min_dbm"},
    {"sweep", "power_max_dbm"},
    {"sweep", "power_step_db"},
    {"sweep", "distances_km"},
    {"sweep", "power_schedule"},
    {"e2e", "n_pulses"},
    {"e2e", "length_km"},
    {"e2e", "power_dbm"},
    {"e2e", "security_margin_bits"},
    {"e2e", "cascade_passes"},
    {"seeds", "simulation"},
    {"seeds", "shuffle"},
    {"seeds", "toeplitz"},
};

const std::vector<std::pair<std::string, std::string>> kCalibSchema = {
    {"", "version"},
    {"rho", "*"},
    {"classical_fit", "ase_power_w"},
    {"classical_fit", "nli_coeff"},
    {"classical_fit", "n_channels"},
    {"classical_fit", "ref_length_km"},
    {"classical_fit", "wdm_loss_db"},
    {"classical_fit", "channel_power_dbm"},
    {"classical_fit", "atten_db_per_km"},
};

DetectorSpec read_detector(const ConfigDocument& cfg, const std::string& section) {
    DetectorSpec det;
    det.efficiency = cfg.get_double_or(section, "efficiency", det.efficiency);
    det.dark_prob_per_gate = cfg.get_double_or(section, "dark_prob_per_gate", det.dark_prob_per_gate);
    det.gate_rate_hz = cfg.get_double_or(section, "gate_rate_hz", det.gate_rate_hz);
    det.gate_width_s = cfg.get_double_or(section, "gate_width_s", det.gate_width_s);
    det.dead_time_s = cfg.get_double_or(section, "dead_time_s", det.dead_time_s);
    det.afterpulse_prob = cfg.get_double_or(section, "afterpulse_prob", det.afterpulse_prob);
    det.validate();
    return det;
}

FiberSpec read_fiber(const ConfigDocument& cfg) {
    FiberSpec fiber;
    fiber.length_km = cfg.get_double("fiber", "length_km");
    for (const auto& [key, value] : cfg.section("attenuation")) {
        (void)value;
        fiber.atten_db_per_km[std::stod(key)] = cfg.get_double("attenuation", key);
    }
    fiber.validate();
    return fiber;
}

WdmFilterSpec read_filter(const ConfigDocument& cfg, const std::string& name) {
    const std::string section = "filter." + name;
    if (!cfg.has_section(section))
        throw ConfigError("missing filter section [" + section + "]");
    WdmFilterSpec f;
    f.center_nm = cfg.get_double(section, "center_nm");
    f.passband_ghz = cfg.get_double(section, "passband_ghz");
    f.insertion_loss_db = cfg.get_double(section, "insertion_loss_db");
    f.isolation_db = cfg.get_double_or(section, "isolation_db", 0.0);
    f.validate();
    return f;
}

DecoyProtocol read_decoy(const ConfigDocument& cfg) {
    DecoyProtocol d;
    d.mu = cfg.get_double_or("decoy", "mu", d.mu);
    d.nu = cfg.get_double_or("decoy", "nu", d.nu);
    d.p_signal = cfg.get_double_or("decoy", "p_signal", d.p_signal);
    d.p_decoy = cfg.get_double_or("decoy", "p_decoy", d.p_decoy);
    d.p_vacuum = cfg.get_double_or("decoy", "p_vacuum", d.p_vacuum);
    d.basis_match_prob = cfg.get_double_or("decoy", "basis_match_prob", d.basis_match_prob);
    d.validate();
    return d;
}

QkdSystemSpec read_system(const ConfigDocument& cfg) {
    QkdSystemSpec s;
    s.clock_hz = cfg.get_double_or("system", "clock_hz", s.clock_hz);
    s.e_opt = cfg.get_double_or("system", "e_opt", s.e_opt);
    s.f_ec = cfg.get_double_or("system", "f_ec", s.f_ec);
    s.block_size = cfg.get_double_or("system", "block_size", s.block_size);
    s.n_sigma = cfg.get_double_or("system", "n_sigma", s.n_sigma);
    s.bob_loss_db = cfg.get_double_or("system", "bob_loss_db", s.bob_loss_db);
    s.validate();
    return s;
}

ClassicalPlan read_classical(const ConfigDocument& cfg, const RamanCalibration&,
                             const ConfigDocument* calib) {
    ClassicalPlan plan;
    plan.qam.m = static_cast<int>(cfg.get_double_or("classical", "qam_m", 64));
    plan.qam.baud_ghz = cfg.get_double_or("classical", "baud_ghz", 28.0);
    plan.qam.validate();
    plan.frame.validate();
    plan.fec = FecSpec::from_string(cfg.get_string_or("classical", "fec", "soft20"));
    const int n_channels = static_cast<int>(cfg.get_double_or("classical", "n_channels", 4));
    if (calib != nullptr && calib->has_section("classical_fit")) {
        plan.model.ase_power_w = calib->get_double("classical_fit", "ase_power_w");
        plan.model.nli_coeff = calib->get_double("classical_fit", "nli_coeff");
        plan.model.n_channels = static_cast<int>(calib->get_double("classical_fit", "n_channels"));
        plan.model.ref_length_km = calib->get_double("classical_fit", "ref_length_km");
        plan.model.wdm_loss_db = calib->get_double("classical_fit", "wdm_loss_db");
        plan.model.channel_power_dbm = calib->get_double("classical_fit", "channel_power_dbm");
        plan.model.atten_db_per_km = calib->get_double("classical_fit", "atten_db_per_km");
    } else {
        plan.model.n_channels = n_channels;
    }
    return plan;
}

struct LoadedConfig {
    ConfigDocument cfg;
    FiberSpec fiber;
    DetectorSpec detector;
    DetectorSpec monitor;
    DecoyProtocol decoy;
    QkdSystemSpec system;
};

LoadedConfig load_config(const std::string& path) {
    ConfigDocument cfg = ConfigDocument::parse_file(path);
    cfg.enforce_schema(kConfigSchema);
    LoadedConfig out{std::move(cfg), {}, {}, {}, {}, {}};
    out.fiber = read_fiber(out.cfg);
    out.detector = read_detector(out.cfg, "detector");
    out.monitor = out.cfg.has_section("monitor_detector")
                      ? read_detector(out.cfg, "monitor_detector")
                      : out.detector;
    out.decoy = read_decoy(out.cfg);
    out.system = read_system(out.cfg);
    return out;
}

RamanCalibration read_rho(const ConfigDocument& calib) {
    RamanCalibration cal;
    if (!calib.has_section("rho")) return cal;
    for (const auto& [key, value] : calib.section("rho")) {
        // key format: <classical_nm>-><quantum_nm>
        const auto arrow = key.find("->");
        if (arrow == std::string::npos)
            throw ConfigError("malformed rho key '" + key + "' (expected c->q)");
        cal.set(std::stod(key.substr(0, arrow)), std::stod(key.substr(arrow + 2)),
                std::stod(value));
    }
    return cal;
}

Scenario build_scenario(const LoadedConfig& loaded, const ConfigDocument& calib,
                        bool alternate = false) {
    const ConfigDocument& cfg = loaded.cfg;
    const std::string section = alternate ? "scenario_alt" : "scenario";
    if (alternate && !cfg.has_section("scenario_alt"))
        throw ConfigError("crossover sweep needs a [scenario_alt] section");

    Scenario sc;
    sc.fiber = loaded.fiber;
    sc.detector = loaded.detector;
    sc.decoy = loaded.decoy;
    sc.system = loaded.system;
    sc.quantum_nm = cfg.get_double(section, "quantum_nm");
    sc.classical_nm = cfg.get_double_or("scenario", "classical_nm", 1550.0);
    sc.direction = direction_from_string(cfg.get_string_or("scenario", "direction", "co"));
    sc.quantum_filter = read_filter(cfg, cfg.get_string(section, "quantum_filter"));
    sc.crosstalk_isolation_db = cfg.get_double_or(section, "crosstalk_isolation_db", -1.0);
    if (sc.crosstalk_isolation_db < 0.0)
        sc.crosstalk_isolation_db = sc.quantum_filter.isolation_db;
    sc.finite_block = cfg.get_bool_or("scenario", "finite_block", false);
    sc.raman = read_rho(calib);
    sc.classical = read_classical(cfg, sc.raman, &calib);
    sc.validate();
    return sc;
}

std::vector<double> parse_csv_doubles(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

std::map<double, double> parse_schedule(const std::string& text) {
    std::map<double, double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError("malformed power schedule entry '" + item + "' (expected km:dBm)");
        out[std::stod(item.substr(0, colon))] = std::stod(item.substr(colon + 1));
    }
    return out;
}

void write_file_atomically(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << content;
}

} // namespace

std::string resolve_out_dir(const std::string& flag_value) {
    if (const char* env = std::getenv("QKDWDM_OUT_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return flag_value;
}

int cmd_calibrate(const Options& opts) {
    const LoadedConfig loaded = load_config(opts.config_path);
    const ConfigDocument& cfg = loaded.cfg;

    RamanCalibration cal;
    bool any_anchor = false;
    for (const auto& name : cfg.section_names()) {
        if (name.rfind("raman_anchor.", 0) != 0) continue;
        any_anchor = true;
        const double measured = cfg.get_double(name, "measured_cps");
        const double launch_dbm = cfg.get_double(name, "launch_dbm");
        if (measured <= 0.0)
            throw ConfigError("anchor [" + name + "]: measured_cps must be positive");
        if (launch_dbm < -90.0 || launch_dbm > 40.0)
            throw ConfigError("anchor [" + name + "]: launch_dbm outside a sane range");
        FiberSpec fiber = loaded.fiber;
        fiber.length_km = cfg.get_double(name, "length_km");
        const WdmFilterSpec filter = read_filter(cfg, cfg.get_string(name, "filter"));
        const Direction dir = direction_from_string(cfg.get_string_or(name, "direction", "co"));
        const double classical_nm = cfg.get_double_or(name, "classical_nm", 1550.0);
        const double rho = calibrate_raman(measured, dbm_to_watts(launch_dbm), fiber,
                                           filter, loaded.monitor, dir, classical_nm);
        cal.set(classical_nm, filter.center_nm, rho);
    }
    if (!any_anchor) throw ConfigError("no [raman_anchor.*] sections in config; nothing to fit");

    std::ostringstream out;
    out << "version = 1\n\n[rho]\n";
    for (const auto& e : cal.entries()) {
        out << fmt(e.classical_nm) << "->" << fmt(e.quantum_nm) << " = " << fmt(e.rho) << "\n";
    }

    if (cfg.has("classical", "optimum_power_dbm")) {
        ClassicalAnchor anchor;
        anchor.optimum_power_dbm = cfg.get_double("classical", "optimum_power_dbm");
        anchor.ber_at_optimum = cfg.get_double("classical", "ber_at_optimum");
        anchor.length_km = cfg.get_double_or("classical", "anchor_length_km", 50.0);
        anchor.n_channels = static_cast<int>(cfg.get_double_or("classical", "n_channels", 4));
        anchor.qam_m = static_cast<int>(cfg.get_double_or("classical", "qam_m", 64));
        const ClassicalLinkModel model = calibrate_classical(anchor);
        out << "\n[classical_fit]\n";
        out << "ase_power_w = " << fmt(model.ase_power_w) << "\n";
        out << "nli_coeff = " << fmt(model.nli_coeff) << "\n";
        out << "n_channels = " << model.n_channels << "\n";
        out << "ref_length_km = " << fmt(model.ref_length_km) << "\n";
        out << "wdm_loss_db = " << fmt(model.wdm_loss_db) << "\n";
        out << "channel_power_dbm = " << fmt(model.channel_power_dbm) << "\n";
        out << "atten_db_per_km = " << fmt(model.atten_db_per_km) << "\n";
    }

    write_file_atomically(opts.calibration_path, out.str());
    std::cout << "wrote " << opts.calibration_path << "\n";
    return 0;
}

namespace {

std::string power_sweep_csv(const PlanReport& report) {
    std::ostringstream out;
    out << "power_dbm,y0,qber,key_bps,ber_raw,fec_pass\n";
    for (const auto& p : report.points) {
        out << fmt(p.power_dbm) << ',' << fmt(p.y0) << ',' << fmt(p.qber) << ','
            << fmt(p.key_bps) << ',' << fmt(p.ber_raw) << ',' << (p.fec_pass ? 1 : 0) << "\n";
    }
    return out.str();
}

std::string distance_sweep_csv(const PlanReport& report, Direction dir) {
    std::ostringstream out;
    out << "distance_km,direction,power_dbm,y0,qber,key_bps,ber_raw,fec_pass\n";
    for (const auto& p : report.points) {
        out << fmt(p.distance_km) << ',' << to_string(dir) << ',' << fmt(p.power_dbm) << ','
            << fmt(p.y0) << ',' << fmt(p.qber) << ',' << fmt(p.key_bps) << ',' << fmt(p.ber_raw)
            << ',' << (p.fec_pass ? 1 : 0) << "\n";
    }
    return out.str();
}

std::string plan_csv(const PlanReport& report) {
    std::ostringstream out;
    out << "power_dbm,y0,qber,key_bps,ber_raw,fec_pass,net_bps,chosen\n";
    for (const auto& p : report.points) {
        out << fmt(p.power_dbm) << ',' << fmt(p.y0) << ',' << fmt(p.qber) << ',' << fmt(p.key_bps)
            << ',' << fmt(p.ber_raw) << ',' << (p.fec_pass ? 1 : 0) << ',' << fmt(p.net_bps)
            << ',' << (p.chosen ? 1 : 0) << "\n";
    }
    if (!report.feasible) {
        out << ",,,,,,,infeasible\n";
    }
    return out.str();
}

} // namespace

int cmd_sweep(const Options& opts) {
    const LoadedConfig loaded = load_config(opts.config_path);
    ConfigDocument calib = ConfigDocument::parse_file(opts.calibration_path);
    calib.enforce_schema(kCalibSchema);
    const Scenario scenario = build_scenario(loaded, calib);
    const ConfigDocument& cfg = loaded.cfg;

    const double pmin = cfg.get_double_or("sweep", "power_min_dbm", -20.0);
    const double pmax = cfg.get_double_or("sweep", "power_max_dbm", 14.0);
    const double pstep = cfg.get_double_or("sweep", "power_step_db", 0.5);
    std::vector<double> grid;
    for (double p = pmin; p <= pmax + 1e-9; p += pstep) grid.push_back(p);

    const fs::path out_dir = resolve_out_dir(opts.out_dir);
    std::string csv;
    fs::path out_path;

    if (opts.sweep_kind == "power") {
        csv = power_sweep_csv(keyrate_vs_power(scenario, grid));
        out_path = out_dir / "sweep_power.csv";
    } else if (opts.sweep_kind == "distance") {
        const auto distances = parse_csv_doubles(cfg.get_string("sweep", "distances_km"));
        const auto schedule = parse_schedule(cfg.get_string("sweep", "power_schedule"));
        csv = distance_sweep_csv(keyrate_vs_distance(scenario, distances, schedule),
                                 scenario.direction);
        out_path = out_dir / "sweep_distance.csv";
    } else if (opts.sweep_kind == "crossover") {
        const Scenario alt = build_scenario(loaded, calib, true);
        const auto cross = crossover_power(alt, scenario, pmin, pmax);
        std::ostringstream out;
        out << "crossover_dbm\n";
        if (cross) out << fmt(*cross) << "\n";
        csv = out.str();
        out_path = out_dir / "sweep_crossover.csv";
    } else if (opts.sweep_kind == "plan") {
        csv = plan_csv(joint_plan(scenario, grid));
        out_path = out_dir / "sweep_plan.csv";
    } else {
        throw ConfigError("unknown sweep kind '" + opts.sweep_kind +
                          "' (expected power|distance|crossover|plan)");
    }

    write_file_atomically(out_path, csv);
    std::cout << "wrote " << out_path.string() << "\n";
    return 0;
}

int cmd_e2e(const Options& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    const LoadedConfig loaded = load_config(opts.config_path);
    ConfigDocument calib = ConfigDocument::parse_file(opts.calibration_path);
    calib.enforce_schema(kCalibSchema);
    const Scenario scenario = build_scenario(loaded, calib);
    const ConfigDocument& cfg = loaded.cfg;

    RunConfig run;
    run.n_pulses = cfg.get_u64_or("e2e", "n_pulses", 10000000ULL);
    run.seed = opts.seed.value_or(cfg.get_u64_or("seeds", "simulation", 1));

    const double length = cfg.get_double_or("e2e", "length_km", scenario.fiber.length_km);
    const double power_dbm = cfg.get_double_or("e2e", "power_dbm", 4.0);

    const SimChannel channel = make_sim_channel(scenario, length, dbm_to_watts(power_dbm));
    const SimResult sim = simulate(run, channel);
    const EmpiricalKeyRate ekr = empirical_keyrate(sim, run.n_pulses, scenario.decoy,
                                                   scenario.system);

    PostprocConfig pp;
    pp.cascade.passes = static_cast<int>(cfg.get_u64_or("e2e", "cascade_passes", 4));
    pp.cascade.shuffle_seed = cfg.get_u64_or("seeds", "shuffle", run.seed + 1);
    pp.toeplitz_seed = cfg.get_u64_or("seeds", "toeplitz", run.seed + 2);
    pp.security_margin = cfg.get_u64_or("e2e", "security_margin_bits", 64);

    const double qber_est = sim.empirical.e_mu > 0.0 ? sim.empirical.e_mu : 1e-3;
    const PostprocOutcome outcome = run_postprocessing(sim.pair.alice_bits, sim.pair.bob_bits,
                                                       qber_est, ekr.report, pp);

    const fs::path out_dir = resolve_out_dir(opts.out_dir);

    std::ostringstream transcript;
    transcript << "pass,block,parity\n";
    for (const auto& r : outcome.transcript) {
        transcript << r.pass << ',' << r.block << ',' << static_cast<int>(r.parity) << "\n";
    }
    write_file_atomically(out_dir / "transcript.csv", transcript.str());

    std::ostringstream summary;
    summary << "n_pulses = " << run.n_pulses << "\n";
    summary << "sifted_bits = " << sim.pair.alice_bits.size() << "\n";
    summary << "qber = " << fmt(outcome.measured_qber) << "\n";
    summary << "leakage_bits = " << outcome.leakage_bits << "\n";
    summary << "verified = " << (outcome.verified ? "true" : "false") << "\n";
    summary << "final_length = " << outcome.alice.m << "\n";
    summary << "secure = " << (ekr.report.secure ? "true" : "false") << "\n";
    if (ekr.insufficient_block) summary << "insufficient_block = true\n";
    write_file_atomically(out_dir / "summary.txt", summary.str());

    const auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
    if (!outcome.verified || !ekr.report.secure || outcome.alice.m == 0) {
        std::cerr << "e2e: verification or security failed; keys withheld ("
                  << fmt(seconds.count()) << " s)\n";
        return 3;
    }

    const auto key_bytes = [](const BitBlock& b) {
        const auto bytes = b.to_bytes();
        return std::string(bytes.begin(), bytes.end());
    };
    write_file_atomically(out_dir / "alice_key.bin", key_bytes(outcome.alice.key));
    write_file_atomically(out_dir / "bob_key.bin", key_bytes(outcome.bob.key));
    std::cout << "e2e: verified, final key " << outcome.alice.m << " bits, leakage "
              << outcome.leakage_bits << " bits, QBER " << fmt(outcome.measured_qber) << " ("
              << fmt(seconds.count()) << " s)\n";
    return 0;
}

} // namespace qkdwdm::cli
