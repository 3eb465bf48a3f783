#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "qkdwdm/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"WDM coexistence planner for decoy-state QKD and coherent classical channels"};
    app.require_subcommand(1);

    qkdwdm::cli::Options opts;

    auto add_common = [&](CLI::App* cmd, bool needs_calibration) {
        cmd->add_option("--config", opts.config_path, "scenario config file")->required();
        auto* cal = cmd->add_option("--calibration", opts.calibration_path, "calibration file");
        if (needs_calibration) cal->required();
        cmd->add_option("--out", opts.out_dir, "output directory (QKDWDM_OUT_DIR overrides)");
        cmd->add_option("--seed", [&opts](const std::vector<std::string>& v) {
            opts.seed = std::stoull(v.at(0));
            return true;
        }, "override the simulation seed");
    };

    auto* calibrate = app.add_subcommand("calibrate", "fit Raman and classical-link constants");
    add_common(calibrate, false);

    auto* sweep = app.add_subcommand("sweep", "evaluate a parameter sweep and write CSV");
    add_common(sweep, true);
    sweep->add_option("--kind", opts.sweep_kind, "power|distance|crossover|plan")->required();

    auto* e2e = app.add_subcommand("e2e", "simulate, reconcile, verify and distill final keys");
    add_common(e2e, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (calibrate->parsed()) {
            if (opts.calibration_path.empty()) opts.calibration_path = "calibration.ini";
            return qkdwdm::cli::cmd_calibrate(opts);
        }
        if (sweep->parsed()) return qkdwdm::cli::cmd_sweep(opts);
        if (e2e->parsed()) return qkdwdm::cli::cmd_e2e(opts);
    } catch (const qkdwdm::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const qkdwdm::CalibrationError& e) {
        std::cerr << "calibration error: " << e.what() << "\n";
        return 2;
    } catch (const qkdwdm::ProtocolError& e) {
        std::cerr << "protocol failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
