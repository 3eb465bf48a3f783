#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace qkdwdm::cli {

struct Options {
    std::string config_path;
    std::string calibration_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::string sweep_kind; // power | distance | crossover | plan
};

// exit codes: 0 success, 2 configuration error, 3 protocol failure
int cmd_calibrate(const Options& opts);
int cmd_sweep(const Options& opts);
int cmd_e2e(const Options& opts);

// applies the output-directory environment override (QKDWDM_OUT_DIR)
std::string resolve_out_dir(const std::string& flag_value);

} // namespace qkdwdm::cli
