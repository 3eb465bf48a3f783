#pragma once

#include <stdexcept>
#include <string>

namespace qkdwdm {

// Bad or inconsistent configuration (unknown wavelength, invalid spec, ...).
// The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A fit or inversion could not be performed (signal below noise floor,
// underdetermined anchors, ...).
struct CalibrationError : std::runtime_error {
    explicit CalibrationError(const std::string& what) : std::runtime_error(what) {}
};

// Protocol-level failure (verification mismatch, key budget exhausted,
// reconciliation abort). The CLI maps this to exit code 3.
struct ProtocolError : std::runtime_error {
    explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qkdwdm
