#ifndef FECAP_CONFIG_HPP
#define FECAP_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fecap/instrument.hpp"
#include "fecap/simulate.hpp"

namespace fecap {

// Parse or validation failure with source location.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& msg, int line = 0, int col = 0,
                std::string key = {});
    int line() const { return line_; }
    int col() const { return col_; }
    const std::string& key() const { return key_; }

private:
    int line_;
    int col_;
    std::string key_;
};

struct SweepConfig {
    std::vector<double> widths;     // [s]
    std::vector<double> amplitudes; // [V]
};

struct LandscapeConfig {
    double d_min = -0.45; // [C/m^2]
    double d_max = 0.45;  // [C/m^2]
    int points = 601;
};

struct OutputConfig {
    std::string dir = "fecap_out";
    bool write_traces = true;
};

struct RunConfig {
    std::uint64_t seed = 42;
    double dt = 0.0; // base step override [s]; 0 = per-segment default
    DeviceModel model;
    PundConfig pund;
    RetentionConfig retention;
    EnduranceConfig endurance;
    KineticsConfig kinetics;
    SweepConfig sweep;
    LandscapeConfig landscape;
    OutputConfig output;
};

// All defaults: the shipped device calibration.
RunConfig default_config();

// Hierarchical key-value text with [section] headers and SI-unit suffixes on
// numeric values ("6.6nm", "-4.5V", "50us").  Unknown sections, unknown keys
// and malformed values raise ConfigError with line/column and the key name.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Canonical form: every key explicit, plain SI base-unit numbers, fixed
// section order.  parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const RunConfig& config);

// Number with optional SI suffix, e.g. "6.6nm" -> 6.6e-9.  Exposed for the
// CLI; `context` names the offending key in errors.
double parse_si_value(const std::string& text, const std::string& context,
                      int line = 0, int col = 0);

// FNV-1a over the canonical serialization; stable across runs.
std::uint64_t config_hash(const RunConfig& config);

// Log-spaced grid helper, inclusive ends.
std::vector<double> logspace(double lo, double hi, int n);

} // namespace fecap

#endif
