#ifndef FECAP_INSTRUMENT_HPP
#define FECAP_INSTRUMENT_HPP

#include <cstdint>
#include <vector>

#include "fecap/analysis.hpp"
#include "fecap/simulate.hpp"

namespace fecap {

// Continuous triangular P-U-N-D train: four half-period sweeps around
// `center`, positive pair first.
struct PundConfig {
    double frequency = 1e3; // [Hz]
    double v_max = 2.5;     // [V]
    double v_min = -4.5;    // [V]
    double center = 0.0;    // [V]; must sit where the written state survives
                            // the inter-sweep dwell
    int samples_per_sweep = 512;

    void validate() const;
};

struct RetentionConfig {
    double preset_v = 3.0;       // pre-polarize to the stable state [V]
    double preset_width = 100e-6; // [s]
    double program_v = -4.5;     // [V]
    double program_width = 50e-6; // [s]
    std::vector<double> delays;  // strictly increasing [s]
    double read_v = 2.5;         // saturating read level [V]
    double read_width = 60e-6;   // [s]
    double ramp = 2e-6;          // pulse edge time [s]
    double read_gap = 10e-6;     // between the two read pulses [s]

    void validate() const;
};

struct EnduranceConfig {
    std::int64_t n_cycles = 100000;
    double frequency = 100e3; // [Hz]
    double v_min = -4.5;      // [V]
    double v_max = 2.5;       // [V]
    std::vector<std::int64_t> checkpoints; // empty: auto 1-2-5 ladder
    double relax_pause = 15e-3; // hold at 0 V before each checkpoint [s]
    PundConfig pund{};         // checkpoint readout
    int cycle_steps = 32;      // base steps per cycle segment

    void validate() const;
    std::vector<std::int64_t> checkpoint_list() const;
};

struct KineticsConfig {
    std::vector<double> amplitudes; // program levels, negative [V]
    std::vector<double> widths;     // [s]
    double preset_v = 3.0;
    double preset_width = 100e-6;

    void validate() const;
};

Waveform build_pund(const PundConfig& config);

struct PundResult {
    TraceRecord trace; // the recorded P-U-N-D train
    PolLoop loop;
};

struct RetentionPoint {
    double delay = 0.0; // [s]
    double p = 0.0;     // retained polarization [C/m^2]
};

struct RetentionResult {
    std::vector<RetentionPoint> points;
    bool read_saturated = true; // first read reached the stable branch
    bool read_in_bounds = true; // read swing stayed within 2 p_s
    TraceRecord last_trace;     // trace of the longest-delay run
};

struct EndurancePoint {
    std::int64_t cycles = 0;
    double pr_pos = 0.0;     // [C/m^2]
    double pr_neg = 0.0;     // [C/m^2]
    double peak_v_pos = 0.0; // [V]
    double peak_v_neg = 0.0; // [V]
};

struct KineticsResult {
    std::vector<double> amplitudes;
    std::vector<double> widths;
    // switched fraction dP / 2 p_s in [0,1], indexed [width][amplitude]
    std::vector<std::vector<double>> dp_norm;
};

// One conditioning train followed by one recorded train; the loop is
// assembled from (P-U) and (N-D) subtractions and reported with the
// negative-voltage-written state positive.
PundResult run_pund(const DeviceModel& model, const PundConfig& config,
                    const SimOptions& options = {});

// Per delay, from a fresh state: preset, program, wait at 0 V, then a
// saturating double read (switching minus non-switching).
RetentionResult run_retention(const DeviceModel& model,
                              const RetentionConfig& config,
                              const SimOptions& options = {});

// Bipolar triangular cycling with PUND checkpoints after a relax pause.
// Checkpoint 0 is the pristine device.
std::vector<EndurancePoint> run_endurance(const DeviceModel& model,
                                          const EnduranceConfig& config,
                                          const SimOptions& options = {});

// From the stable state, one pulse per (amplitude, width); the switched
// polarization is read at the pulse end.
KineticsResult run_kinetics(const DeviceModel& model,
                            const KineticsConfig& config,
                            const SimOptions& options = {});

} // namespace fecap

#endif
