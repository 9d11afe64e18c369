#ifndef FECAP_ANALYSIS_HPP
#define FECAP_ANALYSIS_HPP

#include <span>
#include <vector>

#include "fecap/trace.hpp"

namespace fecap {

// Polarization-voltage loop extracted from a switching/non-switching trace
// pair.
struct PolLoop {
    std::vector<double> v; // [V]
    std::vector<double> p; // [C/m^2]
    double pr_pos = 0.0;   // remanence at V=0, upper crossing [C/m^2]
    double pr_neg = 0.0;   // remanence at V=0, lower crossing [C/m^2]
    double peak_v_pos = 0.0; // voltage of the positive current extremum [V]
    double peak_v_neg = 0.0; // voltage of the negative current extremum [V]
};

struct RetentionFit {
    double p0 = 0.0;    // decaying amplitude [C/m^2]
    double p_inf = 0.0; // steady-state polarization [C/m^2]
    double tau = 0.0;   // time constant [s]
    double rmse = 0.0;  // root-mean-square residual [C/m^2]
    int n_iter = 0;
    bool converged = false;
    bool tau_identifiable = true; // false on flat data
};

struct TauMap {
    std::vector<double> widths;     // [s]
    std::vector<double> amplitudes; // [V]
    std::vector<std::vector<double>> tau;    // [width][amplitude], NaN if unfit
    std::vector<std::vector<double>> p_init; // p0 + p_inf per cell [C/m^2]
};

struct TauPoint {
    double p_init = 0.0;    // [C/m^2]
    double tau = 0.0;       // [s]
    double amplitude = 0.0; // [V]
};

// P(t) = (1/area) * integral of (I_sw - I_ns) dt by the trapezoidal rule,
// re-referenced so (max+min)/2 = 0.  Peak voltages sit at the extrema of the
// subtracted current (parabolic sub-sample refinement).  Throws on traces
// that are not time-aligned.
PolLoop integrate_pund(const TraceRecord& switching,
                       const TraceRecord& non_switching, double area);

// Least-squares fit of P(t) = p0 exp(-t/tau) + p_inf with tau kept positive
// through a log parametrization (damped Gauss-Newton, relative step
// tolerance 1e-13, at most 200 iterations).  Needs >= 4 samples
// at distinct times.  Flat data comes back with p0 = 0 and
// tau_identifiable = false.
RetentionFit fit_exponential(std::span<const double> t,
                             std::span<const double> p);

// Gradient of the squared-residual cost at the given parameters; exposed so
// first-order optimality is checkable from outside.
void fit_cost_gradient(std::span<const double> t, std::span<const double> p,
                       const RetentionFit& fit, double grad[3]);

// Assembles the tau and initial-polarization matrices from per-cell fits
// (row-major over widths x amplitudes).  Unconverged or unidentifiable cells
// carry NaN.
TauMap build_tau_map(std::span<const double> widths,
                     std::span<const double> amplitudes,
                     std::span<const RetentionFit> fits);

// Flattens the map for scatter export.
std::vector<TauPoint> correlate_tau_polarization(const TauMap& map);

} // namespace fecap

#endif
