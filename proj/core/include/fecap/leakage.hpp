#ifndef FECAP_LEAKAGE_HPP
#define FECAP_LEAKAGE_HPP

namespace fecap {

struct StackConfig;

// Two-sided exponential (diode-like) leakage with independent voltage scales.
struct LeakageParams {
    double j0 = 1.0;  // current density scale [A/m^2]
    double v0p = 0.9; // positive exponential scale [V]
    double v0n = 1.1; // negative exponential scale [V]

    void validate() const;
};

// j0 (exp(v/v0p) - exp(-v/v0n)) [A/m^2]
double leakage_current_density(double v, const LeakageParams& leak);

// Series-combined background permittivity of the stack (dimensionless).
double background_permittivity(const StackConfig& stack);

// Background (non-switching) capacitance per unit area [F/m^2],
// eps0 * eps_eff / (d_fe + d_int).
double background_capacitance_per_area(const StackConfig& stack);

// Terminal current: area (dP/dt + eps0 eps_eff dE/dt) + leakage.  dp_dt is
// the physical polarization rate and de_dt the average-field rate across the
// stack [V/m/s].
double synthesize_current(double dp_dt, double de_dt, double v,
                          const StackConfig& stack, const LeakageParams& leak);

} // namespace fecap

#endif
