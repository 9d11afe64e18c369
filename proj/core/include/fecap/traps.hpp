#ifndef FECAP_TRAPS_HPP
#define FECAP_TRAPS_HPP

namespace fecap {

struct StackConfig;

// Oxygen-vacancy sheet at the oxide/ferroelectric interface.  Electrons trap
// under positive voltage (neutralizing the vacancies) and de-trap under
// negative voltage; the uncompensated positive charge produces the internal
// bias field.  Sustained drive beyond deact_v_on additionally deactivates a
// fraction of the sheet (slow to recover), which weakens the bias.
struct TrapParams {
    double n_v   = 1e17;    // vacancy sheet density [1/m^2]
    double c0    = 2.67e-3; // capture rate prefactor [1/s]
    double e0    = 8.0e-3;  // emission rate prefactor [1/s]
    double v_c   = 0.45;    // capture field-activation scale [V]
    double v_e   = 0.6;     // emission field-activation scale [V]
    double kappa = 0.16581; // charge-to-field coupling, dimensionless
    double f_init = 0.25;   // initial electron occupancy fraction

    // deactivation closure: a dose that builds toward deact_max under strong
    // negative drive and recovers at rest (reversible bias weakening)
    double deact_v_on    = 3.0;   // onset |V| [V]
    double deact_max     = 0.6;   // ceiling on the deactivated fraction
    double tau_deact     = 30e-6; // dose time constant at -4.5 V [s]
    double deact_hi_gain = 3.0;   // rate gain per volt beyond 4.5 V [1/V]
    double tau_deact_rec = 3e-3;  // recovery time constant [s]

    void validate() const;

    // Dose rate toward deact_max as a function of applied voltage [1/s].
    double deact_rate(double v_applied) const;
};

struct TrapState {
    double f_occ = 0.25; // electron occupancy fraction in [0,1]
    double deact = 0.0;  // deactivated vacancy fraction in [0,1]
};

struct TrapRates {
    double capture = 0.0;  // [1/s]
    double emission = 0.0; // [1/s]
};

// capture = c0 exp(max(v,0)/v_c), emission = e0 exp(max(-v,0)/v_e).
TrapRates trap_rates(double v_applied, const TrapParams& params);

// Exact update of df/dt = c (1-f) - e f over dt.
TrapState step_traps(const TrapState& state, const TrapRates& rates, double dt);

// Exact relaxation of the deactivated fraction toward its voltage target.
TrapState step_deactivation(const TrapState& state, double v_applied,
                            const TrapParams& params, double dt);

// E_bias = -kappa q n_v (1-deact)(1-f_occ) / (eps0 eps_fe), in the Landau
// coordinate (negative: stabilizes the D < 0 state).
double bias_field(const TrapState& state, const TrapParams& params,
                  const StackConfig& stack);

// Sets kappa so that |bias_field| at f_occ = 0 equals e_bias_target.
void calibrate_kappa(TrapParams& params, const StackConfig& stack,
                     double e_bias_target);

} // namespace fecap

#endif
