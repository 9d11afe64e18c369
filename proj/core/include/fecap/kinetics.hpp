#ifndef FECAP_KINETICS_HPP
#define FECAP_KINETICS_HPP

#include <cstdint>
#include <vector>

#include "fecap/energy.hpp"

namespace fecap {

// One nucleation site: a film-area fraction with its own activation field and
// a continuous switched fraction toward the D > 0 orientation.
struct Domain {
    double weight = 1.0; // fraction of film area
    double e_act = 0.0;  // activation field [V/m]
    double s = 0.0;      // switched fraction in [0,1]
};

struct EnsembleConfig {
    int n_domains = 512;
    double e_act_median = 2.7e7;    // median activation field [V/m]
    double e_act_log_sigma = 0.08;  // log-normal spread
    double tau0 = 1.5e-6;           // attempt time [s]
    double merz_n = 1.0;            // Merz exponent
    double p_s = 0.3214311315822262; // saturation polarization [C/m^2],
                                     // sqrt(-alpha/beta) of the default stack
    std::uint64_t seed = 1;

    void validate() const;
};

struct DomainEnsemble {
    std::vector<Domain> domains;
    double p_s = 0.0;
    double tau0 = 0.0;
    double merz_n = 1.0;

    // p_s * sum_i w_i (2 s_i - 1)
    double polarization() const;

    // Uniform switched fraction reproducing polarization p.
    void set_polarization(double p);
};

// n_domains equal-weight domains, activation fields drawn log-normally
// (median e_act_median, log-sigma e_act_log_sigma).  Deterministic for a
// fixed seed.
DomainEnsemble sample_ensemble(const EnsembleConfig& config);

// Merz-law waiting time tau0 * exp((e_act/|e|)^n) toward the field-favored
// orientation; +infinity at zero field or when the field points toward the
// domain's current saturated state.
double switching_time(double e_total, const Domain& domain,
                      const EnsembleConfig& config);

// Relaxes every switched fraction toward its field-favored target over dt
// (exact exponential update).  Returns the polarization change.
double step_ensemble(DomainEnsemble& ensemble, double e_total, double dt);

// Explicit gradient flow rho dD/dt = effective_field over one step of dt,
// with internal sub-stepping keeping the local error below 1e-6 p_s.
// Throws std::runtime_error when the sub-step budget is exhausted.
double lk_step(double d, const StackConfig& stack, double e_ext, double e_bias,
               double rho, double dt);

} // namespace fecap

#endif
