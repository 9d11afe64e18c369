#include "fecap/traps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fecap/constants.hpp"
#include "fecap/energy.hpp"

namespace fecap {

void TrapParams::validate() const {
    if (n_v < 0.0 || c0 < 0.0 || e0 < 0.0 || kappa < 0.0)
        throw std::invalid_argument("traps: rates, n_v and kappa must be >= 0");
    if (!(v_c > 0.0) || !(v_e > 0.0))
        throw std::invalid_argument("traps: v_c and v_e must be > 0");
    if (f_init < 0.0 || f_init > 1.0)
        throw std::invalid_argument("traps: f_init must be in [0,1]");
    if (deact_max < 0.0 || deact_max > 1.0)
        throw std::invalid_argument("traps: deact_max must be in [0,1]");
    if (!(tau_deact > 0.0) || !(tau_deact_rec > 0.0))
        throw std::invalid_argument("traps: deactivation times must be > 0");
}

double TrapParams::deact_rate(double v_applied) const {
    const double a = -v_applied; // negative-voltage magnitude
    if (a <= deact_v_on) return 0.0;
    const double r = (a <= 4.5)
                         ? (a - deact_v_on) / (4.5 - deact_v_on)
                         : 1.0 + deact_hi_gain * (a - 4.5);
    return r / tau_deact;
}

TrapRates trap_rates(double v_applied, const TrapParams& params) {
    TrapRates r;
    r.capture = params.c0 * std::exp(std::max(v_applied, 0.0) / params.v_c);
    r.emission = params.e0 * std::exp(std::max(-v_applied, 0.0) / params.v_e);
    return r;
}

TrapState step_traps(const TrapState& state, const TrapRates& rates,
                     double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_traps: dt must be > 0");
    TrapState out = state;
    const double total = rates.capture + rates.emission;
    if (total <= 0.0) return out;
    const double f_ss = rates.capture / total;
    out.f_occ = f_ss + (state.f_occ - f_ss) * std::exp(-total * dt);
    return out;
}

TrapState step_deactivation(const TrapState& state, double v_applied,
                            const TrapParams& params, double dt) {
    if (!(dt > 0.0))
        throw std::invalid_argument("step_deactivation: dt must be > 0");
    TrapState out = state;
    const double rate = params.deact_rate(v_applied);
    if (rate > 0.0)
        out.deact = params.deact_max +
                    (state.deact - params.deact_max) * std::exp(-rate * dt);
    else
        out.deact = state.deact * std::exp(-dt / params.tau_deact_rec);
    return out;
}

double bias_field(const TrapState& state, const TrapParams& params,
                  const StackConfig& stack) {
    return -params.kappa * q_e * params.n_v * (1.0 - state.deact) *
           (1.0 - state.f_occ) / (eps0 * stack.eps_fe);
}

void calibrate_kappa(TrapParams& params, const StackConfig& stack,
                     double e_bias_target) {
    if (params.n_v <= 0.0)
        throw std::invalid_argument("calibrate_kappa: n_v must be > 0");
    params.kappa = std::abs(e_bias_target) * eps0 * stack.eps_fe /
                   (q_e * params.n_v);
}

} // namespace fecap
