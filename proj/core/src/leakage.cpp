#include "fecap/leakage.hpp"

#include <cmath>
#include <stdexcept>

#include "fecap/constants.hpp"
#include "fecap/energy.hpp"

namespace fecap {

void LeakageParams::validate() const {
    if (j0 < 0.0) throw std::invalid_argument("leakage: j0 must be >= 0");
    if (!(v0p > 0.0) || !(v0n > 0.0))
        throw std::invalid_argument("leakage: v0p and v0n must be > 0");
}

double leakage_current_density(double v, const LeakageParams& leak) {
    return leak.j0 * (std::exp(v / leak.v0p) - std::exp(-v / leak.v0n));
}

double background_permittivity(const StackConfig& stack) {
    const double d_total = stack.d_fe + stack.d_int;
    const double series = stack.d_fe / stack.eps_fe +
                          (stack.d_int > 0.0 ? stack.d_int / stack.eps_int : 0.0);
    return d_total / series;
}

double background_capacitance_per_area(const StackConfig& stack) {
    const double series = stack.d_fe / stack.eps_fe +
                          (stack.d_int > 0.0 ? stack.d_int / stack.eps_int : 0.0);
    return eps0 / series;
}

double synthesize_current(double dp_dt, double de_dt, double v,
                          const StackConfig& stack, const LeakageParams& leak) {
    const double eps_eff = background_permittivity(stack);
    return stack.area * (dp_dt + eps0 * eps_eff * de_dt) +
           stack.area * leakage_current_density(v, leak);
}

} // namespace fecap
