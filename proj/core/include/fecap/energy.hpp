#ifndef FECAP_ENERGY_HPP
#define FECAP_ENERGY_HPP

#include <span>
#include <utility>
#include <vector>

namespace fecap {

// Quartic Landau description of the capacitor stack: ferroelectric layer in
// series with a parasitic interface layer, plus the sign convention that maps
// the applied voltage into the Landau coordinate.
struct StackConfig {
    double alpha   = -2.242e8; // quadratic Landau coefficient [J m / C^2]
    double beta    = 2.170e9;  // quartic Landau coefficient [J m^5 / C^4]
    double theta   = 0.0;      // angle between polar axis and field [rad]
    double d_fe    = 6.6e-9;   // ferroelectric thickness [m]
    double eps_fe  = 30.0;     // relative permittivity of the ferroelectric
    double d_int   = 0.2e-9;   // interface-layer thickness [m]
    double eps_int = 690.0;    // effective interface permittivity
                               // (calibrated screening strength)
    double area    = 625e-12;  // device area [m^2] (25 um x 25 um)
    double polarity = -1.0;    // chi in {+1,-1}; chi=-1 puts the state written
                               // by negative voltage at D > 0

    // Saturation polarization sqrt(-alpha/beta) [C/m^2]; requires alpha < 0.
    double saturation_polarization() const;

    // Throws std::invalid_argument if any structural invariant is violated.
    void validate() const;
};

// Internal-field decomposition at one instant, all in the Landau coordinate.
struct FieldState {
    double e_applied = 0.0; // field from the external voltage [V/m]
    double e_dep     = 0.0; // depolarization field [V/m]
    double e_bias    = 0.0; // internal bias field [V/m]
    double e_total   = 0.0; // sum of the three [V/m]
};

enum class Stability { minimum, maximum, inflection };

struct StationaryPoint {
    double d = 0.0; // polarization at the stationary point [C/m^2]
    Stability kind = Stability::minimum;
};

// Energy-penalty coefficient of the interface layer,
// d_int / (d_fe * eps0 * eps_int), stored positive [V m / C].
// Zero when d_int == 0; throws if d_int > 0 with eps_int <= 0.
double depolarization_factor(const StackConfig& stack);

// F(D) = alpha/2 D^2 + beta/4 D^4 + gamma D^2 - D (e_ext + e_bias) cos(theta)
// [J/m^3].  With e_ext = 0 this is the rest landscape of the stack.
double free_energy_density(double d, const StackConfig& stack,
                           double e_ext, double e_bias);

// -dF/dD, the thermodynamic driving field on D [V/m].
double effective_field(double d, const StackConfig& stack,
                       double e_ext, double e_bias);

// Series-capacitor depolarization field for polarization p [V/m]:
//   E_dep = -(p / (eps0 eps_fe)) / (1 + C_s/C_FE)
// Zero when d_int == 0 (perfect screening).
double depolarization_field(double p, const StackConfig& stack);

// Fraction of the applied voltage dropping across the ferroelectric layer,
// C_s / (C_s + C_FE).  1 when d_int == 0.
double voltage_divider(const StackConfig& stack);

// Field in the Landau coordinate produced by external voltage v:
// chi * eta * v / d_fe.
double applied_field(double v, const StackConfig& stack);

// E(t) = E_bias + E_dep(P) at zero applied voltage.
FieldState total_internal_field(double p, const StackConfig& stack,
                                double e_bias);

// All real roots of dF/dD = 0 (a depressed cubic), classified by the sign of
// d2F/dD2.  Sorted ascending; degenerate double roots report `inflection`.
std::vector<StationaryPoint> stationary_points(const StackConfig& stack,
                                               double e_ext, double e_bias);

// Pointwise F over a monotone polarization grid.  Empty grid -> empty output.
std::vector<std::pair<double, double>>
landscape_curve(const StackConfig& stack, double e_ext, double e_bias,
                std::span<const double> d_grid);

} // namespace fecap

#endif
