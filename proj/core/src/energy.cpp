#include "fecap/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fecap/constants.hpp"

namespace fecap {

double StackConfig::saturation_polarization() const {
    if (alpha >= 0.0)
        throw std::invalid_argument("saturation polarization requires alpha < 0");
    return std::sqrt(-alpha / beta);
}

void StackConfig::validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("stack: beta must be > 0");
    if (!(d_fe > 0.0)) throw std::invalid_argument("stack: d_fe must be > 0");
    if (!(area > 0.0)) throw std::invalid_argument("stack: area must be > 0");
    if (d_int < 0.0) throw std::invalid_argument("stack: d_int must be >= 0");
    if (d_int > 0.0 && !(eps_int > 0.0))
        throw std::invalid_argument("stack: eps_int must be > 0 when d_int > 0");
    if (!(eps_fe > 0.0)) throw std::invalid_argument("stack: eps_fe must be > 0");
    if (polarity != 1.0 && polarity != -1.0)
        throw std::invalid_argument("stack: polarity must be +1 or -1");
}

double depolarization_factor(const StackConfig& stack) {
    if (stack.d_int == 0.0) return 0.0;
    if (!(stack.eps_int > 0.0))
        throw std::invalid_argument(
            "depolarization_factor: eps_int must be > 0 when d_int > 0");
    return stack.d_int / (stack.d_fe * eps0 * stack.eps_int);
}

double free_energy_density(double d, const StackConfig& stack,
                           double e_ext, double e_bias) {
    const double d2 = d * d;
    const double gamma = depolarization_factor(stack);
    return 0.5 * stack.alpha * d2 + 0.25 * stack.beta * d2 * d2 + gamma * d2 -
           d * (e_ext + e_bias) * std::cos(stack.theta);
}

double effective_field(double d, const StackConfig& stack,
                       double e_ext, double e_bias) {
    const double gamma = depolarization_factor(stack);
    return -(stack.alpha * d + stack.beta * d * d * d + 2.0 * gamma * d -
             (e_ext + e_bias) * std::cos(stack.theta));
}

double depolarization_field(double p, const StackConfig& stack) {
    if (stack.d_int == 0.0) return 0.0; // C_s -> infinity, perfect screening
    // c_s/c_fe written area-free so traces are bit-identical across areas
    const double cs_over_cfe =
        (stack.eps_int / stack.d_int) * (stack.d_fe / stack.eps_fe);
    return -(p / (eps0 * stack.eps_fe)) / (1.0 + cs_over_cfe);
}

double voltage_divider(const StackConfig& stack) {
    if (stack.d_int == 0.0) return 1.0;
    const double cs_over_cfe =
        (stack.eps_int / stack.d_int) * (stack.d_fe / stack.eps_fe);
    return cs_over_cfe / (1.0 + cs_over_cfe);
}

double applied_field(double v, const StackConfig& stack) {
    return stack.polarity * voltage_divider(stack) * v / stack.d_fe;
}

FieldState total_internal_field(double p, const StackConfig& stack,
                                double e_bias) {
    FieldState fs;
    fs.e_applied = 0.0;
    fs.e_dep = depolarization_field(p, stack);
    fs.e_bias = e_bias;
    fs.e_total = fs.e_applied + fs.e_bias + fs.e_dep;
    return fs;
}

namespace {

Stability classify(double d, double a_eff, double beta, double scale) {
    const double curv = a_eff + 3.0 * beta * d * d;
    if (curv > scale) return Stability::minimum;
    if (curv < -scale) return Stability::maximum;
    return Stability::inflection;
}

} // namespace

std::vector<StationaryPoint> stationary_points(const StackConfig& stack,
                                               double e_ext, double e_bias) {
    if (!(stack.beta > 0.0))
        throw std::invalid_argument("stationary_points: beta must be > 0");

    // dF/dD = beta D^3 + a_eff D - e cos(theta) = 0, a depressed cubic
    const double gamma = depolarization_factor(stack);
    const double a_eff = stack.alpha + 2.0 * gamma;
    const double e = (e_ext + e_bias) * std::cos(stack.theta);
    const double p = a_eff / stack.beta;
    const double q = -e / stack.beta;

    const double disc = -4.0 * p * p * p - 27.0 * q * q;
    const double disc_scale =
        4.0 * std::abs(p * p * p) + 27.0 * q * q + 1e-300;

    std::vector<double> roots;
    if (p == 0.0 && q == 0.0) {
        roots.push_back(0.0);
    } else if (std::abs(disc) <= 1e-12 * disc_scale) {
        // degenerate: a double root plus (for p != 0) a simple one
        if (p == 0.0) {
            roots.push_back(std::cbrt(-q));
        } else {
            roots.push_back(3.0 * q / p);
            roots.push_back(-3.0 * q / (2.0 * p));
        }
    } else if (disc > 0.0) {
        // three distinct real roots (requires p < 0)
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double arg =
            std::clamp(3.0 * q / (p * m), -1.0, 1.0); // = cos(3 phi)
        const double phi = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k)
            roots.push_back(m * std::cos(phi - 2.0 * M_PI * k / 3.0));
    } else {
        // one real root, Cardano
        const double half_q = 0.5 * q;
        const double r = std::sqrt(half_q * half_q + p * p * p / 27.0);
        const double u = std::cbrt(-half_q + r);
        const double v = std::cbrt(-half_q - r);
        roots.push_back(u + v);
    }

    std::sort(roots.begin(), roots.end());

    const double ps2 = std::abs(stack.alpha) / stack.beta;
    const double curv_scale =
        1e-9 * (std::abs(a_eff) + 3.0 * stack.beta * ps2);

    std::vector<StationaryPoint> out;
    out.reserve(roots.size());
    for (double d : roots)
        out.push_back({d, classify(d, a_eff, stack.beta, curv_scale)});
    return out;
}

std::vector<std::pair<double, double>>
landscape_curve(const StackConfig& stack, double e_ext, double e_bias,
                std::span<const double> d_grid) {
    for (std::size_t i = 1; i < d_grid.size(); ++i)
        if (!(d_grid[i] > d_grid[i - 1]))
            throw std::invalid_argument("landscape_curve: grid must be "
                                        "strictly increasing");
    std::vector<std::pair<double, double>> out;
    out.reserve(d_grid.size());
    for (double d : d_grid)
        out.emplace_back(d, free_energy_density(d, stack, e_ext, e_bias));
    return out;
}

} // namespace fecap
