#include "fecap/kinetics.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace fecap {

void EnsembleConfig::validate() const {
    if (n_domains < 1)
        throw std::invalid_argument("ensemble: n_domains must be >= 1");
    if (!(tau0 > 0.0)) throw std::invalid_argument("ensemble: tau0 must be > 0");
    if (!(merz_n > 0.0))
        throw std::invalid_argument("ensemble: merz_n must be > 0");
    if (e_act_log_sigma < 0.0)
        throw std::invalid_argument("ensemble: e_act_log_sigma must be >= 0");
    if (!(e_act_median > 0.0))
        throw std::invalid_argument("ensemble: e_act_median must be > 0");
    if (!(p_s > 0.0)) throw std::invalid_argument("ensemble: p_s must be > 0");
}

double DomainEnsemble::polarization() const {
    double acc = 0.0;
    for (const auto& d : domains) acc += d.weight * (2.0 * d.s - 1.0);
    return p_s * acc;
}

void DomainEnsemble::set_polarization(double p) {
    const double s = 0.5 * (1.0 + p / p_s);
    if (s < 0.0 || s > 1.0)
        throw std::invalid_argument("set_polarization: |p| exceeds p_s");
    for (auto& d : domains) d.s = s;
}

DomainEnsemble sample_ensemble(const EnsembleConfig& config) {
    config.validate();
    DomainEnsemble ens;
    ens.p_s = config.p_s;
    ens.tau0 = config.tau0;
    ens.merz_n = config.merz_n;
    ens.domains.resize(config.n_domains);

    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> z(0.0, 1.0);
    const double w = 1.0 / config.n_domains;
    const double log_med = std::log(config.e_act_median);
    for (auto& d : ens.domains) {
        d.weight = w;
        d.e_act = std::exp(log_med + config.e_act_log_sigma * z(rng));
        d.s = 0.0;
    }
    return ens;
}

namespace {

// tau0 * exp((e_act/|e|)^n); overflow saturates to +infinity, which the
// update below treats as "no motion".
inline double merz_time(double e_abs, double e_act, double tau0, double n) {
    const double x = std::pow(e_act / e_abs, n);
    return tau0 * std::exp(x);
}

} // namespace

double switching_time(double e_total, const Domain& domain,
                      const EnsembleConfig& config) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (e_total == 0.0) return inf;
    if (e_total > 0.0 && domain.s >= 1.0) return inf;
    if (e_total < 0.0 && domain.s <= 0.0) return inf;
    return merz_time(std::abs(e_total), domain.e_act, config.tau0,
                     config.merz_n);
}

double step_ensemble(DomainEnsemble& ensemble, double e_total, double dt) {
    if (!(dt > 0.0))
        throw std::invalid_argument("step_ensemble: dt must be > 0");
    if (e_total == 0.0) return 0.0;
    const double target = e_total > 0.0 ? 1.0 : 0.0;
    const double e_abs = std::abs(e_total);
    double dp = 0.0;
    for (auto& d : ensemble.domains) {
        if (d.s == target) continue;
        const double tau =
            merz_time(e_abs, d.e_act, ensemble.tau0, ensemble.merz_n);
        const double decay = std::exp(-dt / tau); // 1 when tau == inf
        const double s_new = target + (d.s - target) * decay;
        dp += d.weight * 2.0 * (s_new - d.s);
        d.s = s_new;
    }
    dp *= ensemble.p_s;
    return dp;
}

double lk_step(double d, const StackConfig& stack, double e_ext, double e_bias,
               double rho, double dt) {
    if (!(rho > 0.0)) throw std::invalid_argument("lk_step: rho must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("lk_step: dt must be > 0");

    const double p_scale =
        stack.alpha < 0.0 ? stack.saturation_polarization() : 1.0;
    constexpr int max_substeps = 1000000;

    double y = d;
    double t = 0.0;
    double h = dt;
    int n = 0;
    while (t < dt) {
        if (++n > max_substeps)
            throw std::runtime_error("lk_step: step-size underflow "
                                     "(sub-step budget exhausted)");
        h = std::min(h, dt - t);
        const double f0 = effective_field(y, stack, e_ext, e_bias) / rho;
        const double y_euler = y + h * f0;
        const double f1 = effective_field(y_euler, stack, e_ext, e_bias) / rho;
        const double y_heun = y + 0.5 * h * (f0 + f1);
        const double err = std::abs(y_heun - y_euler);
        const double budget = 1e-6 * p_scale * (h / dt);
        if (err <= budget || h <= dt * 1e-14) {
            y = y_heun;
            t += h;
            h *= 1.5;
        } else {
            h *= 0.5;
        }
    }
    return y;
}

} // namespace fecap
