#include "fecap/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace fecap {

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

// Index of the extremum refined by a three-point parabola, in fractional
// samples.
double refine_peak(const std::vector<double>& y, std::size_t i) {
    if (i == 0 || i + 1 >= y.size()) return (double)i;
    const double a = y[i - 1], b = y[i], c = y[i + 1];
    const double denom = a - 2.0 * b + c;
    if (denom == 0.0) return (double)i;
    const double shift = 0.5 * (a - c) / denom;
    return (double)i + std::clamp(shift, -0.5, 0.5);
}

double interp_at(const std::vector<double>& x, double idx) {
    const auto i = (std::size_t)idx;
    if (i + 1 >= x.size()) return x.back();
    const double f = idx - (double)i;
    return x[i] + (x[i + 1] - x[i]) * f;
}

} // namespace

PolLoop integrate_pund(const TraceRecord& switching,
                       const TraceRecord& non_switching, double area) {
    if (switching.size() != non_switching.size() || switching.size() < 2)
        throw std::invalid_argument("integrate_pund: traces not time-aligned");
    const std::size_t n = switching.size();
    const double span_sw = switching.t.back() - switching.t.front();
    const double span_ns = non_switching.t.back() - non_switching.t.front();
    if (std::abs(span_sw - span_ns) > 1e-9 * std::max(span_sw, span_ns))
        throw std::invalid_argument("integrate_pund: traces not time-aligned");

    std::vector<double> di(n);
    for (std::size_t k = 0; k < n; ++k)
        di[k] = switching.i[k] - non_switching.i[k];

    PolLoop loop;
    loop.v = switching.v;
    loop.p.resize(n);
    loop.p[0] = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double dt = switching.t[k] - switching.t[k - 1];
        loop.p[k] = loop.p[k - 1] + 0.5 * (di[k] + di[k - 1]) * dt / area;
    }

    const auto [mn, mx] = std::minmax_element(loop.p.begin(), loop.p.end());
    const double mid = 0.5 * (*mn + *mx);
    for (auto& p : loop.p) p -= mid;

    const auto imax = std::max_element(di.begin(), di.end()) - di.begin();
    const auto imin = std::min_element(di.begin(), di.end()) - di.begin();
    loop.peak_v_pos = interp_at(loop.v, refine_peak(di, imax));
    loop.peak_v_neg = interp_at(loop.v, refine_peak(di, imin));

    // remanences from V = 0 crossings
    double lo = nan_v, hi = nan_v;
    for (std::size_t k = 1; k < n; ++k) {
        const double v0 = loop.v[k - 1], v1 = loop.v[k];
        if (v0 == 0.0 || (v0 < 0.0) == (v1 < 0.0)) continue;
        const double f = -v0 / (v1 - v0);
        const double p = loop.p[k - 1] + (loop.p[k] - loop.p[k - 1]) * f;
        if (std::isnan(hi) || p > hi) hi = p;
        if (std::isnan(lo) || p < lo) lo = p;
    }
    loop.pr_pos = std::isnan(hi) ? 0.0 : hi;
    loop.pr_neg = std::isnan(lo) ? 0.0 : lo;
    return loop;
}

namespace {

struct Cost {
    double sq = 0.0;
    double g[3] = {0, 0, 0};   // gradient wrt (p0, p_inf, u=log tau)
    double h[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}; // J^T J
};

Cost eval(std::span<const double> t, std::span<const double> p, double p0,
          double p_inf, double u, bool with_jac) {
    Cost c;
    const double tau = std::exp(u);
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double e = std::exp(-t[k] / tau);
        const double r = p0 * e + p_inf - p[k];
        c.sq += r * r;
        if (!with_jac) continue;
        const double j[3] = {e, 1.0, p0 * e * (t[k] / tau)};
        for (int a = 0; a < 3; ++a) {
            c.g[a] += j[a] * r;
            for (int b = 0; b < 3; ++b) c.h[a][b] += j[a] * j[b];
        }
    }
    return c;
}

// Solves the damped 3x3 normal equations by Gaussian elimination.
bool solve3(double a[3][3], const double b[3], double x[3]) {
    double m[3][4];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m[i][j] = a[i][j];
        m[i][3] = b[i];
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        if (m[piv][col] == 0.0) return false;
        std::swap(m[piv], m[col]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = m[r][col] / m[col][col];
            for (int j = col; j < 4; ++j) m[r][j] -= f * m[col][j];
        }
    }
    for (int i = 0; i < 3; ++i) x[i] = m[i][3] / m[i][i];
    return true;
}

} // namespace

RetentionFit fit_exponential(std::span<const double> t,
                             std::span<const double> p) {
    if (t.size() != p.size())
        throw std::invalid_argument("fit_exponential: size mismatch");
    if (t.size() < 4)
        throw std::invalid_argument("fit_exponential: need >= 4 samples");
    {
        std::set<double> uniq(t.begin(), t.end());
        if (uniq.size() != t.size())
            throw std::invalid_argument("fit_exponential: duplicate times");
    }
    const std::size_t n = t.size();

    RetentionFit fit;

    // flat data: tau cannot be identified
    double pmin = p[0], pmax = p[0], mean = 0.0;
    for (double x : p) {
        pmin = std::min(pmin, x);
        pmax = std::max(pmax, x);
        mean += x;
    }
    mean /= (double)n;
    const double scale = std::abs(pmin) + std::abs(pmax);
    if (pmax - pmin <= 1e-14 * (scale + 1e-300)) {
        fit.p0 = 0.0;
        fit.p_inf = mean;
        fit.tau = std::max(t.back(), 1e-300);
        fit.tau_identifiable = false;
        fit.converged = true;
        fit.rmse = 0.0;
        return fit;
    }

    // initialization: p_inf from the last sample, p0 from the first, tau from
    // the 1/e crossing of |P - p_inf| (linear interpolation)
    double p_inf = p[n - 1];
    double p0 = p[0] - p[n - 1];
    double tau = t[n - 1] / 3.0;
    const double thr = std::abs(p0) / M_E;
    for (std::size_t k = 1; k < n; ++k) {
        const double a = std::abs(p[k - 1] - p_inf);
        const double b = std::abs(p[k] - p_inf);
        if (b <= thr) {
            const double f = (a - thr) / std::max(a - b, 1e-300);
            tau = t[k - 1] + (t[k] - t[k - 1]) * std::clamp(f, 0.0, 1.0);
            break;
        }
    }
    tau = std::max(tau, 1e-18);
    double u = std::log(tau);

    const double g0_norm = [&] {
        const Cost c = eval(t, p, p0, p_inf, u, true);
        return std::sqrt(c.g[0] * c.g[0] + c.g[1] * c.g[1] + c.g[2] * c.g[2]);
    }();

    double lambda = 1e-3;
    Cost cur = eval(t, p, p0, p_inf, u, true);
    int it = 0;
    for (; it < 200; ++it) {
        double h[3][3];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) h[a][b] = cur.h[a][b];
        for (int a = 0; a < 3; ++a)
            h[a][a] += lambda * std::max(cur.h[a][a], 1e-30);
        const double rhs[3] = {-cur.g[0], -cur.g[1], -cur.g[2]};
        double step[3];
        if (!solve3(h, rhs, step)) {
            lambda *= 10.0;
            continue;
        }
        const double p0_n = p0 + step[0];
        const double pinf_n = p_inf + step[1];
        const double u_n = std::clamp(u + step[2], std::log(1e-18),
                                      std::log(1e18));
        const Cost trial = eval(t, p, p0_n, pinf_n, u_n, true);
        if (trial.sq <= cur.sq) {
            const double rel =
                std::max({std::abs(step[0]) / (std::abs(p0_n) + 1e-30),
                          std::abs(step[1]) / (std::abs(pinf_n) + 1e-30),
                          std::abs(u_n - u)});
            p0 = p0_n;
            p_inf = pinf_n;
            u = u_n;
            cur = trial;
            lambda = std::max(lambda / 3.0, 1e-14);
            if (rel < 1e-13) {
                fit.converged = true;
                ++it;
                break;
            }
        } else {
            lambda *= 4.0;
        }
    }

    fit.p0 = p0;
    fit.p_inf = p_inf;
    fit.tau = std::exp(u);
    fit.rmse = std::sqrt(cur.sq / (double)n);
    fit.n_iter = it;
    (void)g0_norm;
    return fit;
}

void fit_cost_gradient(std::span<const double> t, std::span<const double> p,
                       const RetentionFit& fit, double grad[3]) {
    const Cost c =
        eval(t, p, fit.p0, fit.p_inf, std::log(fit.tau), true);
    for (int a = 0; a < 3; ++a) grad[a] = c.g[a];
}

TauMap build_tau_map(std::span<const double> widths,
                     std::span<const double> amplitudes,
                     std::span<const RetentionFit> fits) {
    if (fits.size() != widths.size() * amplitudes.size())
        throw std::invalid_argument("build_tau_map: grid size mismatch");
    TauMap map;
    map.widths.assign(widths.begin(), widths.end());
    map.amplitudes.assign(amplitudes.begin(), amplitudes.end());
    map.tau.assign(widths.size(),
                   std::vector<double>(amplitudes.size(), nan_v));
    map.p_init.assign(widths.size(),
                      std::vector<double>(amplitudes.size(), nan_v));
    for (std::size_t iw = 0; iw < widths.size(); ++iw)
        for (std::size_t ia = 0; ia < amplitudes.size(); ++ia) {
            const RetentionFit& f = fits[iw * amplitudes.size() + ia];
            if (!f.converged || !f.tau_identifiable) continue;
            map.tau[iw][ia] = f.tau;
            map.p_init[iw][ia] = f.p0 + f.p_inf;
        }
    return map;
}

std::vector<TauPoint> correlate_tau_polarization(const TauMap& map) {
    std::vector<TauPoint> out;
    out.reserve(map.widths.size() * map.amplitudes.size());
    for (std::size_t iw = 0; iw < map.widths.size(); ++iw)
        for (std::size_t ia = 0; ia < map.amplitudes.size(); ++ia)
            out.push_back(
                {map.p_init[iw][ia], map.tau[iw][ia], map.amplitudes[ia]});
    return out;
}

} // namespace fecap
