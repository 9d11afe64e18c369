// Acceptance suite: one pass/fail line per criterion, with timings.
// Exit code 0 only when every criterion holds.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "fecap/analysis.hpp"
#include "fecap/config.hpp"
#include "fecap/instrument.hpp"

using namespace fecap;

namespace {

int failures = 0;

struct Criterion {
    std::string name;
    std::vector<std::string> notes;
    bool ok = true;
    std::chrono::steady_clock::time_point start =
        std::chrono::steady_clock::now();

    explicit Criterion(std::string n) : name(std::move(n)) {}

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes.push_back("FAILED: " + what);
        }
    }

    void note(const std::string& s) { notes.push_back(s); }

    double seconds() const {
        return std::chrono::duration<double>(
                   std::chrono::steady_clock::now() - start)
            .count();
    }

    void report() {
        std::printf("[%s] %s (%.1f s)\n", ok ? "PASS" : "FAIL", name.c_str(),
                    seconds());
        for (const auto& n : notes) std::printf("       %s\n", n.c_str());
        if (!ok) ++failures;
        std::fflush(stdout);
    }
};

std::string fmt(const std::string& f, double a, double b = 0, double c = 0,
                double d = 0) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f.c_str(), a, b, c, d);
    return buf;
}

RetentionFit fit_points(const RetentionResult& res) {
    std::vector<double> t, p;
    for (const auto& pt : res.points) {
        t.push_back(pt.delay);
        p.push_back(pt.p);
    }
    return fit_exponential(t, p);
}

double stable_remanence(const DeviceModel& model) {
    Waveform wf;
    wf.hold(10e-6);
    wf.pulse(3.0, 100e-6, 2e-6);
    wf.hold(2e-3);
    SimOptions opt;
    opt.record_every = 0;
    return simulate(wf, model, make_initial_state(model), opt).state.p;
}

// --- criterion 1 -----------------------------------------------------------

void criterion_landscape() {
    Criterion c("1. landscape triptych: symmetric / interface / bias");

    StackConfig intrinsic;
    intrinsic.eps_int = 75.0;
    intrinsic.d_int = 0.0;
    StackConfig interface = intrinsic;
    interface.d_int = 0.2e-9;
    const double e_bias = -1e7; // 100 kV/cm, stabilizes the down state

    struct Wells {
        double d_lo = 0, d_hi = 0, f_lo = 0, f_hi = 0, f_bar = 0;
        bool valid = false;
    };
    auto wells = [](const StackConfig& s, double eb) {
        Wells w;
        const auto pts = stationary_points(s, 0.0, eb);
        if (pts.size() != 3) return w;
        w.d_lo = pts[0].d;
        w.d_hi = pts[2].d;
        w.f_lo = free_energy_density(pts[0].d, s, 0.0, eb);
        w.f_hi = free_energy_density(pts[2].d, s, 0.0, eb);
        w.f_bar = free_energy_density(pts[1].d, s, 0.0, eb);
        w.valid = true;
        return w;
    };

    const Wells wi = wells(intrinsic, 0.0);
    c.expect(wi.valid, "intrinsic landscape has no double well");
    c.expect(std::abs(wi.f_lo - wi.f_hi) <= 1e-9 * std::abs(wi.f_lo),
             fmt("intrinsic well asymmetry %.2e rel (want < 1e-9)",
                 std::abs(wi.f_lo - wi.f_hi) / std::abs(wi.f_lo)));

    const Wells wf = wells(interface, 0.0);
    c.expect(wf.valid, "interface landscape has no double well");
    const double b_int = wi.f_bar - wi.f_lo;
    const double b_ifc = wf.f_bar - wf.f_lo;
    c.expect(b_ifc < 0.7 * b_int,
             fmt("interface barrier reduction %.1f%% (want > 30%%)",
                 100.0 * (1.0 - b_ifc / b_int)));
    c.expect(std::abs(wf.d_hi) < std::abs(wi.d_hi),
             "interface minima magnitude not reduced");
    c.note(fmt("barriers: intrinsic %.3e, interface %.3e J/m^3 (-%.0f%%)",
               b_int, b_ifc, 100.0 * (1.0 - b_ifc / b_int)));

    const Wells wb = wells(interface, e_bias);
    c.expect(wb.valid, "biased landscape has no double well");
    c.expect(std::abs(wb.f_lo - wb.f_hi) > 1e-3 * std::abs(wb.f_lo),
             "bias case: well depths do not differ");
    const double escape_up = wb.f_bar - wb.f_hi; // out of the written state
    const double escape_dn = wb.f_bar - wb.f_lo;
    c.expect(escape_up < escape_dn,
             "bias case: the unstable-well barrier is not the smaller one");
    c.expect(c.seconds() < 1.0, fmt("runtime %.2f s (want < 1 s)", c.seconds()));
    c.report();
}

// --- criterion 2 -----------------------------------------------------------

void criterion_retention_range(const RunConfig& config) {
    Criterion c("2. retention range and monotone width/amplitude trends");

    const RetentionResult main_run =
        run_retention(config.model, config.retention);
    const RetentionFit fit = fit_points(main_run);
    c.note(fmt("main fit: tau %.3f ms, rmse %.2f%% of p0", fit.tau * 1e3,
               100.0 * fit.rmse / std::abs(fit.p0)));
    c.expect(fit.converged, "main fit did not converge");
    c.expect(fit.rmse < 0.05 * std::abs(fit.p0),
             fmt("rmse %.2f%% of p0 (want < 5%%)",
                 100.0 * fit.rmse / std::abs(fit.p0)));
    c.expect(fit.tau >= 0.1e-3 && fit.tau <= 2e-3,
             fmt("tau %.3f ms outside [0.1, 2] ms", fit.tau * 1e3));

    std::vector<double> tau_w;
    for (double w : {1e-6, 1e-5, 1e-4, 1e-3}) {
        RetentionConfig rc = config.retention;
        rc.program_width = w;
        tau_w.push_back(fit_points(run_retention(config.model, rc)).tau);
    }
    c.note(fmt("width sweep tau [ms]: %.3f / %.3f / %.3f / %.3f",
               tau_w[0] * 1e3, tau_w[1] * 1e3, tau_w[2] * 1e3,
               tau_w[3] * 1e3));
    for (std::size_t k = 1; k < tau_w.size(); ++k)
        c.expect(tau_w[k] > tau_w[k - 1],
                 fmt("width sweep not increasing at index %.0f", (double)k));

    std::vector<double> tau_a;
    for (double a : {-3.5, -3.8333, -4.1667, -4.5}) {
        RetentionConfig rc = config.retention;
        rc.program_v = a;
        tau_a.push_back(fit_points(run_retention(config.model, rc)).tau);
    }
    c.note(fmt("amplitude sweep tau [ms]: %.3f / %.3f / %.3f / %.3f",
               tau_a[0] * 1e3, tau_a[1] * 1e3, tau_a[2] * 1e3,
               tau_a[3] * 1e3));
    for (std::size_t k = 1; k < tau_a.size(); ++k)
        c.expect(tau_a[k] > tau_a[k - 1],
                 fmt("amplitude sweep not increasing at index %.0f",
                     (double)k));

    c.expect(c.seconds() < 60.0,
             fmt("runtime %.1f s (want < 60 s)", c.seconds()));
    c.report();
}

// --- criterion 3 -----------------------------------------------------------

void criterion_full_reversal(const RunConfig& config) {
    Criterion c("3. full reversal vs depolarization-only decay");

    const RetentionResult main_run =
        run_retention(config.model, config.retention);
    const RetentionFit fit = fit_points(main_run);
    const double pr_stable = stable_remanence(config.model);

    bool crossed = false;
    for (std::size_t k = 1; k < main_run.points.size(); ++k)
        if ((main_run.points[k].p < 0.0) != (main_run.points[0].p < 0.0))
            crossed = true;
    c.expect(crossed, "retention trace never crosses P = 0");
    c.expect(std::abs(fit.p_inf - pr_stable) <= 0.05 * std::abs(pr_stable),
             fmt("fitted steady state %.4f vs stable remanence %.4f", fit.p_inf,
                 pr_stable));
    c.note(fmt("p_inf %.4f, stable remanence %.4f C/m^2 (%.1f%% apart)",
               fit.p_inf, pr_stable,
               100.0 * std::abs(fit.p_inf - pr_stable) /
                   std::abs(pr_stable)));

    DeviceModel no_bias = config.model;
    no_bias.traps.n_v = 0.0;
    const RetentionResult dep_run = run_retention(no_bias, config.retention);
    bool sign_ok = true, monotone = true;
    for (std::size_t k = 0; k < dep_run.points.size(); ++k) {
        if ((dep_run.points[k].p < 0.0) != (dep_run.points[0].p < 0.0))
            sign_ok = false;
        if (k > 0 && std::abs(dep_run.points[k].p) >
                         std::abs(dep_run.points[k - 1].p) + 1e-12)
            monotone = false;
    }
    const double dep_decay =
        1.0 - dep_run.points.back().p / dep_run.points.front().p;
    c.expect(sign_ok, "bias-off run changes sign");
    c.expect(monotone, "bias-off run is not monotone toward zero");
    c.expect(dep_decay > 0.0, "bias-off run shows no decay toward zero");
    c.note(fmt("bias-off: monotone decay toward zero by %.1f%%, no crossing",
               100.0 * dep_decay));
    c.report();
}

// --- criterion 4 -----------------------------------------------------------

void criterion_stable_flatness(const RunConfig& config, double two_pr) {
    Criterion c("4. stable-state flatness over 10 ms");

    Waveform wf;
    wf.hold(10e-6);
    wf.pulse(3.0, 100e-6, 2e-6);
    wf.hold(1e-3); // settle after the preset
    const double prep_end = wf.duration();
    wf.hold(10e-3);
    SimOptions opt;
    opt.record_every = 1;
    const SimResult res =
        simulate(wf, config.model, make_initial_state(config.model), opt);

    double p0 = 0.0, dev = 0.0;
    bool started = false;
    for (std::size_t k = 0; k < res.trace.size(); ++k) {
        if (res.trace.t[k] < prep_end) continue;
        if (!started) {
            p0 = res.trace.p[k];
            started = true;
        }
        dev = std::max(dev, std::abs(res.trace.p[k] - p0));
    }
    c.expect(started, "no samples in the hold window");
    c.expect(dev < 0.01 * two_pr,
             fmt("|dP| %.3e not below 1%% of 2Pr (%.3e)", dev, 0.01 * two_pr));
    c.note(fmt("max |dP| %.2e C/m^2 over 10 ms (1%% of 2Pr = %.2e)", dev,
               0.01 * two_pr));
    c.expect(c.seconds() < 10.0,
             fmt("runtime %.1f s (want < 10 s)", c.seconds()));
    c.report();
}

// --- criterion 5 -----------------------------------------------------------

void criterion_area_independence(const RunConfig& config) {
    Criterion c("5. area-independent tau; currents scale by 25");

    DeviceModel small_model = config.model;
    small_model.stack.area = 25e-12; // (5 um)^2
    DeviceModel big_model = config.model;
    big_model.stack.area = 25.0 * small_model.stack.area; // (25 um)^2

    RetentionConfig rc = config.retention;
    rc.delays = logspace(2e-6, 0.3, 10);
    const RetentionFit fs = fit_points(run_retention(small_model, rc));
    const RetentionFit fb = fit_points(run_retention(big_model, rc));
    const double rel = std::abs(fs.tau - fb.tau) / fb.tau;
    c.expect(rel < 1e-9,
             fmt("tau relative difference %.2e (want < 1e-9)", rel));
    c.note(fmt("tau %.4f ms on both areas, rel diff %.1e", fb.tau * 1e3, rel));

    const PundResult ps = run_pund(small_model, config.pund);
    const PundResult pb = run_pund(big_model, config.pund);
    double imax = 0.0, ierr = 0.0;
    for (std::size_t k = 0; k < ps.trace.size(); ++k) {
        imax = std::max(imax, std::abs(pb.trace.i[k]));
        ierr =
            std::max(ierr, std::abs(pb.trace.i[k] - 25.0 * ps.trace.i[k]));
    }
    c.expect(ierr <= 1e-12 * imax,
             fmt("current scaling error %.2e of peak (want <= 1e-12)",
                 ierr / imax));
    c.note(fmt("worst current-scaling error %.1e of the peak current",
               ierr / imax));
    c.report();
}

// --- criterion 6 -----------------------------------------------------------

void criterion_fit_oracle() {
    Criterion c("6. exponential-fit oracle: noiseless and 1% noise");

    const double p0 = 0.30, p_inf = -0.10, tau = 0.5e-3;
    const auto t = logspace(1e-6, 1e-2, 20);
    std::vector<double> p(t.size());
    for (std::size_t k = 0; k < t.size(); ++k)
        p[k] = p0 * std::exp(-t[k] / tau) + p_inf;
    const RetentionFit clean = fit_exponential(t, p);
    c.expect(std::abs(clean.p0 - p0) < 1e-6 * p0, "p0 beyond 1e-6 relative");
    c.expect(std::abs(clean.p_inf - p_inf) < 1e-6 * std::abs(p_inf),
             "p_inf beyond 1e-6 relative");
    c.expect(std::abs(clean.tau - tau) < 1e-6 * tau,
             "tau beyond 1e-6 relative");

    std::mt19937 rng(20240601);
    std::normal_distribution<double> noise(0.0, 0.01 * p0);
    std::vector<double> err;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> pn(t.size());
        for (std::size_t k = 0; k < t.size(); ++k)
            pn[k] = p0 * std::exp(-t[k] / tau) + p_inf + noise(rng);
        err.push_back(std::abs(fit_exponential(t, pn).tau - tau) / tau);
    }
    std::nth_element(err.begin(), err.begin() + err.size() / 2, err.end());
    const double median = err[err.size() / 2];
    c.expect(median < 0.05,
             fmt("median tau error %.2f%% under 1%% noise (want < 5%%)",
                 100.0 * median));
    c.note(fmt("noiseless recovery to 1e-6; noisy median tau error %.2f%%",
               100.0 * median));
    c.report();
}

// --- criterion 7 -----------------------------------------------------------

void criterion_numerical_oracles(const RunConfig& config) {
    Criterion c("7. numerical oracles: gradients, roots, dt, charge");

    // effective field vs central finite differences
    {
        StackConfig s;
        s.eps_int = 75.0;
        std::mt19937 rng(31);
        std::uniform_real_distribution<double> dd(-0.5, 0.5);
        std::uniform_real_distribution<double> de(-5e7, 5e7);
        double worst = 0.0;
        for (int k = 0; k < 500; ++k) {
            const double x = dd(rng), e1 = de(rng), e2 = de(rng);
            const double h = 1e-7 * (std::abs(x) + 0.3);
            const double fd = -(free_energy_density(x + h, s, e1, e2) -
                                free_energy_density(x - h, s, e1, e2)) /
                              (2.0 * h);
            const double ef = effective_field(x, s, e1, e2);
            worst = std::max(
                worst, std::abs(ef - fd) /
                           std::max({std::abs(ef), std::abs(fd), 1e3}));
        }
        c.expect(worst < 1e-6,
                 fmt("field-gradient mismatch %.2e (want < 1e-6)", worst));
        c.note(fmt("worst field-vs-finite-difference mismatch %.1e", worst));
    }

    // stationary points vs dense grid search
    {
        StackConfig s;
        s.eps_int = 75.0;
        std::vector<double> g(4001);
        for (int k = 0; k < 4001; ++k) g[k] = -0.6 + 1.2 * k / 4000.0;
        const double step = g[1] - g[0];
        std::mt19937 rng(33);
        std::uniform_real_distribution<double> de(-2e7, 2e7);
        bool ok = true;
        for (int trial = 0; trial < 10; ++trial) {
            const double eb = de(rng);
            const auto pts = stationary_points(s, 0.0, eb);
            const auto curve = landscape_curve(s, 0.0, eb, g);
            for (const auto& p : pts) {
                if (p.kind == Stability::inflection) continue;
                double best = 1e300;
                for (std::size_t k = 1; k + 1 < curve.size(); ++k) {
                    const bool mn = curve[k].second < curve[k - 1].second &&
                                    curve[k].second < curve[k + 1].second;
                    const bool mx = curve[k].second > curve[k - 1].second &&
                                    curve[k].second > curve[k + 1].second;
                    if ((p.kind == Stability::minimum && mn) ||
                        (p.kind == Stability::maximum && mx))
                        best =
                            std::min(best, std::abs(curve[k].first - p.d));
                }
                ok = ok && best <= step;
            }
        }
        c.expect(ok, "stationary point beyond one grid step from extremum");
    }

    // dt halving on the acceptance scenarios
    {
        const DeviceModel& m = config.model;
        const double p_s = m.ensemble.p_s;
        SimOptions opt;
        opt.record_every = 0;

        Waveform ret;
        ret.hold(10e-6);
        ret.pulse(3.0, 100e-6, 2e-6);
        ret.hold(200e-6);
        ret.pulse(-4.5, 50e-6, 2e-6);
        ret.hold(5e-3);
        const double r1 =
            simulate(ret, m, make_initial_state(m), opt).state.p;
        const double r2 =
            simulate(ret, m, make_initial_state(m), opt.halved()).state.p;
        c.expect(std::abs(r1 - r2) < 1e-4 * p_s,
                 fmt("retention dt-halving dP %.2e (want < %.1e)",
                     std::abs(r1 - r2), 1e-4 * p_s));

        const Waveform pw = build_pund(config.pund);
        SimOptions popt = opt; // protocol resolution: 1000 steps per segment
        const double q1 = simulate(pw, m, make_initial_state(m), popt).state.p;
        const double q2 =
            simulate(pw, m, make_initial_state(m), popt.halved()).state.p;
        c.expect(std::abs(q1 - q2) < 1e-4 * p_s,
                 fmt("pund dt-halving dP %.2e (want < %.1e)",
                     std::abs(q1 - q2), 1e-4 * p_s));
        c.note(fmt("dt-halving dP: retention %.1e, pund %.1e (bound %.1e)",
                   std::abs(r1 - r2), std::abs(q1 - q2), 1e-4 * p_s));

        EnduranceConfig short_end = config.endurance;
        short_end.n_cycles = 100;
        short_end.checkpoints = {100};
        const auto e1 = run_endurance(m, short_end, opt);
        const auto e2 = run_endurance(m, short_end, opt.halved());
        c.expect(std::abs(e1.back().pr_pos - e2.back().pr_pos) < 1e-4 * p_s,
                 fmt("endurance dt-halving remanence shift %.2e",
                     std::abs(e1.back().pr_pos - e2.back().pr_pos)));
    }

    // PUND charge conservation
    {
        auto charge_check = [&](const DeviceModel& m, double tol,
                                const std::string& label) {
            const PundResult res = run_pund(m, config.pund);
            const std::size_t n = res.trace.size() / 4;
            auto window = [&](int j) {
                return res.trace.slice(j * n, (j + 1) * n);
            };
            auto qsub = [&](const TraceRecord& a, const TraceRecord& b) {
                double acc = 0.0;
                for (std::size_t k = 1; k < a.size(); ++k)
                    acc += 0.5 *
                           ((a.i[k] - b.i[k]) + (a.i[k - 1] - b.i[k - 1])) *
                           (a.t[k] - a.t[k - 1]);
                return std::abs(acc);
            };
            const double two_pr = res.loop.pr_pos - res.loop.pr_neg;
            const double target = m.stack.area * two_pr;
            const double qp = qsub(window(0), window(1));
            const double qn = qsub(window(2), window(3));
            c.expect(std::abs(qp - target) <= tol * target,
                     fmt(label + ": positive-pair charge off by %.2f%%",
                         100.0 * std::abs(qp - target) / target));
            c.expect(std::abs(qn - target) <= tol * target,
                     fmt(label + ": negative-pair charge off by %.2f%%",
                         100.0 * std::abs(qn - target) / target));
            c.note(fmt(label + ": pair charges off by %.2f%% / %.2f%%"
                               " (tol %.0f%%)",
                       100.0 * std::abs(qp - target) / target,
                       100.0 * std::abs(qn - target) / target, 100.0 * tol));
        };
        DeviceModel clean = config.model;
        clean.leakage.j0 = 0.0;
        charge_check(clean, 0.01, "no leakage");
        charge_check(config.model, 0.02, "with leakage");
    }
    c.report();
}

// --- criterion 8 -----------------------------------------------------------

void criterion_endurance(const RunConfig& config) {
    Criterion c("8. endurance: stable window, migrating positive peak");

    EnduranceConfig ec = config.endurance;
    ec.n_cycles = 100000;
    const auto series = run_endurance(config.model, ec);

    const double first = series.front().pr_pos - series.front().pr_neg;
    double max_drift = 0.0;
    for (const auto& pt : series)
        max_drift = std::max(max_drift,
                             std::abs((pt.pr_pos - pt.pr_neg) - first) /
                                 std::abs(first));
    c.expect(max_drift < 0.10,
             fmt("|2Pr| drift %.2f%% (want < 10%%)", 100.0 * max_drift));

    bool monotone = true;
    for (std::size_t k = 1; k < series.size(); ++k)
        if (series[k].peak_v_pos >= series[k - 1].peak_v_pos) monotone = false;
    c.expect(monotone, "positive peak voltage not strictly decreasing");
    c.note(fmt("2Pr %.4f -> %.4f C/m^2 (max drift %.2f%%)", first,
               series.back().pr_pos - series.back().pr_neg,
               100.0 * max_drift));
    c.note(fmt("peak_v_pos %.4f V -> %.4f V over %.0f cycles",
               series.front().peak_v_pos, series.back().peak_v_pos,
               (double)series.back().cycles));
    c.expect(c.seconds() < 300.0,
             fmt("runtime %.0f s (want < 300 s)", c.seconds()));
    c.report();
}

} // namespace

int main() {
    const RunConfig config = default_config();
    std::printf("fecap acceptance suite (seed %llu)\n",
                (unsigned long long)config.seed);

    criterion_landscape();
    criterion_retention_range(config);
    criterion_full_reversal(config);

    const PundResult pund = run_pund(config.model, config.pund);
    const double two_pr = pund.loop.pr_pos - pund.loop.pr_neg;
    criterion_stable_flatness(config, two_pr);
    criterion_area_independence(config);
    criterion_fit_oracle();
    criterion_numerical_oracles(config);
    criterion_endurance(config);

    if (failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
}
