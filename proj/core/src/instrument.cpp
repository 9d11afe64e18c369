#include "fecap/instrument.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fecap {

void PundConfig::validate() const {
    if (!(frequency > 0.0))
        throw std::invalid_argument("pund: frequency must be > 0");
    if (!(v_max > center) || !(v_min < center))
        throw std::invalid_argument("pund: need v_min < center < v_max");
    if (samples_per_sweep < 8)
        throw std::invalid_argument("pund: samples_per_sweep too small");
}

void RetentionConfig::validate() const {
    if (delays.empty())
        throw std::invalid_argument("retention: delays must be non-empty");
    for (double d : delays)
        if (!(d > 0.0))
            throw std::invalid_argument("retention: delays must be > 0");
    if (!(preset_width > 0.0) || !(program_width > 0.0) ||
        !(read_width > 0.0) || !(ramp > 0.0) || !(read_gap > 0.0))
        throw std::invalid_argument("retention: durations must be > 0");
}

void EnduranceConfig::validate() const {
    if (n_cycles < 0)
        throw std::invalid_argument("endurance: n_cycles must be >= 0");
    if (!(frequency > 0.0))
        throw std::invalid_argument("endurance: frequency must be > 0");
    if (!(v_max > 0.0) || !(v_min < 0.0))
        throw std::invalid_argument("endurance: need v_min < 0 < v_max");
    if (!(relax_pause > 0.0))
        throw std::invalid_argument("endurance: relax_pause must be > 0");
    if (cycle_steps < 4)
        throw std::invalid_argument("endurance: cycle_steps too small");
    pund.validate();
    std::int64_t prev = 0;
    for (std::int64_t c : checkpoints) {
        if (c <= prev)
            throw std::invalid_argument(
                "endurance: checkpoints must be strictly increasing");
        prev = c;
    }
}

std::vector<std::int64_t> EnduranceConfig::checkpoint_list() const {
    if (!checkpoints.empty()) {
        auto list = checkpoints;
        if (list.back() > n_cycles)
            throw std::invalid_argument("endurance: checkpoint beyond n_cycles");
        return list;
    }
    // 1-2-5 ladder up to n_cycles
    std::vector<std::int64_t> list;
    for (std::int64_t dec = 1; dec <= n_cycles; dec *= 10)
        for (std::int64_t m : {1, 2, 5}) {
            const std::int64_t c = dec * m;
            if (c <= n_cycles) list.push_back(c);
        }
    if (list.empty() || list.back() != n_cycles) {
        if (n_cycles > 0) list.push_back(n_cycles);
    }
    return list;
}

void KineticsConfig::validate() const {
    if (amplitudes.empty() || widths.empty())
        throw std::invalid_argument("kinetics: grid must be non-empty");
    for (double w : widths)
        if (!(w > 0.0))
            throw std::invalid_argument("kinetics: widths must be > 0");
}

Waveform build_pund(const PundConfig& config) {
    config.validate();
    const double q = 1.0 / (4.0 * config.frequency); // quarter period
    Waveform w;
    w.sample_dt = 2.0 * q / config.samples_per_sweep;
    w.segments.push_back(
        {Waveform::Kind::ramp, config.center, config.v_max, q});
    w.ramp_to(config.center, q);
    w.ramp_to(config.v_max, q).ramp_to(config.center, q);
    w.ramp_to(config.v_min, q).ramp_to(config.center, q);
    w.ramp_to(config.v_min, q).ramp_to(config.center, q);
    return w;
}

namespace {

// Copy of the samples with t0 < t <= t1 (tolerance half a base step).
TraceRecord slice_window(const TraceRecord& tr, double t0, double t1) {
    const double eps = (t1 - t0) * 1e-9;
    std::size_t a = 0;
    while (a < tr.size() && tr.t[a] <= t0 + eps) ++a;
    std::size_t b = a;
    while (b < tr.size() && tr.t[b] <= t1 + eps) ++b;
    return tr.slice(a, b);
}

// Integral of the subtracted current density (I_sw - I_ns)/area; dividing
// per sample keeps the result bit-stable across device areas.
double trapezoid_diff_density(const TraceRecord& x, const TraceRecord& y,
                              double area) {
    double acc = 0.0;
    for (std::size_t k = 1; k < x.size(); ++k) {
        const double dt = x.t[k] - x.t[k - 1];
        const double d1 = (x.i[k] - y.i[k]) / area;
        const double d0 = (x.i[k - 1] - y.i[k - 1]) / area;
        acc += 0.5 * (d0 + d1) * dt;
    }
    return acc;
}

void extract_remanences(PolLoop& loop) {
    double lo = 0.0, hi = 0.0;
    bool found = false;
    for (std::size_t k = 1; k < loop.v.size(); ++k) {
        const double v0 = loop.v[k - 1], v1 = loop.v[k];
        if ((v0 < 0.0) == (v1 < 0.0) && v0 != 0.0) continue;
        const double f = (v1 != v0) ? -v0 / (v1 - v0) : 0.0;
        const double p = loop.p[k - 1] + (loop.p[k] - loop.p[k - 1]) * f;
        if (!found) {
            lo = hi = p;
            found = true;
        } else {
            hi = std::max(hi, p);
            lo = std::min(lo, p);
        }
    }
    loop.pr_pos = hi;
    loop.pr_neg = lo;
}

struct PundWindows {
    double p0, p1, u1, n1, d1; // window boundaries of the recorded train [s]
};

PundWindows recorded_windows(const PundConfig& cfg, double lead) {
    const double q = 1.0 / (4.0 * cfg.frequency);
    PundWindows w{};
    w.p0 = lead + 8.0 * q; // after the conditioning train
    w.p1 = w.p0 + 2.0 * q;
    w.u1 = w.p1 + 2.0 * q;
    w.n1 = w.u1 + 2.0 * q;
    w.d1 = w.n1 + 2.0 * q;
    return w;
}

// Lead-in to the train baseline plus two trains (condition + record).
Waveform pund_run_waveform(const PundConfig& cfg) {
    const double q = 1.0 / (4.0 * cfg.frequency);
    Waveform w;
    w.sample_dt = 2.0 * q / cfg.samples_per_sweep;
    w.segments.push_back({Waveform::Kind::ramp, 0.0, cfg.center, q});
    w.hold(q);
    for (int train = 0; train < 2; ++train) {
        w.ramp_to(cfg.v_max, q).ramp_to(cfg.center, q);
        w.ramp_to(cfg.v_max, q).ramp_to(cfg.center, q);
        w.ramp_to(cfg.v_min, q).ramp_to(cfg.center, q);
        w.ramp_to(cfg.v_min, q).ramp_to(cfg.center, q);
    }
    return w;
}

PolLoop assemble_loop(const PolLoop& pos, const PolLoop& neg, double chi) {
    auto raw = [](const PolLoop& l) {
        std::vector<double> p = l.p;
        const double off = p.front();
        for (auto& x : p) x -= off; // back to cumulative-from-zero
        return p;
    };
    const auto p_pos = raw(pos);
    const auto p_neg = raw(neg);

    PolLoop loop;
    loop.v = pos.v;
    loop.v.insert(loop.v.end(), neg.v.begin(), neg.v.end());
    loop.p = p_pos;
    const double shift = p_pos.back();
    loop.p.reserve(p_pos.size() + p_neg.size());
    for (double x : p_neg) loop.p.push_back(x + shift);

    for (auto& x : loop.p) x *= chi;
    const auto [mn, mx] = std::minmax_element(loop.p.begin(), loop.p.end());
    const double mid = 0.5 * (*mn + *mx);
    for (auto& x : loop.p) x -= mid;

    extract_remanences(loop);
    loop.peak_v_pos = pos.peak_v_pos;
    loop.peak_v_neg = neg.peak_v_neg;
    return loop;
}

PundResult measure_pund(const DeviceModel& model, const PundConfig& cfg,
                        SimState& state, const SimOptions& base_options) {
    const double q = 1.0 / (4.0 * cfg.frequency);
    SimOptions opt = base_options;
    opt.steps_per_segment = std::max(base_options.steps_per_segment,
                                     cfg.samples_per_sweep / 2);
    opt.dt_override = 0.0;
    opt.record_every = 1;

    const Waveform wf = pund_run_waveform(cfg);
    const double t0 = state.t;
    SimResult res = simulate(wf, model, state, opt);
    state = res.state;

    const PundWindows w = recorded_windows(cfg, 2.0 * q);
    const TraceRecord tp = slice_window(res.trace, t0 + w.p0, t0 + w.p1);
    const TraceRecord tu = slice_window(res.trace, t0 + w.p1, t0 + w.u1);
    const TraceRecord tn = slice_window(res.trace, t0 + w.u1, t0 + w.n1);
    const TraceRecord td = slice_window(res.trace, t0 + w.n1, t0 + w.d1);

    const PolLoop lp = integrate_pund(tp, tu, model.stack.area);
    const PolLoop ln = integrate_pund(tn, td, model.stack.area);

    PundResult out;
    out.loop = assemble_loop(lp, ln, model.stack.polarity);
    out.trace = slice_window(res.trace, t0 + w.p0, t0 + w.d1);
    return out;
}

} // namespace

PundResult run_pund(const DeviceModel& model, const PundConfig& config,
                    const SimOptions& options) {
    config.validate();
    SimState state = make_initial_state(model);
    return measure_pund(model, config, state, options);
}

RetentionResult run_retention(const DeviceModel& model,
                              const RetentionConfig& config,
                              const SimOptions& options) {
    config.validate();
    RetentionResult out;
    const double p_s = model.ensemble.p_s;
    const double settle = 200e-6;

    double longest = 0.0;
    for (double d : config.delays) longest = std::max(longest, d);

    for (double delay : config.delays) {
        Waveform wf;
        wf.hold(20e-6);
        wf.pulse(config.preset_v, config.preset_width, config.ramp);
        wf.hold(settle);
        wf.pulse(config.program_v, config.program_width, config.ramp);
        wf.hold(delay);
        const double r1_start = wf.duration();
        wf.pulse(config.read_v, config.read_width, config.ramp);
        const double r1_end = wf.duration();
        wf.hold(config.read_gap);
        const double r2_start = wf.duration();
        wf.pulse(config.read_v, config.read_width, config.ramp);
        const double r2_end = wf.duration();
        wf.hold(5e-6);
        wf.sample_dt = config.read_width / 64.0;

        SimResult res = simulate(wf, model, make_initial_state(model), options);

        const TraceRecord r1 = slice_window(res.trace, r1_start, r1_end);
        const TraceRecord r2 = slice_window(res.trace, r2_start, r2_end);
        if (r1.size() != r2.size() || r1.size() < 2)
            throw std::runtime_error("run_retention: read windows misaligned");

        // switching-minus-non-switching charge, in the Landau coordinate
        const double dd_sw =
            model.stack.polarity *
            trapezoid_diff_density(r1, r2, model.stack.area);
        const double d_ref = r1.p.back(); // post-read stable branch
        const double p_meas = d_ref - dd_sw;

        // 2% allowance for trapezoid sampling at the window edges
        if (std::abs(dd_sw) > 2.0 * p_s * 1.02) out.read_in_bounds = false;
        if (!(d_ref < -0.9 * p_s)) out.read_saturated = false;

        out.points.push_back({delay, p_meas});
        if (delay == longest) out.last_trace = std::move(res.trace);
    }
    return out;
}

std::vector<EndurancePoint> run_endurance(const DeviceModel& model,
                                          const EnduranceConfig& config,
                                          const SimOptions& options) {
    config.validate();
    const auto cps = config.checkpoint_list();

    SimState state = make_initial_state(model);
    std::vector<EndurancePoint> out;

    auto checkpoint = [&](std::int64_t cycles_done) {
        Waveform pause;
        pause.hold(config.relax_pause);
        pause.sample_dt = config.relax_pause / 64.0;
        SimOptions pause_opt = options;
        pause_opt.record_every = 0;
        state = simulate(pause, model, state, pause_opt).state;

        const PundResult pr = measure_pund(model, config.pund, state, options);
        out.push_back({cycles_done, pr.loop.pr_pos, pr.loop.pr_neg,
                       pr.loop.peak_v_pos, pr.loop.peak_v_neg});
    };

    checkpoint(0); // pristine

    const double period = 1.0 / config.frequency;
    const double span = config.v_max + (config.v_max - config.v_min) +
                        std::abs(config.v_min);
    const double d_up = period * config.v_max / span;
    const double d_dn = period * (config.v_max - config.v_min) / span;
    const double d_back = period * std::abs(config.v_min) / span;

    SimOptions cyc_opt = options;
    cyc_opt.dt_override = 0.0;
    cyc_opt.steps_per_segment = config.cycle_steps;
    cyc_opt.dp_frac = std::max(options.dp_frac, 0.05);
    cyc_opt.record_every = 0;

    std::int64_t done = 0;
    for (std::int64_t cp : cps) {
        const std::int64_t n = cp - done;
        if (n > 0) {
            Waveform block;
            block.segments.reserve(3 * (std::size_t)n);
            for (std::int64_t k = 0; k < n; ++k) {
                block.ramp_to(config.v_max, d_up);
                block.ramp_to(config.v_min, d_dn);
                block.ramp_to(0.0, d_back);
            }
            block.sample_dt = period;
            state = simulate(block, model, state, cyc_opt).state;
            done = cp;
        }
        checkpoint(done);
    }
    return out;
}

KineticsResult run_kinetics(const DeviceModel& model,
                            const KineticsConfig& config,
                            const SimOptions& options) {
    config.validate();
    KineticsResult out;
    out.amplitudes = config.amplitudes;
    out.widths = config.widths;

    // shared preparation: preset to the stable state, then settle
    Waveform prep;
    prep.hold(10e-6);
    prep.pulse(config.preset_v, config.preset_width, 2e-6);
    prep.hold(200e-6);
    prep.sample_dt = config.preset_width / 32.0;
    SimOptions prep_opt = options;
    prep_opt.record_every = 0;
    const SimState prepared =
        simulate(prep, model, make_initial_state(model), prep_opt).state;
    const double p_before = prepared.p;
    const double window = 2.0 * model.ensemble.p_s;

    out.dp_norm.assign(config.widths.size(),
                       std::vector<double>(config.amplitudes.size(), 0.0));
    for (std::size_t iw = 0; iw < config.widths.size(); ++iw) {
        const double w = config.widths[iw];
        const double ramp = std::max(std::min(0.1 * w, 2e-6), 5e-9);
        for (std::size_t ia = 0; ia < config.amplitudes.size(); ++ia) {
            Waveform wf;
            wf.pulse(config.amplitudes[ia], w, ramp);
            wf.sample_dt = w / 16.0;
            SimOptions opt = options;
            opt.record_every = 0;
            const SimState end = simulate(wf, model, prepared, opt).state;
            out.dp_norm[iw][ia] =
                std::clamp((end.p - p_before) / window, 0.0, 1.0);
        }
    }
    return out;
}

} // namespace fecap
