#include "fecap/simulate.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace fecap {

void DeviceModel::validate() const {
    stack.validate();
    ensemble.validate();
    traps.validate();
    leakage.validate();
    if (mode == KineticsMode::landau_khalatnikov && !(lk_rho > 0.0))
        throw std::invalid_argument("model: lk_rho must be > 0");
}

SimOptions SimOptions::halved() const {
    SimOptions o = *this;
    o.steps_per_segment *= 2;
    o.dp_frac *= 0.5;
    if (o.dt_override > 0.0) o.dt_override *= 0.5;
    o.record_every *= 2;
    return o;
}

SimState make_initial_state(const DeviceModel& model) {
    SimState st;
    if (model.mode == KineticsMode::ensemble) {
        st.ensemble = sample_ensemble(model.ensemble);
        st.p = st.ensemble.polarization();
    } else {
        st.p = -model.ensemble.p_s;
    }
    st.traps.f_occ = model.traps.f_init;
    st.traps.deact = 0.0;
    st.t = 0.0;
    return st;
}

namespace {

// One bounded ensemble advance at constant field context.  The candidate
// switched fractions go to scratch first so a too-large move can be retried
// with a smaller h.
double bounded_ensemble_step(DomainEnsemble& ens, double e_total, double h_in,
                             double dp_bound, std::vector<double>& scratch,
                             double* h_taken) {
    if (e_total == 0.0) {
        *h_taken = h_in;
        return 0.0;
    }
    const double target = e_total > 0.0 ? 1.0 : 0.0;
    const double e_abs = std::abs(e_total);
    const bool unit_exponent = ens.merz_n == 1.0;
    scratch.resize(ens.domains.size());

    double h = h_in;
    for (;;) {
        double dp = 0.0;
        for (std::size_t k = 0; k < ens.domains.size(); ++k) {
            const Domain& d = ens.domains[k];
            if (d.s == target) {
                scratch[k] = d.s;
                continue;
            }
            const double r = d.e_act / e_abs;
            const double x = unit_exponent ? r : std::pow(r, ens.merz_n);
            const double tau = ens.tau0 * std::exp(x);
            const double s_new = target + (d.s - target) * std::exp(-h / tau);
            scratch[k] = s_new;
            dp += d.weight * 2.0 * (s_new - d.s);
        }
        dp *= ens.p_s;
        if (std::abs(dp) <= dp_bound || h <= h_in * 1e-9) {
            for (std::size_t k = 0; k < ens.domains.size(); ++k)
                ens.domains[k].s = scratch[k];
            *h_taken = h;
            return dp;
        }
        h *= 0.5;
    }
}

} // namespace

SimResult simulate(const Waveform& waveform, const DeviceModel& model,
                   const SimState& initial, const SimOptions& options) {
    waveform.validate();
    model.validate();
    if (!(waveform.duration() > 0.0))
        throw std::invalid_argument("simulate: waveform duration must be > 0");
    if (options.steps_per_segment < 1)
        throw std::invalid_argument("simulate: steps_per_segment must be >= 1");

    const StackConfig& stack = model.stack;
    const double chi = stack.polarity;
    const double c_bg = background_capacitance_per_area(stack);
    const double p_s = model.ensemble.p_s;
    const double dp_bound = options.dp_frac * p_s;

    SimState st = initial;
    SimResult out;

    // recording bookkeeping: current synthesized from backward differences
    double t_rec = st.t;
    double p_rec = st.p;
    double v_rec = waveform.segments.front().v_start;

    auto record = [&](double t, double v) {
        double i;
        const double dt = t - t_rec;
        if (dt > 0.0) {
            const double dp_dt = chi * (st.p - p_rec) / dt;
            const double dv_dt = (v - v_rec) / dt;
            i = stack.area * (dp_dt + c_bg * dv_dt) +
                stack.area * leakage_current_density(v, model.leakage);
        } else {
            i = stack.area * leakage_current_density(v, model.leakage);
        }
        const double e_bias = bias_field(st.traps, model.traps, stack);
        out.trace.append(t, v, i, st.p, applied_field(v, stack),
                         depolarization_field(st.p, stack), e_bias,
                         st.traps.f_occ);
        t_rec = t;
        p_rec = st.p;
        v_rec = v;
    };

    if (options.record_every > 0)
        record(st.t, waveform.segments.front().v_start);

    std::vector<double> scratch;
    const double t0 = st.t;
    double seg_start = 0.0; // waveform-local time

    for (const auto& seg : waveform.segments) {
        const double base =
            options.dt_override > 0.0
                ? std::min(options.dt_override, seg.duration)
                : seg.duration / options.steps_per_segment;
        const int n_steps = std::max(1, (int)std::ceil(seg.duration / base - 1e-9));
        const double dt = seg.duration / n_steps;

        for (int k = 0; k < n_steps; ++k) {
            const double tl0 = k * dt;
            const bool last = k + 1 == n_steps;
            const double v_mid =
                seg.v_start +
                (seg.v_end - seg.v_start) * ((tl0 + 0.5 * dt) / seg.duration);
            // exact endpoint at the boundary keeps V=0 samples exact
            const double v_end =
                last ? seg.v_end
                     : seg.v_start + (seg.v_end - seg.v_start) *
                                         ((tl0 + dt) / seg.duration);

            // traps and deactivation: exact updates over the full step
            st.traps = step_traps(st.traps, trap_rates(v_mid, model.traps), dt);
            st.traps = step_deactivation(st.traps, v_mid, model.traps, dt);
            const double e_bias = bias_field(st.traps, model.traps, stack);
            const double e_app = applied_field(v_mid, stack);

            if (model.mode == KineticsMode::ensemble) {
                double rem = dt;
                while (rem > 0.0) {
                    const double e_tot =
                        e_app + e_bias + depolarization_field(st.p, stack);
                    double taken = rem;
                    const double dp = bounded_ensemble_step(
                        st.ensemble, e_tot, rem, dp_bound, scratch, &taken);
                    st.p += dp;
                    rem -= taken;
                    if (dp == 0.0) break; // frozen: nothing will move
                }
                st.p = st.ensemble.polarization(); // kill drift accumulation
            } else {
                st.p = lk_step(st.p, stack, e_app, e_bias, model.lk_rho, dt);
            }

            st.t = last ? t0 + seg_start + seg.duration
                        : t0 + seg_start + tl0 + dt;
            if (options.record_every > 0 &&
                ((k + 1) % options.record_every == 0 || last))
                record(st.t, v_end);
        }
        seg_start += seg.duration;
    }

    out.state = st;
    return out;
}

} // namespace fecap
