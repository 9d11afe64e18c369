#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fecap/config.hpp"
#include "fecap/kinetics.hpp"
#include "fecap/simulate.hpp"

using namespace fecap;

namespace {

EnsembleConfig small_config() {
    EnsembleConfig c;
    c.n_domains = 8;
    c.e_act_median = 2e7;
    c.e_act_log_sigma = 0.3;
    c.tau0 = 1e-6;
    c.merz_n = 1.0;
    c.seed = 9;
    return c;
}

// device with a constant built-in bias and inert traps, for clean field steps
DeviceModel frozen_bias_model(double e_bias) {
    DeviceModel m = default_config().model;
    m.traps.c0 = 0.0;
    m.traps.e0 = 0.0;
    m.traps.f_init = 0.0;
    m.traps.deact_v_on = 1e6; // deactivation never triggers
    calibrate_kappa(m.traps, m.stack, std::abs(e_bias));
    return m;
}

} // namespace

TEST_CASE("sample_ensemble") {
    EnsembleConfig c = small_config();

    SUBCASE("zero spread collapses to the median") {
        c.e_act_log_sigma = 0.0;
        const auto ens = sample_ensemble(c);
        for (const auto& d : ens.domains)
            CHECK(d.e_act == doctest::Approx(c.e_act_median).epsilon(1e-12));
    }

    SUBCASE("deterministic for a fixed seed") {
        const auto a = sample_ensemble(c);
        const auto b = sample_ensemble(c);
        REQUIRE(a.domains.size() == b.domains.size());
        for (std::size_t k = 0; k < a.domains.size(); ++k)
            CHECK(a.domains[k].e_act == b.domains[k].e_act);
    }

    SUBCASE("weights sum to one") {
        c.n_domains = 10000;
        const auto ens = sample_ensemble(c);
        double sum = 0.0;
        for (const auto& d : ens.domains) sum += d.weight;
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }

    SUBCASE("sample median tracks the configured median") {
        c.n_domains = 10000;
        c.e_act_log_sigma = 0.8;
        auto ens = sample_ensemble(c);
        std::vector<double> e;
        for (const auto& d : ens.domains) e.push_back(d.e_act);
        std::nth_element(e.begin(), e.begin() + e.size() / 2, e.end());
        const double med = e[e.size() / 2];
        CHECK(std::abs(med - c.e_act_median) < 0.05 * c.e_act_median);
    }
}

TEST_CASE("switching_time") {
    EnsembleConfig c = small_config();
    Domain d{1.0, 1.5e8, 0.5};

    SUBCASE("zero field waits forever") {
        CHECK(switching_time(0.0, d, c) ==
              std::numeric_limits<double>::infinity());
    }

    SUBCASE("field toward the current saturated state waits forever") {
        Domain up{1.0, 1.5e8, 1.0};
        CHECK(switching_time(1e7, up, c) ==
              std::numeric_limits<double>::infinity());
        Domain down{1.0, 1.5e8, 0.0};
        CHECK(switching_time(-1e7, down, c) ==
              std::numeric_limits<double>::infinity());
        CHECK(switching_time(1e7, down, c) <
              std::numeric_limits<double>::infinity());
    }

    SUBCASE("strong fields approach the attempt time") {
        CHECK(switching_time(1e15, d, c) == doctest::Approx(c.tau0));
    }

    SUBCASE("millisecond waiting time at the bias-field scale") {
        c.tau0 = 1e-9;
        c.merz_n = 1.0;
        Domain dom{1.0, 1.5e8, 0.0};
        // 1e-9 * exp(15) = 3.269e-3 s
        CHECK(switching_time(1e7, dom, c) ==
              doctest::Approx(3.269017e-3).epsilon(1e-5));
    }
}

TEST_CASE("step_ensemble") {
    SUBCASE("first-order bound for tiny steps") {
        auto ens = sample_ensemble(small_config());
        for (auto& d : ens.domains) d.s = 0.5;
        const double e = -2e7;
        double tau_min = std::numeric_limits<double>::infinity();
        EnsembleConfig c = small_config();
        for (const auto& d : ens.domains)
            tau_min = std::min(tau_min, switching_time(e, d, c));
        const double dt = tau_min * 1e-4;
        const double dp = step_ensemble(ens, e, dt);
        CHECK(std::abs(dp) <= ens.p_s * dt / tau_min * (1.0 + 1e-9));
    }

    SUBCASE("exact update is a semigroup") {
        EnsembleConfig c = small_config();
        c.n_domains = 1;
        c.e_act_log_sigma = 0.0;
        auto full = sample_ensemble(c);
        full.domains[0].s = 1.0;
        auto halves = full;
        const double e = -1.5e7;
        const double dt = 3e-4;
        step_ensemble(full, e, dt);
        step_ensemble(halves, e, dt / 2);
        step_ensemble(halves, e, dt / 2);
        CHECK(std::abs(full.domains[0].s - halves.domains[0].s) < 1e-12);
    }

    SUBCASE("uniform ensemble matches the analytic mixture") {
        EnsembleConfig c = small_config();
        c.n_domains = 16;
        auto ens = sample_ensemble(c);
        for (auto& d : ens.domains) d.s = 1.0;
        const auto frozen = ens.domains; // e_act snapshot
        const double e = -1.2e7;
        const double dt = 2e-5;
        double t = 0.0;
        for (int k = 0; k < 60; ++k) {
            step_ensemble(ens, e, dt);
            t += dt;
            double expected = 0.0;
            for (const auto& d : frozen) {
                const double tau = c.tau0 * std::exp(d.e_act / std::abs(e));
                expected += d.weight * (2.0 * std::exp(-t / tau) - 1.0);
            }
            expected *= ens.p_s;
            CHECK(std::abs(ens.polarization() - expected) < 1e-9);
        }
    }
}

TEST_CASE("lk_step") {
    const StackConfig stack = [] {
        StackConfig s;
        s.d_int = 0.0;
        return s;
    }();
    const double ps = stack.saturation_polarization();
    const double rho = 50.0;

    SUBCASE("stationary point stays put") {
        const double d1 = lk_step(ps, stack, 0.0, 0.0, rho, 1e-6);
        CHECK(std::abs(d1 - ps) < 1e-6 * ps);
    }

    SUBCASE("free energy never increases at constant fields") {
        double d = 0.05;
        double f_prev = free_energy_density(d, stack, 0.0, 0.0);
        for (int k = 0; k < 200; ++k) {
            d = lk_step(d, stack, 0.0, 0.0, rho, 2e-8);
            const double f = free_energy_density(d, stack, 0.0, 0.0);
            CHECK(f <= f_prev + 1e-9 * std::abs(f_prev));
            f_prev = f;
        }
    }

    SUBCASE("relaxation from just above zero reaches the positive well") {
        double d = 1e-4;
        for (int k = 0; k < 400; ++k) d = lk_step(d, stack, 0.0, 0.0, rho, 1e-7);
        CHECK(d == doctest::Approx(ps).epsilon(1e-4));

        // dense-step explicit reference
        double ref = 1e-4;
        const double h = 1e-10;
        for (long k = 0; k < 400L * 1000L; ++k)
            ref += h * effective_field(ref, stack, 0.0, 0.0) / rho;
        CHECK(d == doctest::Approx(ref).epsilon(1e-5));
    }

    SUBCASE("argument validation") {
        CHECK_THROWS_AS(lk_step(0.0, stack, 0, 0, -1.0, 1e-6),
                        std::invalid_argument);
        CHECK_THROWS_AS(lk_step(0.0, stack, 0, 0, 1.0, 0.0),
                        std::invalid_argument);
    }
}

TEST_CASE("simulate: quiescent state stays put") {
    DeviceModel m = default_config().model;
    m.traps.n_v = 0.0; // no bias source
    SimState st = make_initial_state(m);
    st.ensemble.set_polarization(0.0);
    st.p = 0.0;
    st.traps.f_occ = m.traps.c0 / (m.traps.c0 + m.traps.e0);

    Waveform wf;
    wf.hold(1e-3);
    const SimResult res = simulate(wf, m, st);
    for (double p : res.trace.p) CHECK(p == 0.0);
}

TEST_CASE("simulate: bias-driven full reversal") {
    DeviceModel m = frozen_bias_model(1e7);
    SimState st = make_initial_state(m);
    st.ensemble.set_polarization(m.ensemble.p_s);
    st.p = m.ensemble.p_s;

    Waveform wf;
    wf.hold(50e-3);
    SimOptions opt;
    opt.record_every = 4;
    const SimResult res = simulate(wf, m, st, opt);
    const auto& p = res.trace.p;

    // decays, crosses zero, approaches the opposite saturated state
    bool crossed = false;
    for (std::size_t k = 1; k < p.size(); ++k) {
        CHECK(p[k] <= p[k - 1] + 1e-12);
        if (p[k] < 0.0) crossed = true;
    }
    CHECK(crossed);
    CHECK(res.state.p == doctest::Approx(-m.ensemble.p_s).epsilon(0.02));

    // value check against a brute-force small-step rerun
    SimOptions fine;
    fine.steps_per_segment = 64000;
    fine.dp_frac = 0.002;
    fine.record_every = 0;
    const SimResult ref = simulate(wf, m, st, fine);
    CHECK(std::abs(res.state.p - ref.state.p) < 5e-4 * m.ensemble.p_s);
}

TEST_CASE("simulate: dt halving converges") {
    DeviceModel m = frozen_bias_model(1e7);
    SimState st = make_initial_state(m);
    st.ensemble.set_polarization(m.ensemble.p_s);
    st.p = m.ensemble.p_s;

    Waveform wf;
    wf.hold(5e-3);
    SimOptions opt;
    opt.record_every = 0;
    const double p1 = simulate(wf, m, st, opt).state.p;
    const double p2 = simulate(wf, m, st, opt.halved()).state.p;
    CHECK(std::abs(p1 - p2) < 1e-4 * m.ensemble.p_s);
}

TEST_CASE("simulate: polarization stays bounded and runs are deterministic") {
    const RunConfig config = default_config();
    DeviceModel m = config.model;

    Waveform wf;
    wf.pulse(-4.5, 20e-6, 2e-6);
    wf.hold(100e-6);
    wf.pulse(2.5, 20e-6, 2e-6);
    wf.hold(50e-6);

    const SimResult a = simulate(wf, m, make_initial_state(m));
    const SimResult b = simulate(wf, m, make_initial_state(m));

    const double bound = m.ensemble.p_s * (1.0 + 1e-9);
    for (double p : a.trace.p) CHECK(std::abs(p) <= bound);

    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t k = 0; k < a.trace.size(); ++k) {
        CHECK(a.trace.p[k] == b.trace.p[k]);
        CHECK(a.trace.i[k] == b.trace.i[k]);
        CHECK(a.trace.f_occ[k] == b.trace.f_occ[k]);
    }
}

TEST_CASE("simulate: traces are area independent, currents scale") {
    const RunConfig config = default_config();
    DeviceModel small = config.model;
    small.stack.area = 25e-12; // (5 um)^2
    DeviceModel big = small;
    big.stack.area = 25.0 * small.stack.area;

    Waveform wf;
    wf.pulse(-4.5, 50e-6, 2e-6);
    wf.hold(2e-3);

    const SimResult rs = simulate(wf, small, make_initial_state(small));
    const SimResult rb = simulate(wf, big, make_initial_state(big));

    REQUIRE(rs.trace.size() == rb.trace.size());
    for (std::size_t k = 0; k < rs.trace.size(); ++k) {
        CHECK(rs.trace.p[k] == rb.trace.p[k]); // bit identical
        CHECK(rb.trace.i[k] ==
              doctest::Approx(25.0 * rs.trace.i[k]).epsilon(1e-12));
    }
}

TEST_CASE("simulate: without bias the state only relaxes toward zero") {
    DeviceModel m = default_config().model;
    m.traps.n_v = 0.0; // bias off, depolarization only
    SimState st = make_initial_state(m);
    st.ensemble.set_polarization(0.98 * m.ensemble.p_s); // programmed level
    st.p = st.ensemble.polarization();

    Waveform wf;
    wf.hold(0.3);
    SimOptions opt;
    opt.record_every = 2;
    const SimResult res = simulate(wf, m, st, opt);
    const auto& p = res.trace.p;
    for (std::size_t k = 1; k < p.size(); ++k) {
        CHECK(std::abs(p[k]) <= std::abs(p[k - 1]) + 1e-15);
        CHECK(p[k] > 0.0); // never changes sign
    }
    CHECK(res.state.p < 0.995 * st.p); // visibly decays toward zero
}

TEST_CASE("waveform validation") {
    Waveform wf;
    CHECK_THROWS_AS(wf.validate(), std::invalid_argument);

    wf.segments.push_back({Waveform::Kind::ramp, 0.0, 1.0, 1e-6});
    wf.segments.push_back({Waveform::Kind::ramp, 0.5, 0.0, 1e-6}); // gap
    CHECK_THROWS_AS(wf.validate(), std::invalid_argument);

    Waveform nan_wf;
    nan_wf.segments.push_back(
        {Waveform::Kind::ramp, 0.0, std::nan(""), 1e-6});
    CHECK_THROWS_AS(nan_wf.validate(), std::invalid_argument);

    const DeviceModel m = default_config().model;
    CHECK_THROWS_AS(simulate(nan_wf, m, make_initial_state(m)),
                    std::invalid_argument);
}
