#include <benchmark/benchmark.h>

#include <cmath>

#include "fecap/analysis.hpp"
#include "fecap/config.hpp"
#include "fecap/instrument.hpp"

namespace {

fecap::DeviceModel default_model() { return fecap::default_config().model; }

void BM_StepEnsemble(benchmark::State& state) {
    auto model = default_model();
    model.ensemble.n_domains = (int)state.range(0);
    auto ens = fecap::sample_ensemble(model.ensemble);
    double e = -9e6;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fecap::step_ensemble(ens, e, 1e-6));
        e = -e; // keep the ensemble moving
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StepEnsemble)->Arg(64)->Arg(512)->Arg(4096);

void BM_SimulatePund(benchmark::State& state) {
    const auto config = fecap::default_config();
    for (auto _ : state) {
        auto res = fecap::run_pund(config.model, config.pund);
        benchmark::DoNotOptimize(res.loop.pr_pos);
    }
}
BENCHMARK(BM_SimulatePund)->Unit(benchmark::kMillisecond);

void BM_FitExponential(benchmark::State& state) {
    const auto t = fecap::logspace(1e-6, 1e-1, 24);
    std::vector<double> p(t.size());
    for (std::size_t k = 0; k < t.size(); ++k)
        p[k] = 0.3 * std::exp(-t[k] / 5e-4) - 0.1;
    for (auto _ : state) {
        auto fit = fecap::fit_exponential(t, p);
        benchmark::DoNotOptimize(fit.tau);
    }
}
BENCHMARK(BM_FitExponential);

void BM_StationaryPoints(benchmark::State& state) {
    const fecap::StackConfig stack{};
    double e = 0.0;
    for (auto _ : state) {
        auto pts = fecap::stationary_points(stack, e, -1e7);
        benchmark::DoNotOptimize(pts.size());
        e += 1e3;
    }
}
BENCHMARK(BM_StationaryPoints);

} // namespace

BENCHMARK_MAIN();
