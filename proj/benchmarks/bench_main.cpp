#include "poppersim/diffraction.hpp"
#include "poppersim/experiment.hpp"
#include "poppersim/finite_qm.hpp"
#include "poppersim/grid.hpp"

#include <benchmark/benchmark.h>

namespace qm = poppersim::qm;
namespace gauss = poppersim::gauss;
namespace slit = poppersim::slit;
namespace grid = poppersim::grid;
namespace scenario = poppersim::scenario;

namespace {

void BM_PartialTrace(benchmark::State& state) {
    const auto rho = qm::random_mixed_state({3, 4}, 11);
    for (auto _ : state) benchmark::DoNotOptimize(qm::partial_trace_second(rho));
}
BENCHMARK(BM_PartialTrace);

void BM_AuditTrial(benchmark::State& state) {
    const qm::Dims dims{static_cast<int>(state.range(0)), static_cast<int>(state.range(1))};
    std::uint64_t seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(qm::run_no_signaling_audit(1, dims, seed++));
}
BENCHMARK(BM_AuditTrial)->Args({2, 2})->Args({3, 4});

void BM_FresnelC(benchmark::State& state) {
    double theta = 0.0;
    for (auto _ : state) {
        theta += 1e-3;
        if (theta > 12.0) theta = 1e-3;
        benchmark::DoNotOptimize(slit::fresnel_c(theta));
    }
}
BENCHMARK(BM_FresnelC);

void BM_SlitDensityExact(benchmark::State& state) {
    const slit::SlitEvolutionParams sp(1.0, 1.0);
    double y = 0.0;
    for (auto _ : state) {
        y += 0.01;
        if (y > 30.0) y = 0.0;
        benchmark::DoNotOptimize(slit::slit_density_exact(y, sp));
    }
}
BENCHMARK(BM_SlitDensityExact);

void BM_Propagate1D(benchmark::State& state) {
    const auto g = grid::symmetric_grid(40.0, static_cast<int>(state.range(0)));
    const auto psi = grid::discretize(gauss::GaussianMode{0.0, 1.0}, g);
    for (auto _ : state) benchmark::DoNotOptimize(grid::propagate_free(psi, 1.0));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Propagate1D)->Arg(1024)->Arg(16384)->Arg(262144)->Complexity();

void BM_Propagate2D(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto g = grid::symmetric_grid(25.0, n);
    const auto psi = grid::discretize(gauss::PopperState(8.0, 1.0), g, g);
    grid::PropagationOptions opts;
    opts.boundary_mass_tol = 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(grid::propagate_free(psi, 2.0, {}, opts));
}
BENCHMARK(BM_Propagate2D)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_RunPopper(benchmark::State& state) {
    scenario::ScenarioConfig cfg;
    cfg.t = 2.0;
    cfg.grid.points1 = cfg.grid.points2 = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(scenario::run_popper(cfg));
}
BENCHMARK(BM_RunPopper)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
