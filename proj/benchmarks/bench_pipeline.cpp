#include <benchmark/benchmark.h>

#include "climkit/calibration.hpp"
#include "climkit/econ.hpp"
#include "climkit/scenario.hpp"

#ifndef CLIMKIT_DATA_DIR
#define CLIMKIT_DATA_DIR "data"
#endif

using namespace climkit;

namespace {

OperatorParams params_3sr() {
    OperatorParams p;
    p.rates = {0.0769419, 0.0109353};
    p.m_eq.resize(3);
    p.m_eq << 589, 752, 1289;
    return p;
}

BenchmarkSet pi_bench() {
    return load_benchmark(std::string(CLIMKIT_DATA_DIR) + "/benchmarks/PI/manifest.json");
}

EconConfig econ_cfg(int horizon) {
    EconConfig cfg = dice2016_annual(2015, horizon);
    cfg.climate0 = CycleState{params_3sr().m_eq, 2015};
    cfg.climate0.masses[0] = 851.0;
    cfg.temp0 = TempState{1.25, 0.33, 2015};
    return cfg;
}

}  // namespace

static void BM_PenalizedObjective(benchmark::State& state) {
    BenchmarkSet b = pi_bench();
    const Topology topo = Topology::three_box_serial();
    const Hyperparams hyper = Hyperparams::defaults(topo);
    const OperatorParams p = params_3sr();
    for (auto _ : state) {
        benchmark::DoNotOptimize(penalized_objective(p, topo, b, hyper));
    }
}
BENCHMARK(BM_PenalizedObjective);

static void BM_ExtremeScaleFit(benchmark::State& state) {
    BenchmarkSet b = pi_bench();
    const Topology topo = Topology::three_box_serial();
    const OperatorParams p = params_3sr();
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_extreme_scale(p, topo, b, b.y_mu_plus, 250, 1e-6, 1.0));
    }
}
BENCHMARK(BM_ExtremeScaleFit);

static void BM_PlannerRolloutGradient(benchmark::State& state) {
    const int horizon = static_cast<int>(state.range(0));
    EconConfig cfg = econ_cfg(horizon);
    Emulator emu{build_operator(params_3sr(), Topology::three_box_serial()), std::nullopt};
    std::vector<double> c(horizon), mu(horizon, 0.1);
    for (int t = 0; t < horizon; ++t) c[t] = 60.0 + 0.8 * t;
    std::vector<double> gc, gm;
    for (auto _ : state) {
        benchmark::DoNotOptimize(policy_gradient(cfg, emu, c, mu, &gc, &gm));
    }
    state.SetComplexityN(horizon);
}
BENCHMARK(BM_PlannerRolloutGradient)->Arg(100)->Arg(200)->Arg(400)->Complexity(benchmark::oN);

static void BM_SolveBau(benchmark::State& state) {
    EconConfig cfg = econ_cfg(200);
    Emulator emu{build_operator(params_3sr(), Topology::three_box_serial()), std::nullopt};
    for (auto _ : state) {
        EconTrajectory traj = solve_bau(cfg, emu);
        benchmark::DoNotOptimize(traj.welfare);
    }
}
BENCHMARK(BM_SolveBau)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
