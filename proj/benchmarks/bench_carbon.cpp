#include <benchmark/benchmark.h>

#include "climkit/calibration.hpp"
#include "climkit/carbon.hpp"

using namespace climkit;

namespace {

OperatorParams params_4pr() {
    OperatorParams p;
    p.rates = {0.0208104, 0.0025498, 0.0613352};
    p.m_eq.resize(4);
    p.m_eq << 589, 1078, 37220, 387;
    return p;
}

}  // namespace

static void BM_BuildOperator(benchmark::State& state) {
    const OperatorParams p = params_4pr();
    const Topology topo = Topology::four_box_parallel();
    for (auto _ : state) {
        CarbonOperator op = build_operator(p, topo);
        benchmark::DoNotOptimize(op.matrix().data());
    }
}
BENCHMARK(BM_BuildOperator);

static void BM_Step(benchmark::State& state) {
    CarbonOperator op = build_operator(params_4pr(), Topology::four_box_parallel());
    CycleState s{op.params().m_eq, 0};
    const Vector e = Vector::Zero(4);
    for (auto _ : state) {
        s = step(s, op, e);
        benchmark::DoNotOptimize(s.masses.data());
    }
}
BENCHMARK(BM_Step);

static void BM_SimulatePulse(benchmark::State& state) {
    const int horizon = static_cast<int>(state.range(0));
    CarbonOperator op = build_operator(params_4pr(), Topology::four_box_parallel());
    Emulator emu{op, std::nullopt};
    CycleState m0{op.params().m_eq, 0};
    m0.masses[0] += 100.0;
    const Matrix e = Matrix::Zero(horizon, 4);
    for (auto _ : state) {
        MassTrajectory traj = simulate(emu, m0, e);
        benchmark::DoNotOptimize(traj.masses.data());
    }
    state.SetComplexityN(horizon);
}
BENCHMARK(BM_SimulatePulse)->Arg(100)->Arg(250)->Arg(500)->Complexity(benchmark::oN);

static void BM_CapacityRuleSimulate(benchmark::State& state) {
    // the time-dependent variant rebuilds the operator every year
    CarbonOperator op = build_operator(params_4pr(), Topology::four_box_parallel());
    Emulator emu{op, LandCapacityRule{1.0, 3}};
    CycleState m0{op.params().m_eq, 0};
    const int horizon = 250;
    Matrix e = Matrix::Zero(horizon, 4);
    Vector lu = Vector::Constant(horizon, 0.5);
    for (int t = 0; t < horizon; ++t) e(t, 0) = 5.0 + lu[t];
    for (auto _ : state) {
        MassTrajectory traj = simulate(emu, m0, e, lu);
        benchmark::DoNotOptimize(traj.masses.data());
    }
}
BENCHMARK(BM_CapacityRuleSimulate);

BENCHMARK_MAIN();
