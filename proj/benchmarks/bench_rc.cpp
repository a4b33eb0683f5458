#include <benchmark/benchmark.h>

#include "rcbind/datasets.hpp"
#include "rcbind/metrics.hpp"
#include "rcbind/rc.hpp"

using namespace rcbind;

namespace {

struct Fixture {
    DaeModel model;
    BinaryImage image;

    Fixture() {
        Rng rng(11);
        model = init_model(784, 100, Activation::relu, rng);
        DatasetSpec spec{DatasetName::shapes, Split::test_multi, 1, 3};
        image = generate(spec).examples.front().image;
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

void BM_RStep(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    Rng rng(12);
    const Assignment gamma = init_assignment(784, k, rng);
    for (auto _ : state) {
        ClusterStates s = r_step(fixture().model, fixture().image, gamma);
        benchmark::DoNotOptimize(s.mu.data.data());
    }
}
BENCHMARK(BM_RStep)->Arg(3)->Arg(12);

void BM_EStepSoft(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    Rng rng(13);
    const Assignment gamma = init_assignment(784, k, rng);
    const ClusterStates s = r_step(fixture().model, fixture().image, gamma);
    const std::vector<double> pi(k, 1.0 / k);
    for (auto _ : state) {
        Assignment g = e_step_soft(fixture().image, s, pi);
        benchmark::DoNotOptimize(g.gamma.data.data());
    }
}
BENCHMARK(BM_EStepSoft)->Arg(3)->Arg(12);

void BM_FullRun(benchmark::State& state) {
    RcConfig cfg;
    cfg.k = static_cast<int>(state.range(0));
    cfg.max_iters = 15;
    cfg.seed = 14;
    cfg.record_snapshots = false;
    for (auto _ : state) {
        RcTrace trace = run_rc(fixture().model, fixture().image, cfg);
        benchmark::DoNotOptimize(trace.final_iteration);
    }
}
BENCHMARK(BM_FullRun)->Arg(3);

void BM_Ami(benchmark::State& state) {
    Rng rng(15);
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::vector<int> a(n), b(n);
    for (auto& v : a) v = static_cast<int>(rng.below(3));
    for (auto& v : b) v = static_cast<int>(rng.below(3));
    for (auto _ : state) {
        const double v = ami_full(a, b);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_Ami)->Arg(500)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
