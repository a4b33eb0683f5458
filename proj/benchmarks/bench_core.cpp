#include <benchmark/benchmark.h>

#include "rcbind/dae.hpp"
#include "rcbind/matrix.hpp"
#include "rcbind/rng.hpp"

using namespace rcbind;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(r, c);
    for (double& v : m.data) v = rng.uniform(-1.0, 1.0);
    return m;
}

void BM_Matmul(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix a = random_matrix(n, n, 1);
    const Matrix b = random_matrix(n, n, 2);
    for (auto _ : state) {
        Matrix c = matmul(a, b);
        benchmark::DoNotOptimize(c.data.data());
    }
    state.SetItemsProcessed(state.iterations() * n * n * n);
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(128)->Arg(256);

void BM_MatmulNT(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix a = random_matrix(n, n, 3);
    const Matrix b = random_matrix(n, n, 4);
    for (auto _ : state) {
        Matrix c = matmul_nt(a, b);
        benchmark::DoNotOptimize(c.data.data());
    }
    state.SetItemsProcessed(state.iterations() * n * n * n);
}
BENCHMARK(BM_MatmulNT)->Arg(64)->Arg(128)->Arg(256);

void BM_ForwardBatch(benchmark::State& state) {
    const int hidden = static_cast<int>(state.range(0));
    Rng rng(5);
    const DaeModel model = init_model(784, hidden, Activation::relu, rng);
    Matrix batch(100, 784);
    for (double& v : batch.data) v = rng.below(2) ? 1.0 : 0.0;
    for (auto _ : state) {
        Matrix mu = decode_batch(model, encode_batch(model, batch));
        benchmark::DoNotOptimize(mu.data.data());
    }
}
BENCHMARK(BM_ForwardBatch)->Arg(100)->Arg(500);

void BM_Backward(benchmark::State& state) {
    const int hidden = static_cast<int>(state.range(0));
    Rng rng(6);
    const DaeModel model = init_model(784, hidden, Activation::relu, rng);
    Matrix batch(100, 784), target(100, 784);
    for (double& v : batch.data) v = rng.below(2) ? 1.0 : 0.0;
    for (double& v : target.data) v = rng.below(2) ? 1.0 : 0.0;
    for (auto _ : state) {
        Gradients g = backward(model, batch, target);
        benchmark::DoNotOptimize(g.w1.data.data());
    }
}
BENCHMARK(BM_Backward)->Arg(100)->Arg(500);

void BM_SaltPepper(benchmark::State& state) {
    Rng rng(7);
    std::vector<double> image(784);
    for (double& v : image) v = rng.below(2) ? 1.0 : 0.0;
    for (auto _ : state) {
        auto out = salt_pepper(image, 0.4, rng);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_SaltPepper);

}  // namespace

BENCHMARK_MAIN();
