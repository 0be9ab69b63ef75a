// Microbenchmarks for the hot numeric paths: statistical distances, the
// barycenter solver, posterior conditioning and one k-means pass.

#include <benchmark/benchmark.h>

#include <vector>

#include "cmbo/clustering.hpp"
#include "cmbo/distances.hpp"
#include "cmbo/gp.hpp"
#include "cmbo/rng.hpp"
#include "helpers.hpp"

using namespace cmbo;

namespace {

std::vector<GaussianDist> make_gds(std::size_t count, Eigen::Index dim) {
    Rng rng(42);
    std::vector<GaussianDist> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(test_helpers::random_gd(rng, dim, 1.0, 0.5, 4.0));
    }
    return out;
}

void bm_jeffreys(benchmark::State& state) {
    const auto gds = make_gds(2, state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(jeffreys(gds[0], gds[1]));
    }
}
BENCHMARK(bm_jeffreys)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void bm_wasserstein2(benchmark::State& state) {
    const auto gds = make_gds(2, state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(wasserstein2(gds[0], gds[1]));
    }
}
BENCHMARK(bm_wasserstein2)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void bm_barycenter(benchmark::State& state) {
    const auto gds = make_gds(5, state.range(0));
    const Eigen::VectorXd weights = Eigen::VectorXd::Constant(5, 0.2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(wasserstein_barycenter(gds, weights));
    }
}
BENCHMARK(bm_barycenter)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

void bm_kmeans_pass(benchmark::State& state) {
    const auto gds = make_gds(40, 100);
    const DistanceKind kind =
        state.range(0) == 0 ? DistanceKind::Jeffreys : DistanceKind::Wasserstein2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kmeans_gd(gds, 4, kind, 1, 1));
    }
}
BENCHMARK(bm_kmeans_pass)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void bm_posterior(benchmark::State& state) {
    Rng rng(7);
    const Eigen::Index n = state.range(0);
    const Eigen::MatrixXd grid = test_helpers::random_grid(rng, n, 3);
    const Kernel kernel = Kernel::matern32(Eigen::VectorXd::Constant(3, 0.5));
    const GpModel prior = GpModel::from_kernel(grid, kernel, 1e-4);
    Eigen::MatrixXd x(50, 3);
    Eigen::VectorXd y(50);
    for (Eigen::Index i = 0; i < 50; ++i) {
        x.row(i) = grid.row(i);
        y(i) = rng.normal();
    }
    const Dataset data(x, y);
    for (auto _ : state) {
        benchmark::DoNotOptimize(posterior(prior, data));
    }
}
BENCHMARK(bm_posterior)->Arg(150)->Arg(300)->Unit(benchmark::kMillisecond);

void bm_fit_hyperparams(benchmark::State& state) {
    Rng rng(11);
    const Eigen::Index m = state.range(0);
    const Eigen::MatrixXd x = test_helpers::random_grid(rng, m, 3);
    const Eigen::VectorXd y = test_helpers::random_vector(rng, m);
    const Dataset data(x, y);
    const Kernel tmpl = Kernel::product({Kernel::matern32(Eigen::VectorXd::Ones(3)),
                                         Kernel::matern12(Eigen::VectorXd::Ones(3))});
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_hyperparams(tmpl, data, 1e-4));
    }
}
BENCHMARK(bm_fit_hyperparams)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
