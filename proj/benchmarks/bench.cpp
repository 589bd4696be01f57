#include <benchmark/benchmark.h>

#include <random>

#include "herglotz/extract.hpp"
#include "herglotz/retrieve.hpp"
#include "herglotz/specfun.hpp"

using namespace herglotz;

namespace {

HerglotzField random_field(int max_degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  HerglotzField u(BasisSpec::fourier2d(), max_degree);
  for (int k = -max_degree; k <= max_degree; ++k) u.set_fourier(k, Complex(g(rng), g(rng)));
  return u;
}

void BM_BesselJ(benchmark::State& state) {
  const BesselOrder nu = BesselOrder::from_value(static_cast<double>(state.range(0)));
  double r = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_j(nu, r));
    r = r < 10.0 ? r + 0.37 : 0.1;
  }
}
BENCHMARK(BM_BesselJ)->Arg(0)->Arg(4)->Arg(8);

void BM_BesselProductSeries(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(bessel_product_series(3, 5, 0.5, 6.0));
}
BENCHMARK(BM_BesselProductSeries);

void BM_MagnitudeCoeffs(benchmark::State& state) {
  const HerglotzField u = random_field(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(magnitude_coeffs(u));
}
BENCHMARK(BM_MagnitudeCoeffs)->Arg(4)->Arg(8)->Arg(16);

void BM_Extract(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const MagnitudeGrid grid = sample_magnitude(random_field(M, 2), 64, 4 * M + 16);
  for (auto _ : state) benchmark::DoNotOptimize(extract_magnitude_data(grid, M));
}
BENCHMARK(BM_Extract)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_Retrieve2d(benchmark::State& state) {
  const MagnitudeData data = magnitude_coeffs(random_field(static_cast<int>(state.range(0)), 3));
  for (auto _ : state) benchmark::DoNotOptimize(retrieve_2d(data));
}
BENCHMARK(BM_Retrieve2d)->Arg(2)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
