#include <benchmark/benchmark.h>

#include "gltforge/hkverify.hpp"
#include "gltforge/sweep.hpp"

using namespace gltforge;

namespace {

std::vector<ChartPoint> grid(int n) {
  std::vector<ChartPoint> pts;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      ChartPoint c{CVector(1), CVector(1)};
      c.u(0) = Complex{0.5 + 2.0 * a / (n - 1), 0.2};
      c.z(0) = Complex{-0.5 + 1.0 * b / (n - 1), 0.1};
      pts.push_back(c);
    }
  return pts;
}

double lambda_at(const ChartPoint& p) { return sp_check(second_derivs(cubic_harmonic(), p)).lambda; }

void BM_HkSweepSerial(benchmark::State& state) {
  const auto pts = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto out = sweep_serial(pts.size(), [&](std::size_t k) { return lambda_at(pts[k]); });
    benchmark::DoNotOptimize(out);
  }
}

void BM_HkSweepParallel(benchmark::State& state) {
  const auto pts = grid(static_cast<int>(state.range(0)));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    auto out = sweep_parallel(pts.size(), [&](std::size_t k) { return lambda_at(pts[k]); }, threads);
    benchmark::DoNotOptimize(out);
  }
}

}  // namespace

BENCHMARK(BM_HkSweepSerial)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HkSweepParallel)->Args({4, 2})->Args({8, 2})->Args({8, 4})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
