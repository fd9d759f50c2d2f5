#include <benchmark/benchmark.h>

#include <cmath>

#include "mixsmooth/gallery.hpp"
#include "mixsmooth/gnl.hpp"
#include "mixsmooth/quadrature.hpp"

using namespace mixsmooth;

namespace {

void BM_GaussLegendreCached(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(gauss_legendre(static_cast<int>(state.range(0))).nodes.data());
}
BENCHMARK(BM_GaussLegendreCached)->Arg(12)->Arg(64);

// Tensor rule over a k-dimensional face; args: face dimension, cells per axis.
void BM_IntegrateFace(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto sr = sub_rectangle(Rectangle::unit(k), IndexSubset::full(k));
  const Integrand f = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::exp(-s);
  };
  const auto grid = GridSpec::uniform(12, static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(integrate_face(f, sr, grid).value);
}
BENCHMARK(BM_IntegrateFace)->Args({2, 4})->Args({3, 2})->Args({4, 1});

void BM_GnlRhs(benchmark::State& state) {
  const auto g = gallery("sinexp", static_cast<int>(state.range(0)));
  const Rectangle P = Rectangle::cube(g.dim, -0.5, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(gnl_rhs(g.expr, P).rhs);
}
BENCHMARK(BM_GnlRhs)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
