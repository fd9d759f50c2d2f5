#include <benchmark/benchmark.h>

#include <vector>

#include "mixsmooth/gallery.hpp"
#include "mixsmooth/mixed_jet.hpp"

using namespace mixsmooth;

namespace {

const char* const kFamilies[] = {"bump", "gauss", "poly", "sinexp", "loglog"};

// Full mixed jet of a gallery function; args: family index, dimension.
void BM_JetEvaluator(benchmark::State& state) {
  const auto g = gallery(kFamilies[state.range(0)], static_cast<int>(state.range(1)));
  JetEvaluator ev(g.expr, IndexSubset::full(g.dim));
  std::vector<double> x(static_cast<std::size_t>(g.dim), 0.3);
  for (auto _ : state) {
    x[0] += 1e-9;
    benchmark::DoNotOptimize(ev.evaluate(x).data());
  }
  state.SetLabel(g.id);
}
BENCHMARK(BM_JetEvaluator)->ArgsProduct({{0, 1, 2, 3, 4}, {2, 4}});

void BM_EvalJetTree(benchmark::State& state) {
  const auto g = gallery("loglog", static_cast<int>(state.range(0)));
  const auto full = IndexSubset::full(g.dim);
  std::vector<double> x(static_cast<std::size_t>(g.dim), 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(eval_jet(g.expr, x, full).top());
}
BENCHMARK(BM_EvalJetTree)->Arg(2)->Arg(4);

void BM_EvalReal(benchmark::State& state) {
  const auto g = gallery("loglog", 4);
  std::vector<double> x(4, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(eval_real(g.expr, x));
}
BENCHMARK(BM_EvalReal);

}  // namespace
