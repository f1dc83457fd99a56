#include <benchmark/benchmark.h>

#include <vector>

#include "calaudit/calibration.hpp"
#include "calaudit/calibrator.hpp"
#include "calaudit/discrimination.hpp"
#include "calaudit/rng.hpp"
#include "calaudit/stats.hpp"
#include "calaudit/synthetic.hpp"

namespace {

struct Data {
  std::vector<double> s;
  std::vector<std::uint8_t> y;
};

Data make_data(std::size_t n) {
  calaudit::Rng rng(1);
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    d.s.push_back(rng.uniform());
    d.y.push_back(rng.uniform() < d.s.back() ? 1 : 0);
  }
  return d;
}

void BM_RocAuc(benchmark::State& state) {
  const Data d = make_data(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(calaudit::roc_auc(d.s, d.y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RocAuc)->Arg(2000)->Arg(20000);

void BM_PrAuc(benchmark::State& state) {
  const Data d = make_data(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(calaudit::pr_auc(d.s, d.y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PrAuc)->Arg(20000);

void BM_Ece(benchmark::State& state) {
  const Data d = make_data(state.range(0));
  for (auto _ : state) {
    const auto b = calaudit::bin_scores(d.s, calaudit::BinningScheme::kEqualWidth, 15);
    benchmark::DoNotOptimize(calaudit::ece(d.s, d.y, b));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Ece)->Arg(2000)->Arg(20000);

void BM_AdaEce(benchmark::State& state) {
  const Data d = make_data(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(calaudit::ada_ece(d.s, d.y, 15));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AdaEce)->Arg(20000);

void BM_FitPlatt(benchmark::State& state) {
  const Data d = make_data(state.range(0));
  const auto llr = calaudit::to_llr(d.s);
  for (auto _ : state) benchmark::DoNotOptimize(calaudit::fit_platt(llr, d.y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitPlatt)->Arg(20000);

void BM_WilcoxonExact(benchmark::State& state) {
  calaudit::Rng rng(2);
  std::vector<double> x(state.range(0)), y(state.range(0));
  for (auto& v : x) v = rng.uniform();
  for (auto& v : y) v = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(calaudit::wilcoxon_signed_rank(x, y));
}
BENCHMARK(BM_WilcoxonExact)->Arg(25)->Arg(100);

void BM_IncompleteBeta(benchmark::State& state) {
  const double shape = static_cast<double>(state.range(0)) / 2.0;
  double x = 0.0;
  for (auto _ : state) {
    x += 0.000123;
    if (x >= 1.0) x -= 1.0;
    benchmark::DoNotOptimize(calaudit::regularized_incomplete_beta(x, shape, shape));
  }
}
BENCHMARK(BM_IncompleteBeta)->Arg(3)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
