#include <vector>

#include <benchmark/benchmark.h>

#include "vidiag/gpd.hpp"
#include "vidiag/models.hpp"
#include "vidiag/psis.hpp"
#include "vidiag/vi.hpp"

using namespace vidiag;

namespace {

Eigen::VectorXd heavy_log_ratios(Eigen::Index s) {
  Rng rng = make_rng(1, 0);
  Eigen::VectorXd lr(s);
  // q = N(0, 1) against N(0, 2^2).
  for (Eigen::Index i = 0; i < s; ++i) {
    const double x = standard_normal(rng);
    lr[i] = 0.375 * x * x;
  }
  return lr;
}

void BM_PsisSmooth(benchmark::State& state) {
  const Eigen::VectorXd lr = heavy_log_ratios(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(psis_smooth(lr));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PsisSmooth)->RangeMultiplier(10)->Range(1000, 100000);

void BM_GpdFit(benchmark::State& state) {
  Rng rng = make_rng(2, 0);
  std::vector<double> y(static_cast<std::size_t>(state.range(0)));
  for (auto& v : y) v = gpd_sample(rng, GpdParams{0.0, 1.0, 0.5});
  for (auto _ : state) benchmark::DoNotOptimize(fit_gpd_exceedances(y));
}
BENCHMARK(BM_GpdFit)->RangeMultiplier(4)->Range(64, 4096);

void BM_ElboGradientSchools(benchmark::State& state) {
  const auto model = eight_schools(Parametrization::Centered);
  const MeanFieldGaussian q = MeanFieldGaussian::standard(model->dim());
  Rng rng = make_rng(3, 0);
  for (auto _ : state) benchmark::DoNotOptimize(elbo_gradient(q, *model, 1, rng));
}
BENCHMARK(BM_ElboGradientSchools);

void BM_ElboGradientHorseshoe(benchmark::State& state) {
  Rng data = make_rng(4, 0);
  const auto model = regularized_horseshoe_logistic(70, 100, data);
  const MeanFieldGaussian q = MeanFieldGaussian::standard(model->dim());
  Rng rng = make_rng(4, 1);
  for (auto _ : state) benchmark::DoNotOptimize(elbo_gradient(q, *model, 1, rng));
}
BENCHMARK(BM_ElboGradientHorseshoe);

}  // namespace

BENCHMARK_MAIN();
