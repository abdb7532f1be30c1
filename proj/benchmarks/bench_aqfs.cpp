#include <benchmark/benchmark.h>

#include "aqfs/aqfs.hpp"

namespace {

std::vector<double> signs_of(int n, double tau, aqfs::Rng& rng) {
  std::vector<double> psi(static_cast<std::size_t>(n));
  for (auto& v : psi) v = rng.uniform() < tau ? tau - 1.0 : tau;
  return psi;
}

Eigen::MatrixXd unit_columns(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    const Eigen::VectorXd col = x.col(k);
    const auto r = aqfs::rescale(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
    out.col(k) = Eigen::Map<const Eigen::VectorXd>(r.values.data(), col.size());
  }
  return out;
}

void BM_ScoreFast(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  aqfs::Rng rng(1);
  const std::vector<double> psi = signs_of(n, 0.5, rng);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (auto& v : x) v = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(aqfs::score_fast(psi, x));
  state.SetComplexityN(n);
}
BENCHMARK(BM_ScoreFast)->RangeMultiplier(4)->Range(64, 16384)->Complexity(benchmark::oNLogN);

void BM_Sweep(benchmark::State& state) {
  const aqfs::SyntheticDataset d = aqfs::gen_example1(300, 3000, 1);
  const Eigen::MatrixXd x = unit_columns(d.x);
  const aqfs::SortedColumns columns(x);
  aqfs::Rng rng(2);
  const std::vector<double> psi = signs_of(300, 0.5, rng);
  const std::vector<bool> excluded(3000, false);
  for (auto _ : state) benchmark::DoNotOptimize(aqfs::score_sweep(psi, columns, excluded));
}
BENCHMARK(BM_Sweep)->Unit(benchmark::kMillisecond);

void BM_Fit(benchmark::State& state) {
  const int covariates = static_cast<int>(state.range(0));
  const aqfs::SyntheticDataset d = aqfs::gen_example1(300, 60, 3);
  const Eigen::MatrixXd x = unit_columns(d.x);
  std::vector<int> chosen;
  for (int k = 0; k < covariates; ++k) chosen.push_back(k);
  const aqfs::Design design = aqfs::Design::build(x, chosen, aqfs::SplineBasis::make(3, 3));
  for (auto _ : state) benchmark::DoNotOptimize(aqfs::fit(design, d.y, 0.5).objective);
  state.counters["N_S"] = static_cast<double>(design.cols());
}
BENCHMARK(BM_Fit)->Arg(0)->Arg(4)->Arg(16)->Arg(52)->Unit(benchmark::kMillisecond);

void BM_Path(benchmark::State& state) {
  const aqfs::SyntheticDataset d = aqfs::gen_example1(300, 3000, 4);
  const Eigen::MatrixXd x = unit_columns(d.x);
  const aqfs::SplineBasis basis = aqfs::SplineBasis::make(3, 3);
  aqfs::ScreeningOptions options;
  options.threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const aqfs::ScreeningPath path = aqfs::run_path(x, d.y, 0.5, 52, basis, options);
    benchmark::DoNotOptimize(aqfs::select(path, aqfs::CnVariant::QBIC1).ell_hat);
  }
}
BENCHMARK(BM_Path)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
