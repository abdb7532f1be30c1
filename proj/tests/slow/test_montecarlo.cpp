#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "aqfs/aqfs.hpp"
#include "aqfs/cli/commands.hpp"

namespace {

constexpr std::uint64_t kMaster = 20240101;
constexpr int kSeeds = 50;

struct Scaled {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

Scaled scaled(int example, int n, int p, int r) {
  const aqfs::SyntheticDataset d = aqfs::generate(example, n, p, aqfs::derive_seed(kMaster, static_cast<std::uint64_t>(r)));
  return {aqfs::cli::rescale_columns(d.x), d.y};
}

bool contains(const std::vector<int>& set, const std::vector<int>& wanted) {
  const std::set<int> s(set.begin(), set.end());
  return std::all_of(wanted.begin(), wanted.end(), [&](int k) { return s.contains(k); });
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_CASE("empty-model argmax is a signal covariate in example 1") {
  const std::vector<int> truth = aqfs::truth_set(1, 0.5);
  int hits = 0;
  for (int r = 0; r < kSeeds; ++r) {
    const Scaled d = scaled(1, 300, 3000, r);
    const aqfs::ScoreTable t = aqfs::qsis_scores(d.y, d.x, 0.5);
    hits += std::find(truth.begin(), truth.end(), *t.argmax) != truth.end();
  }
  MESSAGE("argmax in truth: " << hits << "/" << kSeeds);
  CHECK(hits >= 0.95 * kSeeds);
}

TEST_CASE("QSIS misses the heteroscedastic covariate at tau = 0.3") {
  int missed = 0;
  for (int r = 0; r < kSeeds; ++r) {
    const Scaled d = scaled(1, 300, 3000, r);
    const aqfs::MarginalRanking m = aqfs::qsis(d.y, d.x, 0.3, aqfs::default_steps(300));
    missed += std::find(m.retained.begin(), m.retained.end(), 0) == m.retained.end();
  }
  MESSAGE("X1 outside the QSIS top 52: " << missed << "/" << kSeeds);
  CHECK(missed >= 0.8 * kSeeds);
}

TEST_CASE("four forward steps find the example 1 median signal") {
  const std::vector<int> truth = aqfs::truth_set(1, 0.5);
  const aqfs::SplineBasis basis = aqfs::SplineBasis::make(3, 3);
  int hits = 0;
  for (int r = 0; r < kSeeds; ++r) {
    const Scaled d = scaled(1, 300, 3000, r);
    hits += contains(aqfs::run_path(d.x, d.y, 0.5, 4, basis).model(), truth);
  }
  MESSAGE("S(4) covers truth: " << hits << "/" << kSeeds);
  CHECK(hits >= 48);
}

TEST_CASE("nine forward steps usually cover example 2 at tau = 0.7") {
  const std::vector<int> truth = aqfs::truth_set(2, 0.7);
  const aqfs::SplineBasis basis = aqfs::SplineBasis::make(3, 3);
  int hits = 0;
  for (int r = 0; r < kSeeds; ++r) {
    const Scaled d = scaled(2, 300, 3000, r);
    hits += contains(aqfs::run_path(d.x, d.y, 0.7, 9, basis).model(), truth);
  }
  MESSAGE("S(9) covers truth: " << hits << "/" << kSeeds);
  CHECK(hits >= 0.5 * kSeeds);
}

TEST_CASE("QaSIS separates noise from signal") {
  const aqfs::SplineBasis basis = aqfs::SplineBasis::make(3, 3);
  std::vector<double> null_scores, active_scores;
  for (int r = 0; r < 200; ++r) {
    aqfs::Rng rng(aqfs::derive_seed(kMaster, 1000 + static_cast<std::uint64_t>(r)));
    Eigen::MatrixXd x(300, 1);
    Eigen::VectorXd y(300);
    for (int i = 0; i < 300; ++i) {
      x(i, 0) = rng.uniform();
      y[i] = rng.normal();
    }
    null_scores.push_back(aqfs::qasis(y, x, 0.5, 1, basis).scores[0]);
  }
  for (int r = 0; r < kSeeds; ++r) {
    const Scaled d = scaled(2, 300, 30, r);
    active_scores.push_back(aqfs::qasis(d.y, d.x.col(5), 0.5, 1, basis).scores[0]);
  }
  MESSAGE("median null " << median(null_scores) << ", median active " << median(active_scores));
  CHECK(median(active_scores) >= 5.0 * median(null_scores));
}

TEST_CASE("QaSIS retention of the sine covariate in example 2") {
  const aqfs::SplineBasis basis = aqfs::SplineBasis::make(3, 3);
  int kept = 0;
  for (int r = 0; r < kSeeds; ++r) {
    const Scaled d = scaled(2, 300, 3000, r);
    const aqfs::MarginalRanking m = aqfs::qasis(d.y, d.x, 0.5, aqfs::default_steps(300), basis);
    kept += std::find(m.retained.begin(), m.retained.end(), 24) != m.retained.end();
  }
  const double rate = static_cast<double>(kept) / kSeeds;
  MESSAGE("X25 retention " << rate);
  CHECK(std::abs(rate - 0.42) <= 0.20);
}

TEST_CASE("oracle prediction beats the intercept and every selected model") {
  aqfs::StudyConfig config;
  config.example_id = 1;
  config.taus = {0.5};
  config.replications = 10;
  config.p = 1000;
  config.seed = kMaster;
  config.run_qsis = false;
  config.run_qasis = false;
  const aqfs::SimulationReport report = aqfs::run_study(config);
  const aqfs::SplineBasis basis = aqfs::SplineBasis::make(3, 3);
  for (const aqfs::ReplicationResult& row : report.taus[0].rows) {
    REQUIRE(row.failure.empty());
    const double oracle = *row.methods[6]->qpe;
    for (std::size_t m = 3; m < 6; ++m) CHECK(oracle <= *row.methods[m]->qpe + 0.05);
  }
  // Population intercept-only loss at the median, by a large generator draw.
  const aqfs::ExampleModel model = aqfs::make_model(1, 30, 0);
  aqfs::Rng big_rng(aqfs::derive_seed(kMaster, 0xB16));
  const std::vector<int> cols = aqfs::structural_columns(1);
  const aqfs::Sample big = aqfs::draw(model, 200000, big_rng, cols);
  std::vector<double> ys(big.y.data(), big.y.data() + big.y.size());
  const double med = median(ys);
  double population = 0.0;
  for (double v : ys) population += std::abs(v - med) / 2.0;
  population /= static_cast<double>(ys.size());

  for (int r = 0; r < 5; ++r) {
    const aqfs::SyntheticDataset d = aqfs::gen_example1(300, 30, aqfs::derive_seed(kMaster, static_cast<std::uint64_t>(r)));
    const double null = aqfs::qpe({}, d, 0.5, basis, 5000, 3);
    const double oracle = aqfs::qpe(aqfs::truth_set(1, 0.5), d, 0.5, basis, 5000, 3);
    CHECK(null >= oracle);
    CHECK(null == doctest::Approx(population).epsilon(0.08));
  }
}
