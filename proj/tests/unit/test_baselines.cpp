#include <doctest.h>

#include <cmath>
#include <set>

#include "aqfs/baselines.hpp"
#include "aqfs/rng.hpp"
#include "aqfs/score.hpp"
#include "aqfs/screening.hpp"

namespace {

struct Data {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

Data sample(int n, int p, std::uint64_t seed) {
  aqfs::Rng rng(seed);
  Data d{Eigen::MatrixXd(n, p), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < p; ++k) d.x(i, k) = rng.uniform();
    d.y[i] = 2.0 * d.x(i, 0) * d.x(i, 0) + 1.5 * d.x(i, 2) + 0.3 * rng.normal();
  }
  return d;
}

}  // namespace

TEST_CASE("top indices") {
  const std::vector<double> s{0.1, 0.5, 0.5, 0.2, 0.9};
  CHECK(aqfs::top_indices(s, 3) == std::vector<int>{4, 1, 2});
  CHECK(aqfs::top_indices(s, 10) == std::vector<int>{4, 1, 2, 3, 0});
  CHECK(aqfs::top_indices(s, 0).empty());
}

TEST_CASE("QSIS ranking") {
  const Data d = sample(100, 8, 4);
  const aqfs::MarginalRanking r = aqfs::qsis(d.y, d.x, 0.5, 3);
  CHECK(r.method == aqfs::MarginalMethod::QSIS);
  CHECK(r.retained.size() == 3);
  CHECK(r.scores.size() == 8);
  const aqfs::ScreeningPath path = aqfs::run_path(d.x, d.y, 0.5, 1, aqfs::SplineBasis::make(3, 3));
  CHECK(r.retained[0] == path.steps[0].covariate);
  CHECK(aqfs::qsis(d.y, d.x, 0.5, 50).retained.size() == 8);
}

TEST_CASE("QSIS is unchanged by monotone covariate transforms") {
  const Data d = sample(90, 6, 12);
  Eigen::MatrixXd t = d.x;
  t.col(0) = d.x.col(0).array().cube();
  t.col(3) = d.x.col(3).array().sqrt();
  const aqfs::MarginalRanking a = aqfs::qsis(d.y, d.x, 0.3, 6);
  const aqfs::MarginalRanking b = aqfs::qsis(d.y, t, 0.3, 6);
  CHECK(a.retained == b.retained);
  for (std::size_t k = 0; k < 6; ++k) CHECK(std::abs(a.scores[k] - b.scores[k]) <= 1e-15);
}

TEST_CASE("QaSIS ranking") {
  const Data d = sample(150, 7, 9);
  const aqfs::SplineBasis basis = aqfs::SplineBasis::make(3, 3);
  Eigen::MatrixXd x = d.x;
  x.col(5).setConstant(0.5);
  const aqfs::MarginalRanking r = aqfs::qasis(d.y, x, 0.5, 2, basis);
  CHECK(r.method == aqfs::MarginalMethod::QaSIS);
  CHECK(r.retained.size() == 2);
  CHECK(std::set<int>(r.retained.begin(), r.retained.end()) == std::set<int>{0, 2});
  for (double s : r.scores) CHECK(s >= 0.0);
  CHECK(r.scores[5] == 0.0);
  CHECK(aqfs::qasis(d.y, x, 0.5, 2, basis).scores == r.scores);
  CHECK(aqfs::qasis(d.y, x, 0.5, 2, basis, {}, 3).scores == r.scores);
}

TEST_CASE("QaSIS on one covariate") {
  const Data d = sample(60, 1, 2);
  CHECK(aqfs::qasis(d.y, d.x, 0.5, 5, aqfs::SplineBasis::make(3, 3)).retained == std::vector<int>{0});
}
