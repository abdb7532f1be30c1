#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aqfs/aqfs.hpp"
#include "oracles.hpp"

namespace {

struct Problem {
  Eigen::MatrixXd z;
  Eigen::VectorXd y;
};

Problem random_problem(aqfs::Rng& rng, int n, int cols) {
  Problem p{Eigen::MatrixXd(n, cols), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    p.z(i, 0) = 1.0;
    for (int c = 1; c < cols; ++c) p.z(i, c) = rng.uniform();
    p.y[i] = p.z.row(i).tail(cols - 1).sum() + rng.normal() * (0.5 + rng.uniform());
  }
  return p;
}

}  // namespace

TEST_CASE("no better point near the solution") {
  aqfs::Rng rng(101);
  for (int rep = 0; rep < 5; ++rep) {
    const Problem p = random_problem(rng, 80, 1 + 3 * (rep % 3 + 1));
    const double tau = rng.uniform(0.1, 0.9);
    const aqfs::QuantileFit f = aqfs::fit(p.z, p.y, tau);
    const double radius = 1e-8 * 1e3;
    for (int k = 0; k < 100; ++k) {
      Eigen::VectorXd delta(f.theta.size());
      for (Eigen::Index j = 0; j < delta.size(); ++j) delta[j] = rng.normal();
      delta *= radius / delta.norm();
      CHECK(oracle::check_loss_sum(p.z, p.y, f.theta + delta, tau) >= f.objective - 1e-9);
    }
  }
}

TEST_CASE("shifting the response shifts only the intercept") {
  aqfs::Rng rng(7);
  for (int rep = 0; rep < 5; ++rep) {
    const Problem p = random_problem(rng, 70, 4);
    const double tau = rng.uniform(0.1, 0.9);
    const double c = rng.uniform(-5.0, 5.0);
    const aqfs::QuantileFit a = aqfs::fit(p.z, p.y, tau);
    const aqfs::QuantileFit b = aqfs::fit(p.z, (p.y.array() + c).matrix(), tau);
    CHECK(b.objective == doctest::Approx(a.objective).epsilon(1e-8));
    CHECK(b.theta[0] - a.theta[0] == doctest::Approx(c).epsilon(1e-6));
    CHECK((b.theta.tail(3) - a.theta.tail(3)).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("richer designs never fit worse") {
  aqfs::Rng rng(33);
  for (int rep = 0; rep < 8; ++rep) {
    const Problem p = random_problem(rng, 100, 10);
    const double tau = rng.uniform(0.05, 0.95);
    double previous = 1e300;
    for (int cols = 1; cols <= 10; cols += 3) {
      const double obj = aqfs::fit(p.z.leftCols(cols), p.y, tau).objective;
      CHECK(obj <= previous + 1e-8 * std::max(1.0, previous));
      previous = obj;
    }
  }
}

TEST_CASE("sign balance at the optimum") {
  aqfs::Rng rng(55);
  for (int rep = 0; rep < 20; ++rep) {
    const int cols = 1 + rep % 7;
    const Problem p = random_problem(rng, 60 + rep, cols);
    const double tau = rng.uniform(0.05, 0.95);
    const aqfs::QuantileFit f = aqfs::fit(p.z, p.y, tau);
    const double eps = 1e-8 * (1.0 + p.y.cwiseAbs().maxCoeff());
    const Eigen::VectorXd r = p.y - f.fitted;
    const double n = static_cast<double>(p.y.size());
    const auto below = (r.array() < -eps).count();
    const auto above = (r.array() > eps).count();
    CHECK(static_cast<double>(below) <= n * tau + 1e-9);
    CHECK(static_cast<double>(above) <= n * (1.0 - tau) + 1e-9);
    CHECK(n - static_cast<double>(below + above) <= cols + 1e-9);
  }
}

TEST_CASE("intercept-only fit sits between neighbouring order statistics") {
  aqfs::Rng rng(8);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 5 + rep;
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = rng.normal();
    const double tau = rng.uniform(0.05, 0.95);
    const double mu = aqfs::fit(Eigen::MatrixXd::Ones(n, 1), y, tau).theta[0];
    std::vector<double> sorted(y.data(), y.data() + n);
    std::sort(sorted.begin(), sorted.end());
    const int k = static_cast<int>(std::ceil(n * tau));
    const double lo = sorted[static_cast<std::size_t>(std::max(1, k) - 1)];
    const double hi = sorted[static_cast<std::size_t>(std::min(n, k + 1) - 1)];
    CHECK(mu >= lo - 1e-8);
    CHECK(mu <= hi + 1e-8);
  }
}

TEST_CASE("sign mean is small at the intercept-only fit") {
  aqfs::Rng rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 50 + 7 * rep;
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = rng.normal();
    const double tau = rng.uniform(0.05, 0.95);
    const aqfs::QuantileFit f = aqfs::fit(Eigen::MatrixXd::Ones(n, 1), y, tau);
    const std::vector<double> psi = aqfs::signs(f, y);
    const double mean = std::accumulate(psi.begin(), psi.end(), 0.0) / n;
    CHECK(std::abs(mean) <= 1.0 / n + 1e-12);
  }
}

TEST_CASE("score bounds and argmax under rescaled signs") {
  aqfs::Rng rng(17);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform() * 150.0);
    const double tau = rng.uniform(0.01, 0.99);
    std::vector<double> psi(static_cast<std::size_t>(n));
    Eigen::MatrixXd x(n, 5);
    for (int i = 0; i < n; ++i) {
      psi[static_cast<std::size_t>(i)] = rng.uniform() < 0.5 ? tau - 1.0 : tau;
      for (int k = 0; k < 5; ++k) x(i, k) = std::floor(rng.uniform() * 30.0);
    }
    const aqfs::ScoreTable t = aqfs::score_sweep(psi, x, std::vector<bool>(5, false));
    const double bound = std::pow(std::max(tau, 1.0 - tau), 2);
    for (double s : t.scores) {
      CHECK(s >= 0.0);
      CHECK(s <= bound);
    }
    std::vector<double> scaled = psi;
    for (double& v : scaled) v *= 3.7;
    CHECK(aqfs::score_sweep(scaled, x, std::vector<bool>(5, false)).argmax == t.argmax);
  }
}

TEST_CASE("paths do not depend on the thread count") {
  const aqfs::SyntheticDataset d = aqfs::gen_example1(150, 300, 4);
  Eigen::MatrixXd xs(d.x.rows(), d.x.cols());
  for (Eigen::Index k = 0; k < d.x.cols(); ++k) {
    const Eigen::VectorXd col = d.x.col(k);
    const auto r = aqfs::rescale(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
    xs.col(k) = Eigen::Map<const Eigen::VectorXd>(r.values.data(), col.size());
  }
  const aqfs::SplineBasis basis = aqfs::SplineBasis::make(2, 2);
  aqfs::ScreeningOptions one, four;
  four.threads = 4;
  const aqfs::ScreeningPath a = aqfs::run_path(xs, d.y, 0.5, 15, basis, one);
  const aqfs::ScreeningPath b = aqfs::run_path(xs, d.y, 0.5, 15, basis, four);
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t s = 0; s < a.steps.size(); ++s) {
    CHECK(a.steps[s].covariate == b.steps[s].covariate);
    CHECK(a.steps[s].score == b.steps[s].score);
    CHECK(a.steps[s].objective == b.steps[s].objective);
  }
  const int e1 = aqfs::select(a, aqfs::CnVariant::QBIC1).ell_hat;
  const int e2 = aqfs::select(a, aqfs::CnVariant::QBIC2).ell_hat;
  const int e3 = aqfs::select(a, aqfs::CnVariant::QBIC3).ell_hat;
  CHECK(e1 <= e2);
  CHECK(e2 <= e3);
}

TEST_CASE("marginal screeners are deterministic") {
  const aqfs::SyntheticDataset d = aqfs::gen_example3(120, 40, 2);
  const aqfs::SplineBasis basis = aqfs::SplineBasis::make(3, 3);
  const auto a = aqfs::qasis(d.y, d.x, 0.5, 10, basis);
  const auto b = aqfs::qasis(d.y, d.x, 0.5, 10, basis, {}, 4);
  CHECK(a.scores == b.scores);
  CHECK(a.retained == b.retained);
  for (double s : a.scores) CHECK(s >= 0.0);
  CHECK(aqfs::qsis(d.y, d.x, 0.5, 10).retained == aqfs::qsis(d.y, d.x, 0.5, 10, {}, 4).retained);
}
