#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "aqfs/rng.hpp"
#include "aqfs/score.hpp"
#include "aqfs/screening.hpp"

namespace {

struct Toy {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

Toy toy(int n, int p, std::uint64_t seed) {
  aqfs::Rng rng(seed);
  Toy t{Eigen::MatrixXd(n, p), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < p; ++k) t.x(i, k) = rng.uniform();
    t.y[i] = 3.0 * t.x(i, 1) + std::sin(2.0 * M_PI * t.x(i, std::min(p - 1, 3))) + 0.3 * rng.normal();
  }
  return t;
}

}  // namespace

TEST_CASE("default step counts") {
  CHECK(aqfs::default_steps(300) == 52);
  CHECK(aqfs::default_steps(58) == 14);
  CHECK(aqfs::default_steps(3) == 2);
  CHECK_THROWS_AS(aqfs::default_steps(2), aqfs::Error);
  CHECK(aqfs::max_steps(300, 3000, 3) == 98);
  CHECK(aqfs::max_steps(300, 10, 3) == 10);
  CHECK(aqfs::default_steps(300, 3000, 3) == 52);
  CHECK(aqfs::default_steps(300, 7, 3) == 7);
  CHECK(aqfs::default_steps(20, 100, 3) == 5);
}

TEST_CASE("single covariate path stops after one step") {
  Toy t = toy(40, 1, 4);
  const aqfs::ScreeningPath path = aqfs::run_path(t.x, t.y, 0.5, 1, aqfs::SplineBasis::make(3, 3));
  REQUIRE(path.steps.size() == 1);
  CHECK(path.steps[0].covariate == 0);
  CHECK(path.steps[0].score >= 0.0);
  CHECK(path.steps[0].objective <= path.base_objective);
}

TEST_CASE("path structure") {
  Toy t = toy(120, 15, 8);
  const aqfs::SplineBasis basis = aqfs::SplineBasis::make(3, 3);
  const aqfs::ScreeningPath path = aqfs::run_path(t.x, t.y, 0.5, 10, basis);
  REQUIRE(path.steps.size() == 10);
  CHECK(path.qn == 3);
  CHECK(path.degree == 3);
  CHECK(path.n == 120);
  CHECK(path.p == 15);
  std::set<int> seen;
  double previous = path.base_objective;
  for (const aqfs::PathStep& s : path.steps) {
    CHECK(seen.insert(s.covariate).second);
    CHECK(s.objective <= previous + 1e-8 * std::max(1.0, previous));
    previous = s.objective;
  }
  const std::vector<int> model = path.model();
  CHECK(model.size() == 10);
  CHECK(path.model(3) == std::vector<int>(model.begin(), model.begin() + 3));
  CHECK(std::set<int>(model.begin(), model.begin() + 2) == std::set<int>{1, 3});
}

TEST_CASE("first step is the QSIS argmax") {
  Toy t = toy(90, 12, 21);
  for (double tau : {0.25, 0.5, 0.8}) {
    const aqfs::ScoreTable q = aqfs::qsis_scores(t.y, t.x, tau);
    const aqfs::ScreeningPath path = aqfs::run_path(t.x, t.y, tau, 1, aqfs::SplineBasis::make(3, 3));
    CHECK(path.steps[0].covariate == *q.argmax);
    CHECK(path.steps[0].score == q.scores[static_cast<std::size_t>(*q.argmax)]);
  }
}

TEST_CASE("requested steps beyond the cap are clipped with a warning") {
  Toy t = toy(30, 40, 2);
  const aqfs::ScreeningPath path = aqfs::run_path(t.x, t.y, 0.5, 20, aqfs::SplineBasis::make(3, 3));
  CHECK(path.requested_steps == aqfs::max_steps(30, 40, 3));
  CHECK(path.steps.size() == static_cast<std::size_t>(path.requested_steps));
  CHECK_FALSE(path.warnings.empty());
}

TEST_CASE("constant columns are never selected") {
  Toy t = toy(60, 6, 5);
  t.x.col(2).setConstant(0.0);
  const aqfs::ScreeningPath path = aqfs::run_path(t.x, t.y, 0.5, 6, aqfs::SplineBasis::make(3, 3));
  CHECK(path.steps.size() == 5);
  for (const auto& s : path.steps) CHECK(s.covariate != 2);
  CHECK_FALSE(path.warnings.empty());
}

TEST_CASE("early stop threshold and step callback") {
  Toy t = toy(80, 10, 6);
  aqfs::ScreeningOptions options;
  int calls = 0;
  options.on_step = [&](int step, const aqfs::PathStep&) { CHECK(step == ++calls); };
  const aqfs::ScreeningPath full = aqfs::run_path(t.x, t.y, 0.5, 8, aqfs::SplineBasis::make(3, 3), options);
  CHECK(calls == 8);

  options.on_step = nullptr;
  options.stop_below = full.steps[2].score + 1e-15;
  const aqfs::ScreeningPath cut = aqfs::run_path(t.x, t.y, 0.5, 8, aqfs::SplineBasis::make(3, 3), options);
  CHECK(cut.steps.size() < full.steps.size());
  for (std::size_t s = 0; s < cut.steps.size(); ++s) CHECK(cut.steps[s].covariate == full.steps[s].covariate);
}

TEST_CASE("inputs outside the unit interval are rejected") {
  Toy t = toy(30, 3, 1);
  t.x(4, 1) = 1.5;
  CHECK_THROWS_AS(aqfs::run_path(t.x, t.y, 0.5, 2, aqfs::SplineBasis::make(3, 3)), aqfs::DomainError);
}

TEST_CASE("solver failure reports the partial path") {
  Toy t = toy(60, 5, 3);
  aqfs::ScreeningOptions options;
  options.solver.max_iterations = 2;
  try {
    aqfs::run_path(t.x, t.y, 0.5, 3, aqfs::SplineBasis::make(3, 3), options);
    FAIL("expected PathError");
  } catch (const aqfs::PathError& e) {
    CHECK(e.partial().steps.size() < 3);
  }
}
