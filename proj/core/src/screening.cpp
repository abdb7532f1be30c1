#include "aqfs/screening.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aqfs/score.hpp"

namespace aqfs {

int default_steps(int n) {
  if (n < 3) throw ConfigError("need at least 3 observations to size the screening path");
  return static_cast<int>(std::floor(static_cast<double>(n) / std::log(static_cast<double>(n))));
}

int max_steps(int n, int p, int qn) { return std::max(0, std::min(p, (n - 1) / qn - 1)); }

int default_steps(int n, int p, int qn) { return std::min(default_steps(n), max_steps(n, p, qn)); }

std::vector<int> ScreeningPath::model(std::size_t length) const {
  length = std::min(length, steps.size());
  std::vector<int> out;
  out.reserve(length);
  for (std::size_t i = 0; i < length; ++i) out.push_back(steps[i].covariate);
  return out;
}

ScreeningPath run_path(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                       double tau, int steps, const SplineBasis& basis, const ScreeningOptions& options) {
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("tau must lie in (0, 1)");
  if (x.rows() != y.size()) throw DomainError("covariate rows and response length differ");
  if (x.cols() < 1) throw DomainError("no covariates");
  if (steps < 1) throw ConfigError("number of screening steps must be positive");
  if ((x.array() < 0.0).any() || (x.array() > 1.0).any() || !x.allFinite()) {
    throw DomainError("covariates must be rescaled into [0, 1] before screening");
  }

  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());

  ScreeningPath path;
  path.tau = tau;
  path.n = n;
  path.p = p;
  path.qn = basis.size();
  path.degree = basis.degree();
  path.tol = options.solver.tol;

  const int cap = max_steps(n, p, basis.size());
  if (cap < 1) throw ConfigError("sample too small for even one screening step at this q_n");
  if (steps > cap) {
    path.warnings.push_back("requested " + std::to_string(steps) + " steps, clipped to " + std::to_string(cap));
    steps = cap;
  }
  path.requested_steps = steps;

  const SortedColumns columns(x, options.threads);
  std::vector<bool> excluded(static_cast<std::size_t>(p), false);
  int degenerate = 0;
  for (int k = 0; k < p; ++k) {
    if (columns[static_cast<std::size_t>(k)].constant()) {
      excluded[static_cast<std::size_t>(k)] = true;
      ++degenerate;
    }
  }
  if (degenerate > 0) path.warnings.push_back(std::to_string(degenerate) + " constant covariate(s) excluded");

  Design design = Design::intercept_only(n, basis);
  QuantileFit current;
  try {
    current = fit(design, y, tau, options.solver);
  } catch (const SolverError& e) {
    throw PathError(std::string("intercept-only fit failed: ") + e.what(), std::move(path));
  }
  path.base_objective = current.objective;

  for (int step = 1; step <= steps; ++step) {
    const std::vector<double> psi = signs(current, y);
    const ScoreTable table = score_sweep(psi, columns, excluded, options.threads);
    if (!table.argmax) break;

    const int chosen = *table.argmax;
    const double winning = table.scores[static_cast<std::size_t>(chosen)];
    if (options.stop_below && winning < *options.stop_below) break;

    excluded[static_cast<std::size_t>(chosen)] = true;
    design.add_covariate(chosen, x.col(chosen));
    try {
      current = fit(design, y, tau, options.solver);
    } catch (const SolverError& e) {
      throw PathError("refit failed at step " + std::to_string(step) + " after adding covariate " +
                          std::to_string(chosen + 1) + ": " + e.what(),
                      std::move(path));
    }
    const PathStep record{chosen, winning, current.objective};
    path.steps.push_back(record);
    if (options.on_step) options.on_step(step, record);
  }
  return path;
}

}  // namespace aqfs
