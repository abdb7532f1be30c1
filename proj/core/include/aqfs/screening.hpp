#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "aqfs/basis.hpp"
#include "aqfs/error.hpp"
#include "aqfs/qrsolve.hpp"

namespace aqfs {

/// floor(n / ln n), without any cap. Requires n >= 3.
int default_steps(int n);

/// Largest admissible path length: at most p covariates and
/// floor((n - 1) / q_n) - 1 so that every refit keeps n > N_S.
int max_steps(int n, int p, int qn);

/// default_steps(n) clipped to max_steps(n, p, qn).
int default_steps(int n, int p, int qn);

struct PathStep {
  /// 0-based covariate index added at this step.
  int covariate = -1;
  /// Winning conditional importance score.
  double score = 0.0;
  /// Check-loss objective of the refit on the enlarged model.
  double objective = 0.0;
};

struct ScreeningOptions {
  SolverOptions solver;
  int threads = 1;
  /// Stop early once the winning score drops below this value.
  std::optional<double> stop_below;
  /// Invoked after every completed step with its 1-based step number.
  std::function<void(int, const PathStep&)> on_step;
};

/// The nested models S(1) c S(2) c ... produced by forward screening.
struct ScreeningPath {
  double tau = 0.5;
  int n = 0;
  int p = 0;
  int qn = 0;
  int degree = 0;
  double tol = 0.0;
  /// Number of steps asked for after clipping to max_steps().
  int requested_steps = 0;
  /// Objective of the intercept-only fit.
  double base_objective = 0.0;
  std::vector<PathStep> steps;
  std::vector<std::string> warnings;

  /// Covariates of S(length), in selection order.
  std::vector<int> model(std::size_t length) const;
  std::vector<int> model() const { return model(steps.size()); }
};

/// Raised when a refit fails mid-path; holds the steps completed so far.
class PathError : public Error {
 public:
  PathError(const std::string& what, ScreeningPath partial) : Error(what), partial_(std::move(partial)) {}
  const ScreeningPath& partial() const { return partial_; }

 private:
  ScreeningPath partial_;
};

/// Forward screening: starting from the empty model, repeatedly fit the
/// current additive quantile model, score every remaining covariate on the
/// residual signs, and add the best one, for `steps` steps.
///
/// `x` is n x p with every entry in [0, 1]. Constant columns are never
/// selected. The path ends early when no candidate remains.
ScreeningPath run_path(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                       double tau, int steps, const SplineBasis& basis, const ScreeningOptions& options = {});

}  // namespace aqfs
