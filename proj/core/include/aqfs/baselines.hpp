#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "aqfs/basis.hpp"
#include "aqfs/qrsolve.hpp"

namespace aqfs {

enum class MarginalMethod { QSIS, QaSIS };

std::string_view to_string(MarginalMethod method);

/// One-shot marginal ranking of all covariates.
struct MarginalRanking {
  MarginalMethod method = MarginalMethod::QSIS;
  std::vector<double> scores;
  /// Top min(K_n, p) covariates, descending score, ties by smaller index.
  std::vector<int> retained;
  std::vector<std::string> warnings;
};

/// Indices of the `keep` largest scores in descending order (ties by index).
std::vector<int> top_indices(const std::vector<double>& scores, int keep);

/// Unconditional sign-indicator screening (the empty-model score).
MarginalRanking qsis(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::MatrixXd>& x,
                     double tau, int keep, const SolverOptions& options = {}, int threads = 1);

/// Quantile-adaptive screening: for each covariate fit the marginal spline
/// quantile regression (intercept + one spline block) and score it by
/// n^-1 sum_i (Qhat_k(x_ik) - Qhat(y))^2, the squared empirical norm of the
/// fitted marginal quantile centred at the unconditional sample tau-quantile.
/// Columns must be in [0, 1]. A failed marginal fit scores 0 and is reported
/// in `warnings`.
MarginalRanking qasis(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::MatrixXd>& x,
                      double tau, int keep, const SplineBasis& basis, const SolverOptions& options = {},
                      int threads = 1);

}  // namespace aqfs
