#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "aqfs/qrsolve.hpp"

namespace aqfs {

/// psi_i = tau - 1{y_i < fitted_i}. Every entry is exactly tau or tau - 1.
std::vector<double> signs(const Eigen::Ref<const Eigen::VectorXd>& y,
                          const Eigen::Ref<const Eigen::VectorXd>& fitted, double tau);

/// Signs of a fit. Observations the fit interpolates have zero residual; they
/// get their vertex dual a_i - (1 - tau) in [tau - 1, tau], so that z' psi = 0.
std::vector<double> signs(const QuantileFit& fit, const Eigen::Ref<const Eigen::VectorXd>& y);

/// Conditional importance score
///
///   n^-1 sum_i [ n^-1 sum_j psi_j 1{x_j < x_i} ]^2
///
/// in O(n log n) via sorted prefix sums. Tied x values see only the prefix
/// strictly below their group.
double score_fast(std::span<const double> psi, std::span<const double> x);

/// The same quantity by the literal double loop, O(n^2). Test oracle.
double score_naive(std::span<const double> psi, std::span<const double> x);

/// Pairwise (D1) and triple (D2) U-statistic parts of the score and the
/// reconstruction ((n-1)(n-2)/n^2) [D1/(n-2) + D2], by full enumeration.
/// Requires n >= 3.
struct UStatDecomposition {
  double d1 = 0.0;
  double d2 = 0.0;
  double reconstructed = 0.0;
};
UStatDecomposition ustat_decomposition(std::span<const double> psi, std::span<const double> x);

/// Sort order and tie groups of one covariate column, reusable across
/// every forward step since only the signs change.
class ColumnOrder {
 public:
  explicit ColumnOrder(std::span<const double> x);

  /// Score for this column given the sign vector.
  double score(std::span<const double> psi) const;
  bool constant() const { return group_end_.size() <= 1; }

 private:
  std::vector<int> order_;
  // Exclusive end offsets (into order_) of each run of equal values.
  std::vector<int> group_end_;
};

/// Precomputed orders for all columns of an n x p matrix.
class SortedColumns {
 public:
  SortedColumns(const Eigen::Ref<const Eigen::MatrixXd>& x, int threads = 1);
  std::size_t size() const { return columns_.size(); }
  const ColumnOrder& operator[](std::size_t k) const { return columns_[k]; }

 private:
  std::vector<ColumnOrder> columns_;
};

struct ScoreTable {
  /// Marks covariates that were not scored (already selected or degenerate).
  static constexpr double kExcluded = -std::numeric_limits<double>::infinity();

  std::vector<double> scores;
  /// Smallest index attaining the maximal non-excluded score; empty when
  /// every covariate is excluded.
  std::optional<int> argmax;

  bool excluded(std::size_t k) const { return scores[k] == kExcluded; }
};

/// Scores every covariate k with excluded[k] == false.
ScoreTable score_sweep(std::span<const double> psi, const SortedColumns& columns, const std::vector<bool>& excluded,
                       int threads = 1);
ScoreTable score_sweep(std::span<const double> psi, const Eigen::Ref<const Eigen::MatrixXd>& x,
                       const std::vector<bool>& excluded, int threads = 1);

/// Marginal scores: signs of the intercept-only tau-quantile fit, then a sweep
/// over all covariates.
ScoreTable qsis_scores(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::MatrixXd>& x,
                       double tau, const SolverOptions& options = {}, int threads = 1);

}  // namespace aqfs
