#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "aqfs/basis.hpp"
#include "aqfs/error.hpp"

namespace aqfs {

/// rho_tau(u) = u * (tau - 1{u < 0}).
inline double check_loss(double u, double tau) { return u * (tau - (u < 0.0 ? 1.0 : 0.0)); }

/// Sum of check losses of y - fitted.
double check_loss_sum(const Eigen::Ref<const Eigen::VectorXd>& y,
                      const Eigen::Ref<const Eigen::VectorXd>& fitted, double tau);

/// Spline design for an additive submodel: an intercept column followed by
/// one block of q_n basis columns per covariate, in insertion order.
class Design {
 public:
  Design(Eigen::Index n, const SplineBasis& basis);

  /// Intercept-only design with n rows.
  static Design intercept_only(Eigen::Index n, const SplineBasis& basis) { return Design(n, basis); }

  /// Builds the design for `covariates` (0-based columns of `x`, every entry in [0, 1]).
  static Design build(const Eigen::Ref<const Eigen::MatrixXd>& x, std::span<const int> covariates,
                      const SplineBasis& basis);

  /// Appends the spline block of one covariate column.
  void add_covariate(int index, const Eigen::Ref<const Eigen::VectorXd>& column);

  const Eigen::MatrixXd& matrix() const { return z_; }
  Eigen::Index rows() const { return z_.rows(); }
  /// N_S = 1 + q_n |S|.
  Eigen::Index cols() const { return z_.cols(); }
  const std::vector<int>& covariates() const { return covariates_; }
  const SplineBasis& basis() const { return basis_; }

  /// Design rows for new observations (raw columns already mapped to [0, 1]).
  Eigen::MatrixXd rows_for(const Eigen::Ref<const Eigen::MatrixXd>& x) const;

 private:
  SplineBasis basis_;
  Eigen::MatrixXd z_;
  std::vector<int> covariates_;
};

struct SolverOptions {
  /// Relative duality-gap tolerance.
  double tol = 1e-8;
  int max_iterations = 200;
  /// Fraction of the maximal feasible step actually taken.
  double step_safeguard = 0.9995;
};

struct QuantileFit {
  double tau = 0.5;
  /// Coefficients, intercept first. Columns dropped for rank deficiency carry 0.
  Eigen::VectorXd theta;
  /// Sum of check losses at theta.
  double objective = 0.0;
  /// Fitted conditional quantiles, one per observation.
  Eigen::VectorXd fitted;
  /// Dual solution a in [0, 1]^n of the LP (a_i = 1 above the fit, 0 below,
  /// fractional at interpolated observations). Exact when the fit is a vertex.
  Eigen::VectorXd dual;
  /// Observations the solution interpolates exactly (zero residual). Set when
  /// the interior-point iterate was purified to an optimal vertex.
  std::vector<bool> interpolated;
  /// Design columns removed because they were linearly dependent on earlier ones.
  std::vector<Eigen::Index> dropped_columns;
  double duality_gap = 0.0;
  int iterations = 0;
};

/// Raised when the interior-point iteration hits its cap; carries the best iterate.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, QuantileFit best) : Error(what), best_(std::move(best)) {}
  const QuantileFit& best() const { return best_; }

 private:
  QuantileFit best_;
};

/// Minimizes sum_i rho_tau(y_i - z_i' theta) over theta.
///
/// Requires rows > cols and tau in (0, 1). Linearly dependent columns are
/// detected with a column-pivoted QR, removed, and listed in the result.
/// After the interior point converges, the rank(z) observations with the
/// smallest absolute residuals are interpolated exactly; that vertex replaces
/// the iterate whenever its objective is no larger.
QuantileFit fit(const Eigen::Ref<const Eigen::MatrixXd>& z, const Eigen::Ref<const Eigen::VectorXd>& y,
                double tau, const SolverOptions& options = {});

inline QuantileFit fit(const Design& design, const Eigen::Ref<const Eigen::VectorXd>& y, double tau,
                       const SolverOptions& options = {}) {
  return fit(design.matrix(), y, tau, options);
}

}  // namespace aqfs
