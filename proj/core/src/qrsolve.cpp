#include "aqfs/qrsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>

namespace aqfs {

double check_loss_sum(const Eigen::Ref<const Eigen::VectorXd>& y,
                      const Eigen::Ref<const Eigen::VectorXd>& fitted, double tau) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) total += check_loss(y[i] - fitted[i], tau);
  return total;
}

Design::Design(Eigen::Index n, const SplineBasis& basis) : basis_(basis), z_(Eigen::MatrixXd::Ones(n, 1)) {}

Design Design::build(const Eigen::Ref<const Eigen::MatrixXd>& x, std::span<const int> covariates,
                     const SplineBasis& basis) {
  Design design(x.rows(), basis);
  for (int k : covariates) design.add_covariate(k, x.col(k));
  return design;
}

void Design::add_covariate(int index, const Eigen::Ref<const Eigen::VectorXd>& column) {
  if (column.size() != z_.rows()) throw DomainError("covariate column length does not match design rows");
  const Eigen::Index q = basis_.size();
  const Eigen::Index offset = z_.cols();
  z_.conservativeResize(Eigen::NoChange, offset + q);
  std::vector<double> values(static_cast<std::size_t>(q));
  for (Eigen::Index i = 0; i < z_.rows(); ++i) {
    basis_.evaluate(column[i], values);
    for (Eigen::Index j = 0; j < q; ++j) z_(i, offset + j) = values[static_cast<std::size_t>(j)];
  }
  covariates_.push_back(index);
}

Eigen::MatrixXd Design::rows_for(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
  const Eigen::Index q = basis_.size();
  Eigen::MatrixXd out(x.rows(), cols());
  out.col(0).setOnes();
  std::vector<double> values(static_cast<std::size_t>(q));
  for (std::size_t b = 0; b < covariates_.size(); ++b) {
    const Eigen::Index offset = 1 + q * static_cast<Eigen::Index>(b);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      basis_.evaluate(x(i, covariates_[b]), values);
      for (Eigen::Index j = 0; j < q; ++j) out(i, offset + j) = values[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

namespace {

struct InteriorPointResult {
  Eigen::VectorXd beta;
  Eigen::VectorXd dual;
  double gap = std::numeric_limits<double>::infinity();
  double objective = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

// Largest step in [0, inf) keeping v + step * dv >= 0.
double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double step = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv[i] < 0.0) step = std::min(step, -v[i] / dv[i]);
  }
  return step;
}

class NormalEquations {
 public:
  explicit NormalEquations(const Eigen::MatrixXd& z) : z_(z), scaled_(z.rows(), z.cols()), m_(z.cols(), z.cols()) {}

  void factor(const Eigen::VectorXd& weights) {
    scaled_ = weights.cwiseSqrt().asDiagonal() * z_;
    m_.setZero();
    m_.selfadjointView<Eigen::Lower>().rankUpdate(scaled_.transpose());
    llt_.compute(m_);
    if (llt_.info() != Eigen::Success) {
      const double ridge = 1e-13 * std::max(1.0, m_.diagonal().maxCoeff());
      m_.diagonal().array() += ridge;
      llt_.compute(m_);
      use_ldlt_ = llt_.info() != Eigen::Success;
      if (use_ldlt_) ldlt_.compute(m_);
    } else {
      use_ldlt_ = false;
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    if (use_ldlt_) return ldlt_.solve(rhs);
    return llt_.solve(rhs);
  }

 private:
  const Eigen::MatrixXd& z_;
  Eigen::MatrixXd scaled_;
  Eigen::MatrixXd m_;
  Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt_;
  Eigen::LDLT<Eigen::MatrixXd, Eigen::Lower> ldlt_;
  bool use_ldlt_ = false;
};

// Mehrotra predictor-corrector on the bounded dual of the check-loss LP:
//
//   min -y'a  s.t.  z'a = (1 - tau) z'1,  0 <= a <= 1,
//
// whose equality multipliers are -theta. Starting from a = 1 - tau keeps the
// dual iterate exactly feasible, so y'(a - (1 - tau)) is a valid lower bound
// and objective(theta) minus that bound is a rigorous duality gap.
InteriorPointResult interior_point(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, double tau,
                                   const SolverOptions& options) {
  const Eigen::Index n = z.rows();
  const double two_n = 2.0 * static_cast<double>(n);

  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 - tau);
  Eigen::VectorXd s = Eigen::VectorXd::Constant(n, tau);
  const Eigen::VectorXd b = z.transpose() * x;
  const Eigen::VectorXd c = -y;

  // Least-squares start for theta, split residual into the two slack sets.
  const Eigen::MatrixXd gram = z.transpose() * z;
  Eigen::VectorXd beta = gram.ldlt().solve(z.transpose() * y);
  Eigen::VectorXd dual = -beta;
  const Eigen::VectorXd resid = y - z * beta;
  const double spread = resid.cwiseAbs().mean();
  const double offset = std::max(0.1 * spread, 1e-3 * (1.0 + y.cwiseAbs().maxCoeff()));
  Eigen::VectorXd zs = (-resid).cwiseMax(0.0).array() + offset;
  Eigen::VectorXd ws = resid.cwiseMax(0.0).array() + offset;

  NormalEquations normal(z);
  InteriorPointResult best;

  auto evaluate = [&](int iteration) {
    const Eigen::VectorXd theta = -dual;
    const double objective = check_loss_sum(y, z * theta, tau);
    const double lower = y.dot((x.array() - (1.0 - tau)).matrix());
    const double gap = std::max(0.0, objective - lower);
    if (gap < best.gap) {
      best.beta = theta;
      best.dual = x;
      best.gap = gap;
      best.objective = objective;
      best.iterations = iteration;
    }
    return gap <= options.tol * std::max(1.0, std::abs(objective));
  };

  for (int iteration = 0; iteration <= options.max_iterations; ++iteration) {
    if (evaluate(iteration)) {
      best.converged = true;
      break;
    }
    if (iteration == options.max_iterations) break;

    const Eigen::VectorXd r_primal = b - z.transpose() * x;
    const Eigen::VectorXd r_dual = c - z * dual - zs + ws;
    const double mu = (x.dot(zs) + s.dot(ws)) / two_n;

    const Eigen::VectorXd zx = zs.cwiseQuotient(x);
    const Eigen::VectorXd ws_s = ws.cwiseQuotient(s);
    const Eigen::VectorXd weights = (zx + ws_s).cwiseInverse();
    normal.factor(weights);

    struct Direction {
      Eigen::VectorXd dx, ds, dy, dz, dw;
    };
    auto direction = [&](const Eigen::VectorXd& r_xz, const Eigen::VectorXd& r_sw) {
      Direction d;
      const Eigen::VectorXd rho = r_dual - r_xz.cwiseQuotient(x) + r_sw.cwiseQuotient(s);
      d.dy = normal.solve(r_primal + z.transpose() * weights.cwiseProduct(rho));
      d.dx = weights.cwiseProduct(z * d.dy - rho);
      d.ds = -d.dx;
      d.dz = (r_xz - zs.cwiseProduct(d.dx)).cwiseQuotient(x);
      d.dw = (r_sw - ws.cwiseProduct(d.ds)).cwiseQuotient(s);
      return d;
    };
    auto step_lengths = [&](const Direction& d) {
      const double primal = std::min(max_step(x, d.dx), max_step(s, d.ds));
      const double dual_step = std::min(max_step(zs, d.dz), max_step(ws, d.dw));
      return std::pair{std::min(1.0, options.step_safeguard * primal), std::min(1.0, options.step_safeguard * dual_step)};
    };

    // Predictor (affine scaling).
    const Direction affine = direction(-x.cwiseProduct(zs), -s.cwiseProduct(ws));
    const auto [ap, ad] = step_lengths(affine);
    const double mu_affine = ((x + ap * affine.dx).dot(zs + ad * affine.dz) +
                              (s + ap * affine.ds).dot(ws + ad * affine.dw)) /
                             two_n;
    const double sigma = std::pow(mu_affine / mu, 3.0);

    // Corrector with centering.
    const Eigen::VectorXd r_xz =
        (Eigen::VectorXd::Constant(n, sigma * mu) - x.cwiseProduct(zs) - affine.dx.cwiseProduct(affine.dz));
    const Eigen::VectorXd r_sw =
        (Eigen::VectorXd::Constant(n, sigma * mu) - s.cwiseProduct(ws) - affine.ds.cwiseProduct(affine.dw));
    const Direction step = direction(r_xz, r_sw);
    const auto [primal_step, dual_step] = step_lengths(step);

    x += primal_step * step.dx;
    s += primal_step * step.ds;
    dual += dual_step * step.dy;
    zs += dual_step * step.dz;
    ws += dual_step * step.dw;
  }
  return best;
}

// Moves a converged iterate onto the optimal vertex it approaches: the m
// observations closest to the fit define a square system whose solution
// interpolates them exactly.
struct Vertex {
  Eigen::VectorXd beta;
  // Zero-residual rows: the basis plus any degenerate extras.
  std::vector<Eigen::Index> rows;
  // Dual a in [0, 1]^n of the vertex: 0/1 off the basis, solved on it.
  Eigen::VectorXd dual;
};

std::optional<Vertex> purify(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, double tau,
                             const Eigen::VectorXd& beta, double objective) {
  const Eigen::Index n = z.rows();
  const Eigen::Index m = z.cols();
  const Eigen::VectorXd resid = (y - z * beta).cwiseAbs();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return resid[a] < resid[b]; });
  order.resize(static_cast<std::size_t>(m));
  std::sort(order.begin(), order.end());

  Eigen::MatrixXd square(m, m);
  Eigen::VectorXd target(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    square.row(r) = z.row(order[static_cast<std::size_t>(r)]);
    target[r] = y[order[static_cast<std::size_t>(r)]];
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(square);
  if (!(lu.rcond() > 1e-12)) return std::nullopt;
  Vertex vertex{lu.solve(target), std::move(order), Eigen::VectorXd()};
  const Eigen::VectorXd fitted = z * vertex.beta;
  const double vertex_objective = check_loss_sum(y, fitted, tau);
  if (!(vertex_objective <= objective + 1e-12 * std::max(1.0, objective))) return std::nullopt;

  // Stationarity z' (a - (1 - tau)) = 0 fixes the duals of the zero-residual
  // rows; degenerate vertices (more such rows than columns) take the minimum-norm solution.
  const double zero = 1e-12 * std::max(1.0, y.cwiseAbs().maxCoeff());
  std::vector<bool> free(static_cast<std::size_t>(n), false);
  for (Eigen::Index row : vertex.rows) free[static_cast<std::size_t>(row)] = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(y[i] - fitted[i]) <= zero) free[static_cast<std::size_t>(i)] = true;
  }
  vertex.dual.resize(n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  std::vector<Eigen::Index> free_rows;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (free[static_cast<std::size_t>(i)]) {
      free_rows.push_back(i);
      continue;
    }
    vertex.dual[i] = y[i] < fitted[i] ? 0.0 : 1.0;
    rhs -= (vertex.dual[i] - (1.0 - tau)) * z.row(i).transpose();
  }
  Eigen::MatrixXd free_t(m, static_cast<Eigen::Index>(free_rows.size()));
  for (std::size_t r = 0; r < free_rows.size(); ++r) free_t.col(static_cast<Eigen::Index>(r)) = z.row(free_rows[r]).transpose();
  const Eigen::VectorXd free_psi = free_t.completeOrthogonalDecomposition().solve(rhs);
  for (std::size_t r = 0; r < free_rows.size(); ++r) {
    vertex.dual[free_rows[r]] = std::clamp(free_psi[static_cast<Eigen::Index>(r)] + 1.0 - tau, 0.0, 1.0);
  }
  vertex.rows = std::move(free_rows);
  return vertex;
}

}  // namespace

QuantileFit fit(const Eigen::Ref<const Eigen::MatrixXd>& z, const Eigen::Ref<const Eigen::VectorXd>& y, double tau,
                const SolverOptions& options) {
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("tau must lie in (0, 1), got " + std::to_string(tau));
  if (z.rows() != y.size()) throw DomainError("design rows and response length differ");
  if (z.cols() < 1) throw DomainError("design has no columns");
  if (z.rows() <= z.cols()) {
    throw DomainError("need more observations (" + std::to_string(z.rows()) + ") than design columns (" +
                      std::to_string(z.cols()) + ")");
  }
  if (!(options.tol > 0.0)) throw DomainError("solver tolerance must be positive");
  if (!z.allFinite() || !y.allFinite()) throw DomainError("design or response contains non-finite values");

  QuantileFit result;
  result.tau = tau;

  // Keep a deterministic maximal independent column set.
  std::vector<Eigen::Index> kept;
  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z);
    qr.setThreshold(1e-10);
    const Eigen::Index rank = qr.rank();
    if (rank < z.cols()) {
      for (Eigen::Index i = 0; i < rank; ++i) kept.push_back(qr.colsPermutation().indices()[i]);
      std::sort(kept.begin(), kept.end());
      for (Eigen::Index j = 0, next = 0; j < z.cols(); ++j) {
        if (next < static_cast<Eigen::Index>(kept.size()) && kept[static_cast<std::size_t>(next)] == j) {
          ++next;
        } else {
          result.dropped_columns.push_back(j);
        }
      }
    }
  }

  Eigen::MatrixXd active;
  if (result.dropped_columns.empty()) {
    active = z;
  } else {
    active.resize(z.rows(), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j) active.col(static_cast<Eigen::Index>(j)) = z.col(kept[j]);
  }

  InteriorPointResult ip = interior_point(active, y, tau, options);
  result.interpolated.assign(static_cast<std::size_t>(z.rows()), false);
  if (ip.converged) {
    if (auto vertex = purify(active, y, tau, ip.beta, ip.objective)) {
      ip.beta = vertex->beta;
      ip.dual = vertex->dual;
      for (Eigen::Index row : vertex->rows) result.interpolated[static_cast<std::size_t>(row)] = true;
    }
  }

  if (result.dropped_columns.empty()) {
    result.theta = ip.beta;
  } else {
    result.theta = Eigen::VectorXd::Zero(z.cols());
    for (std::size_t j = 0; j < kept.size(); ++j) result.theta[kept[j]] = ip.beta[static_cast<Eigen::Index>(j)];
  }

  result.dual = ip.dual;
  result.fitted = z * result.theta;
  result.objective = check_loss_sum(y, result.fitted, tau);
  result.duality_gap = std::max(0.0, ip.gap - (ip.objective - result.objective));
  result.iterations = ip.iterations;
  if (!ip.converged) {
    throw SolverError("interior point did not reach duality gap " + std::to_string(options.tol) + " within " +
                          std::to_string(options.max_iterations) + " iterations (best gap " +
                          std::to_string(ip.gap) + ")",
                      std::move(result));
  }
  return result;
}

}  // namespace aqfs
