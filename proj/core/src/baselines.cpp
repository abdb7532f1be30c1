#include "aqfs/baselines.hpp"

#include <algorithm>
#include <numeric>

#include "aqfs/parallel.hpp"
#include "aqfs/score.hpp"

namespace aqfs {

std::string_view to_string(MarginalMethod method) {
  return method == MarginalMethod::QSIS ? "QSIS" : "QaSIS";
}

std::vector<int> top_indices(const std::vector<double>& scores, int keep) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  const auto count = static_cast<std::size_t>(std::clamp<int>(keep, 0, static_cast<int>(scores.size())));
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(), [&](int a, int b) {
    const double sa = scores[static_cast<std::size_t>(a)];
    const double sb = scores[static_cast<std::size_t>(b)];
    return sa != sb ? sa > sb : a < b;
  });
  order.resize(count);
  return order;
}

MarginalRanking qsis(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::MatrixXd>& x,
                     double tau, int keep, const SolverOptions& options, int threads) {
  MarginalRanking ranking;
  ranking.method = MarginalMethod::QSIS;
  ranking.scores = qsis_scores(y, x, tau, options, threads).scores;
  ranking.retained = top_indices(ranking.scores, keep);
  return ranking;
}

MarginalRanking qasis(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::MatrixXd>& x,
                      double tau, int keep, const SplineBasis& basis, const SolverOptions& options, int threads) {
  if (x.rows() != y.size()) throw DomainError("covariate rows and response length differ");
  const auto p = static_cast<std::size_t>(x.cols());
  MarginalRanking ranking;
  ranking.method = MarginalMethod::QaSIS;
  ranking.scores.assign(p, 0.0);
  std::vector<std::string> failures(p);

  // Reference level: the unconditional sample tau-quantile of y.
  const QuantileFit level = fit(Eigen::MatrixXd::Ones(y.size(), 1), y, tau, options);
  const double baseline = level.theta[0];

  parallel_for(p, threads, [&](std::size_t k) {
    const auto column = x.col(static_cast<Eigen::Index>(k));
    if (column.maxCoeff() == column.minCoeff()) return;
    Design design = Design::intercept_only(x.rows(), basis);
    design.add_covariate(static_cast<int>(k), column);
    try {
      const QuantileFit marginal = fit(design, y, tau, options);
      const Eigen::VectorXd component = marginal.fitted.array() - baseline;
      ranking.scores[k] = component.squaredNorm() / static_cast<double>(x.rows());
    } catch (const Error& e) {
      failures[k] = "QaSIS fit failed for covariate " + std::to_string(k + 1) + ": " + e.what();
    }
  });

  for (auto& failure : failures) {
    if (!failure.empty()) ranking.warnings.push_back(std::move(failure));
  }
  ranking.retained = top_indices(ranking.scores, keep);
  return ranking;
}

}  // namespace aqfs
