#include "aqfs/score.hpp"

#include <algorithm>
#include <numeric>

#include "aqfs/error.hpp"
#include "aqfs/parallel.hpp"

namespace aqfs {

namespace {

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw DomainError("sign vector and covariate column differ in length");
}

}  // namespace

std::vector<double> signs(const Eigen::Ref<const Eigen::VectorXd>& y,
                          const Eigen::Ref<const Eigen::VectorXd>& fitted, double tau) {
  if (y.size() != fitted.size()) throw DomainError("response and fitted values differ in length");
  std::vector<double> psi(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) psi[static_cast<std::size_t>(i)] = y[i] < fitted[i] ? tau - 1.0 : tau;
  return psi;
}

std::vector<double> signs(const QuantileFit& fit, const Eigen::Ref<const Eigen::VectorXd>& y) {
  std::vector<double> psi = signs(y, fit.fitted, fit.tau);
  for (std::size_t i = 0; i < psi.size() && i < fit.interpolated.size(); ++i) {
    if (fit.interpolated[i]) psi[i] = fit.dual[static_cast<Eigen::Index>(i)] - (1.0 - fit.tau);
  }
  return psi;
}

ColumnOrder::ColumnOrder(std::span<const double> x) : order_(x.size()) {
  std::iota(order_.begin(), order_.end(), 0);
  std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) { return x[a] < x[b]; });
  for (std::size_t i = 1; i <= order_.size(); ++i) {
    if (i == order_.size() || x[order_[i]] != x[order_[i - 1]]) group_end_.push_back(static_cast<int>(i));
  }
}

double ColumnOrder::score(std::span<const double> psi) const {
  require_same_length(psi.size(), order_.size());
  if (order_.empty()) return 0.0;
  const double n = static_cast<double>(order_.size());
  double below = 0.0;  // sum of psi over strictly smaller x
  double total = 0.0;
  int start = 0;
  for (const int end : group_end_) {
    const double d = below / n;
    total += static_cast<double>(end - start) * d * d;
    for (int i = start; i < end; ++i) below += psi[static_cast<std::size_t>(order_[static_cast<std::size_t>(i)])];
    start = end;
  }
  return total / n;
}

double score_fast(std::span<const double> psi, std::span<const double> x) {
  require_same_length(psi.size(), x.size());
  return ColumnOrder(x).score(psi);
}

double score_naive(std::span<const double> psi, std::span<const double> x) {
  require_same_length(psi.size(), x.size());
  const std::size_t n = x.size();
  if (n == 0) return 0.0;
  const double nd = static_cast<double>(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (x[j] < x[i]) d += psi[j];
    }
    d /= nd;
    total += d * d;
  }
  return total / nd;
}

UStatDecomposition ustat_decomposition(std::span<const double> psi, std::span<const double> x) {
  require_same_length(psi.size(), x.size());
  const std::size_t n = x.size();
  if (n < 3) throw DomainError("U-statistic decomposition needs at least 3 observations");
  const double nd = static_cast<double>(n);
  auto less = [&](std::size_t a, std::size_t b) { return x[a] < x[b] ? 1.0 : 0.0; };

  double pairs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      pairs += 0.5 * (psi[i] * psi[i] * less(i, j) + psi[j] * psi[j] * less(j, i));
    }
  }
  double triples = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t l = j + 1; l < n; ++l) {
        triples += (psi[i] * psi[j] * less(i, l) * less(j, l) + psi[j] * psi[l] * less(j, i) * less(l, i) +
                    psi[l] * psi[i] * less(l, j) * less(i, j)) /
                   3.0;
      }
    }
  }

  UStatDecomposition out;
  out.d1 = 2.0 / (nd * (nd - 1.0)) * pairs;
  out.d2 = 6.0 / (nd * (nd - 1.0) * (nd - 2.0)) * triples;
  out.reconstructed = (nd - 1.0) * (nd - 2.0) / (nd * nd) * (out.d1 / (nd - 2.0) + out.d2);
  return out;
}

SortedColumns::SortedColumns(const Eigen::Ref<const Eigen::MatrixXd>& x, int threads) {
  std::vector<std::optional<ColumnOrder>> built(static_cast<std::size_t>(x.cols()));
  parallel_for(built.size(), threads, [&](std::size_t k) {
    const auto column = x.col(static_cast<Eigen::Index>(k));
    built[k].emplace(std::span<const double>(column.data(), static_cast<std::size_t>(column.size())));
  });
  columns_.reserve(built.size());
  for (auto& column : built) columns_.push_back(std::move(*column));
}

namespace {

std::optional<int> first_argmax(const std::vector<double>& scores) {
  std::optional<int> best;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (scores[k] == ScoreTable::kExcluded) continue;
    if (!best || scores[k] > scores[static_cast<std::size_t>(*best)]) best = static_cast<int>(k);
  }
  return best;
}

}  // namespace

ScoreTable score_sweep(std::span<const double> psi, const SortedColumns& columns, const std::vector<bool>& excluded,
                       int threads) {
  if (excluded.size() != columns.size()) throw DomainError("exclusion mask length differs from covariate count");
  ScoreTable table;
  table.scores.assign(columns.size(), ScoreTable::kExcluded);
  parallel_for(columns.size(), threads, [&](std::size_t k) {
    if (!excluded[k]) table.scores[k] = columns[k].score(psi);
  });
  table.argmax = first_argmax(table.scores);
  return table;
}

ScoreTable score_sweep(std::span<const double> psi, const Eigen::Ref<const Eigen::MatrixXd>& x,
                       const std::vector<bool>& excluded, int threads) {
  if (static_cast<Eigen::Index>(excluded.size()) != x.cols()) {
    throw DomainError("exclusion mask length differs from covariate count");
  }
  require_same_length(psi.size(), static_cast<std::size_t>(x.rows()));
  ScoreTable table;
  table.scores.assign(excluded.size(), ScoreTable::kExcluded);
  parallel_for(excluded.size(), threads, [&](std::size_t k) {
    if (excluded[k]) return;
    const auto column = x.col(static_cast<Eigen::Index>(k));
    table.scores[k] = score_fast(psi, std::span<const double>(column.data(), static_cast<std::size_t>(column.size())));
  });
  table.argmax = first_argmax(table.scores);
  return table;
}

ScoreTable qsis_scores(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::MatrixXd>& x,
                       double tau, const SolverOptions& options, int threads) {
  const Eigen::MatrixXd intercept = Eigen::MatrixXd::Ones(y.size(), 1);
  const QuantileFit base = fit(intercept, y, tau, options);
  const std::vector<double> psi = signs(base, y);
  return score_sweep(psi, x, std::vector<bool>(static_cast<std::size_t>(x.cols()), false), threads);
}

}  // namespace aqfs
