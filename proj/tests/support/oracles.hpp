#pragma once

// Slow reference implementations written directly from the definitions.
// They share no code with the library.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline double rho(double u, double tau) { return u < 0.0 ? u * (tau - 1.0) : u * tau; }

inline double check_loss_sum(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const Eigen::VectorXd& theta,
                             double tau) {
  const Eigen::VectorXd r = y - z * theta;
  double total = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) total += rho(r[i], tau);
  return total;
}

/// Clamped knot vector with `interior` equally spaced knots.
inline std::vector<double> clamped_knots(int interior, int degree) {
  std::vector<double> knots(static_cast<std::size_t>(degree + 1), 0.0);
  for (int i = 1; i <= interior; ++i) knots.push_back(static_cast<double>(i) / (interior + 1));
  knots.insert(knots.end(), static_cast<std::size_t>(degree + 1), 1.0);
  return knots;
}

/// B_{i,k}(t) by the textbook recursion, order k = degree + 1. Spans are
/// half-open except the last non-empty one, which also contains t = 1.
inline double cox_de_boor(const std::vector<double>& knots, int i, int k, double t) {
  const auto u = [&](int j) { return knots[static_cast<std::size_t>(j)]; };
  if (k == 1) {
    if (u(i) < u(i + 1) && u(i) <= t && t < u(i + 1)) return 1.0;
    if (t == knots.back() && u(i) < u(i + 1) && u(i + 1) == knots.back()) return 1.0;
    return 0.0;
  }
  double value = 0.0;
  if (u(i + k - 1) > u(i)) value += (t - u(i)) / (u(i + k - 1) - u(i)) * cox_de_boor(knots, i, k - 1, t);
  if (u(i + k) > u(i + 1)) value += (u(i + k) - t) / (u(i + k) - u(i + 1)) * cox_de_boor(knots, i + 1, k - 1, t);
  return value;
}

/// n^{-1} sum_i [ n^{-1} sum_j psi_j 1{x_j < x_i} ]^2, literally.
inline double score(std::span<const double> psi, std::span<const double> x) {
  const double n = static_cast<double>(psi.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] < x[i]) d += psi[j];
    }
    d /= n;
    total += d * d;
  }
  return total / n;
}

struct UStat {
  double d1;
  double d2;
  double reconstructed;
};

/// Pair kernel averaged over ordered distinct pairs, triple kernel over
/// ordered distinct triples, then ((n-1)(n-2)/n^2) [D1/(n-2) + D2].
inline UStat ustat(std::span<const double> psi, std::span<const double> x) {
  const std::size_t n = psi.size();
  double pairs = 0.0;
  double triples = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (x[j] < x[i]) pairs += psi[j] * psi[j];
      for (std::size_t l = 0; l < n; ++l) {
        if (l == i || l == j) continue;
        if (x[j] < x[i] && x[l] < x[i]) triples += psi[j] * psi[l];
      }
    }
  }
  const double nn = static_cast<double>(n);
  const double d1 = pairs / (nn * (nn - 1.0));
  const double d2 = triples / (nn * (nn - 1.0) * (nn - 2.0));
  return {d1, d2, (nn - 1.0) * (nn - 2.0) / (nn * nn) * (d1 / (nn - 2.0) + d2)};
}

/// Minimum check loss over all basic solutions (fits interpolating m rows).
/// For a full-column-rank design the LP optimum is attained at one of them.
inline double vertex_minimum(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, double tau) {
  const int n = static_cast<int>(z.rows());
  const int m = static_cast<int>(z.cols());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(m));
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    Eigen::MatrixXd a(m, m);
    Eigen::VectorXd b(m);
    for (int r = 0; r < m; ++r) {
      a.row(r) = z.row(pick[static_cast<std::size_t>(r)]);
      b[r] = y[pick[static_cast<std::size_t>(r)]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.isInvertible()) best = std::min(best, check_loss_sum(z, y, lu.solve(b), tau));
    int pos = m - 1;
    while (pos >= 0 && pick[static_cast<std::size_t>(pos)] == n - m + pos) --pos;
    if (pos < 0) break;
    ++pick[static_cast<std::size_t>(pos)];
    for (int r = pos + 1; r < m; ++r) pick[static_cast<std::size_t>(r)] = pick[static_cast<std::size_t>(r - 1)] + 1;
  }
  return best;
}

}  // namespace oracle
