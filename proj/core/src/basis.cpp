#include "aqfs/basis.hpp"

#include <algorithm>
#include <string>

#include "aqfs/error.hpp"

namespace aqfs {

SplineBasis SplineBasis::make(int qn, int degree) {
  if (degree < 1) throw ConfigError("spline degree must be at least 1, got " + std::to_string(degree));
  if (qn < degree) {
    throw ConfigError("q_n (" + std::to_string(qn) + ") must be >= degree (" + std::to_string(degree) + ")");
  }
  const int interior = qn - degree;
  std::vector<double> knots;
  knots.reserve(static_cast<std::size_t>(interior + 2 * (degree + 1)));
  knots.insert(knots.end(), static_cast<std::size_t>(degree + 1), 0.0);
  for (int i = 1; i <= interior; ++i) knots.push_back(static_cast<double>(i) / (interior + 1));
  knots.insert(knots.end(), static_cast<std::size_t>(degree + 1), 1.0);
  return SplineBasis(qn, degree, std::move(knots));
}

void SplineBasis::evaluate_full(double t, std::span<double> out) const {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("spline argument outside [0, 1]: " + std::to_string(t));
  if (static_cast<int>(out.size()) != full_size()) throw DomainError("output span has wrong length");
  std::fill(out.begin(), out.end(), 0.0);

  const int p = degree_;
  // Knot span s with knots[s] <= t < knots[s+1]; t = 1 belongs to the last
  // non-empty span.
  const int last_span = full_size() - 1;
  int span = p;
  if (t >= 1.0) {
    span = last_span;
  } else {
    const auto it = std::upper_bound(knots_.begin() + p, knots_.begin() + last_span + 1, t);
    span = static_cast<int>(it - knots_.begin()) - 1;
  }

  // Triangular Cox-de Boor scheme for the p+1 non-vanishing functions.
  std::vector<double> left(static_cast<std::size_t>(p + 1));
  std::vector<double> right(static_cast<std::size_t>(p + 1));
  std::vector<double> values(static_cast<std::size_t>(p + 1), 0.0);
  values[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = t - knots_[span + 1 - j];
    right[j] = knots_[span + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = values[r] / (right[r + 1] + left[j - r]);
      values[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    values[j] = saved;
  }
  for (int r = 0; r <= p; ++r) out[span - p + r] = values[r];
}

void SplineBasis::evaluate(double t, std::span<double> out) const {
  if (static_cast<int>(out.size()) != qn_) throw DomainError("output span has wrong length");
  std::vector<double> full(static_cast<std::size_t>(full_size()));
  evaluate_full(t, full);
  std::copy(full.begin() + 1, full.end(), out.begin());
}

std::vector<double> SplineBasis::evaluate(double t) const {
  std::vector<double> out(static_cast<std::size_t>(qn_));
  evaluate(t, out);
  return out;
}

int default_qn(int n) {
  int q = 1;
  auto fifth = [](long long v) { return v * v * v * v * v; };
  while (fifth(q + 1) <= n) ++q;
  return q;
}

int default_degree(int qn) { return std::min(3, qn); }

double RescaleMap::apply(double value) const {
  if (degenerate()) return 0.0;
  return std::clamp((value - min) / (max - min), 0.0, 1.0);
}

RescaledColumn rescale(std::span<const double> column) {
  if (column.empty()) throw DomainError("cannot rescale an empty column");
  const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
  RescaledColumn result;
  result.map = RescaleMap{*lo, *hi};
  result.values.resize(column.size());
  std::transform(column.begin(), column.end(), result.values.begin(),
                 [&](double v) { return result.map.apply(v); });
  return result;
}

}  // namespace aqfs
