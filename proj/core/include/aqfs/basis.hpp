#pragma once

#include <span>
#include <vector>

namespace aqfs {

/// Clamped B-spline basis on [0, 1] with equally spaced interior knots.
///
/// The full clamped family of a degree-`l` spline with `k` interior knots has
/// k + l + 1 members and forms a partition of unity. The model carries its
/// own intercept, so the first member (the one equal to 1 at t = 0) is
/// dropped and exactly q_n = k + l functions are retained.
class SplineBasis {
 public:
  /// Builds the basis with q_n retained functions. Throws ConfigError when
  /// degree < 1 or q_n < degree.
  static SplineBasis make(int qn, int degree);

  int degree() const { return degree_; }
  int interior_knots() const { return qn_ - degree_; }
  int size() const { return qn_; }
  /// Number of functions in the full clamped family (size() + 1).
  int full_size() const { return qn_ + 1; }
  const std::vector<double>& knots() const { return knots_; }

  /// Writes the q_n retained values at t into `out`. Throws DomainError
  /// unless t lies in [0, 1].
  void evaluate(double t, std::span<double> out) const;
  std::vector<double> evaluate(double t) const;

  /// Same as evaluate() but for the full family including the dropped member.
  void evaluate_full(double t, std::span<double> out) const;

 private:
  SplineBasis(int qn, int degree, std::vector<double> knots)
      : qn_(qn), degree_(degree), knots_(std::move(knots)) {}

  int qn_;
  int degree_;
  std::vector<double> knots_;
};

/// floor(n^(1/5)), computed exactly on integers.
int default_qn(int n);

/// Cubic unless fewer than three functions are requested.
int default_degree(int qn);

/// Min-max map of one training column onto [0, 1].
struct RescaleMap {
  double min = 0.0;
  double max = 1.0;

  /// A constant column cannot be mapped.
  bool degenerate() const { return !(max > min); }

  /// Maps a raw value; results outside [0, 1] are clipped. Degenerate maps
  /// send everything to 0.
  double apply(double value) const;
};

struct RescaledColumn {
  std::vector<double> values;
  RescaleMap map;
};

/// Min-max rescales a non-empty column. A constant column comes back with a
/// degenerate map and all values set to 0.
RescaledColumn rescale(std::span<const double> column);

}  // namespace aqfs
