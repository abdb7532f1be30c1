#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "aqfs/screening.hpp"

namespace aqfs {

/// Penalty scales: C_n = ln(ln p), ln(0.75 ln p), ln(0.5 ln p), or user supplied.
enum class CnVariant { QBIC1, QBIC2, QBIC3, Custom };

std::string_view to_string(CnVariant variant);

/// Natural-log C_n for one of the three built-in variants. Throws ConfigError
/// for p < 8 (where ln(0.5 ln p) would not be positive) or for Custom.
double cn_value(int p, CnVariant variant);

/// ln(objective) + N_S (ln n) / (2n) C_n. An objective of exactly 0 yields -inf.
double qbic_value(double objective, int n, int ns, double cn);

struct SelectionResult {
  CnVariant variant = CnVariant::QBIC1;
  double cn = 0.0;
  /// QBIC of S(1) .. S(K_n).
  std::vector<double> qbic_values;
  /// 1-based step minimizing QBIC (smallest on ties).
  int ell_hat = 0;
  /// S(ell_hat), in selection order.
  std::vector<int> chosen;
  std::vector<std::string> warnings;
};

SelectionResult select(const ScreeningPath& path, CnVariant variant);
SelectionResult select(const ScreeningPath& path, double cn);

}  // namespace aqfs
