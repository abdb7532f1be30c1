#include "aqfs/qbic.hpp"

#include <cmath>
#include <limits>

namespace aqfs {

std::string_view to_string(CnVariant variant) {
  switch (variant) {
    case CnVariant::QBIC1: return "QBIC1";
    case CnVariant::QBIC2: return "QBIC2";
    case CnVariant::QBIC3: return "QBIC3";
    case CnVariant::Custom: return "custom";
  }
  return "unknown";
}

double cn_value(int p, CnVariant variant) {
  if (p < 8) throw ConfigError("C_n needs p >= 8, got " + std::to_string(p));
  const double log_p = std::log(static_cast<double>(p));
  switch (variant) {
    case CnVariant::QBIC1: return std::log(log_p);
    case CnVariant::QBIC2: return std::log(0.75 * log_p);
    case CnVariant::QBIC3: return std::log(0.5 * log_p);
    case CnVariant::Custom: break;
  }
  throw ConfigError("custom C_n has no closed form; pass the value directly");
}

double qbic_value(double objective, int n, int ns, double cn) {
  if (objective < 0.0) throw DomainError("check-loss objective cannot be negative");
  const double penalty = static_cast<double>(ns) * std::log(static_cast<double>(n)) / (2.0 * n) * cn;
  if (objective == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(objective) + penalty;
}

namespace {

SelectionResult select_impl(const ScreeningPath& path, CnVariant variant, double cn) {
  if (path.steps.empty()) throw DomainError("cannot select from an empty screening path");
  SelectionResult result;
  result.variant = variant;
  result.cn = cn;
  result.qbic_values.reserve(path.steps.size());
  for (std::size_t l = 0; l < path.steps.size(); ++l) {
    const int ns = 1 + path.qn * static_cast<int>(l + 1);
    const double objective = path.steps[l].objective;
    if (objective == 0.0) {
      result.warnings.push_back("zero check loss at step " + std::to_string(l + 1) + "; QBIC is -inf");
    }
    result.qbic_values.push_back(qbic_value(objective, path.n, ns, cn));
  }
  std::size_t best = 0;
  for (std::size_t l = 1; l < result.qbic_values.size(); ++l) {
    if (result.qbic_values[l] < result.qbic_values[best]) best = l;
  }
  result.ell_hat = static_cast<int>(best + 1);
  result.chosen = path.model(best + 1);
  return result;
}

}  // namespace

SelectionResult select(const ScreeningPath& path, CnVariant variant) {
  return select_impl(path, variant, cn_value(path.p, variant));
}

SelectionResult select(const ScreeningPath& path, double cn) { return select_impl(path, CnVariant::Custom, cn); }

}  // namespace aqfs
