#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "aqfs/basis.hpp"
#include "aqfs/qbic.hpp"
#include "aqfs/qrsolve.hpp"
#include "aqfs/rng.hpp"

namespace aqfs {

/// Structural parameters of one simulation example. Example 2 draws its
/// linear coefficients once per replication; Examples 1 and 3 use fixed ones.
struct ExampleModel {
  int example_id = 1;
  int p = 0;
  std::array<double, 4> beta{1.0, 1.0, 1.0, 1.0};
};

/// Builds the model for a replication seed; validates p >= 20 (Examples 1, 2)
/// or p >= 4 (Example 3).
ExampleModel make_model(int example_id, int p, std::uint64_t seed);

/// Covariates (0-based) the response depends on, including the noise-scale one.
std::vector<int> structural_columns(int example_id);

/// 0-based relevant set at quantile level tau.
std::vector<int> truth_set(int example_id, double tau);

struct Sample {
  /// n x columns.size() covariate values in the order of `columns`.
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<int> columns;
};

/// Draws n observations, materializing only `columns` (sorted, unique,
/// containing structural_columns()). Latent Gaussian columns are advanced with
/// the exact AR(1) transition across skipped indices, so the joint law of the
/// returned columns matches a full draw.
Sample draw(const ExampleModel& model, int n, Rng& rng, std::span<const int> columns);

struct SyntheticDataset {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  ExampleModel model;
  std::uint64_t seed = 0;

  int example_id() const { return model.example_id; }
  std::vector<int> truth(double tau) const { return truth_set(model.example_id, tau); }
};

SyntheticDataset gen_example1(int n, int p, std::uint64_t seed);
SyntheticDataset gen_example2(int n, int p, std::uint64_t seed);
SyntheticDataset gen_example3(int n, int p, std::uint64_t seed);
SyntheticDataset generate(int example_id, int n, int p, std::uint64_t seed);

/// Screening / selection outcome against the truth.
struct MetricRow {
  /// Sorted truth covariates and whether each was retained.
  std::vector<int> tracked;
  std::vector<bool> retained;
  bool all = false;
  int fp = 0;
  int fn = 0;
  std::optional<double> qpe;
};

MetricRow metrics(std::span<const int> selected, std::span<const int> truth, int p);

/// Test-set quantile prediction error of an additive fit on `selected`:
/// refit on the training data (columns min-max mapped with the training map),
/// draw n_test fresh observations from the same model, and return the mean
/// check loss. An empty selection fits the intercept only.
double qpe(std::span<const int> selected, const SyntheticDataset& train, double tau, const SplineBasis& basis,
           int n_test = 5000, std::uint64_t seed = 0, const SolverOptions& options = {});

/// Same, against a caller-provided test sample (whose columns must cover `selected`).
double qpe(std::span<const int> selected, const SyntheticDataset& train, const Sample& test, double tau,
           const SplineBasis& basis, const SolverOptions& options = {});

struct StudyConfig {
  int example_id = 1;
  std::vector<double> taus{0.5};
  int replications = 100;
  int n = 300;
  int p = 3000;
  std::uint64_t seed = 20240101;
  /// 0 selects the default (floor(n^(1/5)), cubic, floor(n / ln n)).
  int qn = 0;
  int degree = 0;
  int steps = 0;
  double tol = 1e-8;
  int threads = 1;
  int n_test = 5000;
  bool run_qsis = true;
  bool run_qasis = true;
  bool run_qpe = true;
};

/// Method labels in report order.
inline const std::array<std::string, 7> kStudyMethods{"QSIS",       "QaSIS",      "AQFS",  "AQFS+QBIC1",
                                                       "AQFS+QBIC2", "AQFS+QBIC3", "Oracle"};

struct ReplicationResult {
  int replication = 0;
  std::uint64_t seed = 0;
  /// Indexed like kStudyMethods; empty when the method was not run.
  std::array<std::optional<MetricRow>, 7> methods;
  /// QBIC1..3 selected step counts.
  std::array<int, 3> ell_hat{0, 0, 0};
  /// AQFS path (0-based covariates).
  std::vector<int> path;
  double seconds = 0.0;
  std::string failure;
  std::vector<std::string> warnings;
};

struct MethodSummary {
  std::string method;
  int count = 0;
  std::vector<double> retention;
  std::vector<double> retention_se;
  double all = 0.0, all_se = 0.0;
  double fp = 0.0, fp_se = 0.0;
  double fn = 0.0, fn_se = 0.0;
  int qpe_count = 0;
  double qpe = 0.0, qpe_se = 0.0;
};

struct TauReport {
  double tau = 0.5;
  std::vector<int> truth;
  std::vector<ReplicationResult> rows;
  std::vector<MethodSummary> summary;
  int failures = 0;
};

struct SimulationReport {
  StudyConfig config;
  int qn = 0;
  int degree = 0;
  int steps = 0;
  std::vector<TauReport> taus;
};

/// Aggregates replication rows for one tau into per-method means and
/// standard errors (sample sd / sqrt(count)), one entry per kStudyMethods
/// label; methods that were not run have count 0.
std::vector<MethodSummary> summarize(const std::vector<ReplicationResult>& rows, std::size_t tracked);

/// Runs the replication study. Replication r uses data seed
/// derive_seed(config.seed, r), shared across the tau list; results do not
/// depend on the thread count.
SimulationReport run_study(const StudyConfig& config);

}  // namespace aqfs
