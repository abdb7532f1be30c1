#include "aqfs/simlab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <set>

#include "aqfs/baselines.hpp"
#include "aqfs/parallel.hpp"
#include "aqfs/screening.hpp"

namespace aqfs {

namespace {

constexpr std::uint64_t kBetaStream = 0xBE7A;
constexpr std::uint64_t kDataStream = 0xDA7A;
constexpr std::uint64_t kTestStream = 0x7E57;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_example(int example_id) {
  if (example_id < 1 || example_id > 3) {
    throw ConfigError("unknown simulation example " + std::to_string(example_id) + " (expected 1, 2 or 3)");
  }
}

bool is_median(double tau) { return std::abs(tau - 0.5) < 1e-12; }

double g3(double x) {
  const double s = std::sin(kTwoPi * x);
  return 4.0 * s / (2.0 - s);
}

double g4(double x) {
  const double s = std::sin(kTwoPi * x);
  const double c = std::cos(kTwoPi * x);
  return 0.6 * s + 1.2 * c + 1.8 * s * s + 2.4 * c * c * c + 3.0 * s * s * s;
}

}  // namespace

ExampleModel make_model(int example_id, int p, std::uint64_t seed) {
  check_example(example_id);
  const int min_p = example_id == 3 ? 4 : (example_id == 2 ? 26 : 20);
  if (p < min_p) {
    throw ConfigError("example " + std::to_string(example_id) + " needs p >= " + std::to_string(min_p) + ", got " +
                      std::to_string(p));
  }
  ExampleModel model;
  model.example_id = example_id;
  model.p = p;
  if (example_id == 2) {
    Rng rng(derive_seed(seed, kBetaStream));
    for (double& b : model.beta) b = rng.uniform(0.5, 1.5);
  }
  return model;
}

std::vector<int> structural_columns(int example_id) {
  check_example(example_id);
  switch (example_id) {
    case 1: return {0, 5, 11, 14, 19};
    case 2: return {0, 5, 11, 14, 19, 24, 25};
    default: return {0, 1, 2, 3};
  }
}

std::vector<int> truth_set(int example_id, double tau) {
  check_example(example_id);
  std::vector<int> truth = structural_columns(example_id);
  // The heteroscedastic covariate only moves quantiles away from the median.
  if (is_median(tau)) truth.erase(truth.begin());
  return truth;
}

Sample draw(const ExampleModel& model, int n, Rng& rng, std::span<const int> columns) {
  if (n < 1) throw ConfigError("sample size must be positive");
  if (!std::is_sorted(columns.begin(), columns.end()) ||
      std::adjacent_find(columns.begin(), columns.end()) != columns.end()) {
    throw DomainError("requested columns must be sorted and unique");
  }
  if (!columns.empty() && (columns.front() < 0 || columns.back() >= model.p)) {
    throw DomainError("requested column outside [0, p)");
  }

  const std::vector<int> structural = structural_columns(model.example_id);
  std::vector<std::size_t> position;
  for (int s : structural) {
    const auto it = std::lower_bound(columns.begin(), columns.end(), s);
    if (it == columns.end() || *it != s) throw DomainError("requested columns omit a structural covariate");
    position.push_back(static_cast<std::size_t>(it - columns.begin()));
  }

  Sample sample;
  sample.columns.assign(columns.begin(), columns.end());
  sample.x.resize(n, static_cast<Eigen::Index>(columns.size()));
  sample.y.resize(n);
  const double root12 = std::sqrt(12.0);

  for (int i = 0; i < n; ++i) {
    const double eps = rng.normal();
    if (model.example_id == 3) {
      const double shared = rng.uniform();
      for (std::size_t c = 0; c < columns.size(); ++c) {
        sample.x(i, static_cast<Eigen::Index>(c)) = 0.5 * (rng.uniform() + shared);
      }
    } else {
      // Latent N(0, Sigma) with Sigma_jk = 0.5^|j-k| is a stationary AR(1) in j.
      int previous_index = -1;
      double previous = 0.0;
      for (std::size_t c = 0; c < columns.size(); ++c) {
        const int j = columns[c];
        double latent = 0.0;
        if (previous_index < 0) {
          latent = rng.normal();
        } else {
          const double rho = std::pow(0.5, j - previous_index);
          latent = rho * previous + std::sqrt(1.0 - rho * rho) * rng.normal();
        }
        previous_index = j;
        previous = latent;
        double value = latent;
        if (j == 0) {
          value = root12 * normal_cdf(latent);
        } else if (model.example_id == 2 && (j == 24 || j == 25)) {
          value = normal_cdf(latent);
        }
        sample.x(i, static_cast<Eigen::Index>(c)) = value;
      }
    }

    auto at = [&](std::size_t s) { return sample.x(i, static_cast<Eigen::Index>(position[s])); };
    double y = 0.0;
    switch (model.example_id) {
      case 1:
        y = at(1) + at(2) + at(3) + at(4) + 0.7 * at(0) * eps;
        break;
      case 2:
        y = model.beta[0] * at(1) + model.beta[1] * at(2) + model.beta[2] * at(3) + model.beta[3] * at(4) +
            std::sin(kTwoPi * at(5)) + 2.5 * std::pow(at(6), 3) + 0.7 * at(0) * eps;
        break;
      default:
        y = 5.0 * at(1) + g3(at(2)) + g4(at(3)) + 7.0 * at(0) * at(0) * eps;
        break;
    }
    sample.y[i] = y;
  }
  return sample;
}

SyntheticDataset generate(int example_id, int n, int p, std::uint64_t seed) {
  SyntheticDataset data;
  data.model = make_model(example_id, p, seed);
  data.seed = seed;
  std::vector<int> all(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) all[static_cast<std::size_t>(j)] = j;
  Rng rng(derive_seed(seed, kDataStream));
  Sample sample = draw(data.model, n, rng, all);
  data.x = std::move(sample.x);
  data.y = std::move(sample.y);
  return data;
}

SyntheticDataset gen_example1(int n, int p, std::uint64_t seed) { return generate(1, n, p, seed); }
SyntheticDataset gen_example2(int n, int p, std::uint64_t seed) { return generate(2, n, p, seed); }
SyntheticDataset gen_example3(int n, int p, std::uint64_t seed) { return generate(3, n, p, seed); }

MetricRow metrics(std::span<const int> selected, std::span<const int> truth, int p) {
  std::set<int> picked;
  for (int k : selected) {
    if (k < 0 || k >= p) throw DomainError("selected covariate outside [0, p)");
    picked.insert(k);
  }
  MetricRow row;
  row.tracked.assign(truth.begin(), truth.end());
  std::sort(row.tracked.begin(), row.tracked.end());
  int hits = 0;
  for (int t : row.tracked) {
    const bool found = picked.contains(t);
    row.retained.push_back(found);
    hits += found ? 1 : 0;
  }
  row.fn = static_cast<int>(row.tracked.size()) - hits;
  row.fp = static_cast<int>(picked.size()) - hits;
  row.all = row.fn == 0;
  return row;
}

double qpe(std::span<const int> selected, const SyntheticDataset& train, const Sample& test, double tau,
           const SplineBasis& basis, const SolverOptions& options) {
  std::vector<int> used;
  std::vector<RescaleMap> maps;
  std::vector<std::vector<double>> mapped;
  for (int k : selected) {
    const auto column = train.x.col(k);
    RescaledColumn r = rescale(std::span<const double>(column.data(), static_cast<std::size_t>(column.size())));
    if (r.map.degenerate()) continue;
    used.push_back(k);
    maps.push_back(r.map);
    mapped.push_back(std::move(r.values));
  }

  const Eigen::Index n = train.x.rows();
  const auto m = static_cast<Eigen::Index>(used.size());
  Eigen::MatrixXd train_x(n, m);
  for (Eigen::Index c = 0; c < m; ++c) {
    train_x.col(c) = Eigen::Map<const Eigen::VectorXd>(mapped[static_cast<std::size_t>(c)].data(), n);
  }
  std::vector<int> local(static_cast<std::size_t>(m));
  for (Eigen::Index c = 0; c < m; ++c) local[static_cast<std::size_t>(c)] = static_cast<int>(c);
  const Design design = Design::build(train_x, local, basis);
  const QuantileFit refit = fit(design, train.y, tau, options);

  const Eigen::Index n_test = test.x.rows();
  Eigen::MatrixXd test_x(n_test, m);
  for (Eigen::Index c = 0; c < m; ++c) {
    const int k = used[static_cast<std::size_t>(c)];
    const auto it = std::lower_bound(test.columns.begin(), test.columns.end(), k);
    if (it == test.columns.end() || *it != k) throw DomainError("test sample lacks a selected covariate");
    const auto source = static_cast<Eigen::Index>(it - test.columns.begin());
    for (Eigen::Index i = 0; i < n_test; ++i) test_x(i, c) = maps[static_cast<std::size_t>(c)].apply(test.x(i, source));
  }
  const Eigen::VectorXd predicted = design.rows_for(test_x) * refit.theta;
  return check_loss_sum(test.y, predicted, tau) / static_cast<double>(n_test);
}

double qpe(std::span<const int> selected, const SyntheticDataset& train, double tau, const SplineBasis& basis,
           int n_test, std::uint64_t seed, const SolverOptions& options) {
  std::set<int> needed(selected.begin(), selected.end());
  for (int s : structural_columns(train.example_id())) needed.insert(s);
  const std::vector<int> columns(needed.begin(), needed.end());
  Rng rng(derive_seed(train.seed ^ seed, kTestStream));
  const Sample test = draw(train.model, n_test, rng, columns);
  return qpe(selected, train, test, tau, basis, options);
}

std::vector<MethodSummary> summarize(const std::vector<ReplicationResult>& rows, std::size_t tracked) {
  auto mean_se = [](const std::vector<double>& v) {
    if (v.empty()) return std::pair{0.0, 0.0};
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2) return std::pair{mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    return std::pair{mean, sd / std::sqrt(static_cast<double>(v.size()))};
  };

  std::vector<MethodSummary> out;
  for (std::size_t m = 0; m < kStudyMethods.size(); ++m) {
    MethodSummary s;
    s.method = kStudyMethods[m];
    std::vector<std::vector<double>> retained(tracked);
    std::vector<double> all, fp, fn, q;
    for (const ReplicationResult& row : rows) {
      if (!row.failure.empty() || !row.methods[m]) continue;
      const MetricRow& metric = *row.methods[m];
      for (std::size_t t = 0; t < tracked && t < metric.retained.size(); ++t) {
        retained[t].push_back(metric.retained[t] ? 1.0 : 0.0);
      }
      all.push_back(metric.all ? 1.0 : 0.0);
      fp.push_back(metric.fp);
      fn.push_back(metric.fn);
      if (metric.qpe) q.push_back(*metric.qpe);
    }
    s.count = static_cast<int>(all.size());
    for (const auto& r : retained) {
      const auto [mean, se] = mean_se(r);
      s.retention.push_back(mean);
      s.retention_se.push_back(se);
    }
    std::tie(s.all, s.all_se) = mean_se(all);
    std::tie(s.fp, s.fp_se) = mean_se(fp);
    std::tie(s.fn, s.fn_se) = mean_se(fn);
    s.qpe_count = static_cast<int>(q.size());
    std::tie(s.qpe, s.qpe_se) = mean_se(q);
    out.push_back(std::move(s));
  }
  return out;
}

SimulationReport run_study(const StudyConfig& config) {
  check_example(config.example_id);
  if (config.replications < 0) throw ConfigError("replication count cannot be negative");
  if (config.n < 3) throw ConfigError("sample size must be at least 3");
  for (double tau : config.taus) {
    if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must lie in (0, 1)");
  }
  make_model(config.example_id, config.p, config.seed);

  SimulationReport report;
  report.config = config;
  report.qn = config.qn > 0 ? config.qn : default_qn(config.n);
  report.degree = config.degree > 0 ? config.degree : default_degree(report.qn);
  report.steps = config.steps > 0 ? std::min(config.steps, max_steps(config.n, config.p, report.qn))
                                  : default_steps(config.n, config.p, report.qn);
  const SplineBasis basis = SplineBasis::make(report.qn, report.degree);
  SolverOptions solver;
  solver.tol = config.tol;

  const std::size_t reps = static_cast<std::size_t>(config.replications);
  std::vector<std::vector<ReplicationResult>> results(config.taus.size(), std::vector<ReplicationResult>(reps));
  const int outer_threads = resolve_threads(config.threads);
  const int inner_threads = reps > 1 ? 1 : outer_threads;

  parallel_for(reps, outer_threads, [&](std::size_t r) {
    const std::uint64_t seed = derive_seed(config.seed, r);
    const auto started = std::chrono::steady_clock::now();
    SyntheticDataset data;
    Eigen::MatrixXd scaled;
    std::string data_failure;
    try {
      data = generate(config.example_id, config.n, config.p, seed);
      scaled.resize(data.x.rows(), data.x.cols());
      for (Eigen::Index k = 0; k < data.x.cols(); ++k) {
        const auto column = data.x.col(k);
        const RescaledColumn rc =
            rescale(std::span<const double>(column.data(), static_cast<std::size_t>(column.size())));
        scaled.col(k) = Eigen::Map<const Eigen::VectorXd>(rc.values.data(), data.x.rows());
      }
    } catch (const Error& e) {
      data_failure = e.what();
    }

    for (std::size_t t = 0; t < config.taus.size(); ++t) {
      const double tau = config.taus[t];
      ReplicationResult& row = results[t][r];
      row.replication = static_cast<int>(r);
      row.seed = seed;
      if (!data_failure.empty()) {
        row.failure = data_failure;
        continue;
      }
      const std::vector<int> truth = truth_set(config.example_id, tau);
      try {
        if (config.run_qsis) {
          const MarginalRanking ranking = qsis(data.y, scaled, tau, report.steps, solver, inner_threads);
          row.methods[0] = metrics(ranking.retained, truth, config.p);
        }
        if (config.run_qasis) {
          const MarginalRanking ranking = qasis(data.y, scaled, tau, report.steps, basis, solver, inner_threads);
          row.methods[1] = metrics(ranking.retained, truth, config.p);
          for (const auto& w : ranking.warnings) row.warnings.push_back(w);
        }

        ScreeningOptions options;
        options.solver = solver;
        options.threads = inner_threads;
        const ScreeningPath path = run_path(scaled, data.y, tau, report.steps, basis, options);
        row.path = path.model();
        row.methods[2] = metrics(row.path, truth, config.p);

        std::array<SelectionResult, 3> selections{select(path, CnVariant::QBIC1), select(path, CnVariant::QBIC2),
                                                  select(path, CnVariant::QBIC3)};
        for (std::size_t v = 0; v < 3; ++v) {
          row.ell_hat[v] = selections[v].ell_hat;
          row.methods[3 + v] = metrics(selections[v].chosen, truth, config.p);
        }
        row.methods[6] = metrics(truth, truth, config.p);

        if (config.run_qpe) {
          std::set<int> needed(truth.begin(), truth.end());
          for (int s : structural_columns(config.example_id)) needed.insert(s);
          for (const auto& sel : selections) needed.insert(sel.chosen.begin(), sel.chosen.end());
          const std::vector<int> columns(needed.begin(), needed.end());
          Rng rng(derive_seed(seed, kTestStream + t));
          const Sample test = draw(data.model, config.n_test, rng, columns);
          for (std::size_t v = 0; v < 3; ++v) {
            try {
              row.methods[3 + v]->qpe = qpe(selections[v].chosen, data, test, tau, basis, solver);
            } catch (const Error& e) {
              row.warnings.push_back(std::string(kStudyMethods[3 + v]) + " QPE refit failed: " + e.what());
            }
          }
          try {
            row.methods[6]->qpe = qpe(truth, data, test, tau, basis, solver);
          } catch (const Error& e) {
            row.warnings.push_back(std::string("Oracle QPE refit failed: ") + e.what());
          }
        }
      } catch (const Error& e) {
        row.failure = e.what();
      }
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    for (auto& per_tau : results) per_tau[r].seconds = seconds;
  });

  for (std::size_t t = 0; t < config.taus.size(); ++t) {
    TauReport tau_report;
    tau_report.tau = config.taus[t];
    tau_report.truth = truth_set(config.example_id, config.taus[t]);
    tau_report.rows = std::move(results[t]);
    for (const auto& row : tau_report.rows) tau_report.failures += row.failure.empty() ? 0 : 1;
    tau_report.summary = summarize(tau_report.rows, tau_report.truth.size());
    report.taus.push_back(std::move(tau_report));
  }
  return report;
}

}  // namespace aqfs
