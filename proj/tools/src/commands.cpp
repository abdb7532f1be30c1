#include "aqfs/cli/commands.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "aqfs/basis.hpp"
#include "aqfs/error.hpp"

namespace aqfs::cli {

using nlohmann::json;

namespace {

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << contents;
  if (!out) throw Error("failed writing " + path.string());
}

std::filesystem::path prepare_out(const RunConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.out, ec);
  if (ec) throw ConfigError("cannot create output directory " + config.out.string() + ": " + ec.message());
  return config.out;
}

std::vector<int> one_based(const std::vector<int>& indices) {
  std::vector<int> out;
  out.reserve(indices.size());
  for (const int k : indices) out.push_back(k + 1);
  return out;
}

std::vector<std::string> names_of(const Dataset& data, const std::vector<int>& indices) {
  std::vector<std::string> out;
  for (const int k : indices) out.push_back(data.covariate_names[static_cast<std::size_t>(k)]);
  return out;
}

std::string path_csv(const ScreeningPath& path) {
  std::string csv = "step,covariate,score,objective\n";
  for (std::size_t s = 0; s < path.steps.size(); ++s) {
    const PathStep& step = path.steps[s];
    csv += std::to_string(s + 1) + ',' + std::to_string(step.covariate + 1) + ',' + format_double(step.score) + ',' +
           format_double(step.objective) + '\n';
  }
  return csv;
}

json screened_json(const ScreeningPath& path, const Dataset& data, const RunConfig& config) {
  const std::vector<int> model = path.model();
  return json{{"tau", path.tau},
              {"n", path.n},
              {"p", path.p},
              {"qn", path.qn},
              {"degree", path.degree},
              {"steps", path.requested_steps},
              {"base_objective", path.base_objective},
              {"covariates", one_based(model)},
              {"names", names_of(data, model)},
              {"dropped_rows", data.dropped_rows},
              {"warnings", path.warnings},
              {"config", to_json(config)}};
}

void emit(std::ostream& log, const std::vector<std::string>& warnings, const std::string& context = {}) {
  for (const auto& w : warnings) log << "warning: " << context << w << '\n';
}

json metric_json(const MetricRow& row) {
  json j{{"retained", row.retained}, {"all", row.all}, {"fp", row.fp}, {"fn", row.fn}};
  if (row.qpe) j["qpe"] = *row.qpe;
  return j;
}

json summary_json(const MethodSummary& s) {
  json j{{"method", s.method}, {"count", s.count},  {"retention", s.retention}, {"retention_se", s.retention_se},
         {"all", s.all},       {"all_se", s.all_se}, {"fp", s.fp},               {"fp_se", s.fp_se},
         {"fn", s.fn},         {"fn_se", s.fn_se},   {"qpe_count", s.qpe_count}};
  if (s.qpe_count > 0) {
    j["qpe"] = s.qpe;
    j["qpe_se"] = s.qpe_se;
  }
  return j;
}

}  // namespace

std::string tau_label(double tau) { return format_double(tau); }

Eigen::MatrixXd rescale_columns(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    const Eigen::VectorXd column = x.col(k);
    const RescaledColumn mapped = rescale(std::span<const double>(column.data(), static_cast<std::size_t>(column.size())));
    out.col(k) = Eigen::Map<const Eigen::VectorXd>(mapped.values.data(), static_cast<Eigen::Index>(mapped.values.size()));
  }
  return out;
}

ScreeningPath screen(const Dataset& data, const RunConfig& config, double tau) {
  const int n = data.n();
  const int p = data.p();
  const int qn = config.qn > 0 ? config.qn : default_qn(n);
  const int degree = config.degree > 0 ? config.degree : default_degree(qn);
  const SplineBasis basis = SplineBasis::make(qn, degree);
  const int steps = config.steps > 0 ? config.steps : default_steps(n, p, qn);
  if (steps < 1) throw ConfigError("n = " + std::to_string(n) + " is too small for q_n = " + std::to_string(qn));

  ScreeningOptions options;
  options.solver.tol = config.tol;
  options.threads = config.threads;
  return run_path(rescale_columns(data.x), data.y, tau, steps, basis, options);
}

std::vector<ScreeningPath> cmd_screen(const Dataset& data, const RunConfig& config, std::ostream& log) {
  validate(config);
  const auto out = prepare_out(config);
  emit(log, data.warnings);
  std::vector<ScreeningPath> paths;
  for (const double tau : config.taus) {
    const std::string label = tau_label(tau);
    ScreeningPath path;
    try {
      path = screen(data, config, tau);
    } catch (const PathError& e) {
      write_file(out / ("path_" + label + ".csv"), path_csv(e.partial()));
      throw;
    }
    emit(log, path.warnings, "tau " + label + ": ");
    write_file(out / ("path_" + label + ".csv"), path_csv(path));
    write_file(out / ("screened_" + label + ".json"), screened_json(path, data, config).dump(2) + '\n');
    paths.push_back(std::move(path));
  }
  return paths;
}

std::vector<TauSelection> cmd_select(const Dataset& data, const RunConfig& config, std::ostream& log) {
  validate(config);
  if (data.p() < 8) throw ConfigError("QBIC penalties need at least 8 covariates, found " + std::to_string(data.p()));
  std::vector<ScreeningPath> paths = cmd_screen(data, config, log);
  const auto out = prepare_out(config);

  std::vector<TauSelection> results;
  for (auto& path : paths) {
    const std::string label = tau_label(path.tau);
    TauSelection entry{std::move(path), {}};
    json selections = json::array();
    for (const CnVariant variant : config.cn) {
      SelectionResult result = select(entry.path, variant);
      emit(log, result.warnings, "tau " + label + " " + std::string(to_string(variant)) + ": ");
      selections.push_back(json{{"variant", std::string(to_string(variant))},
                                {"C_n", result.cn},
                                {"ell_hat", result.ell_hat},
                                {"covariates", one_based(result.chosen)},
                                {"names", names_of(data, result.chosen)},
                                {"qbic_values", result.qbic_values}});
      entry.selections.push_back(std::move(result));
    }
    const json doc{{"tau", entry.path.tau}, {"n", entry.path.n},   {"p", entry.path.p},
                   {"qn", entry.path.qn},   {"selections", selections}, {"config", to_json(config)}};
    write_file(out / ("selected_" + label + ".json"), doc.dump(2) + '\n');
    results.push_back(std::move(entry));
  }
  return results;
}

json report_json(const SimulationReport& report, const RunConfig& config) {
  json taus = json::array();
  for (const TauReport& t : report.taus) {
    json rows = json::array();
    for (const ReplicationResult& r : t.rows) {
      json methods = json::object();
      for (std::size_t m = 0; m < kStudyMethods.size(); ++m) {
        if (r.methods[m]) methods[kStudyMethods[m]] = metric_json(*r.methods[m]);
      }
      json row{{"replication", r.replication},
               {"seed", r.seed},
               {"path", one_based(r.path)},
               {"ell_hat", r.ell_hat},
               {"methods", methods},
               {"warnings", r.warnings}};
      if (!r.failure.empty()) row["failure"] = r.failure;
      rows.push_back(std::move(row));
    }
    json summary = json::array();
    for (const MethodSummary& s : t.summary) summary.push_back(summary_json(s));
    taus.push_back(json{{"tau", t.tau},
                        {"truth", one_based(t.truth)},
                        {"failures", t.failures},
                        {"summary", summary},
                        {"rows", rows}});
  }
  return json{{"config", to_json(config)},
              {"resolved", {{"qn", report.qn}, {"degree", report.degree}, {"steps", report.steps}}},
              {"methods", kStudyMethods},
              {"taus", taus}};
}

std::string table_csv(const SimulationReport& report) {
  std::set<int> tracked;
  for (const TauReport& t : report.taus) tracked.insert(t.truth.begin(), t.truth.end());

  std::string csv = "tau,method";
  for (const int k : tracked) csv += ",X" + std::to_string(k + 1);
  csv += ",All,FP,FN,QPE\n";
  for (const TauReport& t : report.taus) {
    std::map<int, std::size_t> position;
    for (std::size_t i = 0; i < t.truth.size(); ++i) position[t.truth[i]] = i;
    for (const MethodSummary& s : t.summary) {
      if (s.count == 0) continue;
      csv += tau_label(t.tau) + ',' + s.method;
      for (const int k : tracked) {
        csv += ',';
        if (const auto it = position.find(k); it != position.end()) csv += format_double(s.retention[it->second]);
      }
      csv += ',' + format_double(s.all) + ',' + format_double(s.fp) + ',' + format_double(s.fn) + ',';
      if (s.qpe_count > 0) csv += format_double(s.qpe);
      csv += '\n';
    }
  }
  return csv;
}

SimulationReport cmd_simulate(const RunConfig& config, std::ostream& log) {
  validate(config);
  const auto out = prepare_out(config);
  const SimulationReport report = run_study(study_config(config));

  for (const TauReport& t : report.taus) {
    const std::string label = "tau " + tau_label(t.tau) + ": ";
    for (const ReplicationResult& r : t.rows) {
      emit(log, r.warnings, label + "replication " + std::to_string(r.replication) + ": ");
      if (!r.failure.empty()) log << "warning: " << label << "replication " << r.replication << " failed: " << r.failure << '\n';
    }
  }

  write_file(out / "report.json", report_json(report, config).dump(2) + '\n');
  write_file(out / "table.csv", table_csv(report));
  std::string timing = "replication,seconds\n";
  if (!report.taus.empty()) {
    for (const ReplicationResult& r : report.taus.front().rows) {
      timing += std::to_string(r.replication) + ',' + format_double(r.seconds) + '\n';
    }
  }
  write_file(out / "timing.csv", timing);
  return report;
}

}  // namespace aqfs::cli
