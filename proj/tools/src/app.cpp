#include "aqfs/cli/app.hpp"

#include <iostream>

#include <CLI11.hpp>

#include "aqfs/cli/commands.hpp"
#include "aqfs/error.hpp"

namespace aqfs::cli {

namespace {

struct Flags {
  std::string config;
  std::vector<double> taus;
  int qn = 0;
  int degree = 0;
  int steps = 0;
  std::vector<int> cn;
  double tol = 0.0;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;
  std::string data;
  std::string response;
  int example = 1;
  int replications = 0;
  int n = 0;
  int p = 0;
  int n_test = 0;
  bool no_qsis = false;
  bool no_qasis = false;
  bool no_qpe = false;
};

void add_common(CLI::App& sub, Flags& f) {
  sub.add_option("--config", f.config, "JSON config file; flags override its values")->check(CLI::ExistingFile);
  sub.add_option("--tau", f.taus, "Quantile level(s), comma separated")->delimiter(',');
  sub.add_option("--qn", f.qn, "Spline basis size per covariate (default floor(n^(1/5)))");
  sub.add_option("--degree", f.degree, "Spline degree (default min(3, qn))");
  sub.add_option("--steps", f.steps, "Screening steps K_n (default floor(n / ln n))");
  sub.add_option("--tol", f.tol, "Relative duality-gap tolerance of the quantile solver");
  sub.add_option("--seed", f.seed, "Master seed");
  sub.add_option("--threads", f.threads, "Worker threads (0 = all cores)");
  sub.add_option("--out", f.out, "Output directory");
}

void add_data(CLI::App& sub, Flags& f) {
  sub.add_option("--data", f.data, "Input CSV with a header row");
  sub.add_option("--response", f.response, "Name of the response column (default y)");
}

RunConfig merge(const CLI::App& sub, const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  const auto given = [&](const char* name) { return sub.get_option_no_throw(name) && sub.count(name) > 0; };
  if (given("--tau")) c.taus = f.taus;
  if (given("--qn")) c.qn = f.qn;
  if (given("--degree")) c.degree = f.degree;
  if (given("--steps")) c.steps = f.steps;
  if (given("--cn")) {
    c.cn.clear();
    for (const int code : f.cn) c.cn.push_back(cn_from_int(code));
  }
  if (given("--tol")) c.tol = f.tol;
  if (given("--seed")) c.seed = f.seed;
  if (given("--threads")) c.threads = f.threads;
  if (given("--out")) c.out = f.out;
  if (given("--data")) c.data = f.data;
  if (given("--response")) c.response = f.response;
  if (given("--example")) c.example = f.example;
  if (given("--reps")) c.replications = f.replications;
  if (given("--n")) c.n = f.n;
  if (given("--p")) c.p = f.p;
  if (given("--n-test")) c.n_test = f.n_test;
  if (given("--no-qsis")) c.qsis = false;
  if (given("--no-qasis")) c.qasis = false;
  if (given("--no-qpe")) c.qpe = false;
  validate(c);
  return c;
}

Dataset load(const RunConfig& c) {
  if (c.data.empty()) throw ConfigError("--data is required");
  return load_csv(c.data, c.response);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Additive quantile forward screening", "aqfs"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* screen_cmd = app.add_subcommand("screen", "Forward screening path on a CSV dataset");
  add_common(*screen_cmd, f);
  add_data(*screen_cmd, f);

  CLI::App* select_cmd = app.add_subcommand("select", "Screening followed by QBIC model selection");
  add_common(*select_cmd, f);
  add_data(*select_cmd, f);
  select_cmd->add_option("--cn", f.cn, "QBIC variant(s): 1 = ln ln p, 2 = ln(0.75 ln p), 3 = ln(0.5 ln p)")
      ->delimiter(',')
      ->check(CLI::IsMember({1, 2, 3}));

  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo study on a synthetic example");
  add_common(*simulate_cmd, f);
  simulate_cmd->add_option("--example", f.example, "Example model 1, 2 or 3");
  simulate_cmd->add_option("--reps", f.replications, "Replications (default 100)");
  simulate_cmd->add_option("--n", f.n, "Training sample size (default 300)");
  simulate_cmd->add_option("--p", f.p, "Number of covariates (default 3000)");
  simulate_cmd->add_option("--n-test", f.n_test, "Test sample size for QPE (default 5000)");
  simulate_cmd->add_flag("--no-qsis", f.no_qsis, "Skip the QSIS baseline");
  simulate_cmd->add_flag("--no-qasis", f.no_qasis, "Skip the QaSIS baseline");
  simulate_cmd->add_flag("--no-qpe", f.no_qpe, "Skip test-set prediction error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUserError;
  }

  try {
    if (screen_cmd->parsed()) {
      const RunConfig config = merge(*screen_cmd, f);
      const auto paths = cmd_screen(load(config), config, err);
      for (const auto& path : paths) {
        out << "tau " << tau_label(path.tau) << ": " << path.steps.size() << " steps written to " << config.out.string()
            << '\n';
      }
    } else if (select_cmd->parsed()) {
      const RunConfig config = merge(*select_cmd, f);
      for (const auto& entry : cmd_select(load(config), config, err)) {
        for (const auto& s : entry.selections) {
          out << "tau " << tau_label(entry.path.tau) << " " << to_string(s.variant) << ": ell_hat = " << s.ell_hat
              << '\n';
        }
      }
    } else if (simulate_cmd->parsed()) {
      const RunConfig config = merge(*simulate_cmd, f);
      const SimulationReport report = cmd_simulate(config, err);
      for (const auto& t : report.taus) {
        out << "tau " << tau_label(t.tau) << ": " << t.rows.size() - static_cast<std::size_t>(t.failures) << "/"
            << t.rows.size() << " replications completed\n";
      }
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kOk;
}

}  // namespace aqfs::cli
