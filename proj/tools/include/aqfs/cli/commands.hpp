#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "aqfs/cli/config.hpp"
#include "aqfs/cli/dataset.hpp"
#include "aqfs/qbic.hpp"
#include "aqfs/screening.hpp"
#include "aqfs/simlab.hpp"

namespace aqfs::cli {

/// "0.5", "0.25": the shortest round-trip spelling, used in file names.
std::string tau_label(double tau);

/// Covariates mapped to [0, 1]; constant columns become all zero.
Eigen::MatrixXd rescale_columns(const Eigen::MatrixXd& x);

/// Screening on a loaded dataset for one tau, with defaults resolved from the
/// data size. Writes nothing.
ScreeningPath screen(const Dataset& data, const RunConfig& config, double tau);

/// One path per tau; writes path_<tau>.csv and screened_<tau>.json under
/// config.out. Warnings go to `log`.
std::vector<ScreeningPath> cmd_screen(const Dataset& data, const RunConfig& config, std::ostream& log);

struct TauSelection {
  ScreeningPath path;
  std::vector<SelectionResult> selections;
};

/// cmd_screen followed by QBIC selection for each configured C_n variant;
/// additionally writes selected_<tau>.json.
std::vector<TauSelection> cmd_select(const Dataset& data, const RunConfig& config, std::ostream& log);

nlohmann::json report_json(const SimulationReport& report, const RunConfig& config);
/// Per tau and method: retention rate for each tracked covariate, then
/// All, FP, FN and QPE means. Blank cells where a value does not apply.
std::string table_csv(const SimulationReport& report);

/// Runs the study and writes report.json, table.csv and timing.csv under
/// config.out. Wall-clock time lives only in timing.csv.
SimulationReport cmd_simulate(const RunConfig& config, std::ostream& log);

}  // namespace aqfs::cli
