#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aqfs/qbic.hpp"
#include "aqfs/simlab.hpp"

namespace aqfs::cli {

/// Settings shared by every subcommand. Zero for qn / degree / steps means
/// "use the default for this n".
struct RunConfig {
  std::vector<double> taus{0.5};
  int qn = 0;
  int degree = 0;
  int steps = 0;
  std::vector<CnVariant> cn{CnVariant::QBIC1, CnVariant::QBIC2, CnVariant::QBIC3};
  double tol = 1e-8;
  std::uint64_t seed = 20240101;
  int threads = 1;
  std::filesystem::path out = ".";

  // screen / select
  std::filesystem::path data;
  std::string response = "y";

  // simulate
  int example = 1;
  int replications = 100;
  int n = 300;
  int p = 3000;
  int n_test = 5000;
  bool qsis = true;
  bool qasis = true;
  bool qpe = true;
};

/// Throws ConfigError on out-of-range values.
void validate(const RunConfig& config);

/// Overlays the keys present in `doc` onto `config`. Unknown keys are errors.
void apply_json(RunConfig& config, const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// Every field except `out`, so a report can be replayed with `--config`.
nlohmann::json to_json(const RunConfig& config);

StudyConfig study_config(const RunConfig& config);

CnVariant cn_from_int(int code);
int cn_to_int(CnVariant variant);

}  // namespace aqfs::cli
