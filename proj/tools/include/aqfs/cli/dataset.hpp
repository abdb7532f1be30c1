#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace aqfs::cli {

/// A response column plus raw (unscaled) covariates read from CSV.
struct Dataset {
  std::vector<std::string> covariate_names;
  std::string response_name;
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  /// Rows skipped because a field was empty or NA.
  int dropped_rows = 0;
  std::vector<std::string> warnings;

  int n() const { return static_cast<int>(x.rows()); }
  int p() const { return static_cast<int>(x.cols()); }
};

/// Reads a comma-separated file with a header row. Every column other than
/// `response` becomes a covariate. Rows with empty / NA / NaN fields are
/// dropped and counted; any other non-numeric field is an error naming its
/// 1-based line and column. Requires n >= 3 and p >= 1 after dropping.
Dataset load_csv(const std::filesystem::path& path, const std::string& response);

/// Writes a dataset back out (response first) with round-trip precision.
void write_csv(const std::filesystem::path& path, const Dataset& data);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace aqfs::cli
