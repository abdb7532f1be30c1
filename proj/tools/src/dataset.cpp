#include "aqfs/cli/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "aqfs/error.hpp"

namespace aqfs::cli {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool is_missing(const std::string& field) {
  return field.empty() || field == "NA" || field == "na" || field == "NaN" || field == "nan";
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

Dataset load_csv(const std::filesystem::path& path, const std::string& response) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> header = split(line);
  for (auto& h : header) h = trim(h);

  const auto response_it = std::find(header.begin(), header.end(), response);
  if (response_it == header.end()) throw ConfigError(path.string() + ": no column named '" + response + "'");
  const auto response_col = static_cast<std::size_t>(response_it - header.begin());

  Dataset data;
  data.response_name = response;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != response_col) data.covariate_names.push_back(header[c]);
  }

  std::vector<std::vector<double>> rows;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split(line);
    if (fields.size() != header.size()) {
      throw ConfigError(path.string() + ":" + std::to_string(line_number) + ": expected " +
                        std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> values(fields.size());
    bool missing = false;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string field = trim(fields[c]);
      if (is_missing(field)) {
        missing = true;
        continue;
      }
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
        throw ConfigError(path.string() + ":" + std::to_string(line_number) + ": column " + std::to_string(c + 1) +
                          " ('" + header[c] + "') is not numeric: '" + field + "'");
      }
      values[c] = v;
    }
    if (missing) {
      ++data.dropped_rows;
      continue;
    }
    rows.push_back(std::move(values));
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(data.covariate_names.size());
  if (p < 1) throw ConfigError(path.string() + ": no covariate columns besides the response");
  if (n < 3) throw ConfigError(path.string() + ": need at least 3 complete rows, found " + std::to_string(n));

  data.x.resize(n, p);
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    Eigen::Index k = 0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == response_col) {
        data.y[i] = row[c];
      } else {
        data.x(i, k++) = row[c];
      }
    }
  }
  if (data.dropped_rows > 0) {
    data.warnings.push_back("dropped " + std::to_string(data.dropped_rows) + " row(s) with missing values");
  }
  for (Eigen::Index k = 0; k < p; ++k) {
    if (data.x.col(k).maxCoeff() == data.x.col(k).minCoeff()) {
      data.warnings.push_back("covariate '" + data.covariate_names[static_cast<std::size_t>(k)] +
                              "' is constant and will be ignored");
    }
  }
  return data;
}

void write_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << data.response_name;
  for (const auto& name : data.covariate_names) out << ',' << name;
  out << '\n';
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    out << format_double(data.y[i]);
    for (Eigen::Index k = 0; k < data.x.cols(); ++k) out << ',' << format_double(data.x(i, k));
    out << '\n';
  }
}

}  // namespace aqfs::cli
