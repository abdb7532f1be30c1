#include "aqfs/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "aqfs/error.hpp"

namespace aqfs::cli {

using nlohmann::json;

CnVariant cn_from_int(int code) {
  switch (code) {
    case 1: return CnVariant::QBIC1;
    case 2: return CnVariant::QBIC2;
    case 3: return CnVariant::QBIC3;
    default: throw ConfigError("--cn must be 1, 2 or 3, got " + std::to_string(code));
  }
}

int cn_to_int(CnVariant variant) {
  switch (variant) {
    case CnVariant::QBIC1: return 1;
    case CnVariant::QBIC2: return 2;
    case CnVariant::QBIC3: return 3;
    case CnVariant::Custom: break;
  }
  throw ConfigError("custom C_n is not a CLI variant");
}

void validate(const RunConfig& c) {
  if (c.taus.empty()) throw ConfigError("at least one tau is required");
  for (const double tau : c.taus) {
    if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must lie in (0, 1), got " + std::to_string(tau));
  }
  if (c.qn < 0) throw ConfigError("qn must be >= 1 (or 0 for the default)");
  if (c.degree < 0) throw ConfigError("degree must be >= 1 (or 0 for the default)");
  if (c.qn > 0 && c.degree > c.qn) throw ConfigError("degree cannot exceed qn");
  if (c.steps < 0) throw ConfigError("steps must be >= 1 (or 0 for the default)");
  if (c.cn.empty()) throw ConfigError("at least one C_n variant is required");
  if (!(c.tol > 0.0 && c.tol < 1.0)) throw ConfigError("tol must lie in (0, 1)");
  if (c.threads < 0) throw ConfigError("threads must be >= 1 (or 0 for all cores)");
  if (c.example < 1 || c.example > 3) throw ConfigError("example must be 1, 2 or 3, got " + std::to_string(c.example));
  if (c.replications < 1) throw ConfigError("replications must be >= 1");
  if (c.n < 3) throw ConfigError("n must be >= 3");
  if (c.p < 1) throw ConfigError("p must be >= 1");
  if (c.n_test < 1) throw ConfigError("n_test must be >= 1");
}

namespace {

template <typename T>
T get(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

void apply_json(RunConfig& c, const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{"tau",  "qn",      "degree",   "steps",        "cn",      "tol",
                                           "seed", "threads", "out",      "data",         "response", "example",
                                           "reps", "n",       "p",        "n_test",       "qsis",    "qasis",
                                           "qpe"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  if (doc.contains("tau")) {
    c.taus = doc["tau"].is_array() ? get<std::vector<double>>(doc, "tau") : std::vector<double>{get<double>(doc, "tau")};
  }
  if (doc.contains("qn")) c.qn = get<int>(doc, "qn");
  if (doc.contains("degree")) c.degree = get<int>(doc, "degree");
  if (doc.contains("steps")) c.steps = get<int>(doc, "steps");
  if (doc.contains("cn")) {
    const std::vector<int> codes = doc["cn"].is_array() ? get<std::vector<int>>(doc, "cn") : std::vector<int>{get<int>(doc, "cn")};
    c.cn.clear();
    for (const int code : codes) c.cn.push_back(cn_from_int(code));
  }
  if (doc.contains("tol")) c.tol = get<double>(doc, "tol");
  if (doc.contains("seed")) c.seed = get<std::uint64_t>(doc, "seed");
  if (doc.contains("threads")) c.threads = get<int>(doc, "threads");
  if (doc.contains("out")) c.out = get<std::string>(doc, "out");
  if (doc.contains("data")) c.data = get<std::string>(doc, "data");
  if (doc.contains("response")) c.response = get<std::string>(doc, "response");
  if (doc.contains("example")) c.example = get<int>(doc, "example");
  if (doc.contains("reps")) c.replications = get<int>(doc, "reps");
  if (doc.contains("n")) c.n = get<int>(doc, "n");
  if (doc.contains("p")) c.p = get<int>(doc, "p");
  if (doc.contains("n_test")) c.n_test = get<int>(doc, "n_test");
  if (doc.contains("qsis")) c.qsis = get<bool>(doc, "qsis");
  if (doc.contains("qasis")) c.qasis = get<bool>(doc, "qasis");
  if (doc.contains("qpe")) c.qpe = get<bool>(doc, "qpe");
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  RunConfig config;
  apply_json(config, doc);
  return config;
}

json to_json(const RunConfig& c) {
  std::vector<int> cn;
  for (const auto v : c.cn) cn.push_back(cn_to_int(v));
  return json{{"tau", c.taus},   {"qn", c.qn},         {"degree", c.degree},
              {"steps", c.steps}, {"cn", cn},           {"tol", c.tol},
              {"seed", c.seed},   {"threads", c.threads},
              {"data", c.data.string()}, {"response", c.response}, {"example", c.example},
              {"reps", c.replications}, {"n", c.n},     {"p", c.p},
              {"n_test", c.n_test}, {"qsis", c.qsis},   {"qasis", c.qasis},
              {"qpe", c.qpe}};
}

StudyConfig study_config(const RunConfig& c) {
  StudyConfig s;
  s.example_id = c.example;
  s.taus = c.taus;
  s.replications = c.replications;
  s.n = c.n;
  s.p = c.p;
  s.seed = c.seed;
  s.qn = c.qn;
  s.degree = c.degree;
  s.steps = c.steps;
  s.tol = c.tol;
  s.threads = c.threads;
  s.n_test = c.n_test;
  s.run_qsis = c.qsis;
  s.run_qasis = c.qasis;
  s.run_qpe = c.qpe;
  return s;
}

}  // namespace aqfs::cli
