#include "mimobc/cli_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mimobc/errors.hpp"

namespace mimobc {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as a number");
  }
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as an integer");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as a boolean");
}

ThresholdMode parse_mode(const std::string& key, const std::string& value) {
  if (value == "fixed") return ThresholdMode::fixed;
  if (value == "theorem1_necessary") return ThresholdMode::theorem1_necessary;
  if (value == "theorem2_sufficient") return ThresholdMode::theorem2_sufficient;
  if (value == "remark1_refined") return ThresholdMode::remark1_refined;
  if (value == "fig1_empirical") return ThresholdMode::fig1_empirical;
  throw ConfigError("config key '" + key + "': unknown threshold mode '" + value + "'");
}

const char* mode_name(ThresholdMode m) {
  switch (m) {
    case ThresholdMode::fixed:
      return "fixed";
    case ThresholdMode::theorem1_necessary:
      return "theorem1_necessary";
    case ThresholdMode::theorem2_sufficient:
      return "theorem2_sufficient";
    case ThresholdMode::remark1_refined:
      return "remark1_refined";
    case ThresholdMode::fig1_empirical:
      return "fig1_empirical";
  }
  return "unknown";
}

}  // namespace

std::string format_sig12(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0.00000000000";
  const double a = std::abs(v);
  const int e = static_cast<int>(std::floor(std::log10(a)));
  char buf[64];
  if (e >= -4 && e < 15) {
    const int decimals = std::max(0, 11 - e);
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  } else {
    std::snprintf(buf, sizeof buf, "%.11e", v);
  }
  return buf;
}

void emit_csv(const CsvTable& table, std::ostream& out) {
  if (table.rows.empty()) throw std::invalid_argument("emit_csv: empty table");
  for (size_t i = 0; i < table.header.size(); ++i) {
    if (i) out << ',';
    out << table.header[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("emit_csv: write failed");
}

void emit_csv(const CsvTable& table, const std::filesystem::path& destination) {
  std::ofstream f(destination, std::ios::binary);
  if (!f) throw std::runtime_error("emit_csv: cannot open " + destination.string());
  emit_csv(table, f);
}

CsvTable to_csv(const std::vector<SumRateRow>& rows) {
  CsvTable t;
  t.header = {"N", "scheme", "mean_rate_nats", "stderr", "singular_trials"};
  for (const auto& r : rows)
    t.rows.push_back({std::to_string(r.N), scheme_name(r.scheme), format_sig12(r.mean_rate_nats),
                      format_sig12(r.std_error), std::to_string(r.singular_trials)});
  return t;
}

CsvTable to_csv(const std::vector<ThresholdSweepRow>& rows) {
  CsvTable t;
  t.header = {"N", "t_star", "mean_rate_nats", "stderr"};
  for (const auto& r : rows)
    t.rows.push_back({std::to_string(r.N), format_sig12(r.t_star), format_sig12(r.mean_rate_nats),
                      format_sig12(r.std_error)});
  return t;
}

CsvTable to_csv(const std::vector<PowerSweepRow>& rows) {
  CsvTable t;
  t.header = {"P_db", "scheme", "mean_rate_nats", "stderr", "singular_trials"};
  for (const auto& r : rows)
    t.rows.push_back({format_sig12(r.P_db), scheme_name(r.scheme), format_sig12(r.mean_rate_nats),
                      format_sig12(r.std_error), std::to_string(r.singular_trials)});
  return t;
}

CsvTable to_csv(const std::vector<SchemeSlope>& rows) {
  CsvTable t;
  t.header = {"scheme", "slope_nats_per_ln_p"};
  for (const auto& r : rows) t.rows.push_back({scheme_name(r.scheme), format_sig12(r.slope)});
  return t;
}

CsvTable to_csv(const std::vector<FeedbackRow>& rows) {
  CsvTable t;
  t.header = {"N", "algorithm", "mean_real_values_per_user", "stderr"};
  for (const auto& r : rows)
    t.rows.push_back({std::to_string(r.N), r.algorithm, format_sig12(r.mean_per_user), format_sig12(r.std_error)});
  return t;
}

CsvTable to_csv(const ValidationReport& report) {
  CsvTable t;
  t.header = {"statistic", "value", "stderr", "samples", "target", "status", "note"};
  for (const auto& s : report.stats)
    t.rows.push_back({s.name, format_sig12(s.value), format_sig12(s.std_error), std::to_string(s.samples),
                      format_sig12(s.target), s.pass ? "pass" : "fail", s.note});
  return t;
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "m") {
    const long v = parse_long(key, value);
    if (v < 1 || v > 8) throw ConfigError("config key 'm': out of range (must be in [1, 8])");
    cfg.M = static_cast<int>(v);
  } else if (key == "k") {
    const long v = parse_long(key, value);
    if (v < 1 || v > 8) throw ConfigError("config key 'k': out of range (must be in [1, 8])");
    cfg.K = static_cast<int>(v);
  } else if (key == "n") {
    std::vector<int> grid;
    for (const auto& item : split_csv(value)) {
      const long v = parse_long(key, item);
      if (v < 1) throw ConfigError("config key 'n': out of range (every N must be >= 1)");
      grid.push_back(static_cast<int>(v));
    }
    if (grid.empty()) throw ConfigError("config key 'n': empty list");
    cfg.N_grid = std::move(grid);
  } else if (key == "p_db") {
    std::vector<double> grid;
    for (const auto& item : split_csv(value)) grid.push_back(parse_double(key, item));
    if (grid.empty()) throw ConfigError("config key 'p_db': empty list");
    cfg.P_grid_db = std::move(grid);
  } else if (key == "trials") {
    const long v = parse_long(key, value);
    if (v < 1) throw ConfigError("config key 'trials': out of range (must be >= 1)");
    cfg.trials = static_cast<int>(v);
  } else if (key == "schemes") {
    std::vector<Scheme> schemes;
    for (const auto& item : split_csv(value)) {
      const auto s = scheme_from_name(item);
      if (!s) throw ConfigError("config key 'schemes': unknown scheme '" + item + "'");
      if (std::find(schemes.begin(), schemes.end(), *s) == schemes.end()) schemes.push_back(*s);
    }
    if (schemes.empty()) throw ConfigError("config key 'schemes': empty list");
    cfg.schemes = std::move(schemes);
  } else if (key == "threshold_mode") {
    cfg.threshold.mode = parse_mode(key, value);
  } else if (key == "rho_offset") {
    cfg.threshold.rho_offset = parse_double(key, value);
  } else if (key == "t") {
    cfg.threshold.mode = ThresholdMode::fixed;
    cfg.threshold.rho_offset = parse_double(key, value);
  } else if (key == "beta") {
    const double v = parse_double(key, value);
    if (v < 0.0 || v > 1.0) throw ConfigError("config key 'beta': out of range (must be in [0, 1])");
    cfg.beta = v;
  } else if (key == "master_seed" || key == "seed") {
    try {
      cfg.master_seed = std::stoull(value);
    } catch (...) {
      throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as an unsigned integer");
    }
  } else if (key == "epsilon_orth") {
    const double v = parse_double(key, value);
    if (!(v > 0.0) || v > 1.0) throw ConfigError("config key 'epsilon_orth': out of range (must be in (0, 1])");
    cfg.epsilon_orth = v;
  } else if (key == "threads") {
    const long v = parse_long(key, value);
    if (v < 0) throw ConfigError("config key 'threads': out of range (must be >= 0)");
    cfg.threads = static_cast<int>(v);
  } else if (key == "exhaustive_budget") {
    const long v = parse_long(key, value);
    if (v < 1) throw ConfigError("config key 'exhaustive_budget': out of range (must be >= 1)");
    cfg.exhaustive_budget = v;
  } else if (key == "out_dir") {
    cfg.out_dir = value;
  } else if (key == "quick") {
    cfg.quick = parse_bool(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_config_stream(std::istream& in, ExperimentConfig base) {
  ExperimentConfig cfg = std::move(base);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    apply_config_entry(cfg, key, value);
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config file '" + path + "' does not exist or cannot be read");
  return parse_config_stream(f, std::move(base));
}

void validate_config(const ExperimentConfig& cfg) {
  const bool theorem_mode = cfg.threshold.mode == ThresholdMode::theorem1_necessary ||
                            cfg.threshold.mode == ThresholdMode::theorem2_sufficient ||
                            cfg.threshold.mode == ThresholdMode::remark1_refined;
  for (int N : cfg.N_grid) {
    if (theorem_mode && N < 16)
      throw ConfigError("config key 'n': N=" + std::to_string(N) +
                        " requires N >= 16 under threshold_mode=" + mode_name(cfg.threshold.mode));
    if (cfg.threshold.mode == ThresholdMode::fig1_empirical && N < 3)
      throw ConfigError("config key 'n': N=" + std::to_string(N) + " requires N >= 3 under fig1_empirical");
  }
}

std::string config_digest(const ExperimentConfig& cfg) {
  std::ostringstream canon;
  canon << "m=" << cfg.M << "\nk=" << cfg.K << "\nn=";
  for (size_t i = 0; i < cfg.N_grid.size(); ++i) canon << (i ? "," : "") << cfg.N_grid[i];
  canon << "\np_db=";
  for (size_t i = 0; i < cfg.P_grid_db.size(); ++i) canon << (i ? "," : "") << format_sig12(cfg.P_grid_db[i]);
  canon << "\ntrials=" << cfg.trials << "\nschemes=";
  for (size_t i = 0; i < cfg.schemes.size(); ++i) canon << (i ? "," : "") << scheme_name(cfg.schemes[i]);
  canon << "\nthreshold_mode=" << mode_name(cfg.threshold.mode)
        << "\nrho_offset=" << format_sig12(cfg.threshold.effective_offset())
        << "\nbeta=" << (cfg.beta ? format_sig12(*cfg.beta) : "preset")
        << "\nmaster_seed=" << cfg.master_seed
        << "\nepsilon_orth=" << format_sig12(cfg.epsilon_orth)
        << "\nexhaustive_budget=" << cfg.exhaustive_budget
        << "\nquick=" << (cfg.quick ? 1 : 0) << "\n";
  const std::string s = canon.str();
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& destination) {
  nlohmann::json j;
  j["config_digest"] = manifest.config_digest;
  j["master_seed"] = manifest.master_seed;
  j["artifact_version"] = manifest.artifact_version;
  j["table_rows"] = manifest.table_rows;
  j["wall_seconds"] = manifest.wall_seconds;
  std::ofstream f(destination, std::ios::binary);
  if (!f) throw std::runtime_error("write_manifest: cannot open " + destination.string());
  f << j.dump(2) << '\n';
}

}  // namespace mimobc
