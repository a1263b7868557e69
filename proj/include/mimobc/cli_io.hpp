#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mimobc/experiments.hpp"

namespace mimobc {

inline constexpr const char* kArtifactVersion = "0.1.0";
/// Seed used when neither --seed, the config file, nor MIMO_BC_SEED is given.
inline constexpr std::uint64_t kDefaultSeed = 1;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Fixed 12-significant-digit decimal rendering ('.' separator, trailing
/// zeros kept), e.g. 2.5055 -> "2.50550000000". Falls back to scientific
/// notation outside [1e-4, 1e15).
std::string format_sig12(double v);

void emit_csv(const CsvTable& table, std::ostream& out);
void emit_csv(const CsvTable& table, const std::filesystem::path& destination);

CsvTable to_csv(const std::vector<SumRateRow>& rows);
CsvTable to_csv(const std::vector<ThresholdSweepRow>& rows);
CsvTable to_csv(const std::vector<PowerSweepRow>& rows);
CsvTable to_csv(const std::vector<SchemeSlope>& rows);
CsvTable to_csv(const std::vector<FeedbackRow>& rows);
CsvTable to_csv(const ValidationReport& report);

/// Applies one lowercase snake_case key. Throws ConfigError naming the key on
/// unknown keys or out-of-range values.
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Flat key=value file ('#' comments). An empty file yields the documented
/// defaults (or the supplied base). Cross-field validation runs afterwards.
ExperimentConfig parse_config_file(const std::string& path, ExperimentConfig base = {});
ExperimentConfig parse_config_stream(std::istream& in, ExperimentConfig base = {});

/// Cross-field checks (e.g. theorem threshold modes require every N >= 16).
void validate_config(const ExperimentConfig& cfg);

/// Stable FNV-1a digest of the result-affecting fields (worker count and
/// output directory excluded), identical across platforms.
std::string config_digest(const ExperimentConfig& cfg);

struct RunManifest {
  std::string config_digest;
  std::uint64_t master_seed = 0;
  std::string artifact_version = kArtifactVersion;
  std::map<std::string, long> table_rows;
  double wall_seconds = 0.0;
};

void write_manifest(const RunManifest& manifest, const std::filesystem::path& destination);

}  // namespace mimobc
