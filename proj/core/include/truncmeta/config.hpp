#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "truncmeta/csv.hpp"
#include "truncmeta/simulate.hpp"

namespace truncmeta {

/// Ordered key=value file: '#' comments, blank lines skipped.
struct KeyValueFile {
  std::vector<std::pair<std::string, std::string>> entries;

  std::optional<std::string> get(const std::string& key) const;
  bool has(const std::string& key) const { return get(key).has_value(); }
};

KeyValueFile read_key_value_file(const std::filesystem::path& path);

/// Schema dialect, one line per study in study order:
///   study.<name> = observed
///   study.<name> = censored <alpha>
///   study.<name> = delist <idlist-file> <alpha>
///   universe = <idlist-file>        (DE-list-only mode)
/// Relative list paths resolve against the schema file's directory.
IngestSchema parse_ingest_schema(const std::filesystem::path& path);

/// Simulation study configuration file mirroring SimConfig plus the
/// D-robustness sweep.
struct SimStudyConfig {
  SimConfig sim;
  std::vector<int> d_values = {20, 50, 200};
  int d_reference = 1000;
};

SimStudyConfig parse_sim_config(const std::filesystem::path& path);

/// Comma list of per-study thresholds, '-' meaning observed:
/// "-,-,0.01,0.05".
std::vector<std::optional<double>> parse_censor_list(const std::string& text);

}  // namespace truncmeta
