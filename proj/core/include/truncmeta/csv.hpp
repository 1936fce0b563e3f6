#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "truncmeta/model.hpp"

namespace truncmeta {

/// RFC-4180-style CSV (UTF-8, header row required, quoted fields allowed).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);

/// One study's data source in an ingestion schema.
struct StudySpec {
  enum class Source {
    csv_observed,  // CSV column of exact p-values
    csv_censored,  // CSV column of 0/1 indicators with a threshold
    de_list,       // file listing the significant feature ids, with a threshold
  };
  std::string name;
  Source source = Source::csv_observed;
  double threshold = 0.0;
  std::filesystem::path list_path;
};

/// Per-study declarations, in study order. The universe file supplies the
/// feature ids when no CSV is involved.
struct IngestSchema {
  std::vector<StudySpec> studies;
  std::optional<std::filesystem::path> universe;

  PanelSchema panel_schema() const;
  bool needs_csv() const;
};

/// Ingest a CSV of per-study evidence against a schema. Validation failures
/// name the offending row and column.
PanelMatrix ingest_csv(const std::filesystem::path& path, const IngestSchema& schema);

/// Ingest from DE lists alone: the universe file gives the feature ids, each
/// study contributes an indicator column (1 when listed).
PanelMatrix ingest_de_lists(const IngestSchema& schema);

/// Indicator column for one DE list against a universe of feature ids.
std::vector<std::uint8_t> de_list_indicators(
    const std::vector<std::string>& universe,
    const std::unordered_set<std::string>& listed);

/// One feature id per line; '#' comments and blank lines skipped.
std::vector<std::string> read_id_list(const std::filesystem::path& path);

}  // namespace truncmeta
