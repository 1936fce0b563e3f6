#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "truncmeta/model.hpp"

namespace truncmeta {

/// Bit-exact binary archive of a features x studies matrix with per-study
/// truncation.
///
/// Layout (little-endian throughout, trailing CRC32 of everything before it):
///   magic "TPV1" | version u32 | n_records u64 | K u32
///   K per-study descriptors: censored u8 + threshold f64
///   records: feature id u64 | K1 observed p-values f64 (study order)
///            | ceil(K2/8) indicator bytes (censored-study order, LSB first)
///   crc32 u32
struct TruncatedStore {
  static constexpr std::uint32_t kFormatVersion = 1;

  PanelSchema schema;
  std::vector<std::uint64_t> feature_ids;
  std::vector<double> observed;             // n_records x K1
  std::vector<std::uint8_t> indicator_bits; // n_records x ceil(K2/8), packed

  std::size_t records() const { return feature_ids.size(); }
  std::size_t indicator_stride() const { return (schema.k2() + 7) / 8; }
  bool indicator(std::size_t record, std::size_t censored_pos) const;
  void set_indicator(std::size_t record, std::size_t censored_pos, bool value);
  void append_record(std::uint64_t feature_id, std::span<const double> observed_p,
                     std::span<const std::uint8_t> indicators);
};

struct TruncationSummary {
  double below_fraction;   // fraction of truncated-study values below threshold
  double stored_fraction;  // stored values / total values
  double ratio;            // 1 - stored_fraction
  bool compressed;         // false when the scheme stores more than it saves
};

/// Full p-value table handed to truncate_matrix.
struct PvalueTable {
  std::vector<std::uint64_t> feature_ids;
  std::size_t studies = 0;
  std::vector<double> values;  // row-major, rows x studies

  std::size_t rows() const { return feature_ids.size(); }
  double at(std::size_t row, std::size_t study) const {
    return values[row * studies + study];
  }
};

/// Truncate a full matrix: studies with a threshold keep only the p < alpha
/// indicator. Storage accounting counts values the way the source workflow
/// does: each kept exact p-value costs 2 units (value + its index), each
/// untruncated study column costs 1 unit per entry.
std::pair<TruncatedStore, TruncationSummary> truncate_matrix(
    const PvalueTable& table, const std::vector<std::optional<double>>& thresholds);

void write_store(const TruncatedStore& store, const std::filesystem::path& path);
TruncatedStore read_store(const std::filesystem::path& path);

/// View a store as a panel matrix (feature ids rendered in decimal).
PanelMatrix to_panel_matrix(const TruncatedStore& store);

}  // namespace truncmeta
