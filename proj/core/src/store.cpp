#include "truncmeta/store.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <optional>
#include <stdexcept>

namespace truncmeta {

namespace {

constexpr char kMagic[4] = {'T', 'P', 'V', '1'};

void put_bytes(std::vector<std::uint8_t>& out, const void* data, std::size_t n) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  out.insert(out.end(), p, p + n);
}

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
#if defined(__BYTE_ORDER__) && __BYTE_ORDER__ == __ORDER_BIG_ENDIAN__
  std::reverse(bytes, bytes + sizeof(T));
#endif
  put_bytes(out, bytes, sizeof(T));
}

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  template <typename T>
  T get_le() {
    if (pos_ + sizeof(T) > size_) {
      throw std::runtime_error("store: truncated file");
    }
    T value;
    std::memcpy(&value, data_ + pos_, sizeof(T));
#if defined(__BYTE_ORDER__) && __BYTE_ORDER__ == __ORDER_BIG_ENDIAN__
    std::uint8_t* b = reinterpret_cast<std::uint8_t*>(&value);
    std::reverse(b, b + sizeof(T));
#endif
    pos_ += sizeof(T);
    return value;
  }

  void get_bytes(void* out, std::size_t n) {
    if (pos_ + n > size_) throw std::runtime_error("store: truncated file");
    std::memcpy(out, data_ + pos_, n);
    pos_ += n;
  }

  std::size_t remaining() const { return size_ - pos_; }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

}  // namespace

bool TruncatedStore::indicator(std::size_t record, std::size_t censored_pos) const {
  const std::size_t stride = indicator_stride();
  const std::uint8_t byte = indicator_bits[record * stride + censored_pos / 8];
  return (byte >> (censored_pos % 8)) & 1u;
}

void TruncatedStore::set_indicator(std::size_t record, std::size_t censored_pos, bool value) {
  const std::size_t stride = indicator_stride();
  std::uint8_t& byte = indicator_bits[record * stride + censored_pos / 8];
  if (value) {
    byte |= static_cast<std::uint8_t>(1u << (censored_pos % 8));
  } else {
    byte &= static_cast<std::uint8_t>(~(1u << (censored_pos % 8)));
  }
}

void TruncatedStore::append_record(std::uint64_t feature_id,
                                   std::span<const double> observed_p,
                                   std::span<const std::uint8_t> indicators) {
  if (static_cast<int>(observed_p.size()) != schema.k1() ||
      static_cast<int>(indicators.size()) != schema.k2()) {
    throw std::invalid_argument("TruncatedStore: record width does not match schema");
  }
  feature_ids.push_back(feature_id);
  observed.insert(observed.end(), observed_p.begin(), observed_p.end());
  indicator_bits.insert(indicator_bits.end(), indicator_stride(), 0);
  const std::size_t record = feature_ids.size() - 1;
  for (std::size_t i = 0; i < indicators.size(); ++i) {
    if (indicators[i] > 1) throw std::invalid_argument("TruncatedStore: indicator not in {0,1}");
    set_indicator(record, i, indicators[i] != 0);
  }
}

std::pair<TruncatedStore, TruncationSummary> truncate_matrix(
    const PvalueTable& table, const std::vector<std::optional<double>>& thresholds) {
  if (thresholds.size() != table.studies) {
    throw std::invalid_argument("truncate_matrix: one threshold slot per study required");
  }
  for (const auto& t : thresholds) {
    if (t.has_value() && !(*t > 0.0 && *t < 1.0)) {
      throw std::invalid_argument("truncate_matrix: threshold outside (0,1)");
    }
  }
  TruncatedStore store;
  store.schema.thresholds = thresholds;
  store.schema.validate();

  const std::size_t k1 = store.schema.k1();
  const std::size_t k2 = store.schema.k2();
  std::vector<double> observed_row(k1);
  std::vector<std::uint8_t> indicator_row(k2);

  std::size_t truncated_total = 0;
  std::size_t below = 0;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    std::size_t oi = 0;
    std::size_t ci = 0;
    for (std::size_t k = 0; k < table.studies; ++k) {
      const double p = table.at(r, k);
      if (thresholds[k].has_value()) {
        const bool significant = p < *thresholds[k];
        indicator_row[ci++] = significant ? 1 : 0;
        ++truncated_total;
        below += significant ? 1 : 0;
      } else {
        observed_row[oi++] = p;
      }
    }
    store.append_record(table.feature_ids[r], observed_row, indicator_row);
  }

  TruncationSummary summary{};
  const double total = static_cast<double>(table.rows()) * static_cast<double>(table.studies);
  summary.below_fraction =
      truncated_total == 0 ? 0.0
                           : static_cast<double>(below) / static_cast<double>(truncated_total);
  const double stored_exact = static_cast<double>(table.rows()) * static_cast<double>(k1) +
                              2.0 * static_cast<double>(below);
  summary.stored_fraction = total > 0.0 ? stored_exact / total : 0.0;
  summary.ratio = 1.0 - summary.stored_fraction;
  summary.compressed = summary.ratio >= 0.0;
  return {std::move(store), summary};
}

void write_store(const TruncatedStore& store, const std::filesystem::path& path) {
  std::vector<std::uint8_t> payload;
  const std::size_t k1 = store.schema.k1();
  const std::size_t stride = store.indicator_stride();
  payload.reserve(16 + store.schema.thresholds.size() * 9 +
                  store.records() * (8 + k1 * 8 + stride));
  put_bytes(payload, kMagic, 4);
  put_le<std::uint32_t>(payload, TruncatedStore::kFormatVersion);
  put_le<std::uint64_t>(payload, store.records());
  put_le<std::uint32_t>(payload, static_cast<std::uint32_t>(store.schema.k()));
  for (const auto& t : store.schema.thresholds) {
    put_le<std::uint8_t>(payload, t.has_value() ? 1 : 0);
    put_le<double>(payload, t.value_or(0.0));
  }
  for (std::size_t r = 0; r < store.records(); ++r) {
    put_le<std::uint64_t>(payload, store.feature_ids[r]);
    for (std::size_t i = 0; i < k1; ++i) {
      put_le<double>(payload, store.observed[r * k1 + i]);
    }
    put_bytes(payload, store.indicator_bits.data() + r * stride, stride);
  }
  const auto crc = static_cast<std::uint32_t>(
      crc32(0L, payload.data(), static_cast<uInt>(payload.size())));
  put_le<std::uint32_t>(payload, crc);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("store: cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) throw std::runtime_error("store: write failed for " + path.string());
}

TruncatedStore read_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::runtime_error("store: cannot open " + path.string());
  const std::streamsize size = in.tellg();
  if (size < 4 + 4 + 8 + 4 + 4) throw std::runtime_error("store: truncated file");
  in.seekg(0);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  in.read(reinterpret_cast<char*>(bytes.data()), size);
  if (!in) throw std::runtime_error("store: read failed for " + path.string());

  const std::size_t payload_size = bytes.size() - 4;
  const auto expected = static_cast<std::uint32_t>(
      crc32(0L, bytes.data(), static_cast<uInt>(payload_size)));
  std::uint32_t stored_crc;
  std::memcpy(&stored_crc, bytes.data() + payload_size, 4);
#if defined(__BYTE_ORDER__) && __BYTE_ORDER__ == __ORDER_BIG_ENDIAN__
  {
    std::uint8_t* b = reinterpret_cast<std::uint8_t*>(&stored_crc);
    std::swap(b[0], b[3]);
    std::swap(b[1], b[2]);
  }
#endif
  if (stored_crc != expected) {
    throw std::runtime_error("store: checksum mismatch (corrupt file)");
  }

  Reader reader(bytes.data(), payload_size);
  char magic[4];
  reader.get_bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("store: bad magic (not a truncated p-value store)");
  }
  const auto version = reader.get_le<std::uint32_t>();
  if (version != TruncatedStore::kFormatVersion) {
    throw std::runtime_error("store: unsupported format version " + std::to_string(version));
  }
  const auto n_records = reader.get_le<std::uint64_t>();
  const auto k = reader.get_le<std::uint32_t>();
  if (k == 0) throw std::runtime_error("store: zero studies");

  TruncatedStore store;
  store.schema.thresholds.resize(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    const auto censored = reader.get_le<std::uint8_t>();
    const auto threshold = reader.get_le<double>();
    if (censored) {
      store.schema.thresholds[i] = threshold;
    }
  }
  store.schema.validate();

  const std::size_t k1 = store.schema.k1();
  const std::size_t stride = store.indicator_stride();
  store.feature_ids.reserve(n_records);
  store.observed.reserve(n_records * k1);
  store.indicator_bits.reserve(n_records * stride);
  for (std::uint64_t r = 0; r < n_records; ++r) {
    store.feature_ids.push_back(reader.get_le<std::uint64_t>());
    for (std::size_t i = 0; i < k1; ++i) {
      store.observed.push_back(reader.get_le<double>());
    }
    const std::size_t offset = store.indicator_bits.size();
    store.indicator_bits.resize(offset + stride);
    reader.get_bytes(store.indicator_bits.data() + offset, stride);
  }
  if (reader.remaining() != 0) {
    throw std::runtime_error("store: trailing bytes after records");
  }
  return store;
}

PanelMatrix to_panel_matrix(const TruncatedStore& store) {
  PanelMatrix matrix(store.schema);
  const std::size_t k1 = store.schema.k1();
  const std::size_t k2 = store.schema.k2();
  std::vector<std::uint8_t> indicators(k2);
  for (std::size_t r = 0; r < store.records(); ++r) {
    for (std::size_t i = 0; i < k2; ++i) indicators[i] = store.indicator(r, i) ? 1 : 0;
    matrix.add_row(std::to_string(store.feature_ids[r]),
                   std::span<const double>(store.observed.data() + r * k1, k1), indicators);
  }
  return matrix;
}

}  // namespace truncmeta
