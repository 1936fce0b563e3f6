#include "truncmeta/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace truncmeta {

namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) {
    throw std::runtime_error("csv: unterminated quote at line " + std::to_string(line_no));
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string strip(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& text, std::size_t row, const std::string& column) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("csv: non-numeric cell '" + text + "' at row " +
                             std::to_string(row) + ", column '" + column + "'");
  }
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line, line_no);
    for (auto& f : fields) f = strip(f);
    if (table.header.empty()) {
      table.header = std::move(fields);
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  if (table.header.empty()) throw std::runtime_error("csv: missing header row in " + path.string());
  return table;
}

PanelSchema IngestSchema::panel_schema() const {
  PanelSchema schema;
  for (const auto& s : studies) {
    if (s.source == StudySpec::Source::csv_observed) {
      schema.thresholds.push_back(std::nullopt);
    } else {
      schema.thresholds.push_back(s.threshold);
    }
  }
  schema.validate();
  return schema;
}

bool IngestSchema::needs_csv() const {
  return std::any_of(studies.begin(), studies.end(), [](const StudySpec& s) {
    return s.source != StudySpec::Source::de_list;
  });
}

std::vector<std::string> read_id_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open id list " + path.string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    const std::string id = strip(line);
    if (id.empty() || id[0] == '#') continue;
    ids.push_back(id);
  }
  return ids;
}

std::vector<std::uint8_t> de_list_indicators(
    const std::vector<std::string>& universe,
    const std::unordered_set<std::string>& listed) {
  std::vector<std::uint8_t> indicators(universe.size());
  for (std::size_t i = 0; i < universe.size(); ++i) {
    indicators[i] = listed.count(universe[i]) ? 1 : 0;
  }
  return indicators;
}

PanelMatrix ingest_csv(const std::filesystem::path& path, const IngestSchema& schema) {
  if (schema.studies.empty()) throw std::runtime_error("schema declares no studies");
  const CsvTable table = read_csv(path);
  if (table.header.size() < 2) {
    throw std::runtime_error("csv: need a feature-id column plus study columns");
  }

  // Resolve each CSV-backed study to its column.
  std::vector<int> column_of(schema.studies.size(), -1);
  for (std::size_t si = 0; si < schema.studies.size(); ++si) {
    const auto& spec = schema.studies[si];
    if (spec.source == StudySpec::Source::de_list) continue;
    const auto it = std::find(table.header.begin() + 1, table.header.end(), spec.name);
    if (it == table.header.end()) {
      throw std::runtime_error("csv: missing column '" + spec.name + "' declared in schema");
    }
    column_of[si] = static_cast<int>(it - table.header.begin());
  }

  // DE-list studies: indicators against the CSV's feature ids.
  std::vector<std::string> ids;
  ids.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.header.size()) {
      throw std::runtime_error("csv: row " + std::to_string(r + 2) + " has " +
                               std::to_string(table.rows[r].size()) + " fields, expected " +
                               std::to_string(table.header.size()));
    }
    ids.push_back(table.rows[r][0]);
  }
  std::vector<std::vector<std::uint8_t>> list_columns(schema.studies.size());
  for (std::size_t si = 0; si < schema.studies.size(); ++si) {
    const auto& spec = schema.studies[si];
    if (spec.source != StudySpec::Source::de_list) continue;
    const auto listed_vec = read_id_list(spec.list_path);
    const std::unordered_set<std::string> listed(listed_vec.begin(), listed_vec.end());
    list_columns[si] = de_list_indicators(ids, listed);
  }

  PanelMatrix matrix(schema.panel_schema());
  std::vector<double> observed;
  std::vector<std::uint8_t> indicators;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    observed.clear();
    indicators.clear();
    for (std::size_t si = 0; si < schema.studies.size(); ++si) {
      const auto& spec = schema.studies[si];
      switch (spec.source) {
        case StudySpec::Source::csv_observed: {
          const double p = parse_double(table.rows[r][column_of[si]], r + 2, spec.name);
          if (!(p > 0.0 && p <= 1.0)) {
            throw std::runtime_error("csv: p-value " + std::to_string(p) + " outside (0,1] at row " +
                                     std::to_string(r + 2) + ", column '" + spec.name + "'");
          }
          observed.push_back(p);
          break;
        }
        case StudySpec::Source::csv_censored: {
          const double v = parse_double(table.rows[r][column_of[si]], r + 2, spec.name);
          if (v != 0.0 && v != 1.0) {
            throw std::runtime_error("csv: indicator '" + table.rows[r][column_of[si]] +
                                     "' not in {0,1} at row " + std::to_string(r + 2) +
                                     ", column '" + spec.name + "'");
          }
          indicators.push_back(v == 1.0 ? 1 : 0);
          break;
        }
        case StudySpec::Source::de_list:
          indicators.push_back(list_columns[si][r]);
          break;
      }
    }
    matrix.add_row(ids[r], observed, indicators);
  }
  return matrix;
}

PanelMatrix ingest_de_lists(const IngestSchema& schema) {
  if (schema.needs_csv()) {
    throw std::runtime_error("schema has CSV-backed studies; use ingest_csv");
  }
  if (!schema.universe.has_value()) {
    throw std::runtime_error("DE-list ingestion requires a universe file");
  }
  const auto ids = read_id_list(*schema.universe);
  if (ids.empty()) throw std::runtime_error("universe file lists no features");

  std::vector<std::vector<std::uint8_t>> columns;
  for (const auto& spec : schema.studies) {
    const auto listed_vec = read_id_list(spec.list_path);
    const std::unordered_set<std::string> listed(listed_vec.begin(), listed_vec.end());
    columns.push_back(de_list_indicators(ids, listed));
  }

  PanelMatrix matrix(schema.panel_schema());
  std::vector<std::uint8_t> indicators(schema.studies.size());
  for (std::size_t r = 0; r < ids.size(); ++r) {
    for (std::size_t si = 0; si < columns.size(); ++si) indicators[si] = columns[si][r];
    matrix.add_row(ids[r], {}, indicators);
  }
  return matrix;
}

}  // namespace truncmeta
