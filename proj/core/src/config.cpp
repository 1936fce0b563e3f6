#include "truncmeta/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace truncmeta {

namespace {

std::string strip(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> words;
  std::istringstream iss(s);
  std::string w;
  while (iss >> w) words.push_back(w);
  return words;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad number '" + s + "' for " + what);
  }
}

long long to_int(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad integer '" + s + "' for " + what);
  }
}

}  // namespace

std::optional<std::string> KeyValueFile::get(const std::string& key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return v;
  }
  return std::nullopt;
}

KeyValueFile read_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path.string());
  KeyValueFile file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = strip(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config: missing '=' at " + path.string() + ":" +
                               std::to_string(line_no));
    }
    file.entries.emplace_back(strip(text.substr(0, eq)), strip(text.substr(eq + 1)));
  }
  return file;
}

IngestSchema parse_ingest_schema(const std::filesystem::path& path) {
  const KeyValueFile file = read_key_value_file(path);
  const std::filesystem::path base = path.parent_path();
  IngestSchema schema;
  for (const auto& [key, value] : file.entries) {
    if (key == "universe") {
      schema.universe = base / value;
      continue;
    }
    if (key.rfind("study.", 0) != 0) {
      throw std::runtime_error("schema: unknown key '" + key + "'");
    }
    StudySpec spec;
    spec.name = key.substr(6);
    if (spec.name.empty()) throw std::runtime_error("schema: empty study name");
    const auto words = split_words(value);
    if (words.empty()) throw std::runtime_error("schema: empty mode for study " + spec.name);
    if (words[0] == "observed") {
      if (words.size() != 1) throw std::runtime_error("schema: observed takes no arguments");
      spec.source = StudySpec::Source::csv_observed;
    } else if (words[0] == "censored") {
      if (words.size() != 2) {
        throw std::runtime_error("schema: censored needs a threshold (study " + spec.name + ")");
      }
      spec.source = StudySpec::Source::csv_censored;
      spec.threshold = to_double(words[1], "threshold of study " + spec.name);
    } else if (words[0] == "delist") {
      if (words.size() != 3) {
        throw std::runtime_error("schema: delist needs <file> <alpha> (study " + spec.name + ")");
      }
      spec.source = StudySpec::Source::de_list;
      spec.list_path = base / words[1];
      spec.threshold = to_double(words[2], "threshold of study " + spec.name);
    } else {
      throw std::runtime_error("schema: unknown mode '" + words[0] + "' for study " + spec.name);
    }
    if (spec.source != StudySpec::Source::csv_observed &&
        !(spec.threshold > 0.0 && spec.threshold < 1.0)) {
      throw std::runtime_error("schema: threshold of study " + spec.name +
                               " must lie in (0,1)");
    }
    schema.studies.push_back(std::move(spec));
  }
  if (schema.studies.empty()) throw std::runtime_error("schema: no studies declared");
  return schema;
}

std::vector<std::optional<double>> parse_censor_list(const std::string& text) {
  std::vector<std::optional<double>> pattern;
  std::string item;
  std::istringstream iss(text);
  while (std::getline(iss, item, ',')) {
    const std::string v = strip(item);
    if (v == "-" || v.empty()) {
      pattern.push_back(std::nullopt);
    } else {
      pattern.push_back(to_double(v, "censor list entry"));
    }
  }
  return pattern;
}

SimStudyConfig parse_sim_config(const std::filesystem::path& path) {
  const KeyValueFile file = read_key_value_file(path);
  SimStudyConfig out;
  if (const auto v = file.get("scale")) {
    if (*v == "paper") {
      out.sim = SimConfig::paper_scale();
    } else if (*v != "desk") {
      throw std::runtime_error("config: scale must be desk or paper");
    }
  }
  SimConfig& sim = out.sim;
  if (const auto v = file.get("genes")) sim.genes = static_cast<int>(to_int(*v, "genes"));
  if (const auto v = file.get("samples_per_study")) {
    sim.samples_per_study = static_cast<int>(to_int(*v, "samples_per_study"));
  }
  if (const auto v = file.get("studies")) sim.studies = static_cast<int>(to_int(*v, "studies"));
  if (const auto v = file.get("clusters")) sim.clusters = static_cast<int>(to_int(*v, "clusters"));
  if (const auto v = file.get("cluster_size")) {
    sim.cluster_size = static_cast<int>(to_int(*v, "cluster_size"));
  }
  if (const auto v = file.get("de_genes")) sim.de_genes = static_cast<int>(to_int(*v, "de_genes"));
  if (const auto v = file.get("effect_lo")) sim.effect_lo = to_double(*v, "effect_lo");
  if (const auto v = file.get("effect_hi")) sim.effect_hi = to_double(*v, "effect_hi");
  if (const auto v = file.get("wishart_dof")) {
    sim.wishart_dof = static_cast<int>(to_int(*v, "wishart_dof"));
  }
  if (const auto v = file.get("psi_diag")) sim.psi_diag = to_double(*v, "psi_diag");
  if (const auto v = file.get("psi_offdiag")) sim.psi_offdiag = to_double(*v, "psi_offdiag");
  if (const auto v = file.get("censor")) sim.censor_pattern = parse_censor_list(*v);
  if (const auto v = file.get("replicates")) {
    sim.replicates = static_cast<int>(to_int(*v, "replicates"));
  }
  if (const auto v = file.get("seed")) {
    sim.seed = static_cast<std::uint64_t>(to_int(*v, "seed"));
  }
  if (const auto v = file.get("significance_level")) {
    sim.significance_level = to_double(*v, "significance_level");
  }
  if (const auto v = file.get("nominal_fdr")) sim.nominal_fdr = to_double(*v, "nominal_fdr");
  if (const auto v = file.get("imputations")) {
    sim.imputations = static_cast<int>(to_int(*v, "imputations"));
  }
  if (const auto v = file.get("d_values")) {
    out.d_values.clear();
    std::istringstream iss(*v);
    std::string item;
    while (std::getline(iss, item, ',')) {
      out.d_values.push_back(static_cast<int>(to_int(strip(item), "d_values")));
    }
    if (out.d_values.empty()) throw std::runtime_error("config: empty d_values");
  }
  if (const auto v = file.get("d_reference")) {
    out.d_reference = static_cast<int>(to_int(*v, "d_reference"));
  }
  sim.validate();
  return out;
}

}  // namespace truncmeta
