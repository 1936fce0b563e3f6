// Command-line driver: combine | simulate | truncate | validate | moments.
#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "truncmeta/config.hpp"
#include "truncmeta/csv.hpp"
#include "truncmeta/imputation.hpp"
#include "truncmeta/inference.hpp"
#include "truncmeta/model.hpp"
#include "truncmeta/simulate.hpp"
#include "truncmeta/store.hpp"

namespace {

using namespace truncmeta;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_fixed(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

bool is_store_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  char magic[4] = {};
  in.read(magic, 4);
  return in.gcount() == 4 && magic[0] == 'T' && magic[1] == 'P' && magic[2] == 'V' &&
         magic[3] == '1';
}

struct CombineArgs {
  std::string input;
  std::string schema;
  std::string method = "mean";
  std::string transform = "fisher";
  int d = 50;
  std::uint64_t seed = 0;
  std::string fdr = "both";
  std::string out;
};

int run_combine(const CombineArgs& args) {
  std::optional<PanelMatrix> matrix;
  if (is_store_file(args.input)) {
    matrix.emplace(to_panel_matrix(read_store(args.input)));
  } else {
    if (args.schema.empty()) {
      throw std::runtime_error("--schema is required for CSV input");
    }
    const IngestSchema schema = parse_ingest_schema(args.schema);
    if (schema.needs_csv()) {
      matrix.emplace(ingest_csv(args.input, schema));
    } else {
      matrix.emplace(ingest_de_lists(schema));
    }
  }
  std::fprintf(stderr, "combine: %zu features, K=%d (K1=%d observed, K2=%d censored)\n",
               matrix->rows(), matrix->schema().k(), matrix->schema().k1(),
               matrix->schema().k2());

  AnalysisOptions options;
  options.method = method_from_string(args.method);
  options.transform = EvidenceTransform::of(transform_kind_from_string(args.transform));
  options.imputations = args.d;
  options.seed = args.seed;
  const auto results = meta_analyze_matrix(*matrix, options);

  const bool want_bh = args.fdr == "bh" || args.fdr == "both";
  const bool want_by = args.fdr == "by" || args.fdr == "both";
  if (!want_bh && !want_by) throw std::runtime_error("--fdr must be bh, by or both");

  std::ofstream out(args.out, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file " + args.out);
  out << "feature,statistic,p_value";
  if (want_bh) out << ",q_bh";
  if (want_by) out << ",q_by";
  out << "\n";
  for (const auto& r : results) {
    out << r.feature_id << ',' << fmt_double(r.statistic) << ',' << fmt_double(r.p_meta);
    if (want_bh) out << ',' << fmt_double(r.q_bh);
    if (want_by) out << ',' << fmt_double(r.q_by);
    out << "\n";
  }
  if (EvidenceTransform::clamp_count() > 0) {
    std::fprintf(stderr, "combine: %" PRIu64 " p-value(s) clamped before transform\n",
                 EvidenceTransform::clamp_count());
  }
  return 0;
}

struct SimulateArgs {
  std::string config;
  std::string study = "type1";
  std::string out;
};

int run_simulate(const SimulateArgs& args) {
  SimStudyConfig cfg;
  if (!args.config.empty()) cfg = parse_sim_config(args.config);

  std::ofstream out(args.out, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file " + args.out);

  if (args.study == "type1") {
    const auto rows = run_type1_study(cfg.sim);
    out << "method,transform,type1_mean,type1_se\n";
    for (const auto& r : rows) {
      out << to_string(r.method) << ',' << to_string(r.transform) << ','
          << fmt_double(r.mean) << ',' << fmt_double(r.se) << "\n";
      std::fprintf(stderr, "type1  %-9s %-9s %s (%s)\n", to_string(r.method),
                   to_string(r.transform), fmt_fixed(r.mean).c_str(),
                   fmt_fixed(r.se).c_str());
    }
  } else if (args.study == "power") {
    const auto rows = run_power_study(cfg.sim);
    out << "procedure,method,transform,detections_mean,detections_se,"
           "true_fdr_mean,true_fdr_se\n";
    for (const auto& r : rows) {
      out << (r.yekutieli ? "by" : "bh") << ',' << to_string(r.method) << ','
          << to_string(r.transform) << ',' << fmt_double(r.detections_mean) << ','
          << fmt_double(r.detections_se) << ',' << fmt_double(r.true_fdr_mean) << ','
          << fmt_double(r.true_fdr_se) << "\n";
      std::fprintf(stderr, "power %-2s %-9s %-9s detections %.1f (%.1f) true FDR %s (%s)\n",
                   r.yekutieli ? "by" : "bh", to_string(r.method), to_string(r.transform),
                   r.detections_mean, r.detections_se, fmt_fixed(r.true_fdr_mean).c_str(),
                   fmt_fixed(r.true_fdr_se).c_str());
    }
  } else if (args.study == "drobust") {
    const auto curves = run_d_robustness(cfg.sim, cfg.d_values, cfg.d_reference);
    out << "transform,d,power,power_se,is_reference\n";
    for (const auto& curve : curves) {
      for (const auto& p : curve.points) {
        out << to_string(curve.transform) << ',' << p.d << ',' << fmt_double(p.power)
            << ',' << fmt_double(p.se) << ",0\n";
        std::fprintf(stderr, "drobust %-9s D=%-5d power %s (%s)\n",
                     to_string(curve.transform), p.d, fmt_fixed(p.power).c_str(),
                     fmt_fixed(p.se).c_str());
      }
      out << to_string(curve.transform) << ',' << curve.reference_d << ','
          << fmt_double(curve.reference_power) << ",0,1\n";
      std::fprintf(stderr, "drobust %-9s D=%-5d power %s (reference)\n",
                   to_string(curve.transform), curve.reference_d,
                   fmt_fixed(curve.reference_power).c_str());
    }
  } else {
    throw std::runtime_error("--study must be type1, power or drobust");
  }
  return 0;
}

struct TruncateArgs {
  std::string input;
  std::string thresholds;
  std::string out;
};

int run_truncate(const TruncateArgs& args) {
  const IngestSchema schema = parse_ingest_schema(args.thresholds);
  const CsvTable table = read_csv(args.input);
  if (table.header.size() < 2) {
    throw std::runtime_error("truncate: need a feature-id column plus study columns");
  }

  PvalueTable pvals;
  pvals.studies = schema.studies.size();
  std::vector<int> column_of;
  for (const auto& spec : schema.studies) {
    if (spec.source == StudySpec::Source::de_list) {
      throw std::runtime_error("truncate: delist studies have no exact p-values to truncate");
    }
    const auto it = std::find(table.header.begin() + 1, table.header.end(), spec.name);
    if (it == table.header.end()) {
      throw std::runtime_error("truncate: missing column '" + spec.name + "'");
    }
    column_of.push_back(static_cast<int>(it - table.header.begin()));
  }
  std::vector<std::optional<double>> thresholds;
  for (const auto& spec : schema.studies) {
    if (spec.source == StudySpec::Source::csv_censored) {
      thresholds.push_back(spec.threshold);
    } else {
      thresholds.push_back(std::nullopt);
    }
  }

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.header.size()) {
      throw std::runtime_error("truncate: row " + std::to_string(r + 2) + " width mismatch");
    }
    std::uint64_t id = r;
    try {
      std::size_t pos = 0;
      const unsigned long long parsed = std::stoull(row[0], &pos);
      if (pos == row[0].size()) id = parsed;
    } catch (const std::exception&) {
      // non-numeric feature id: fall back to the row index
    }
    pvals.feature_ids.push_back(id);
    for (std::size_t si = 0; si < schema.studies.size(); ++si) {
      const std::string& cell = row[column_of[si]];
      try {
        std::size_t pos = 0;
        const double p = std::stod(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument("trailing");
        if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("range");
        pvals.values.push_back(p);
      } catch (const std::exception&) {
        throw std::runtime_error("truncate: bad p-value '" + cell + "' at row " +
                                 std::to_string(r + 2) + ", column '" +
                                 schema.studies[si].name + "'");
      }
    }
  }

  const auto [store, summary] = truncate_matrix(pvals, thresholds);
  write_store(store, args.out);
  std::printf("records=%zu studies=%zu below_fraction=%s stored_fraction=%s\n",
              store.records(), pvals.studies, fmt_fixed(summary.below_fraction).c_str(),
              fmt_fixed(summary.stored_fraction).c_str());
  if (summary.compressed) {
    std::printf("compression_ratio=%s\n", fmt_fixed(summary.ratio).c_str());
  } else {
    std::printf("compression_ratio=none (scheme stores %s of the original)\n",
                fmt_fixed(summary.stored_fraction).c_str());
  }
  return 0;
}

struct ValidateArgs {
  std::string method = "mean";
  std::string transform = "fisher";
  int k1 = 0;
  std::string censored;
  int d = 50;
  std::size_t draws = 1'000'000;
  std::uint64_t seed = 1;
  std::size_t stride = 100;
};

int run_validate(const ValidateArgs& args) {
  const Method method = method_from_string(args.method);
  const EvidenceTransform transform =
      EvidenceTransform::of(transform_kind_from_string(args.transform));
  std::vector<double> alphas;
  for (const auto& t : parse_censor_list(args.censored)) {
    if (t.has_value()) alphas.push_back(*t);
  }
  const ThresholdGroups groups = group_thresholds(std::span<const double>(alphas));
  const NullCdf null_cdf = null_cdf_for(method, transform, args.k1, groups, args.d);

  Rng rng(args.seed);
  const EmpiricalCdf oracle =
      mc_null_oracle(method, transform, args.k1, groups, args.d, args.draws, rng);
  const double distance = null_vs_oracle_distance(null_cdf, oracle, args.stride);
  std::printf("method=%s transform=%s k1=%d k2=%d d=%d draws=%zu sup_distance=%s\n",
              to_string(method), to_string(transform.kind()), args.k1, groups.total(),
              args.d, args.draws, fmt_fixed(distance).c_str());
  return 0;
}

struct MomentsArgs {
  std::string transform = "fisher";
  double alpha = 0.05;
};

int run_moments(const MomentsArgs& args) {
  const EvidenceTransform transform =
      EvidenceTransform::of(transform_kind_from_string(args.transform));
  const TruncatedMoments m = truncated_moments(transform, args.alpha);
  std::printf("transform=%s alpha=%s\n", to_string(transform.kind()),
              fmt_fixed(args.alpha).c_str());
  std::printf("mean_below=%s var_below=%s mean_above=%s var_above=%s\n",
              fmt_fixed(m.mean_below).c_str(), fmt_fixed(m.var_below).c_str(),
              fmt_fixed(m.mean_above).c_str(), fmt_fixed(m.var_above).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meta-analysis of truncated p-values: imputation-based Fisher/Stouffer "
               "combination, FDR control, simulation studies and a compressed store"};
  app.require_subcommand(1);

  CombineArgs combine_args;
  auto* combine = app.add_subcommand("combine", "Combine per-study evidence across features");
  combine->add_option("--input", combine_args.input, "CSV table or binary store")->required();
  combine->add_option("--schema", combine_args.schema, "Schema config for CSV input");
  combine->add_option("--method", combine_args.method,
                      "complete|available|mean|single|multiple")
      ->default_val("mean");
  combine->add_option("--transform", combine_args.transform, "fisher|stouffer")
      ->default_val("fisher");
  combine->add_option("--d", combine_args.d, "Imputation count for --method multiple")
      ->default_val(50);
  combine->add_option("--seed", combine_args.seed, "Seed for the imputation draws")
      ->default_val(0);
  combine->add_option("--fdr", combine_args.fdr, "Adjusted columns: bh|by|both")
      ->default_val("both");
  combine->add_option("--out", combine_args.out, "Output CSV")->required();

  SimulateArgs simulate_args;
  auto* simulate = app.add_subcommand("simulate", "Run a simulation study");
  simulate->add_option("--config", simulate_args.config, "key=value study configuration");
  simulate->add_option("--study", simulate_args.study, "type1|power|drobust")
      ->default_val("type1");
  simulate->add_option("--out", simulate_args.out, "Output CSV")->required();

  TruncateArgs truncate_args;
  auto* truncate = app.add_subcommand("truncate", "Truncate a full p-value matrix into a store");
  truncate->add_option("--input", truncate_args.input, "CSV of exact p-values")->required();
  truncate->add_option("--thresholds", truncate_args.thresholds,
                       "Schema config naming the studies to truncate")
      ->required();
  truncate->add_option("--out", truncate_args.out, "Output store file")->required();

  ValidateArgs validate_args;
  auto* validate = app.add_subcommand(
      "validate", "Sup-distance between an analytic null and its Monte Carlo oracle");
  validate->add_option("--method", validate_args.method, "complete|available|mean|single|multiple")
      ->default_val("mean");
  validate->add_option("--transform", validate_args.transform, "fisher|stouffer")
      ->default_val("fisher");
  validate->add_option("--k1", validate_args.k1, "Observed studies")->default_val(0);
  validate->add_option("--censored", validate_args.censored,
                       "Comma list of censoring thresholds, e.g. 0.001,0.01,0.05");
  validate->add_option("--d", validate_args.d, "Imputation count")->default_val(50);
  validate->add_option("--draws", validate_args.draws, "Monte Carlo draws")
      ->default_val(1'000'000);
  validate->add_option("--seed", validate_args.seed, "Oracle seed")->default_val(1);
  validate->add_option("--stride", validate_args.stride,
                       "Order-statistic stride of the distance bound")
      ->default_val(100);

  MomentsArgs moments_args;
  auto* moments = app.add_subcommand("moments", "Truncated-transform moments at a threshold");
  moments->add_option("--transform", moments_args.transform, "fisher|stouffer")
      ->default_val("fisher");
  moments->add_option("--alpha", moments_args.alpha, "Threshold in (0,1)")->default_val(0.05);

  CLI11_PARSE(app, argc, argv);

  try {
    if (combine->parsed()) return run_combine(combine_args);
    if (simulate->parsed()) return run_simulate(simulate_args);
    if (truncate->parsed()) return run_truncate(truncate_args);
    if (validate->parsed()) return run_validate(validate_args);
    if (moments->parsed()) return run_moments(moments_args);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
