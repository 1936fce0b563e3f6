#include "truncmeta/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "truncmeta/sampling.hpp"
#include "truncmeta/special.hpp"

namespace truncmeta {

namespace {

// Stream ids hung off the per-replicate rng.
constexpr std::uint64_t kLabelStream = 0;
constexpr std::uint64_t kEffectStream = 1;
constexpr std::uint64_t kStudyStreamBase = 2;
constexpr std::uint64_t kAnalysisStreamBase = 1000;

std::vector<double> study_effects(const SimConfig& config, Rng& effect_rng) {
  // mu_gk for DE genes, gene-major then study.
  std::vector<double> effects(static_cast<std::size_t>(config.de_genes) * config.studies);
  for (auto& e : effects) e = effect_rng.uniform(config.effect_lo, config.effect_hi);
  return effects;
}

void apply_case_shift(SimDataset& data, const SimConfig& config,
                      std::span<const double> effects) {
  const int half = config.samples_per_study / 2;
  for (int g = 0; g < config.de_genes; ++g) {
    for (int k = 0; k < config.studies; ++k) {
      const double mu = effects[static_cast<std::size_t>(g) * config.studies + k];
      double* row = data.values.data() +
                    (static_cast<std::size_t>(g) * config.studies + k) * config.samples_per_study;
      for (int n = half; n < config.samples_per_study; ++n) row[n] += mu;
    }
  }
}

SimDataset empty_dataset(const SimConfig& config) {
  SimDataset data;
  data.genes = config.genes;
  data.studies = config.studies;
  data.samples = config.samples_per_study;
  data.values.assign(static_cast<std::size_t>(config.genes) * config.studies *
                         config.samples_per_study,
                     0.0);
  data.cluster_labels.assign(config.genes, 0);
  data.de_flags.assign(config.genes, 0);
  for (int g = 0; g < config.de_genes; ++g) data.de_flags[g] = 1;
  return data;
}

}  // namespace

void SimConfig::validate() const {
  if (genes <= 0 || studies <= 0) throw std::invalid_argument("SimConfig: empty design");
  if (samples_per_study < 4 || samples_per_study % 2 != 0) {
    throw std::invalid_argument("SimConfig: samples_per_study must be even and >= 4");
  }
  if (clusters < 0 || cluster_size <= 0 ||
      static_cast<long long>(clusters) * cluster_size > genes) {
    throw std::invalid_argument("SimConfig: clusters * cluster_size must fit in genes");
  }
  if (de_genes < 0 || de_genes > genes) throw std::invalid_argument("SimConfig: bad de_genes");
  if (!(effect_lo < effect_hi)) throw std::invalid_argument("SimConfig: effect range empty");
  if (wishart_dof <= cluster_size + 1) {
    throw std::invalid_argument("SimConfig: wishart_dof must exceed cluster_size + 1");
  }
  if (replicates <= 0) throw std::invalid_argument("SimConfig: replicates must be positive");
  if (!censor_pattern.empty() &&
      static_cast<int>(censor_pattern.size()) != studies) {
    throw std::invalid_argument("SimConfig: censor_pattern length must equal studies");
  }
  if (imputations < 1) throw std::invalid_argument("SimConfig: imputations must be >= 1");
}

std::vector<std::optional<double>> SimConfig::effective_censor_pattern() const {
  if (!censor_pattern.empty()) return censor_pattern;
  std::vector<std::optional<double>> pattern(studies);
  if (studies == 10) {
    const double thresholds[5] = {0.001, 0.001, 0.01, 0.01, 0.05};
    for (int i = 0; i < 5; ++i) pattern[5 + i] = thresholds[i];
  }
  return pattern;
}

SimConfig SimConfig::paper_scale() {
  SimConfig c;
  c.genes = 10000;
  c.clusters = 200;
  c.de_genes = 1000;
  c.replicates = 50;
  return c;
}

SimDataset simulate_correlated(const SimConfig& config, const Rng& rng) {
  config.validate();
  SimDataset data = empty_dataset(config);

  // Step 1: random cluster membership over all genes.
  Rng label_rng = rng.split(kLabelStream);
  std::vector<int> perm(config.genes);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = config.genes - 1; i > 0; --i) {
    const int j = static_cast<int>(label_rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[i], perm[j]);
  }
  for (int c = 0; c < config.clusters; ++c) {
    for (int m = 0; m < config.cluster_size; ++m) {
      data.cluster_labels[perm[static_cast<std::size_t>(c) * config.cluster_size + m]] = c + 1;
    }
  }
  std::vector<std::vector<int>> members(config.clusters);
  for (int g = 0; g < config.genes; ++g) {
    if (data.cluster_labels[g] > 0) members[data.cluster_labels[g] - 1].push_back(g);
  }

  const int dim = config.cluster_size;
  Eigen::MatrixXd psi =
      Eigen::MatrixXd::Constant(dim, dim, config.psi_offdiag);
  psi.diagonal().array() += config.psi_diag;

  const int n_samples = config.samples_per_study;
  Eigen::VectorXd z(dim);
  for (int k = 0; k < config.studies; ++k) {
    Rng study_rng = rng.split(kStudyStreamBase + static_cast<std::uint64_t>(k));
    // Steps 2-3 for clustered genes.
    for (int c = 0; c < config.clusters; ++c) {
      Rng cluster_rng = study_rng.split(static_cast<std::uint64_t>(c));
      const Eigen::MatrixXd cov = sample_inverse_wishart(psi, config.wishart_dof, cluster_rng);
      const Eigen::MatrixXd corr = correlation_from_covariance(cov);
      Eigen::LLT<Eigen::MatrixXd> llt(corr);
      if (llt.info() != Eigen::Success) {
        Eigen::MatrixXd repaired = corr;
        repaired.diagonal().array() += 1e-10 * corr.trace() / dim;
        llt.compute(repaired);
        if (llt.info() != Eigen::Success) {
          throw std::runtime_error("simulate_correlated: indefinite cluster correlation");
        }
      }
      const Eigen::MatrixXd chol = llt.matrixL();
      for (int n = 0; n < n_samples; ++n) {
        for (int i = 0; i < dim; ++i) z[i] = cluster_rng.normal();
        const Eigen::VectorXd x = chol * z;
        for (int i = 0; i < dim; ++i) {
          const int g = members[c][i];
          data.values[(static_cast<std::size_t>(g) * config.studies + k) * n_samples + n] = x[i];
        }
      }
    }
    // Unclustered genes iid N(0,1).
    for (int g = 0; g < config.genes; ++g) {
      if (data.cluster_labels[g] != 0) continue;
      Rng gene_rng = study_rng.split(static_cast<std::uint64_t>(config.clusters) + 1 +
                                     static_cast<std::uint64_t>(g));
      double* row =
          data.values.data() + (static_cast<std::size_t>(g) * config.studies + k) * n_samples;
      for (int n = 0; n < n_samples; ++n) row[n] = gene_rng.normal();
    }
  }

  // Steps 4-5.
  Rng effect_rng = rng.split(kEffectStream);
  const auto effects = study_effects(config, effect_rng);
  apply_case_shift(data, config, effects);
  return data;
}

SimDataset simulate_independent(const SimConfig& config, const Rng& rng) {
  config.validate();
  SimDataset data = empty_dataset(config);
  const int n_samples = config.samples_per_study;
  for (int k = 0; k < config.studies; ++k) {
    Rng study_rng = rng.split(kStudyStreamBase + static_cast<std::uint64_t>(k));
    for (int g = 0; g < config.genes; ++g) {
      Rng gene_rng = study_rng.split(static_cast<std::uint64_t>(config.clusters) + 1 +
                                     static_cast<std::uint64_t>(g));
      double* row =
          data.values.data() + (static_cast<std::size_t>(g) * config.studies + k) * n_samples;
      for (int n = 0; n < n_samples; ++n) row[n] = gene_rng.normal();
    }
  }
  Rng effect_rng = rng.split(kEffectStream);
  const auto effects = study_effects(config, effect_rng);
  apply_case_shift(data, config, effects);
  return data;
}

PvalueMatrix compute_pvalue_matrix(const SimDataset& data) {
  PvalueMatrix out;
  out.genes = data.genes;
  out.studies = data.studies;
  out.values.resize(static_cast<std::size_t>(data.genes) * data.studies);
  const int n = data.samples;
  const int half = n / 2;
  const double df = n - 2;
  for (int g = 0; g < data.genes; ++g) {
    for (int k = 0; k < data.studies; ++k) {
      const double* row =
          data.values.data() + (static_cast<std::size_t>(g) * data.studies + k) * n;
      double m1 = 0.0;
      double m2 = 0.0;
      for (int i = 0; i < half; ++i) m1 += row[i];
      for (int i = half; i < n; ++i) m2 += row[i];
      m1 /= half;
      m2 /= half;
      double ss1 = 0.0;
      double ss2 = 0.0;
      for (int i = 0; i < half; ++i) ss1 += (row[i] - m1) * (row[i] - m1);
      for (int i = half; i < n; ++i) ss2 += (row[i] - m2) * (row[i] - m2);
      const double pooled = (ss1 + ss2) / df;
      const double se = std::sqrt(pooled * (2.0 / half));
      const double t = se > 0.0 ? (m2 - m1) / se : 0.0;
      out.values[static_cast<std::size_t>(g) * data.studies + k] =
          student_t_two_sided_p(t, df);
    }
  }
  return out;
}

PanelMatrix truncate_to_panels(const PvalueMatrix& matrix,
                               const std::vector<std::optional<double>>& censor) {
  if (static_cast<int>(censor.size()) != matrix.studies) {
    throw std::invalid_argument("truncate_to_panels: pattern length mismatch");
  }
  PanelSchema schema;
  schema.thresholds = censor;
  PanelMatrix panels(schema);
  std::vector<double> observed;
  std::vector<std::uint8_t> indicators;
  for (int g = 0; g < matrix.genes; ++g) {
    observed.clear();
    indicators.clear();
    for (int k = 0; k < matrix.studies; ++k) {
      const double p = matrix.at(g, k);
      if (censor[k].has_value()) {
        indicators.push_back(p < *censor[k] ? 1 : 0);
      } else {
        observed.push_back(p);
      }
    }
    panels.add_row(std::to_string(g), observed, indicators);
  }
  return panels;
}

namespace {

struct MethodSpec {
  Method method;
  TransformKind transform;
};

const MethodSpec kAllMethods[] = {
    {Method::complete, TransformKind::fisher},
    {Method::available, TransformKind::fisher},
    {Method::mean_impute, TransformKind::fisher},
    {Method::single_impute, TransformKind::fisher},
    {Method::multiple_impute, TransformKind::fisher},
    {Method::complete, TransformKind::stouffer},
    {Method::available, TransformKind::stouffer},
    {Method::mean_impute, TransformKind::stouffer},
    {Method::single_impute, TransformKind::stouffer},
    {Method::multiple_impute, TransformKind::stouffer},
};

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double se_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (static_cast<double>(v.size()) - 1.0) /
                   static_cast<double>(v.size()));
}

std::uint64_t analysis_stream(int rep, std::size_t method_index) {
  return kAnalysisStreamBase + static_cast<std::uint64_t>(rep) * 64 + method_index;
}

std::vector<double> method_pvalues(const PanelMatrix& censored, const PanelMatrix& full,
                                   const MethodSpec& spec, int imputations,
                                   std::uint64_t seed) {
  AnalysisOptions options;
  options.method = spec.method;
  options.transform = EvidenceTransform::of(spec.transform);
  options.imputations = imputations;
  options.seed = seed;
  const PanelMatrix& input = spec.method == Method::complete ? full : censored;
  const auto results = meta_analyze_matrix(input, options);
  std::vector<double> p(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) p[i] = results[i].p_meta;
  return p;
}

}  // namespace

std::vector<Type1Row> run_type1_study(const SimConfig& config) {
  config.validate();
  const auto censor = config.effective_censor_pattern();
  const std::vector<std::optional<double>> all_observed(config.studies, std::nullopt);
  const Rng root(config.seed);

  std::vector<std::vector<double>> rates(std::size(kAllMethods));
  for (int rep = 0; rep < config.replicates; ++rep) {
    const Rng rep_rng = root.split(static_cast<std::uint64_t>(rep));
    const SimDataset data = simulate_independent(config, rep_rng);
    const PvalueMatrix pmat = compute_pvalue_matrix(data);
    const PanelMatrix censored = truncate_to_panels(pmat, censor);
    const PanelMatrix full = truncate_to_panels(pmat, all_observed);
    for (std::size_t mi = 0; mi < std::size(kAllMethods); ++mi) {
      const auto seed = rep_rng.split(analysis_stream(rep, mi)).next_u64();
      std::vector<double> p =
          method_pvalues(censored, full, kAllMethods[mi], config.imputations, seed);
      std::vector<double> null_p;
      null_p.reserve(p.size());
      for (int g = 0; g < config.genes; ++g) {
        if (!data.de_flags[g]) null_p.push_back(p[g]);
      }
      rates[mi].push_back(empirical_type1(null_p, config.significance_level));
    }
  }

  std::vector<Type1Row> rows;
  for (std::size_t mi = 0; mi < std::size(kAllMethods); ++mi) {
    rows.push_back({kAllMethods[mi].method, kAllMethods[mi].transform, mean_of(rates[mi]),
                    se_of(rates[mi])});
  }
  return rows;
}

std::vector<PowerRow> run_power_study(const SimConfig& config) {
  config.validate();
  const auto censor = config.effective_censor_pattern();
  const std::vector<std::optional<double>> all_observed(config.studies, std::nullopt);
  const Rng root(config.seed);

  std::vector<bool> is_null(config.genes);
  for (int g = 0; g < config.genes; ++g) is_null[g] = g >= config.de_genes;

  struct Cell {
    std::vector<double> detections;
    std::vector<double> fdr;
  };
  std::vector<Cell> bh_cells(std::size(kAllMethods));
  std::vector<Cell> by_cells(std::size(kAllMethods));

  for (int rep = 0; rep < config.replicates; ++rep) {
    const Rng rep_rng = root.split(static_cast<std::uint64_t>(rep));
    const SimDataset data = simulate_correlated(config, rep_rng);
    const PvalueMatrix pmat = compute_pvalue_matrix(data);
    const PanelMatrix censored = truncate_to_panels(pmat, censor);
    const PanelMatrix full = truncate_to_panels(pmat, all_observed);
    for (std::size_t mi = 0; mi < std::size(kAllMethods); ++mi) {
      const auto seed = rep_rng.split(analysis_stream(rep, mi)).next_u64();
      const std::vector<double> p =
          method_pvalues(censored, full, kAllMethods[mi], config.imputations, seed);
      const auto qbh = bh_adjust(p);
      const auto qby = by_adjust(p);
      const auto det_bh = rejections_at(qbh, config.nominal_fdr);
      const auto det_by = rejections_at(qby, config.nominal_fdr);
      bh_cells[mi].detections.push_back(static_cast<double>(det_bh.size()));
      by_cells[mi].detections.push_back(static_cast<double>(det_by.size()));
      bh_cells[mi].fdr.push_back(true_fdr(det_bh, is_null).rate);
      by_cells[mi].fdr.push_back(true_fdr(det_by, is_null).rate);
    }
  }

  std::vector<PowerRow> rows;
  for (std::size_t mi = 0; mi < std::size(kAllMethods); ++mi) {
    rows.push_back({kAllMethods[mi].method, kAllMethods[mi].transform, false,
                    mean_of(bh_cells[mi].detections), se_of(bh_cells[mi].detections),
                    mean_of(bh_cells[mi].fdr), se_of(bh_cells[mi].fdr)});
  }
  for (std::size_t mi = 0; mi < std::size(kAllMethods); ++mi) {
    rows.push_back({kAllMethods[mi].method, kAllMethods[mi].transform, true,
                    mean_of(by_cells[mi].detections), se_of(by_cells[mi].detections),
                    mean_of(by_cells[mi].fdr), se_of(by_cells[mi].fdr)});
  }
  return rows;
}

std::vector<DRobustnessCurve> run_d_robustness(const SimConfig& config,
                                               std::span<const int> d_values,
                                               int reference_d) {
  config.validate();
  if (d_values.empty()) throw std::invalid_argument("run_d_robustness: no D values");
  const auto censor = config.effective_censor_pattern();
  const Rng root(config.seed);

  std::vector<int> all_d(d_values.begin(), d_values.end());
  all_d.push_back(reference_d);

  const TransformKind kinds[] = {TransformKind::fisher, TransformKind::stouffer};
  // power_acc[kind][d] over replicates
  std::vector<std::vector<std::vector<double>>> acc(
      2, std::vector<std::vector<double>>(all_d.size()));

  for (int rep = 0; rep < config.replicates; ++rep) {
    const Rng rep_rng = root.split(static_cast<std::uint64_t>(rep));
    const SimDataset data = simulate_correlated(config, rep_rng);
    PvalueMatrix pmat = compute_pvalue_matrix(data);
    // Power is a per-gene quantity at a fixed level: only the DE rows are
    // needed, and per-row rng streams keep their indices under the slice.
    pmat.genes = config.de_genes;
    pmat.values.resize(static_cast<std::size_t>(config.de_genes) * config.studies);
    const PanelMatrix censored = truncate_to_panels(pmat, censor);
    for (std::size_t ki = 0; ki < 2; ++ki) {
      // One seed per (rep, transform): the first D draws of a larger D
      // replay the smaller run, coupling the curve across D values.
      const auto seed = rep_rng.split(analysis_stream(rep, 32 + ki)).next_u64();
      for (std::size_t di = 0; di < all_d.size(); ++di) {
        AnalysisOptions options;
        options.method = Method::multiple_impute;
        options.transform = EvidenceTransform::of(kinds[ki]);
        options.imputations = all_d[di];
        options.seed = seed;
        const auto results = meta_analyze_matrix(censored, options);
        int hits = 0;
        for (int g = 0; g < config.de_genes; ++g) {
          if (results[g].p_meta <= config.significance_level) ++hits;
        }
        acc[ki][di].push_back(static_cast<double>(hits) /
                              std::max(1, config.de_genes));
      }
    }
  }

  std::vector<DRobustnessCurve> curves;
  for (std::size_t ki = 0; ki < 2; ++ki) {
    DRobustnessCurve curve;
    curve.transform = kinds[ki];
    curve.reference_d = reference_d;
    curve.reference_power = mean_of(acc[ki].back());
    for (std::size_t di = 0; di + 1 < all_d.size(); ++di) {
      curve.points.push_back({all_d[di], mean_of(acc[ki][di]), se_of(acc[ki][di])});
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

double EmpiricalCdf::operator()(double t) const {
  const auto it = std::upper_bound(values.begin(), values.end(), t);
  return static_cast<double>(it - values.begin()) / static_cast<double>(values.size());
}

EmpiricalCdf mc_null_oracle(Method method, const EvidenceTransform& transform, int k1,
                            const ThresholdGroups& groups, int d, std::size_t draws,
                            Rng& rng) {
  if (draws == 0) throw std::invalid_argument("mc_null_oracle: draws must be positive");
  const auto alphas = groups.expand();
  const int k2 = static_cast<int>(alphas.size());
  if (k1 + k2 == 0) throw std::invalid_argument("mc_null_oracle: no studies");

  if (method == Method::available && k1 == 0) {
    throw std::invalid_argument("mc_null_oracle: available-case needs K1 >= 1");
  }
  EmpiricalCdf cdf;
  cdf.values.resize(draws);
  StudyPanel panel;
  panel.studies.reserve(k1 + k2);
  std::vector<double> truths(k2);
  for (std::size_t i = 0; i < draws; ++i) {
    panel.studies.clear();
    for (int j = 0; j < k1; ++j) {
      panel.studies.push_back(StudyObservation::observed(rng.uniform()));
    }
    for (int j = 0; j < k2; ++j) {
      truths[j] = rng.uniform();
      panel.studies.push_back(StudyObservation::censored(truths[j] < alphas[j], alphas[j]));
    }
    double statistic = 0.0;
    switch (method) {
      case Method::complete: {
        // The full-data benchmark sees the uncensored truths.
        for (const auto& s : panel.studies) {
          if (!s.is_censored()) statistic += transform.statistic_clamped(s.pvalue());
        }
        for (double truth : truths) statistic += transform.statistic_clamped(truth);
        break;
      }
      case Method::available: {
        const auto c = combine_available(transform, panel);
        statistic = c->statistic;
        break;
      }
      case Method::mean_impute:
        statistic = mean_impute_statistic(panel, transform);
        break;
      case Method::single_impute:
        statistic = single_impute_statistic(panel, transform, rng).statistic;
        break;
      case Method::multiple_impute:
        statistic = multiple_impute_statistic(panel, transform, d, rng);
        break;
    }
    cdf.values[i] = statistic;
  }
  std::sort(cdf.values.begin(), cdf.values.end());
  return cdf;
}

KsBounds ks_distance_bounds(const EmpiricalCdf& empirical,
                            const std::function<double(double)>& cdf,
                            std::size_t stride) {
  const auto& x = empirical.values;
  const std::size_t n = x.size();
  if (n == 0) throw std::invalid_argument("ks_distance_bounds: empty sample");
  if (stride == 0) stride = 1;
  const double dn = static_cast<double>(n);
  double upper = 0.0;
  double lower = 0.0;
  double prev_f = 0.0;
  std::size_t prev_count = 0;
  for (std::size_t c = stride; c <= n; c += stride) {
    const std::size_t count = std::min(c, n);
    const double f = cdf(x[count - 1]);
    upper = std::max(upper, static_cast<double>(count) / dn - prev_f);
    upper = std::max(upper, f - static_cast<double>(prev_count) / dn);
    lower = std::max(lower, static_cast<double>(count) / dn - f);
    lower = std::max(lower, f - (static_cast<double>(count) - 1.0) / dn);
    prev_f = f;
    prev_count = count;
  }
  if (prev_count < n) {
    const double f = cdf(x[n - 1]);
    upper = std::max(upper, 1.0 - prev_f);
    upper = std::max(upper, f - static_cast<double>(prev_count) / dn);
    lower = std::max(lower, 1.0 - f);
    lower = std::max(lower, f - (dn - 1.0) / dn);
    prev_f = f;
  }
  upper = std::max(upper, 1.0 - prev_f);
  return {lower, upper};
}

double ks_distance_discrete(const EmpiricalCdf& empirical, const NullCdf& null_cdf) {
  if (!null_cdf.discrete()) {
    throw std::invalid_argument("ks_distance_discrete: null has no atoms");
  }
  const auto& x = empirical.values;
  const double dn = static_cast<double>(x.size());
  // Union of atom locations and sample values; both CDFs only move there.
  std::vector<double> points(x.begin(), x.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  double d = 0.0;
  for (double v : points) {
    const double f_at = null_cdf.evaluate(v);
    const double f_before = f_at - null_cdf.atom_mass(v);
    const auto lo = std::lower_bound(x.begin(), x.end(), v);
    const auto hi = std::upper_bound(x.begin(), x.end(), v);
    const double fhat_before = static_cast<double>(lo - x.begin()) / dn;
    const double fhat_at = static_cast<double>(hi - x.begin()) / dn;
    d = std::max(d, std::fabs(f_at - fhat_at));
    d = std::max(d, std::fabs(f_before - fhat_before));
  }
  return d;
}

double null_vs_oracle_distance(const NullCdf& null_cdf, const EmpiricalCdf& empirical,
                               std::size_t stride) {
  if (null_cdf.discrete()) return ks_distance_discrete(empirical, null_cdf);
  const auto cdf = [&](double t) { return null_cdf.evaluate(t); };
  return ks_distance_bounds(empirical, cdf, stride).upper;
}

double uniformity_ks(std::span<const double> pvalues) {
  std::vector<double> sorted(pvalues.begin(), pvalues.end());
  std::sort(sorted.begin(), sorted.end());
  const double dn = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = std::clamp(sorted[i], 0.0, 1.0);
    d = std::max(d, (static_cast<double>(i) + 1.0) / dn - f);
    d = std::max(d, f - static_cast<double>(i) / dn);
  }
  return d;
}

}  // namespace truncmeta
