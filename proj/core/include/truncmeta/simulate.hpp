#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "truncmeta/imputation.hpp"
#include "truncmeta/inference.hpp"
#include "truncmeta/model.hpp"
#include "truncmeta/rng.hpp"

namespace truncmeta {

/// Differential-expression simulation configuration. Defaults are the
/// desk-scale study; paper_scale() restores the published dimensions.
struct SimConfig {
  int genes = 2000;
  int samples_per_study = 100;  // first half controls, second half cases
  int studies = 10;
  int clusters = 40;
  int cluster_size = 20;
  int de_genes = 200;
  double effect_lo = 0.1;
  double effect_hi = 0.5;
  int wishart_dof = 60;
  double psi_diag = 0.5;     // Psi = psi_diag*I + psi_offdiag*J
  double psi_offdiag = 0.5;
  /// Per-study censoring threshold; empty means "last half of the studies
  /// truncated at (0.001, 0.001, 0.01, 0.01, 0.05)" when studies == 10.
  std::vector<std::optional<double>> censor_pattern;
  int replicates = 10;
  std::uint64_t seed = 20140747;
  double significance_level = 0.05;
  double nominal_fdr = 0.05;
  int imputations = 50;

  void validate() const;
  std::vector<std::optional<double>> effective_censor_pattern() const;
  static SimConfig desk_scale() { return SimConfig{}; }
  static SimConfig paper_scale();
};

/// One simulated expression tensor: genes x studies x samples, cases
/// already shifted by their effect sizes.
struct SimDataset {
  int genes = 0;
  int studies = 0;
  int samples = 0;
  std::vector<double> values;       // [(g*studies + k)*samples + n]
  std::vector<int> cluster_labels;  // 0 = unclustered
  std::vector<std::uint8_t> de_flags;

  double value(int gene, int study, int sample) const {
    return values[(static_cast<std::size_t>(gene) * studies + study) * samples + sample];
  }
};

/// Steps 1-5: clustered genes MVN with inverse-Wishart-derived correlation,
/// unclustered iid N(0,1), case shift Uniform(effect_lo, effect_hi) per
/// DE gene and study.
SimDataset simulate_correlated(const SimConfig& config, const Rng& rng);
/// Same but with the clustering steps skipped: all genes iid N(0,1).
SimDataset simulate_independent(const SimConfig& config, const Rng& rng);

/// Pooled two-sample t-test p-values (df = samples - 2), one per
/// gene x study.
struct PvalueMatrix {
  int genes = 0;
  int studies = 0;
  std::vector<double> values;  // [g*studies + k]
  double at(int gene, int study) const { return values[static_cast<std::size_t>(gene) * studies + study]; }
};

PvalueMatrix compute_pvalue_matrix(const SimDataset& data);

/// Apply a censoring pattern to a full p-value matrix.
PanelMatrix truncate_to_panels(const PvalueMatrix& matrix,
                               const std::vector<std::optional<double>>& censor);

struct Type1Row {
  Method method;
  TransformKind transform;
  double mean;
  double se;
};

/// Table-2 style study: empirical type-I error at the nominal significance
/// level on the known-null genes, per method x transform, over replicates.
std::vector<Type1Row> run_type1_study(const SimConfig& config);

struct PowerRow {
  Method method;
  TransformKind transform;
  bool yekutieli;  // false = B-H block, true = B-Y block
  double detections_mean;
  double detections_se;
  double true_fdr_mean;
  double true_fdr_se;
};

/// Table-1 style study: detections at the nominal FDR under B-H and B-Y
/// plus true FDR, per method x transform, over replicates.
std::vector<PowerRow> run_power_study(const SimConfig& config);

struct DRobustnessPoint {
  int d;
  double power;
  double se;
};

struct DRobustnessCurve {
  TransformKind transform;
  std::vector<DRobustnessPoint> points;
  int reference_d;
  double reference_power;
};

/// Figure-3 style study: multiple-imputation power at the significance
/// level as a function of D, with a large-D reference. Datasets are shared
/// across D values (common random numbers).
std::vector<DRobustnessCurve> run_d_robustness(const SimConfig& config,
                                               std::span<const int> d_values,
                                               int reference_d = 1000);

/// Sorted draws of a statistic under H0.
struct EmpiricalCdf {
  std::vector<double> values;  // ascending
  double operator()(double t) const;
  std::size_t size() const { return values.size(); }
};

/// Brute-force oracle: uniform p-values, censor, impute, statistic —
/// the full observed pipeline, for comparison against the analytic nulls.
EmpiricalCdf mc_null_oracle(Method method, const EvidenceTransform& transform, int k1,
                            const ThresholdGroups& groups, int d, std::size_t draws,
                            Rng& rng);

struct KsBounds {
  double lower;
  double upper;
};

/// Bracket of sup_x |F_hat - F| for a continuous CDF, evaluating F at every
/// stride-th order statistic; stride 1 tightens to the exact statistic.
KsBounds ks_distance_bounds(const EmpiricalCdf& empirical,
                            const std::function<double(double)>& cdf,
                            std::size_t stride = 1);

/// Exact sup-distance against a purely discrete null (atoms shared with the
/// sample values).
double ks_distance_discrete(const EmpiricalCdf& empirical, const NullCdf& null_cdf);

/// Sup distance between analytic null and the Monte Carlo oracle; dispatches
/// on discreteness. This is the quantity the validate subcommand prints.
double null_vs_oracle_distance(const NullCdf& null_cdf, const EmpiricalCdf& empirical,
                               std::size_t stride = 100);

/// Exact KS statistic of p-values against Uniform(0,1).
double uniformity_ks(std::span<const double> pvalues);

}  // namespace truncmeta
