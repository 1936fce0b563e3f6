#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "truncmeta/model.hpp"
#include "truncmeta/rng.hpp"

namespace truncmeta {

enum class Method {
  complete,
  available,
  mean_impute,
  single_impute,
  multiple_impute,
};

const char* to_string(Method method);
Method method_from_string(const std::string& name);

/// Mean/variance of the transformed p-value on each side of a threshold:
/// below = F_X^{-1}(q) with q ~ Uniform(0,alpha) (study significant),
/// above = F_X^{-1}(r) with r ~ Uniform(alpha,1).
struct TruncatedMoments {
  double mean_below;
  double var_below;
  double mean_above;
  double var_above;
};

/// Closed-form truncated moments; Fisher var_below is exactly 4.
TruncatedMoments truncated_moments(const EvidenceTransform& transform, double alpha);

struct MixtureOptions {
  /// Enumerate the 2^{K2} per-study indicator vectors instead of the
  /// grouped product; cross-check path, identical results.
  bool full_enumeration = false;
  /// Refuse enumerations beyond this many mixture terms.
  std::uint64_t term_cap = 10'000'000;
  /// Absolute tolerance of the Fisher chi-square/normal convolution.
  double convolution_tol = 1e-10;
  /// Evaluate the convolution by Monte Carlo instead of quadrature
  /// (cross-validation fallback; deterministic given the seed).
  bool monte_carlo_convolution = false;
  std::size_t monte_carlo_draws = 1'000'000;
  std::uint64_t monte_carlo_seed = 0x7f4a7c15;
};

/// Evaluable null CDF of a method's combined statistic under H0: either a
/// closed form (complete / available / single imputation) or a mixture of
/// shifted base CDFs (mean imputation) / normal-location mixtures
/// (multiple imputation).
class NullCdf {
 public:
  /// P(T <= t), right-continuous (atoms included at t).
  double evaluate(double t) const;
  /// P(T >= t), atom at t included; computed in survival form so small
  /// tail probabilities keep relative accuracy.
  double upper_tail(double t) const;
  /// Probability mass at exactly t (nonzero only for the purely discrete
  /// K1 = 0 mean-imputation null).
  double atom_mass(double t) const;

  Method method() const { return method_; }
  const EvidenceTransform& transform() const { return transform_; }
  int k1() const { return k1_; }
  int k_total() const { return k_total_; }
  int imputations() const { return d_; }
  const ThresholdGroups& groups() const { return groups_; }
  bool discrete() const;
  std::size_t term_count() const;
  /// Smallest support point (discrete nulls), for boundary checks.
  double min_support() const;

  friend NullCdf complete_null_cdf(const EvidenceTransform&, int k);
  friend NullCdf available_null_cdf(const EvidenceTransform&, int k1);
  friend NullCdf single_impute_null_cdf(const EvidenceTransform&, int k);
  friend NullCdf mean_null_cdf(const EvidenceTransform&, int k1,
                               const ThresholdGroups&, const MixtureOptions&);
  friend NullCdf multiple_null_cdf(const EvidenceTransform&, int k1,
                                   const ThresholdGroups&, int d,
                                   const MixtureOptions&);
  friend Combined mean_impute_combine(const StudyPanel&, const EvidenceTransform&,
                                      const NullCdf&);

 private:
  NullCdf(Method method, EvidenceTransform transform, int k1, int k_total)
      : method_(method), transform_(transform), k1_(k1), k_total_(k_total) {}

  Method method_;
  EvidenceTransform transform_;
  int k1_;
  int k_total_;
  int d_ = 0;
  ThresholdGroups groups_;
  MixtureOptions options_;

  // Mean-imputation mixture: shifted copies of F_A, sorted by shift with
  // exactly equal shifts merged. prefix_[i] = sum of weights_[0..i-1].
  std::vector<double> shifts_;
  std::vector<double> weights_;
  std::vector<double> prefix_;
  std::vector<double> suffix_;
  // Per-group transformed imputation points (statistic path shares these).
  std::vector<double> below_;
  std::vector<double> above_;

  // Multiple-imputation mixture: A + N(mu, var_u) per term.
  struct MiTerm {
    double weight;
    double mu;
    double var_u;
  };
  std::vector<MiTerm> mi_terms_;
  // Shared chi-square draws for the Monte Carlo convolution fallback.
  std::vector<double> conv_mc_samples_;
};

NullCdf complete_null_cdf(const EvidenceTransform& transform, int k);
NullCdf available_null_cdf(const EvidenceTransform& transform, int k1);
NullCdf single_impute_null_cdf(const EvidenceTransform& transform, int k);

/// Theorem-1 null of the mean-imputation statistic (grouped product form;
/// options.full_enumeration selects the 2^{K2} expansion).
NullCdf mean_null_cdf(const EvidenceTransform& transform, int k1,
                      const ThresholdGroups& groups,
                      const MixtureOptions& options = {});

/// Theorem-3 approximate null of the D-imputation average. Warns to stderr
/// below D = 30 (CLT accuracy), never errors.
NullCdf multiple_null_cdf(const EvidenceTransform& transform, int k1,
                          const ThresholdGroups& groups, int d,
                          const MixtureOptions& options = {});

/// Convenience dispatch used by the matrix driver and the CLI.
NullCdf null_cdf_for(Method method, const EvidenceTransform& transform, int k1,
                     const ThresholdGroups& groups, int d,
                     const MixtureOptions& options = {});

/// E[statistic] under H0 for the mean-imputation method.
double mean_expected_statistic(const EvidenceTransform& transform, int k1,
                               const ThresholdGroups& groups);

/// Mean imputation of a panel: observed studies pass through, censored
/// studies become alpha/2 (significant) or (1+alpha)/2.
std::vector<double> impute_mean(const StudyPanel& panel);

/// Mean-imputation statistic. The censored part is accumulated group-wise
/// in ascending-threshold order, the same summation the null's atoms use,
/// so statistic-vs-atom comparisons are exact when K1 = 0.
double mean_impute_statistic(const StudyPanel& panel, const EvidenceTransform& transform);

Combined mean_impute_combine(const StudyPanel& panel, const EvidenceTransform& transform,
                             const NullCdf& null_cdf);

/// Single random imputation: one Uniform(0,alpha) / Uniform(alpha,1) draw
/// per censored study (panel order); p-value against the K-study complete
/// null per Theorem 2.
Combined single_impute_statistic(const StudyPanel& panel,
                                 const EvidenceTransform& transform, Rng& rng);

/// Multiple-imputation average statistic: D draws per censored study in
/// panel order (D consecutive uniforms each, so D=1 replays the single
/// imputation draw path).
double multiple_impute_statistic(const StudyPanel& panel,
                                 const EvidenceTransform& transform, int d, Rng& rng);

Combined multiple_impute_combine(const StudyPanel& panel,
                                 const EvidenceTransform& transform, int d,
                                 const NullCdf& null_cdf, Rng& rng);

/// Significance of a statistic against a null, respecting the transform's
/// tail: Fisher-family P(T >= t) with the atom at t, Stouffer-family
/// P(T <= t).
double method_pvalue(double statistic, const NullCdf& null_cdf);

}  // namespace truncmeta
