#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace truncmeta {

enum class TransformKind { fisher, stouffer };

const char* to_string(TransformKind kind);
TransformKind transform_kind_from_string(const std::string& name);

/// One evidence-aggregation transform: the per-study p -> statistic map, its
/// base null, the K-study combined null and the significant tail.
///
/// Fisher:   T_k = -2 ln p, base chi^2_2, combined chi^2_{2K}, right tail.
/// Stouffer: T_k = Phi^{-1}(p), base N(0,1), combined N(0,K), left tail.
class EvidenceTransform {
 public:
  static EvidenceTransform fisher() { return EvidenceTransform{TransformKind::fisher}; }
  static EvidenceTransform stouffer() { return EvidenceTransform{TransformKind::stouffer}; }
  static EvidenceTransform of(TransformKind kind) { return EvidenceTransform{kind}; }

  TransformKind kind() const { return kind_; }
  bool right_tail_significant() const { return kind_ == TransformKind::fisher; }

  /// Per-study statistic. Strict domain: Fisher needs p in (0,1],
  /// Stouffer p in (0,1); boundary values are rejected.
  double statistic(double p) const;

  /// Pipeline variant: p clamped into [1e-300, 1-1e-16] first (Fisher keeps
  /// p=1 -> 0 exact). Out-of-range clamps are counted, see clamp_count().
  double statistic_clamped(double p) const;

  /// CDF of the per-study null.
  double base_cdf(double t) const;
  /// CDF of the combined null over k studies.
  double combined_cdf(double t, int k) const;
  /// Upper tail of the combined null (relative accuracy preserved).
  double combined_survival(double t, int k) const;
  /// Meta p-value of a combined statistic under the k-study complete null,
  /// respecting the significant tail.
  double combined_pvalue(double statistic, int k) const;

  /// Total clamp events recorded by statistic_clamped since process start.
  static std::uint64_t clamp_count();

 private:
  explicit EvidenceTransform(TransformKind kind) : kind_(kind) {}
  TransformKind kind_;
};

/// Spec-level free function: the p -> T_k map of the transform.
double transform_inverse(const EvidenceTransform& transform, double p);

/// One study's evidence for one feature: either an observed p-value or a
/// truncation indicator with its threshold.
class StudyObservation {
 public:
  static StudyObservation observed(double p);
  static StudyObservation censored(bool significant, double threshold);

  bool is_censored() const { return censored_; }
  double pvalue() const;
  bool significant() const;
  double threshold() const;

 private:
  StudyObservation() = default;
  bool censored_ = false;
  bool significant_ = false;
  double value_ = 0.0;  // p-value if observed, threshold if censored
};

/// Ordered list of K = K1 + K2 study observations for one feature.
struct StudyPanel {
  std::vector<StudyObservation> studies;

  int k() const { return static_cast<int>(studies.size()); }
  int k1() const;
  int k2() const { return k() - k1(); }
  std::vector<double> observed_pvalues() const;
};

/// The multiset of censored-study thresholds collapsed into r distinct
/// values with counts. Grouping uses exact binary equality; thresholds are
/// configuration, not computation.
struct ThresholdGroups {
  std::vector<double> thresholds;  // strictly increasing
  std::vector<int> counts;

  int group_count() const { return static_cast<int>(thresholds.size()); }
  int total() const;
  bool empty() const { return thresholds.empty(); }
  /// Thresholds expanded back to one entry per censored study
  /// (ascending group order).
  std::vector<double> expand() const;
};

ThresholdGroups group_thresholds(const StudyPanel& panel);
ThresholdGroups group_thresholds(std::span<const double> thresholds);

struct Combined {
  double statistic;
  double p_meta;
};

/// Combine fully observed p-values; statistic plus its meta p-value under
/// the K-study complete null.
Combined combine_complete(const EvidenceTransform& transform,
                          std::span<const double> pvalues);

/// Available-case method: combine only the observed studies. Empty optional
/// when no study is observed.
std::optional<Combined> combine_available(const EvidenceTransform& transform,
                                          const StudyPanel& panel);

/// Per-study censoring layout shared by every row of a feature matrix:
/// nullopt = observed study, value = censoring threshold.
struct PanelSchema {
  std::vector<std::optional<double>> thresholds;

  int k() const { return static_cast<int>(thresholds.size()); }
  int k1() const;
  int k2() const { return k() - k1(); }
  std::vector<std::size_t> observed_studies() const;
  std::vector<std::size_t> censored_studies() const;
  ThresholdGroups groups() const;
  void validate() const;
};

/// features x studies panel matrix with one shared schema. Observed
/// p-values and censored indicators are stored densely in study order.
class PanelMatrix {
 public:
  explicit PanelMatrix(PanelSchema schema);

  void add_row(std::string feature_id, std::span<const double> observed,
               std::span<const std::uint8_t> indicators);

  std::size_t rows() const { return ids_.size(); }
  const PanelSchema& schema() const { return schema_; }
  const std::vector<std::string>& feature_ids() const { return ids_; }
  std::span<const double> observed_row(std::size_t row) const;
  std::span<const std::uint8_t> indicator_row(std::size_t row) const;
  StudyPanel panel(std::size_t row) const;

 private:
  PanelSchema schema_;
  std::vector<std::string> ids_;
  std::vector<double> observed_;
  std::vector<std::uint8_t> indicators_;
};

}  // namespace truncmeta
