#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "truncmeta/imputation.hpp"
#include "truncmeta/model.hpp"

namespace truncmeta {

/// Benjamini-Hochberg step-up adjusted values, returned in input order.
std::vector<double> bh_adjust(std::span<const double> pvalues);

/// Benjamini-Yekutieli: B-H on p * c(m), c(m) = sum 1/i, clipped at 1.
std::vector<double> by_adjust(std::span<const double> pvalues);

/// Indices with adjusted value <= q.
std::vector<std::size_t> rejections_at(std::span<const double> adjusted, double q);

/// Classical step-up rejection set (largest i with p_(i) <= i*q/(m*c)),
/// cross-check path against rejections_at(bh_adjust(...)).
std::vector<std::size_t> step_up_rejections(std::span<const double> pvalues, double q,
                                            bool yekutieli);

struct FeatureResult {
  std::string feature_id;
  double statistic;
  double p_meta;
  double q_bh;
  double q_by;
  Method method;
  bool no_observed_studies = false;
};

struct AnalysisOptions {
  Method method = Method::mean_impute;
  EvidenceTransform transform = EvidenceTransform::fisher();
  int imputations = 50;    // D, multiple imputation only
  std::uint64_t seed = 0;  // single/multiple imputation draw streams
  MixtureOptions mixture{};
};

/// Apply one method per feature across a panel matrix. The null CDF is
/// built once per schema; each row draws from its own split(seed, row)
/// stream, so results do not depend on processing order.
std::vector<FeatureResult> meta_analyze_matrix(const PanelMatrix& matrix,
                                               const AnalysisOptions& options);

struct FdrEstimate {
  double rate = 0.0;
  bool no_detections = false;
};

/// |detected intersect true_nulls| / |detected|; empty detection reported as
/// rate 0 with the flag set.
FdrEstimate true_fdr(const std::unordered_set<std::string>& detected,
                     const std::unordered_set<std::string>& true_nulls);
FdrEstimate true_fdr(std::span<const std::size_t> detected,
                     const std::vector<bool>& is_true_null);

/// Fraction of known-null p-values at or below the level.
double empirical_type1(std::span<const double> null_pvalues, double level);

}  // namespace truncmeta
