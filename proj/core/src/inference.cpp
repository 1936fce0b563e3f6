#include "truncmeta/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace truncmeta {

namespace {

void check_pvalues(std::span<const double> pvalues) {
  for (double p : pvalues) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw std::invalid_argument("FDR adjustment: p-value outside [0,1]");
    }
  }
}

std::vector<std::size_t> order_by_pvalue(std::span<const double> pvalues) {
  std::vector<std::size_t> order(pvalues.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });
  return order;
}

std::vector<double> step_up_adjust(std::span<const double> pvalues, double multiplier) {
  check_pvalues(pvalues);
  const std::size_t m = pvalues.size();
  std::vector<double> adjusted(m, 0.0);
  if (m == 0) return adjusted;
  const auto order = order_by_pvalue(pvalues);
  double running = 1.0;
  for (std::size_t i = m; i-- > 0;) {
    const double rank = static_cast<double>(i + 1);
    const double raw = pvalues[order[i]] * multiplier * static_cast<double>(m) / rank;
    running = std::min(running, std::min(1.0, raw));
    adjusted[order[i]] = running;
  }
  return adjusted;
}

double harmonic(std::size_t m) {
  double c = 0.0;
  for (std::size_t i = 1; i <= m; ++i) c += 1.0 / static_cast<double>(i);
  return c;
}

}  // namespace

std::vector<double> bh_adjust(std::span<const double> pvalues) {
  return step_up_adjust(pvalues, 1.0);
}

std::vector<double> by_adjust(std::span<const double> pvalues) {
  return step_up_adjust(pvalues, harmonic(pvalues.size()));
}

std::vector<std::size_t> rejections_at(std::span<const double> adjusted, double q) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < adjusted.size(); ++i) {
    if (adjusted[i] <= q) idx.push_back(i);
  }
  return idx;
}

std::vector<std::size_t> step_up_rejections(std::span<const double> pvalues, double q,
                                            bool yekutieli) {
  check_pvalues(pvalues);
  const std::size_t m = pvalues.size();
  if (m == 0) return {};
  const auto order = order_by_pvalue(pvalues);
  const double c = yekutieli ? harmonic(m) : 1.0;
  std::size_t cut = 0;  // number of smallest p-values rejected
  for (std::size_t i = m; i-- > 0;) {
    const double bound = static_cast<double>(i + 1) * q / (static_cast<double>(m) * c);
    if (pvalues[order[i]] <= bound) {
      cut = i + 1;
      break;
    }
  }
  std::vector<std::size_t> idx(order.begin(), order.begin() + cut);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<FeatureResult> meta_analyze_matrix(const PanelMatrix& matrix,
                                               const AnalysisOptions& options) {
  const PanelSchema& schema = matrix.schema();
  const std::size_t n = matrix.rows();
  std::vector<FeatureResult> results;
  results.reserve(n);
  if (n == 0) return results;

  if (options.method == Method::complete && schema.k2() > 0) {
    throw std::invalid_argument(
        "complete-case method requires fully observed p-values (K2 = 0)");
  }
  // Only the mixture families need the (possibly expensive) shared null;
  // the closed-form methods carry their own.
  std::optional<NullCdf> shared_null;
  if (options.method == Method::mean_impute || options.method == Method::multiple_impute) {
    shared_null = null_cdf_for(options.method, options.transform, schema.k1(),
                               schema.groups(), options.imputations, options.mixture);
  }
  const Rng base(options.seed);

  std::vector<double> pvec(n, 1.0);
  for (std::size_t row = 0; row < n; ++row) {
    FeatureResult res;
    res.feature_id = matrix.feature_ids()[row];
    res.method = options.method;
    const StudyPanel panel = matrix.panel(row);
    switch (options.method) {
      case Method::complete: {
        const Combined c = combine_complete(options.transform, matrix.observed_row(row));
        res.statistic = c.statistic;
        res.p_meta = c.p_meta;
        break;
      }
      case Method::available: {
        const auto c = combine_available(options.transform, panel);
        if (!c.has_value()) {
          res.no_observed_studies = true;
          res.statistic = std::numeric_limits<double>::quiet_NaN();
          res.p_meta = 1.0;
        } else {
          res.statistic = c->statistic;
          res.p_meta = c->p_meta;
        }
        break;
      }
      case Method::mean_impute: {
        const Combined c = mean_impute_combine(panel, options.transform, *shared_null);
        res.statistic = c.statistic;
        res.p_meta = c.p_meta;
        break;
      }
      case Method::single_impute: {
        Rng row_rng = base.split(row);
        const Combined c = single_impute_statistic(panel, options.transform, row_rng);
        res.statistic = c.statistic;
        res.p_meta = c.p_meta;
        break;
      }
      case Method::multiple_impute: {
        Rng row_rng = base.split(row);
        const Combined c = multiple_impute_combine(panel, options.transform,
                                                   options.imputations, *shared_null, row_rng);
        res.statistic = c.statistic;
        res.p_meta = c.p_meta;
        break;
      }
    }
    pvec[row] = res.p_meta;
    results.push_back(std::move(res));
  }

  const auto qbh = bh_adjust(pvec);
  const auto qby = by_adjust(pvec);
  for (std::size_t row = 0; row < n; ++row) {
    results[row].q_bh = qbh[row];
    results[row].q_by = qby[row];
  }
  return results;
}

FdrEstimate true_fdr(const std::unordered_set<std::string>& detected,
                     const std::unordered_set<std::string>& true_nulls) {
  if (detected.empty()) return {0.0, true};
  std::size_t false_hits = 0;
  for (const auto& id : detected) false_hits += true_nulls.count(id);
  return {static_cast<double>(false_hits) / static_cast<double>(detected.size()), false};
}

FdrEstimate true_fdr(std::span<const std::size_t> detected,
                     const std::vector<bool>& is_true_null) {
  if (detected.empty()) return {0.0, true};
  std::size_t false_hits = 0;
  for (std::size_t idx : detected) {
    if (idx >= is_true_null.size()) throw std::out_of_range("true_fdr: index out of range");
    false_hits += is_true_null[idx] ? 1 : 0;
  }
  return {static_cast<double>(false_hits) / static_cast<double>(detected.size()), false};
}

double empirical_type1(std::span<const double> null_pvalues, double level) {
  if (null_pvalues.empty()) return 0.0;
  std::size_t hits = 0;
  for (double p : null_pvalues) hits += (p <= level) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(null_pvalues.size());
}

}  // namespace truncmeta
