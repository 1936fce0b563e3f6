#include "truncmeta/imputation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "truncmeta/special.hpp"

namespace truncmeta {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310005024157652848110;

// Neumaier compensated summation; keeps mixture sums near 1 ulp so the
// grouped and full enumeration paths agree to 1e-12 even at 2^12 terms.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

double binomial_coefficient(int n, int j) {
  double c = 1.0;
  for (int i = 0; i < j; ++i) {
    c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
  }
  return c;
}

double pow_by_multiply(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// Visit every group count vector (j_1..j_r), j_l in [0, n_l], with the
// grouped binomial weight of Eq.-(2.10)/(2.16) form.
template <typename Sink>
void enumerate_grouped(const ThresholdGroups& groups, std::uint64_t cap, Sink&& sink) {
  const int r = groups.group_count();
  std::uint64_t terms = 1;
  for (int c : groups.counts) {
    terms *= static_cast<std::uint64_t>(c) + 1;
    if (terms > cap) {
      throw std::invalid_argument(
          "null CDF enumeration exceeds the term cap (" + std::to_string(cap) +
          "); evaluate this schema by Monte Carlo (mc_null_oracle / the validate "
          "subcommand) or raise MixtureOptions::term_cap");
    }
  }
  std::vector<int> counts(r, 0);
  // Per-group weight factors refreshed as the odometer turns.
  std::vector<double> factor(r);
  for (int l = 0; l < r; ++l) {
    factor[l] = binomial_coefficient(groups.counts[l], 0) *
                pow_by_multiply(1.0 - groups.thresholds[l], groups.counts[l]);
  }
  for (;;) {
    double w = 1.0;
    for (int l = 0; l < r; ++l) w *= factor[l];
    sink(std::span<const int>(counts), w);
    int l = 0;
    for (; l < r; ++l) {
      if (counts[l] < groups.counts[l]) {
        ++counts[l];
        factor[l] = binomial_coefficient(groups.counts[l], counts[l]) *
                    pow_by_multiply(groups.thresholds[l], counts[l]) *
                    pow_by_multiply(1.0 - groups.thresholds[l],
                                    groups.counts[l] - counts[l]);
        break;
      }
      counts[l] = 0;
      factor[l] = binomial_coefficient(groups.counts[l], 0) *
                  pow_by_multiply(1.0 - groups.thresholds[l], groups.counts[l]);
    }
    if (l == r) break;
  }
}

// Visit every per-study indicator vector (the 2^{K2} expansion); weights are
// per-study products, the counts handed to the sink are per group.
template <typename Sink>
void enumerate_full(const ThresholdGroups& groups, std::uint64_t cap, Sink&& sink) {
  const int k2 = groups.total();
  if (k2 > 62 || (1ULL << k2) > cap) {
    throw std::invalid_argument(
        "full 2^{K2} enumeration exceeds the term cap; use the grouped form or "
        "Monte Carlo validation");
  }
  std::vector<double> alpha;
  std::vector<int> group_of;
  for (int l = 0; l < groups.group_count(); ++l) {
    for (int i = 0; i < groups.counts[l]; ++i) {
      alpha.push_back(groups.thresholds[l]);
      group_of.push_back(l);
    }
  }
  std::vector<int> counts(groups.group_count());
  const std::uint64_t n_masks = 1ULL << k2;
  for (std::uint64_t mask = 0; mask < n_masks; ++mask) {
    double w = 1.0;
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < k2; ++i) {
      if (mask & (1ULL << i)) {
        w *= alpha[i];
        ++counts[group_of[i]];
      } else {
        w *= 1.0 - alpha[i];
      }
    }
    sink(std::span<const int>(counts), w);
  }
}

template <typename Sink>
void enumerate_terms(const ThresholdGroups& groups, const MixtureOptions& options,
                     Sink&& sink) {
  if (options.full_enumeration) {
    enumerate_full(groups, options.term_cap, sink);
  } else {
    enumerate_grouped(groups, options.term_cap, sink);
  }
}

// Sum_l j_l*below_l + (n_l - j_l)*above_l in fixed ascending-group order.
// Both the Theorem-1 shifts and the mean-imputation statistic go through
// here, so the two sides of an atom comparison are the same doubles.
double grouped_censored_sum(std::span<const double> below, std::span<const double> above,
                            std::span<const int> group_sizes,
                            std::span<const int> sig_counts) {
  double s = 0.0;
  for (std::size_t l = 0; l < below.size(); ++l) {
    s += static_cast<double>(sig_counts[l]) * below[l];
    s += static_cast<double>(group_sizes[l] - sig_counts[l]) * above[l];
  }
  return s;
}

// Gauss-Legendre rules on [-1,1], cached per node count.
struct GlRule {
  std::vector<double> x;
  std::vector<double> w;
};

const GlRule& gl_rule(int n) {
  static std::map<int, GlRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GlRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    rule.w[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.w[n - 1 - i] = rule.w[i];
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

// integral over [a,b] of phi(z) * g(t - mu - sigma z) dz for g = chi-square
// CDF or survival with df degrees of freedom.
double gl_segment(double a, double b, int n, int df, double t, double mu,
                  double sigma, bool survival) {
  if (!(b > a)) return 0.0;
  const GlRule& rule = gl_rule(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  KahanSum acc;
  for (int i = 0; i < n; ++i) {
    const double z = mid + half * rule.x[i];
    const double arg = t - mu - sigma * z;
    double g;
    if (arg <= 0.0) {
      g = survival ? 1.0 : 0.0;
    } else {
      g = survival ? chi_square_survival(arg, df) : chi_square_cdf(arg, df);
    }
    acc.add(rule.w[i] * std::exp(-0.5 * z * z) * g);
  }
  return acc.value() * half / kSqrt2Pi;
}

// P(A + U <= t) (or >= t) for A ~ chi^2_df independent of U ~ N(mu, sigma^2).
// Gauss-Legendre over +-8 sd of U, split at the chi-square kink, node ladder
// refined until successive estimates differ by less than tol.
double chi_normal_conv(double t, int df, double mu, double sigma, double tol,
                       bool survival) {
  const double zk = (t - mu) / sigma;  // chi-square argument positive iff z < zk
  const double lo = -8.0;
  const double hi = std::min(8.0, zk);
  double base = 0.0;
  if (survival) {
    // z > hi contributes survival = 1 over that normal mass.
    base = std_normal_cdf(-hi);
  }
  if (hi <= lo) {
    // The chi-square argument is nonpositive over the whole +-8 sd window.
    return survival ? 1.0 : 0.0;
  }
  static const int ladder[] = {129, 257, 513, 1025};
  double prev = 0.0;
  for (std::size_t step = 0; step < std::size(ladder); ++step) {
    const double est = gl_segment(lo, hi, ladder[step], df, t, mu, sigma, survival) + base;
    if (step > 0 && std::fabs(est - prev) < tol) return est;
    prev = est;
  }
  return prev;
}

}  // namespace

const char* to_string(Method method) {
  switch (method) {
    case Method::complete: return "complete";
    case Method::available: return "available";
    case Method::mean_impute: return "mean";
    case Method::single_impute: return "single";
    case Method::multiple_impute: return "multiple";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  if (name == "complete") return Method::complete;
  if (name == "available") return Method::available;
  if (name == "mean") return Method::mean_impute;
  if (name == "single") return Method::single_impute;
  if (name == "multiple") return Method::multiple_impute;
  throw std::invalid_argument("unknown method: " + name);
}

TruncatedMoments truncated_moments(const EvidenceTransform& transform, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("truncated_moments: alpha must lie in (0,1)");
  }
  TruncatedMoments m{};
  if (transform.kind() == TransformKind::fisher) {
    const double la = std::log(alpha);
    m.mean_below = 2.0 * (1.0 - la);
    m.var_below = 4.0;
    m.mean_above = 2.0 + 2.0 * alpha / (1.0 - alpha) * la;
    m.var_above = 4.0 - 4.0 * alpha / ((1.0 - alpha) * (1.0 - alpha)) * la * la;
  } else {
    const double z = std_normal_quantile(alpha);
    const double d = std_normal_pdf(z);
    m.mean_below = -d / alpha;
    m.mean_above = d / (1.0 - alpha);
    m.var_below = 1.0 + z * m.mean_below - m.mean_below * m.mean_below;
    m.var_above = 1.0 + z * m.mean_above - m.mean_above * m.mean_above;
  }
  return m;
}

double NullCdf::evaluate(double t) const {
  switch (method_) {
    case Method::complete:
    case Method::available:
    case Method::single_impute:
      return transform_.combined_cdf(t, k_total_);
    case Method::mean_impute: {
      if (k1_ == 0) {
        const auto it = std::upper_bound(shifts_.begin(), shifts_.end(), t);
        return prefix_[static_cast<std::size_t>(it - shifts_.begin())];
      }
      KahanSum acc;
      for (std::size_t i = 0; i < shifts_.size(); ++i) {
        acc.add(weights_[i] * transform_.combined_cdf(t - shifts_[i], k1_));
      }
      return std::clamp(acc.value(), 0.0, 1.0);
    }
    case Method::multiple_impute: {
      KahanSum acc;
      for (const auto& term : mi_terms_) {
        double part;
        if (transform_.kind() == TransformKind::stouffer) {
          part = std_normal_cdf((t - term.mu) / std::sqrt(k1_ + term.var_u));
        } else if (k1_ == 0) {
          part = std_normal_cdf((t - term.mu) / std::sqrt(term.var_u));
        } else if (!conv_mc_samples_.empty()) {
          KahanSum mc;
          const double sd = std::sqrt(term.var_u);
          for (double a : conv_mc_samples_) {
            mc.add(std_normal_cdf((t - a - term.mu) / sd));
          }
          part = mc.value() / static_cast<double>(conv_mc_samples_.size());
        } else {
          part = chi_normal_conv(t, 2 * k1_, term.mu, std::sqrt(term.var_u),
                                 options_.convolution_tol, false);
        }
        acc.add(term.weight * part);
      }
      return std::clamp(acc.value(), 0.0, 1.0);
    }
  }
  return 0.0;
}

double NullCdf::upper_tail(double t) const {
  switch (method_) {
    case Method::complete:
    case Method::available:
    case Method::single_impute:
      return transform_.combined_survival(t, k_total_);
    case Method::mean_impute: {
      if (k1_ == 0) {
        const auto it = std::lower_bound(shifts_.begin(), shifts_.end(), t);
        return suffix_[static_cast<std::size_t>(it - shifts_.begin())];
      }
      KahanSum acc;
      for (std::size_t i = 0; i < shifts_.size(); ++i) {
        acc.add(weights_[i] * transform_.combined_survival(t - shifts_[i], k1_));
      }
      return std::clamp(acc.value(), 0.0, 1.0);
    }
    case Method::multiple_impute: {
      KahanSum acc;
      for (const auto& term : mi_terms_) {
        double part;
        if (transform_.kind() == TransformKind::stouffer) {
          part = std_normal_cdf((term.mu - t) / std::sqrt(k1_ + term.var_u));
        } else if (k1_ == 0) {
          part = std_normal_cdf((term.mu - t) / std::sqrt(term.var_u));
        } else if (!conv_mc_samples_.empty()) {
          KahanSum mc;
          const double sd = std::sqrt(term.var_u);
          for (double a : conv_mc_samples_) {
            mc.add(std_normal_cdf((a + term.mu - t) / sd));
          }
          part = mc.value() / static_cast<double>(conv_mc_samples_.size());
        } else {
          part = chi_normal_conv(t, 2 * k1_, term.mu, std::sqrt(term.var_u),
                                 options_.convolution_tol, true);
        }
        acc.add(term.weight * part);
      }
      return std::clamp(acc.value(), 0.0, 1.0);
    }
  }
  return 0.0;
}

double NullCdf::atom_mass(double t) const {
  if (!discrete()) return 0.0;
  const auto it = std::lower_bound(shifts_.begin(), shifts_.end(), t);
  if (it != shifts_.end() && *it == t) {
    return weights_[static_cast<std::size_t>(it - shifts_.begin())];
  }
  return 0.0;
}

bool NullCdf::discrete() const {
  return method_ == Method::mean_impute && k1_ == 0 && !shifts_.empty();
}

std::size_t NullCdf::term_count() const {
  return method_ == Method::multiple_impute ? mi_terms_.size() : shifts_.size();
}

double NullCdf::min_support() const {
  if (!discrete()) {
    throw std::logic_error("min_support: null is not purely discrete");
  }
  return shifts_.front();
}

NullCdf complete_null_cdf(const EvidenceTransform& transform, int k) {
  if (k <= 0) throw std::invalid_argument("complete_null_cdf: k must be positive");
  return NullCdf(Method::complete, transform, k, k);
}

NullCdf available_null_cdf(const EvidenceTransform& transform, int k1) {
  if (k1 <= 0) throw std::invalid_argument("available_null_cdf: no observed studies");
  return NullCdf(Method::available, transform, k1, k1);
}

NullCdf single_impute_null_cdf(const EvidenceTransform& transform, int k) {
  if (k <= 0) throw std::invalid_argument("single_impute_null_cdf: k must be positive");
  return NullCdf(Method::single_impute, transform, k, k);
}

NullCdf mean_null_cdf(const EvidenceTransform& transform, int k1,
                      const ThresholdGroups& groups, const MixtureOptions& options) {
  if (k1 < 0) throw std::invalid_argument("mean_null_cdf: negative K1");
  const int k_total = k1 + groups.total();
  if (k_total == 0) throw std::invalid_argument("mean_null_cdf: no studies");
  NullCdf cdf(Method::mean_impute, transform, k1, k_total);
  cdf.groups_ = groups;
  cdf.options_ = options;
  const int r = groups.group_count();
  cdf.below_.resize(r);
  cdf.above_.resize(r);
  for (int l = 0; l < r; ++l) {
    cdf.below_[l] = transform.statistic(groups.thresholds[l] / 2.0);
    cdf.above_[l] = transform.statistic((1.0 + groups.thresholds[l]) / 2.0);
  }
  std::vector<std::pair<double, double>> terms;  // (shift, weight)
  enumerate_terms(groups, options, [&](std::span<const int> counts, double w) {
    terms.emplace_back(
        grouped_censored_sum(cdf.below_, cdf.above_, groups.counts, counts), w);
  });
  if (terms.empty()) terms.emplace_back(0.0, 1.0);  // K2 = 0: complete-case null
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [shift, w] : terms) {
    if (!cdf.shifts_.empty() && cdf.shifts_.back() == shift) {
      cdf.weights_.back() += w;
    } else {
      cdf.shifts_.push_back(shift);
      cdf.weights_.push_back(w);
    }
  }
  const std::size_t n = cdf.shifts_.size();
  cdf.prefix_.assign(n + 1, 0.0);
  cdf.suffix_.assign(n + 1, 0.0);
  KahanSum pre;
  for (std::size_t i = 0; i < n; ++i) {
    pre.add(cdf.weights_[i]);
    cdf.prefix_[i + 1] = std::min(1.0, pre.value());
  }
  KahanSum suf;
  for (std::size_t i = n; i-- > 0;) {
    suf.add(cdf.weights_[i]);
    cdf.suffix_[i] = std::min(1.0, suf.value());
  }
  return cdf;
}

NullCdf multiple_null_cdf(const EvidenceTransform& transform, int k1,
                          const ThresholdGroups& groups, int d,
                          const MixtureOptions& options) {
  if (k1 < 0) throw std::invalid_argument("multiple_null_cdf: negative K1");
  if (d < 1) throw std::invalid_argument("multiple_null_cdf: D must be >= 1");
  const int k_total = k1 + groups.total();
  if (k_total == 0) throw std::invalid_argument("multiple_null_cdf: no studies");
  if (d < 30 && groups.total() > 0) {
    std::fprintf(stderr,
                 "truncmeta: warning: multiple-imputation null built with D=%d; the "
                 "normal approximation degrades below D=30\n",
                 d);
  }
  NullCdf cdf(Method::multiple_impute, transform, k1, k_total);
  cdf.groups_ = groups;
  cdf.options_ = options;
  cdf.d_ = d;
  if (groups.total() == 0) {
    // No censored studies: the average equals the complete statistic.
    return complete_null_cdf(transform, k1);
  }
  const int r = groups.group_count();
  std::vector<TruncatedMoments> moments(r);
  for (int l = 0; l < r; ++l) {
    moments[l] = truncated_moments(transform, groups.thresholds[l]);
  }
  enumerate_terms(groups, options, [&](std::span<const int> counts, double w) {
    double mu = 0.0;
    double var = 0.0;
    for (int l = 0; l < r; ++l) {
      mu += counts[l] * moments[l].mean_below +
            (groups.counts[l] - counts[l]) * moments[l].mean_above;
      var += counts[l] * moments[l].var_below +
             (groups.counts[l] - counts[l]) * moments[l].var_above;
    }
    cdf.mi_terms_.push_back({w, mu, var / static_cast<double>(d)});
  });
  // The full 2^{K2} expansion repeats each (mu, var) exactly; merge so the
  // mixture stays at the grouped term count.
  std::sort(cdf.mi_terms_.begin(), cdf.mi_terms_.end(),
            [](const NullCdf::MiTerm& a, const NullCdf::MiTerm& b) {
              return a.mu != b.mu ? a.mu < b.mu : a.var_u < b.var_u;
            });
  std::vector<NullCdf::MiTerm> merged;
  for (const auto& term : cdf.mi_terms_) {
    if (!merged.empty() && merged.back().mu == term.mu &&
        merged.back().var_u == term.var_u) {
      merged.back().weight += term.weight;
    } else {
      merged.push_back(term);
    }
  }
  cdf.mi_terms_ = std::move(merged);
  if (options.monte_carlo_convolution && transform.kind() == TransformKind::fisher &&
      k1 > 0) {
    Rng rng(options.monte_carlo_seed);
    cdf.conv_mc_samples_.resize(options.monte_carlo_draws);
    for (auto& a : cdf.conv_mc_samples_) a = rng.chi_square(2 * k1);
  }
  return cdf;
}

NullCdf null_cdf_for(Method method, const EvidenceTransform& transform, int k1,
                     const ThresholdGroups& groups, int d,
                     const MixtureOptions& options) {
  const int k_total = k1 + groups.total();
  switch (method) {
    case Method::complete:
      if (groups.total() > 0) {
        throw std::invalid_argument(
            "complete-case method requires fully observed p-values (K2 = 0)");
      }
      return complete_null_cdf(transform, k_total);
    case Method::available:
      return available_null_cdf(transform, k1);
    case Method::single_impute:
      return single_impute_null_cdf(transform, k_total);
    case Method::mean_impute:
      return mean_null_cdf(transform, k1, groups, options);
    case Method::multiple_impute:
      return multiple_null_cdf(transform, k1, groups, d, options);
  }
  throw std::logic_error("null_cdf_for: unreachable");
}

double mean_expected_statistic(const EvidenceTransform& transform, int k1,
                               const ThresholdGroups& groups) {
  if (k1 < 0) throw std::invalid_argument("mean_expected_statistic: negative K1");
  if (transform.kind() == TransformKind::fisher) {
    double censored = 0.0;
    for (int l = 0; l < groups.group_count(); ++l) {
      const double a = groups.thresholds[l];
      censored += groups.counts[l] *
                  (a * std::log(a / 2.0) + (1.0 - a) * std::log((1.0 + a) / 2.0));
    }
    return 2.0 * k1 - 2.0 * censored;
  }
  double censored = 0.0;
  for (int l = 0; l < groups.group_count(); ++l) {
    const double a = groups.thresholds[l];
    censored += groups.counts[l] * (a * std_normal_quantile(a / 2.0) +
                                    (1.0 - a) * std_normal_quantile((1.0 + a) / 2.0));
  }
  return censored;
}

std::vector<double> impute_mean(const StudyPanel& panel) {
  std::vector<double> imputed;
  imputed.reserve(panel.studies.size());
  for (const auto& s : panel.studies) {
    if (!s.is_censored()) {
      imputed.push_back(s.pvalue());
    } else if (s.significant()) {
      imputed.push_back(s.threshold() / 2.0);
    } else {
      imputed.push_back((1.0 + s.threshold()) / 2.0);
    }
  }
  return imputed;
}

namespace {

// Significant-study counts per distinct threshold, ascending-group order.
std::vector<int> significant_group_counts(const StudyPanel& panel,
                                          const ThresholdGroups& groups) {
  std::vector<int> sig(groups.group_count(), 0);
  for (const auto& s : panel.studies) {
    if (!s.is_censored() || !s.significant()) continue;
    const auto it = std::lower_bound(groups.thresholds.begin(),
                                     groups.thresholds.end(), s.threshold());
    if (it == groups.thresholds.end() || *it != s.threshold()) {
      throw std::invalid_argument("panel threshold not present in null CDF groups");
    }
    ++sig[static_cast<std::size_t>(it - groups.thresholds.begin())];
  }
  return sig;
}

double observed_statistic_sum(const StudyPanel& panel, const EvidenceTransform& transform) {
  double a = 0.0;
  for (const auto& s : panel.studies) {
    if (!s.is_censored()) a += transform.statistic_clamped(s.pvalue());
  }
  return a;
}

}  // namespace

double mean_impute_statistic(const StudyPanel& panel, const EvidenceTransform& transform) {
  const ThresholdGroups groups = group_thresholds(panel);
  std::vector<double> below(groups.group_count());
  std::vector<double> above(groups.group_count());
  for (int l = 0; l < groups.group_count(); ++l) {
    below[l] = transform.statistic(groups.thresholds[l] / 2.0);
    above[l] = transform.statistic((1.0 + groups.thresholds[l]) / 2.0);
  }
  const auto sig = significant_group_counts(panel, groups);
  return observed_statistic_sum(panel, transform) +
         grouped_censored_sum(below, above, groups.counts, sig);
}

Combined mean_impute_combine(const StudyPanel& panel, const EvidenceTransform& transform,
                             const NullCdf& null_cdf) {
  if (null_cdf.method() != Method::mean_impute) {
    throw std::invalid_argument("mean_impute_combine: null CDF is not a mean-imputation null");
  }
  const auto sig = significant_group_counts(panel, null_cdf.groups());
  const double statistic =
      observed_statistic_sum(panel, transform) +
      grouped_censored_sum(null_cdf.below_, null_cdf.above_,
                           null_cdf.groups().counts, sig);
  return {statistic, method_pvalue(statistic, null_cdf)};
}

Combined single_impute_statistic(const StudyPanel& panel,
                                 const EvidenceTransform& transform, Rng& rng) {
  double statistic = 0.0;
  for (const auto& s : panel.studies) {
    if (!s.is_censored()) {
      statistic += transform.statistic_clamped(s.pvalue());
      continue;
    }
    const double u = rng.uniform();
    const double a = s.threshold();
    const double p = s.significant() ? a * u : a + (1.0 - a) * u;
    statistic += transform.statistic_clamped(p);
  }
  return {statistic, transform.combined_pvalue(statistic, panel.k())};
}

double multiple_impute_statistic(const StudyPanel& panel,
                                 const EvidenceTransform& transform, int d, Rng& rng) {
  if (d < 1) throw std::invalid_argument("multiple_impute_statistic: D must be >= 1");
  double statistic = 0.0;
  for (const auto& s : panel.studies) {
    if (!s.is_censored()) {
      statistic += transform.statistic_clamped(s.pvalue());
      continue;
    }
    const double a = s.threshold();
    double acc = 0.0;
    for (int l = 0; l < d; ++l) {
      const double u = rng.uniform();
      const double p = s.significant() ? a * u : a + (1.0 - a) * u;
      acc += transform.statistic_clamped(p);
    }
    statistic += acc / static_cast<double>(d);
  }
  return statistic;
}

Combined multiple_impute_combine(const StudyPanel& panel,
                                 const EvidenceTransform& transform, int d,
                                 const NullCdf& null_cdf, Rng& rng) {
  const double statistic = multiple_impute_statistic(panel, transform, d, rng);
  return {statistic, method_pvalue(statistic, null_cdf)};
}

double method_pvalue(double statistic, const NullCdf& null_cdf) {
  const double p = null_cdf.transform().right_tail_significant()
                       ? null_cdf.upper_tail(statistic)
                       : null_cdf.evaluate(statistic);
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace truncmeta
