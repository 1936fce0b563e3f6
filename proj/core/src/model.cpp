#include "truncmeta/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "truncmeta/special.hpp"

namespace truncmeta {

namespace {

std::atomic<std::uint64_t> g_clamp_events{0};

constexpr double kClampLo = 1e-300;
constexpr double kClampHi = 1.0 - 1e-16;

}  // namespace

const char* to_string(TransformKind kind) {
  return kind == TransformKind::fisher ? "fisher" : "stouffer";
}

TransformKind transform_kind_from_string(const std::string& name) {
  if (name == "fisher") return TransformKind::fisher;
  if (name == "stouffer") return TransformKind::stouffer;
  throw std::invalid_argument("unknown transform: " + name);
}

double EvidenceTransform::statistic(double p) const {
  if (!std::isfinite(p)) throw std::domain_error("transform: p must be finite");
  if (kind_ == TransformKind::fisher) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw std::domain_error("transform (Fisher): p must lie in (0,1]");
    }
    return -2.0 * std::log(p);
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("transform (Stouffer): p must lie in (0,1)");
  }
  return std_normal_quantile(p);
}

double EvidenceTransform::statistic_clamped(double p) const {
  if (!std::isfinite(p) || !(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("transform: p must lie in [0,1]");
  }
  double q = p;
  if (q < kClampLo) {
    q = kClampLo;
    g_clamp_events.fetch_add(1, std::memory_order_relaxed);
  }
  if (kind_ == TransformKind::stouffer && q > kClampHi) {
    q = kClampHi;
    g_clamp_events.fetch_add(1, std::memory_order_relaxed);
  }
  return kind_ == TransformKind::fisher ? -2.0 * std::log(q) : std_normal_quantile(q);
}

double EvidenceTransform::base_cdf(double t) const {
  if (kind_ == TransformKind::fisher) {
    return t <= 0.0 ? 0.0 : chi_square_cdf(t, 2);
  }
  return std_normal_cdf(t);
}

double EvidenceTransform::combined_cdf(double t, int k) const {
  if (k <= 0) throw std::invalid_argument("combined_cdf: k must be positive");
  if (kind_ == TransformKind::fisher) {
    return t <= 0.0 ? 0.0 : chi_square_cdf(t, 2 * k);
  }
  return std_normal_cdf(t / std::sqrt(static_cast<double>(k)));
}

double EvidenceTransform::combined_survival(double t, int k) const {
  if (k <= 0) throw std::invalid_argument("combined_survival: k must be positive");
  if (kind_ == TransformKind::fisher) {
    return t <= 0.0 ? 1.0 : chi_square_survival(t, 2 * k);
  }
  return std_normal_cdf(-t / std::sqrt(static_cast<double>(k)));
}

double EvidenceTransform::combined_pvalue(double statistic, int k) const {
  return right_tail_significant() ? combined_survival(statistic, k)
                                  : combined_cdf(statistic, k);
}

std::uint64_t EvidenceTransform::clamp_count() {
  return g_clamp_events.load(std::memory_order_relaxed);
}

double transform_inverse(const EvidenceTransform& transform, double p) {
  return transform.statistic(p);
}

StudyObservation StudyObservation::observed(double p) {
  if (!std::isfinite(p) || !(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("StudyObservation: observed p must lie in (0,1]");
  }
  StudyObservation o;
  o.censored_ = false;
  o.value_ = p;
  return o;
}

StudyObservation StudyObservation::censored(bool significant, double threshold) {
  if (!std::isfinite(threshold) || !(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("StudyObservation: threshold must lie in (0,1)");
  }
  StudyObservation o;
  o.censored_ = true;
  o.significant_ = significant;
  o.value_ = threshold;
  return o;
}

double StudyObservation::pvalue() const {
  if (censored_) throw std::logic_error("StudyObservation: p-value requested from censored study");
  return value_;
}

bool StudyObservation::significant() const {
  if (!censored_) throw std::logic_error("StudyObservation: indicator requested from observed study");
  return significant_;
}

double StudyObservation::threshold() const {
  if (!censored_) throw std::logic_error("StudyObservation: threshold requested from observed study");
  return value_;
}

int StudyPanel::k1() const {
  int n = 0;
  for (const auto& s : studies) n += s.is_censored() ? 0 : 1;
  return n;
}

std::vector<double> StudyPanel::observed_pvalues() const {
  std::vector<double> p;
  p.reserve(studies.size());
  for (const auto& s : studies) {
    if (!s.is_censored()) p.push_back(s.pvalue());
  }
  return p;
}

int ThresholdGroups::total() const {
  int n = 0;
  for (int c : counts) n += c;
  return n;
}

std::vector<double> ThresholdGroups::expand() const {
  std::vector<double> out;
  out.reserve(total());
  for (std::size_t l = 0; l < thresholds.size(); ++l) {
    out.insert(out.end(), counts[l], thresholds[l]);
  }
  return out;
}

ThresholdGroups group_thresholds(std::span<const double> thresholds) {
  std::vector<double> sorted(thresholds.begin(), thresholds.end());
  std::sort(sorted.begin(), sorted.end());
  ThresholdGroups g;
  for (double a : sorted) {
    if (!(a > 0.0 && a < 1.0)) {
      throw std::invalid_argument("group_thresholds: threshold must lie in (0,1)");
    }
    if (!g.thresholds.empty() && g.thresholds.back() == a) {
      ++g.counts.back();
    } else {
      g.thresholds.push_back(a);
      g.counts.push_back(1);
    }
  }
  return g;
}

ThresholdGroups group_thresholds(const StudyPanel& panel) {
  std::vector<double> t;
  for (const auto& s : panel.studies) {
    if (s.is_censored()) t.push_back(s.threshold());
  }
  return group_thresholds(std::span<const double>(t));
}

Combined combine_complete(const EvidenceTransform& transform,
                          std::span<const double> pvalues) {
  if (pvalues.empty()) throw std::invalid_argument("combine_complete: empty p-value list");
  double statistic = 0.0;
  for (double p : pvalues) statistic += transform.statistic_clamped(p);
  const int k = static_cast<int>(pvalues.size());
  return {statistic, transform.combined_pvalue(statistic, k)};
}

std::optional<Combined> combine_available(const EvidenceTransform& transform,
                                          const StudyPanel& panel) {
  const auto observed = panel.observed_pvalues();
  if (observed.empty()) return std::nullopt;
  return combine_complete(transform, observed);
}

int PanelSchema::k1() const {
  int n = 0;
  for (const auto& t : thresholds) n += t.has_value() ? 0 : 1;
  return n;
}

std::vector<std::size_t> PanelSchema::observed_studies() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!thresholds[i].has_value()) idx.push_back(i);
  }
  return idx;
}

std::vector<std::size_t> PanelSchema::censored_studies() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (thresholds[i].has_value()) idx.push_back(i);
  }
  return idx;
}

ThresholdGroups PanelSchema::groups() const {
  std::vector<double> t;
  for (const auto& a : thresholds) {
    if (a.has_value()) t.push_back(*a);
  }
  return group_thresholds(std::span<const double>(t));
}

void PanelSchema::validate() const {
  if (thresholds.empty()) throw std::invalid_argument("PanelSchema: no studies");
  for (const auto& a : thresholds) {
    if (a.has_value() && !(*a > 0.0 && *a < 1.0)) {
      throw std::invalid_argument("PanelSchema: threshold must lie in (0,1)");
    }
  }
}

PanelMatrix::PanelMatrix(PanelSchema schema) : schema_(std::move(schema)) {
  schema_.validate();
}

void PanelMatrix::add_row(std::string feature_id, std::span<const double> observed,
                          std::span<const std::uint8_t> indicators) {
  if (static_cast<int>(observed.size()) != schema_.k1() ||
      static_cast<int>(indicators.size()) != schema_.k2()) {
    throw std::invalid_argument("PanelMatrix: row width does not match schema (feature " +
                                feature_id + ")");
  }
  for (double p : observed) {
    if (!std::isfinite(p) || !(p > 0.0 && p <= 1.0)) {
      throw std::invalid_argument("PanelMatrix: invalid p-value in feature " + feature_id);
    }
  }
  for (std::uint8_t b : indicators) {
    if (b > 1) {
      throw std::invalid_argument("PanelMatrix: indicator not in {0,1} in feature " + feature_id);
    }
  }
  ids_.push_back(std::move(feature_id));
  observed_.insert(observed_.end(), observed.begin(), observed.end());
  indicators_.insert(indicators_.end(), indicators.begin(), indicators.end());
}

std::span<const double> PanelMatrix::observed_row(std::size_t row) const {
  const std::size_t w = schema_.k1();
  return {observed_.data() + row * w, w};
}

std::span<const std::uint8_t> PanelMatrix::indicator_row(std::size_t row) const {
  const std::size_t w = schema_.k2();
  return {indicators_.data() + row * w, w};
}

StudyPanel PanelMatrix::panel(std::size_t row) const {
  StudyPanel panel;
  panel.studies.reserve(schema_.k());
  const auto obs = observed_row(row);
  const auto ind = indicator_row(row);
  std::size_t oi = 0;
  std::size_t ci = 0;
  for (const auto& t : schema_.thresholds) {
    if (t.has_value()) {
      panel.studies.push_back(StudyObservation::censored(ind[ci++] != 0, *t));
    } else {
      panel.studies.push_back(StudyObservation::observed(obs[oi++]));
    }
  }
  return panel;
}

}  // namespace truncmeta
