#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "truncmeta/simulate.hpp"
#include "truncmeta/special.hpp"

using namespace truncmeta;

namespace {

SimConfig tiny_config() {
  SimConfig cfg;
  cfg.genes = 240;
  cfg.samples_per_study = 40;
  cfg.studies = 4;
  cfg.clusters = 4;
  cfg.cluster_size = 10;
  cfg.de_genes = 40;
  cfg.replicates = 2;
  cfg.seed = 99;
  cfg.censor_pattern = {std::nullopt, std::nullopt, 0.01, 0.05};
  return cfg;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

std::vector<double> gene_row(const SimDataset& data, int gene, int study) {
  std::vector<double> row(data.samples);
  for (int n = 0; n < data.samples; ++n) row[n] = data.value(gene, study, n);
  return row;
}

}  // namespace

TEST_CASE("simulated datasets are reproducible bit for bit") {
  const auto cfg = tiny_config();
  const Rng rng(cfg.seed);
  const auto a = simulate_correlated(cfg, rng);
  const auto b = simulate_correlated(cfg, rng);
  CHECK(a.values == b.values);
  CHECK(a.cluster_labels == b.cluster_labels);
  const auto c = simulate_independent(cfg, rng);
  const auto d = simulate_independent(cfg, rng);
  CHECK(c.values == d.values);
}

TEST_CASE("truth flags and cluster labels match the configuration") {
  const auto cfg = tiny_config();
  const auto data = simulate_correlated(cfg, Rng(cfg.seed));
  for (int g = 0; g < cfg.genes; ++g) {
    CHECK(static_cast<bool>(data.de_flags[g]) == (g < cfg.de_genes));
  }
  std::vector<int> label_counts(cfg.clusters + 1, 0);
  for (int label : data.cluster_labels) ++label_counts[label];
  CHECK(label_counts[0] == cfg.genes - cfg.clusters * cfg.cluster_size);
  for (int c = 1; c <= cfg.clusters; ++c) CHECK(label_counts[c] == cfg.cluster_size);
}

TEST_CASE("null genes give uniform t-test p-values") {
  SimConfig cfg = tiny_config();
  cfg.genes = 3000;
  cfg.clusters = 0;
  cfg.cluster_size = 1;
  cfg.de_genes = 0;
  cfg.studies = 2;
  cfg.censor_pattern.clear();
  cfg.censor_pattern.resize(2);
  const auto data = simulate_independent(cfg, Rng(7));
  const auto pmat = compute_pvalue_matrix(data);
  std::vector<double> pooled(pmat.values.begin(), pmat.values.end());
  CHECK(uniformity_ks(pooled) < 0.02);
}

TEST_CASE("independent genes are uncorrelated, cluster members are not") {
  SimConfig cfg;
  cfg.genes = 60;
  cfg.samples_per_study = 10000;
  cfg.studies = 1;
  cfg.clusters = 2;
  cfg.cluster_size = 20;
  cfg.de_genes = 0;
  cfg.replicates = 1;
  cfg.censor_pattern = {std::nullopt};
  cfg.seed = 321;

  SUBCASE("independent") {
    SimConfig ind = cfg;
    ind.clusters = 0;
    const auto data = simulate_independent(ind, Rng(ind.seed));
    const auto r01 = pearson(gene_row(data, 0, 0), gene_row(data, 1, 0));
    const auto r25 = pearson(gene_row(data, 2, 0), gene_row(data, 5, 0));
    CHECK(std::fabs(r01) < 0.05);
    CHECK(std::fabs(r25) < 0.05);
  }
  SUBCASE("correlated clusters") {
    const auto data = simulate_correlated(cfg, Rng(cfg.seed));
    std::vector<int> in_cluster1;
    std::vector<int> unclustered;
    for (int g = 0; g < cfg.genes; ++g) {
      if (data.cluster_labels[g] == 1) in_cluster1.push_back(g);
      if (data.cluster_labels[g] == 0) unclustered.push_back(g);
    }
    REQUIRE(in_cluster1.size() == 20);
    REQUIRE(unclustered.size() >= 2);
    std::vector<double> within;
    for (std::size_t i = 0; i + 1 < 6; ++i) {
      within.push_back(std::fabs(pearson(gene_row(data, in_cluster1[i], 0),
                                         gene_row(data, in_cluster1[i + 1], 0))));
    }
    std::vector<double> between;
    for (std::size_t i = 0; i + 1 < std::min<std::size_t>(6, unclustered.size()); ++i) {
      between.push_back(std::fabs(pearson(gene_row(data, unclustered[i], 0),
                                          gene_row(data, unclustered[i + 1], 0))));
    }
    std::sort(within.begin(), within.end());
    std::sort(between.begin(), between.end());
    CHECK(within[within.size() / 2] > between[between.size() / 2]);
  }
}

TEST_CASE("t-test matches a hand computation") {
  SimDataset data;
  data.genes = 1;
  data.studies = 1;
  data.samples = 6;
  data.values = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  const auto pmat = compute_pvalue_matrix(data);
  // controls {1,2,3}, cases {4,5,6}: t = 3 / sqrt(1 * 2/3) = 3.674235
  const double t = 3.0 / std::sqrt(2.0 / 3.0);
  CHECK(pmat.at(0, 0) == doctest::Approx(student_t_two_sided_p(t, 4)).epsilon(1e-12));
}

TEST_CASE("truncate_to_panels applies the pattern") {
  PvalueMatrix pmat;
  pmat.genes = 2;
  pmat.studies = 3;
  pmat.values = {0.5, 0.005, 0.2, 0.9, 0.5, 0.001};
  const std::vector<std::optional<double>> censor{std::nullopt, 0.01, 0.05};
  const auto panels = truncate_to_panels(pmat, censor);
  CHECK(panels.rows() == 2);
  const auto p0 = panels.panel(0);
  CHECK(p0.studies[0].pvalue() == 0.5);
  CHECK(p0.studies[1].significant());
  CHECK(!p0.studies[2].significant());
  const auto p1 = panels.panel(1);
  CHECK(!p1.studies[1].significant());
  CHECK(p1.studies[2].significant());
}

TEST_CASE("mc_null_oracle matches closed-form nulls at unit scale") {
  const auto stouffer = EvidenceTransform::stouffer();
  const auto groups = group_thresholds(std::vector<double>{0.01, 0.05});
  Rng rng(12345);
  const auto oracle = mc_null_oracle(Method::single_impute, stouffer, 2, groups, 1,
                                     20000, rng);
  const auto null_cdf = single_impute_null_cdf(stouffer, 4);
  const double d = null_vs_oracle_distance(null_cdf, oracle, 10);
  CHECK(d < 0.02);
}

TEST_CASE("ks distance bounds bracket the exact statistic") {
  Rng rng(888);
  EmpiricalCdf emp;
  emp.values.resize(20000);
  for (auto& v : emp.values) v = rng.uniform();
  std::sort(emp.values.begin(), emp.values.end());
  const auto identity = [](double t) { return std::clamp(t, 0.0, 1.0); };
  const auto exact = ks_distance_bounds(emp, identity, 1);
  const auto strided = ks_distance_bounds(emp, identity, 50);
  CHECK(exact.lower <= exact.upper);
  CHECK(strided.lower <= exact.upper);
  CHECK(exact.lower <= strided.upper);
  CHECK(strided.upper - strided.lower < 0.01);
  CHECK(exact.upper < 0.02);  // 20000 uniform draws
}

TEST_CASE("uniformity_ks detects a shifted sample") {
  std::vector<double> grid(1000);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = (static_cast<double>(i) + 0.5) / grid.size();
  }
  CHECK(uniformity_ks(grid) < 0.002);
  for (auto& v : grid) v = std::min(1.0, v * 0.5);
  CHECK(uniformity_ks(grid) > 0.3);
}

TEST_CASE("type-I study runs and is calibrated at tiny scale") {
  SimConfig cfg = tiny_config();
  cfg.genes = 400;
  cfg.de_genes = 40;
  const auto rows = run_type1_study(cfg);
  REQUIRE(rows.size() == 10);
  for (const auto& r : rows) {
    CHECK(r.mean >= 0.0);
    CHECK(r.mean <= 1.0);
    // 360 nulls x 2 reps: wide band, just catches gross miscalibration
    CHECK(std::fabs(r.mean - 0.05) < 0.05);
  }
}

TEST_CASE("all five methods coincide when nothing is censored") {
  SimConfig cfg = tiny_config();
  cfg.genes = 150;
  cfg.censor_pattern.assign(cfg.studies, std::nullopt);
  const auto rows = run_type1_study(cfg);
  for (const auto& r : rows) {
    const auto& ref = *std::find_if(rows.begin(), rows.end(), [&](const Type1Row& x) {
      return x.transform == r.transform && x.method == Method::complete;
    });
    CHECK(r.mean == ref.mean);
  }
}

TEST_CASE("power study detects nothing when there is nothing to detect") {
  SimConfig cfg = tiny_config();
  cfg.genes = 300;
  cfg.de_genes = 0;
  const auto rows = run_power_study(cfg);
  for (const auto& r : rows) {
    CHECK(r.detections_mean <= 1.0);  // FDR 5% on pure nulls
    CHECK(r.true_fdr_mean >= 0.0);
  }
}

TEST_CASE("d-robustness reference point is reproduced exactly") {
  SimConfig cfg = tiny_config();
  cfg.genes = 120;
  cfg.de_genes = 30;
  cfg.replicates = 1;
  const std::vector<int> ds{40, 80};
  const auto curves = run_d_robustness(cfg, ds, 80);
  REQUIRE(curves.size() == 2);
  for (const auto& curve : curves) {
    REQUIRE(curve.points.size() == 2);
    CHECK(curve.points[1].d == 80);
    CHECK(curve.points[1].power == curve.reference_power);
  }
}
