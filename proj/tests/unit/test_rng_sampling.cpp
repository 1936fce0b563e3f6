#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "truncmeta/rng.hpp"
#include "truncmeta/sampling.hpp"
#include "truncmeta/special.hpp"

using namespace truncmeta;

TEST_CASE("rng determinism and stream splitting") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());

  // split is a pure function of (parent seed, stream), untouched by draws.
  Rng parent(7);
  Rng child_before = parent.split(3);
  parent.next_u64();
  parent.next_u64();
  Rng child_after = parent.split(3);
  for (int i = 0; i < 100; ++i) CHECK(child_before.next_u64() == child_after.next_u64());

  // distinct streams diverge
  Rng c1 = Rng(7).split(1);
  Rng c2 = Rng(7).split(2);
  int same = 0;
  for (int i = 0; i < 64; ++i) same += (c1.next_u64() == c2.next_u64());
  CHECK(same == 0);
}

TEST_CASE("uniform draws live strictly inside (0,1)") {
  Rng rng(1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal draws match the standard normal") {
  Rng rng(11);
  const int n = 100000;
  std::vector<double> xs(n);
  double mean = 0.0;
  for (auto& x : xs) {
    x = rng.normal();
    mean += x;
  }
  mean /= n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= n - 1;
  CHECK(mean == doctest::Approx(0.0).scale(1.0).epsilon(0.02));
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
  std::sort(xs.begin(), xs.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = std_normal_cdf(xs[i]);
    ks = std::max(ks, std::fabs(f - (i + 1.0) / n));
    ks = std::max(ks, std::fabs(f - static_cast<double>(i) / n));
  }
  CHECK(ks < 0.01);
}

TEST_CASE("gamma and chi-square draw moments") {
  Rng rng(5);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.chi_square(6);
  CHECK(sum / n == doctest::Approx(6.0).epsilon(0.01));
  CHECK_THROWS_AS(rng.gamma(0.5), std::domain_error);
}

TEST_CASE("sample_mvn basics") {
  Rng rng(23);
  SUBCASE("identity covariance gives independent standard normals") {
    const Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
    const Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(3, 3);
    double m = 0.0;
    double v = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const auto x = sample_mvn(mean, cov, rng);
      for (int j = 0; j < 3; ++j) {
        m += x[j];
        v += x[j] * x[j];
      }
    }
    CHECK(m / (3 * n) == doctest::Approx(0.0).scale(1.0).epsilon(0.02));
    CHECK(v / (3 * n) == doctest::Approx(1.0).epsilon(0.02));
  }
  SUBCASE("correlation 0.5 recovered at 1e5 draws") {
    Eigen::MatrixXd cov(2, 2);
    cov << 1.0, 0.5, 0.5, 1.0;
    const Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const auto x = sample_mvn(mean, cov, rng);
      sxy += x[0] * x[1];
      sxx += x[0] * x[0];
      syy += x[1] * x[1];
    }
    CHECK(sxy / std::sqrt(sxx * syy) == doctest::Approx(0.5).epsilon(0.02));
  }
  SUBCASE("zero covariance returns the mean exactly") {
    Eigen::VectorXd mean(2);
    mean << 3.25, -1.5;
    const auto x = sample_mvn(mean, Eigen::MatrixXd::Zero(2, 2), rng);
    CHECK(x[0] == 3.25);
    CHECK(x[1] == -1.5);
  }
  SUBCASE("rank-deficient PSD covariance is repaired by jitter") {
    const Eigen::MatrixXd cov = Eigen::MatrixXd::Ones(3, 3);
    const auto x = sample_mvn(Eigen::VectorXd::Zero(3), cov, rng);
    CHECK(std::fabs(x[0] - x[1]) < 1e-3);
    CHECK(std::fabs(x[0] - x[2]) < 1e-3);
  }
  SUBCASE("asymmetric and indefinite matrices rejected") {
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 0.9, 0.1, 1.0;
    CHECK_THROWS_AS(sample_mvn(Eigen::VectorXd::Zero(2), bad, rng), std::invalid_argument);
    Eigen::MatrixXd indef(2, 2);
    indef << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(sample_mvn(Eigen::VectorXd::Zero(2), indef, rng), std::invalid_argument);
  }
}

TEST_CASE("inverse-Wishart sampler") {
  SUBCASE("dim=1 mean matches psi/(dof-dim-1)") {
    Rng rng(31);
    Eigen::MatrixXd psi(1, 1);
    psi << 2.0;
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += sample_inverse_wishart(psi, 6, rng)(0, 0);
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
  }
  SUBCASE("draws are exactly symmetric and positive definite at dim=20") {
    Rng rng(37);
    const int dim = 20;
    Eigen::MatrixXd psi = Eigen::MatrixXd::Constant(dim, dim, 0.5);
    psi.diagonal().array() += 0.5;
    for (int rep = 0; rep < 5; ++rep) {
      const Eigen::MatrixXd draw = sample_inverse_wishart(psi, 60, rng);
      CHECK((draw - draw.transpose()).cwiseAbs().maxCoeff() == 0.0);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(draw);
      CHECK(eig.eigenvalues().minCoeff() > 0.0);
    }
  }
  SUBCASE("dof at or below dim+1 rejected") {
    Rng rng(3);
    Eigen::MatrixXd psi = Eigen::MatrixXd::Identity(3, 3);
    CHECK_THROWS_AS(sample_inverse_wishart(psi, 4, rng), std::invalid_argument);
  }
}

TEST_CASE("correlation conversion") {
  Eigen::MatrixXd cov(2, 2);
  cov << 4.0, 1.2, 1.2, 9.0;
  const auto corr = correlation_from_covariance(cov);
  CHECK(corr(0, 0) == 1.0);
  CHECK(corr(1, 1) == 1.0);
  CHECK(corr(0, 1) == doctest::Approx(1.2 / 6.0).epsilon(1e-12));
  Eigen::MatrixXd bad(2, 2);
  bad << 0.0, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(correlation_from_covariance(bad), std::invalid_argument);
}
