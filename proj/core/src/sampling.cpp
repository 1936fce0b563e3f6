#include "truncmeta/sampling.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace truncmeta {

namespace {

void require_symmetric(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    throw std::invalid_argument(std::string(what) + ": matrix is not symmetric (max |A-A^T| = " +
                                std::to_string(asym) + ")");
  }
}

}  // namespace

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& covariance, Rng& rng) {
  require_symmetric(covariance, "sample_mvn");
  const auto dim = mean.size();
  if (covariance.rows() != dim) {
    throw std::invalid_argument("sample_mvn: mean/covariance dimension mismatch");
  }
  if (covariance.isZero(0.0)) return mean;  // degenerate: point mass at the mean

  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) {
    const double jitter = 1e-10 * covariance.trace() / static_cast<double>(dim);
    Eigen::MatrixXd repaired = covariance;
    repaired.diagonal().array() += jitter;
    llt.compute(repaired);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument(
          "sample_mvn: covariance is not positive semi-definite (Cholesky failed after jitter)");
    }
  }
  Eigen::VectorXd z(dim);
  for (Eigen::Index i = 0; i < dim; ++i) z[i] = rng.normal();
  return mean + llt.matrixL() * z;
}

Eigen::MatrixXd sample_inverse_wishart(const Eigen::MatrixXd& psi, int dof, Rng& rng) {
  require_symmetric(psi, "sample_inverse_wishart");
  const int dim = static_cast<int>(psi.rows());
  if (dof <= dim + 1) {
    throw std::invalid_argument("sample_inverse_wishart: dof must exceed dim + 1 (mean undefined)");
  }
  Eigen::LLT<Eigen::MatrixXd> psi_llt(psi);
  if (psi_llt.info() != Eigen::Success) {
    throw std::invalid_argument("sample_inverse_wishart: psi must be positive definite");
  }
  // Wishart(psi^{-1}, dof) via Bartlett: W = L A A^T L^T with L = chol(psi^{-1}).
  const Eigen::MatrixXd psi_inv =
      psi_llt.solve(Eigen::MatrixXd::Identity(dim, dim));
  Eigen::LLT<Eigen::MatrixXd> s_llt(0.5 * (psi_inv + psi_inv.transpose()));
  if (s_llt.info() != Eigen::Success) {
    throw std::invalid_argument("sample_inverse_wishart: psi^{-1} Cholesky failed");
  }
  Eigen::MatrixXd bartlett = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    bartlett(i, i) = std::sqrt(rng.chi_square(dof - i));
    for (int j = 0; j < i; ++j) bartlett(i, j) = rng.normal();
  }
  const Eigen::MatrixXd m = Eigen::MatrixXd(s_llt.matrixL()) * bartlett;
  const Eigen::MatrixXd wishart = m * m.transpose();
  Eigen::LLT<Eigen::MatrixXd> w_llt(wishart);
  if (w_llt.info() != Eigen::Success) {
    throw std::runtime_error("sample_inverse_wishart: Wishart draw is singular");
  }
  Eigen::MatrixXd inv = w_llt.solve(Eigen::MatrixXd::Identity(dim, dim));
  inv = 0.5 * (inv + inv.transpose()).eval();  // exact symmetry
  return inv;
}

Eigen::MatrixXd correlation_from_covariance(const Eigen::MatrixXd& cov) {
  require_symmetric(cov, "correlation_from_covariance");
  const auto dim = cov.rows();
  Eigen::VectorXd sd(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (!(cov(i, i) > 0.0)) {
      throw std::invalid_argument("correlation_from_covariance: nonpositive diagonal entry");
    }
    sd[i] = std::sqrt(cov(i, i));
  }
  Eigen::MatrixXd corr(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) corr(i, j) = cov(i, j) / (sd[i] * sd[j]);
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (std::fabs(corr(i, i) - 1.0) > 1e-12) {
      throw std::runtime_error("correlation_from_covariance: unit diagonal violated");
    }
    corr(i, i) = 1.0;
  }
  return corr;
}

}  // namespace truncmeta
