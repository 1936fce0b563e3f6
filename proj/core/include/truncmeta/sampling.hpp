#pragma once

#include <Eigen/Dense>

#include "truncmeta/rng.hpp"

namespace truncmeta {

/// Draw from MVN(mean, covariance). The covariance must be symmetric positive
/// semi-definite; a failed Cholesky gets one jitter of 1e-10*trace/dim before
/// the draw is rejected.
Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& covariance, Rng& rng);

/// Inverse-Wishart draw with scale psi and dof degrees of freedom,
/// E[X] = psi / (dof - dim - 1). Implemented as the inverse of a
/// Wishart(psi^{-1}, dof) draw via the Bartlett decomposition.
/// Requires psi symmetric positive definite and dof > dim + 1.
Eigen::MatrixXd sample_inverse_wishart(const Eigen::MatrixXd& psi, int dof,
                                       Rng& rng);

/// Covariance -> correlation: divide each entry by the product of row/column
/// standard deviations. Throws unless the result has unit diagonal to 1e-12.
Eigen::MatrixXd correlation_from_covariance(const Eigen::MatrixXd& cov);

}  // namespace truncmeta
