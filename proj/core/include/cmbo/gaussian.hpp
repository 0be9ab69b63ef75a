#pragma once

#include <Eigen/Dense>

namespace cmbo {

/// Finite-dimensional Gaussian: a mean vector and a symmetric PSD covariance.
/// The covariance is symmetrized as (A + A^T)/2 on construction and then
/// validated: smallest eigenvalue >= -1e-8 * largest eigenvalue, and the mean
/// length must equal the covariance dimension.
class GaussianDist {
public:
    GaussianDist(Eigen::VectorXd mean, Eigen::MatrixXd cov);

    Eigen::Index dim() const { return mean_.size(); }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& cov() const { return cov_; }

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
};

/// Validates symmetry-after-symmetrization PSD-ness; throws NotPositiveDefinite.
/// Shared by GaussianDist and GpModel construction.
void validate_psd(const Eigen::MatrixXd& symmetric_cov, const char* context);

}  // namespace cmbo
