#include "cmbo/gaussian.hpp"

#include <string>

#include "cmbo/errors.hpp"
#include "cmbo/linalg.hpp"

namespace cmbo {

void validate_psd(const Eigen::MatrixXd& symmetric_cov, const char* context) {
    if (symmetric_cov.size() == 0) return;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric_cov,
                                                          Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw EigenFailure(std::string(context) + ": eigensolver did not converge");
    }
    const double lo = solver.eigenvalues().minCoeff();
    const double hi = solver.eigenvalues().maxCoeff();
    if (lo < -1e-8 * std::max(hi, 0.0)) {
        throw NotPositiveDefinite(std::string(context) +
                                  ": covariance is not positive semi-definite (min eig " +
                                  std::to_string(lo) + ", max eig " + std::to_string(hi) + ")");
    }
}

GaussianDist::GaussianDist(Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : mean_(std::move(mean)) {
    if (cov.rows() != cov.cols()) {
        throw DimensionMismatch("GaussianDist: covariance must be square");
    }
    if (mean_.size() != cov.rows()) {
        throw DimensionMismatch("GaussianDist: mean length " + std::to_string(mean_.size()) +
                                " does not match covariance dimension " +
                                std::to_string(cov.rows()));
    }
    cov_ = symmetrized(cov);
    validate_psd(cov_, "GaussianDist");
}

}  // namespace cmbo
