#include "cmbo/linalg.hpp"

#include <cmath>
#include <string>

#include "cmbo/errors.hpp"

namespace cmbo {

namespace {
constexpr double kMaxJitter = 1e-4;
}

bool is_symmetric(const Eigen::MatrixXd& a, double tol) {
    if (a.rows() != a.cols()) return false;
    return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol;
}

CholeskyResult cholesky_with_jitter(const Eigen::MatrixXd& a, double base_jitter) {
    if (a.rows() != a.cols()) {
        throw DimensionMismatch("cholesky_with_jitter: matrix must be square");
    }
    if (a.size() > 0 && !is_symmetric(a, 1e-9)) {
        throw DimensionMismatch("cholesky_with_jitter: matrix must be symmetric within 1e-9");
    }
    if (base_jitter <= 0.0) base_jitter = 1e-10;

    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) {
        return {llt.matrixL(), 0.0};
    }
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    for (double jitter = base_jitter; jitter <= kMaxJitter * (1.0 + 1e-12); jitter *= 10.0) {
        llt.compute(a + jitter * identity);
        if (llt.info() == Eigen::Success) {
            return {llt.matrixL(), jitter};
        }
    }
    throw NotPositiveDefinite("cholesky_with_jitter: factorization failed at jitter " +
                              std::to_string(kMaxJitter));
}

double logdet_psd(const Eigen::MatrixXd& a) {
    const CholeskyResult chol = cholesky_with_jitter(a);
    return 2.0 * chol.lower.diagonal().array().log().sum();
}

Eigen::MatrixXd sqrtm_psd(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) {
        throw DimensionMismatch("sqrtm_psd: matrix must be square");
    }
    if (a.size() > 0 && !is_symmetric(a, 1e-9)) {
        throw DimensionMismatch("sqrtm_psd: matrix must be symmetric within 1e-9");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetrized(a));
    if (solver.info() != Eigen::Success) {
        throw EigenFailure("sqrtm_psd: eigensolver did not converge");
    }
    const Eigen::VectorXd roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return symmetrized(solver.eigenvectors() * roots.asDiagonal() *
                       solver.eigenvectors().transpose());
}

Eigen::MatrixXd cholesky_solve(const Eigen::MatrixXd& lower, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd x = lower.triangularView<Eigen::Lower>().solve(b);
    lower.triangularView<Eigen::Lower>().transpose().solveInPlace(x);
    return x;
}

}  // namespace cmbo
