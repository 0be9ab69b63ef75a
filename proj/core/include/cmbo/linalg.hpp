#pragma once

#include <Eigen/Dense>

namespace cmbo {

struct CholeskyResult {
    Eigen::MatrixXd lower;  // L such that L * L^T = A + jitter * I
    double jitter = 0.0;    // 0 when the plain factorization succeeded
};

/// Cholesky factorization with a geometric jitter escalation: the plain
/// factorization is attempted first, then A + jitter*I with jitter running
/// from base_jitter up to 1e-4 in x10 steps. Throws NotPositiveDefinite once
/// the ceiling is reached.
CholeskyResult cholesky_with_jitter(const Eigen::MatrixXd& a, double base_jitter = 1e-10);

/// log det of a symmetric positive definite matrix, 2 * sum(log(L_ii)).
double logdet_psd(const Eigen::MatrixXd& a);

/// Symmetric PSD square root via eigendecomposition; negative eigenvalues
/// from roundoff are clamped to zero.
Eigen::MatrixXd sqrtm_psd(const Eigen::MatrixXd& a);

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a) {
    return 0.5 * (a + a.transpose());
}

bool is_symmetric(const Eigen::MatrixXd& a, double tol = 1e-9);

/// Solves (L L^T) x = b given the lower Cholesky factor.
Eigen::MatrixXd cholesky_solve(const Eigen::MatrixXd& lower, const Eigen::MatrixXd& b);

}  // namespace cmbo
