#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cmbo/gaussian.hpp"

namespace cmbo {

enum class DistanceKind { Jeffreys, Wasserstein2 };

std::string to_string(DistanceKind kind);
DistanceKind distance_kind_from_string(const std::string& name);

/// KL(P || Q) between Gaussians in closed form:
///   1/2 (tr(S1^-1 S0) + dm^T S1^-1 dm - d + logdet S1 - logdet S0).
/// Near-singular covariances go through the jitter policy before inversion,
/// so the value is finite (possibly large). Tiny negative results from
/// roundoff are clamped to zero.
double kl_divergence(const GaussianDist& p, const GaussianDist& q);

/// Symmetrized KL: KL(P||Q) + KL(Q||P).
double jeffreys(const GaussianDist& p, const GaussianDist& q);

/// 2-Wasserstein distance between Gaussians:
///   W2^2 = ||m0 - m1||^2 + tr(S0 + S1 - 2 sqrt(sqrt(S1) S0 sqrt(S1))).
/// Squared distances in [-1e-8, 0) are clamped to 0.
double wasserstein2(const GaussianDist& p, const GaussianDist& q);

double distance(DistanceKind kind, const GaussianDist& p, const GaussianDist& q);

struct BarycenterResult {
    GaussianDist barycenter;
    int iterations = 0;   // fixed-point updates applied
    double residual = 0.0;
};

/// Wasserstein barycenter of Gaussians for simplex weights. The mean is the
/// weighted mean; the covariance solves
///   sum_i w_i sqrt(sqrt(S) S_i sqrt(S)) = S
/// by fixed-point iteration from S_0 = sum_i w_i S_i, stopping when the
/// Frobenius residual of the defining equation drops below tol.
BarycenterResult wasserstein_barycenter(const std::vector<GaussianDist>& members,
                                        const Eigen::VectorXd& weights, double tol = 1e-7,
                                        int max_iter = 200);

}  // namespace cmbo
