#include "cmbo/distances.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "cmbo/errors.hpp"
#include "cmbo/linalg.hpp"

namespace cmbo {

std::string to_string(DistanceKind kind) {
    return kind == DistanceKind::Jeffreys ? "jeffreys" : "wasserstein2";
}

DistanceKind distance_kind_from_string(const std::string& name) {
    if (name == "jeffreys" || name == "jef") return DistanceKind::Jeffreys;
    if (name == "wasserstein2" || name == "wasserstein" || name == "wss") {
        return DistanceKind::Wasserstein2;
    }
    throw InvalidArgument("unknown distance kind: " + name);
}

double kl_divergence(const GaussianDist& p, const GaussianDist& q) {
    if (p.dim() != q.dim()) {
        throw DimensionMismatch("kl_divergence: dimensions differ");
    }
    const auto d = static_cast<double>(p.dim());
    const CholeskyResult chol_q = cholesky_with_jitter(q.cov());
    const double logdet_q = 2.0 * chol_q.lower.diagonal().array().log().sum();
    const double logdet_p = logdet_psd(p.cov());

    const double trace_term = cholesky_solve(chol_q.lower, p.cov()).trace();
    const Eigen::VectorXd dm = q.mean() - p.mean();
    const Eigen::VectorXd z = chol_q.lower.triangularView<Eigen::Lower>().solve(dm);
    const double quad = z.squaredNorm();

    const double kl = 0.5 * (trace_term + quad - d + logdet_q - logdet_p);
    return kl < 0.0 ? 0.0 : kl;
}

double jeffreys(const GaussianDist& p, const GaussianDist& q) {
    return kl_divergence(p, q) + kl_divergence(q, p);
}

double wasserstein2(const GaussianDist& p, const GaussianDist& q) {
    if (p.dim() != q.dim()) {
        throw DimensionMismatch("wasserstein2: dimensions differ");
    }
    const Eigen::MatrixXd root_q = sqrtm_psd(q.cov());
    const Eigen::MatrixXd inner = symmetrized(root_q * p.cov() * root_q);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(inner, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw EigenFailure("wasserstein2: eigensolver did not converge");
    }
    // tr sqrtm(inner) with the same negative-eigenvalue clamping as sqrtm_psd.
    const double cross_trace = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    const double w2sq = (p.mean() - q.mean()).squaredNorm() + p.cov().trace() +
                        q.cov().trace() - 2.0 * cross_trace;
    if (w2sq < -1e-8) {
        throw EigenFailure("wasserstein2: squared distance " + std::to_string(w2sq) +
                           " below clamping tolerance");
    }
    return std::sqrt(std::max(w2sq, 0.0));
}

double distance(DistanceKind kind, const GaussianDist& p, const GaussianDist& q) {
    return kind == DistanceKind::Jeffreys ? jeffreys(p, q) : wasserstein2(p, q);
}

BarycenterResult wasserstein_barycenter(const std::vector<GaussianDist>& members,
                                        const Eigen::VectorXd& weights, double tol,
                                        int max_iter) {
    if (members.empty()) {
        throw InvalidArgument("wasserstein_barycenter: needs at least one member");
    }
    if (weights.size() != static_cast<Eigen::Index>(members.size())) {
        throw DimensionMismatch("wasserstein_barycenter: weight count does not match members");
    }
    if ((weights.array() < 0.0).any() || std::abs(weights.sum() - 1.0) > 1e-9) {
        throw InvalidArgument("wasserstein_barycenter: weights must form a simplex");
    }
    const Eigen::Index d = members.front().dim();
    for (const GaussianDist& m : members) {
        if (m.dim() != d) {
            throw DimensionMismatch("wasserstein_barycenter: member dimensions differ");
        }
        try {
            cholesky_with_jitter(m.cov());
        } catch (const NotPositiveDefinite&) {
            throw DegenerateMember("wasserstein_barycenter: member covariance is not PD");
        }
    }

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < members.size(); ++i) {
        mean += weights(static_cast<Eigen::Index>(i)) * members[i].mean();
        sigma += weights(static_cast<Eigen::Index>(i)) * members[i].cov();
    }

    double residual = std::numeric_limits<double>::infinity();
    for (int it = 0; it <= max_iter; ++it) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sigma);
        if (solver.info() != Eigen::Success) {
            throw EigenFailure("wasserstein_barycenter: eigensolver did not converge");
        }
        const Eigen::VectorXd eigs = solver.eigenvalues().cwiseMax(0.0);
        const double floor = std::max(eigs.maxCoeff(), 0.0) * 1e-16 + 1e-300;
        const Eigen::VectorXd roots = eigs.cwiseMax(floor).cwiseSqrt();
        const Eigen::MatrixXd v = solver.eigenvectors();
        const Eigen::MatrixXd root = v * roots.asDiagonal() * v.transpose();
        const Eigen::MatrixXd inv_root = v * roots.cwiseInverse().asDiagonal() * v.transpose();

        Eigen::MatrixXd target = Eigen::MatrixXd::Zero(d, d);
        for (std::size_t i = 0; i < members.size(); ++i) {
            target += weights(static_cast<Eigen::Index>(i)) *
                      sqrtm_psd(symmetrized(root * members[i].cov() * root));
        }
        residual = (target - sigma).norm();
        if (residual <= tol) {
            return {GaussianDist(mean, sigma), it, residual};
        }
        sigma = symmetrized(inv_root * target * target * inv_root);
    }
    throw NoConvergence("wasserstein_barycenter: no convergence after " +
                            std::to_string(max_iter) + " iterations (residual " +
                            std::to_string(residual) + ")",
                        residual);
}

}  // namespace cmbo
