#include "cmbo/gp.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "cmbo/errors.hpp"
#include "cmbo/linalg.hpp"

namespace cmbo {

namespace {

constexpr double kRowMatchTol = 1e-12;
constexpr double kNoiseFloor = 1e-8;

bool rows_equal(const Eigen::MatrixXd& m, Eigen::Index i, const Eigen::VectorXd& x) {
    return (m.row(i).transpose() - x).cwiseAbs().maxCoeff() <= kRowMatchTol;
}

void check_unique_rows(const Eigen::MatrixXd& m, const char* context) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < m.rows(); ++j) {
            if ((m.row(i) - m.row(j)).cwiseAbs().maxCoeff() <= kRowMatchTol) {
                throw InvalidArgument(std::string(context) + ": duplicate rows " +
                                      std::to_string(i) + " and " + std::to_string(j));
            }
        }
    }
}

}  // namespace

Dataset::Dataset(Eigen::Index dim) : inputs_(0, dim), outputs_(0) {}

Dataset::Dataset(Eigen::MatrixXd inputs, Eigen::VectorXd outputs)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)) {
    if (inputs_.rows() != outputs_.size()) {
        throw DimensionMismatch("Dataset: " + std::to_string(inputs_.rows()) + " input rows vs " +
                                std::to_string(outputs_.size()) + " outputs");
    }
    if (!inputs_.allFinite() || !outputs_.allFinite()) {
        throw InvalidArgument("Dataset: inputs and outputs must be finite");
    }
    check_unique_rows(inputs_, "Dataset");
}

GpModel::GpModel(Eigen::MatrixXd grid, Eigen::VectorXd mean, Eigen::MatrixXd cov,
                 double noise_var)
    : grid_(std::move(grid)), mean_(std::move(mean)), noise_var_(std::max(noise_var, kNoiseFloor)) {
    if (cov.rows() != cov.cols() || cov.rows() != grid_.rows() || mean_.size() != grid_.rows()) {
        throw DimensionMismatch("GpModel: grid/mean/covariance sizes disagree");
    }
    if (!grid_.allFinite()) {
        throw InvalidArgument("GpModel: grid must be finite");
    }
    check_unique_rows(grid_, "GpModel grid");
    cov_ = symmetrized(cov);
    validate_psd(cov_, "GpModel");
}

GpModel GpModel::from_kernel(Eigen::MatrixXd grid, const Kernel& kernel, double noise_var) {
    Eigen::MatrixXd cov = kernel.gram(grid);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(grid.rows());
    return GpModel(std::move(grid), std::move(mean), std::move(cov), noise_var);
}

Eigen::Index GpModel::grid_index_of(const Eigen::VectorXd& x) const {
    if (x.size() != grid_.cols()) {
        throw DimensionMismatch("GpModel: query point dimension does not match grid");
    }
    for (Eigen::Index i = 0; i < grid_.rows(); ++i) {
        if (rows_equal(grid_, i, x)) return i;
    }
    throw RowNotOnGrid("GpModel: point is not a grid row");
}

std::vector<Eigen::Index> GpModel::grid_indices_of(const Eigen::MatrixXd& points) const {
    std::vector<Eigen::Index> out;
    out.reserve(static_cast<std::size_t>(points.rows()));
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        out.push_back(grid_index_of(points.row(i).transpose()));
    }
    return out;
}

GpModel posterior(const GpModel& model, const Dataset& data) {
    if (data.size() == 0) return model;
    const std::vector<Eigen::Index> idx = model.grid_indices_of(data.inputs());
    const Eigen::Index m = data.size();
    const Eigen::Index n = model.size();

    Eigen::MatrixXd k_obs(m, m);      // covariance among observed rows
    Eigen::MatrixXd k_cross(m, n);    // observed rows vs full grid
    Eigen::VectorXd mean_obs(m);
    for (Eigen::Index a = 0; a < m; ++a) {
        mean_obs(a) = model.mean()(idx[static_cast<std::size_t>(a)]);
        k_cross.row(a) = model.cov().row(idx[static_cast<std::size_t>(a)]);
        for (Eigen::Index b = 0; b < m; ++b) {
            k_obs(a, b) = model.cov()(idx[static_cast<std::size_t>(a)],
                                      idx[static_cast<std::size_t>(b)]);
        }
    }
    Eigen::MatrixXd gram = symmetrized(k_obs);
    gram.diagonal().array() += model.noise_var();
    const CholeskyResult chol = cholesky_with_jitter(gram);

    const Eigen::VectorXd alpha = cholesky_solve(chol.lower, data.outputs() - mean_obs);
    const Eigen::MatrixXd w = cholesky_solve(chol.lower, k_cross);

    Eigen::VectorXd post_mean = model.mean() + k_cross.transpose() * alpha;
    Eigen::MatrixXd post_cov = symmetrized(model.cov() - k_cross.transpose() * w);
    return GpModel(model.grid(), std::move(post_mean), std::move(post_cov), model.noise_var());
}

double log_marginal_likelihood(const GpModel& model, const Dataset& data) {
    if (data.size() < 1) {
        throw InsufficientData("log_marginal_likelihood: needs at least one observation");
    }
    const std::vector<Eigen::Index> idx = model.grid_indices_of(data.inputs());
    const Eigen::Index m = data.size();
    Eigen::MatrixXd gram(m, m);
    Eigen::VectorXd mean_obs(m);
    for (Eigen::Index a = 0; a < m; ++a) {
        mean_obs(a) = model.mean()(idx[static_cast<std::size_t>(a)]);
        for (Eigen::Index b = 0; b < m; ++b) {
            gram(a, b) = model.cov()(idx[static_cast<std::size_t>(a)],
                                     idx[static_cast<std::size_t>(b)]);
        }
    }
    gram = symmetrized(gram);
    gram.diagonal().array() += model.noise_var();

    const CholeskyResult chol = cholesky_with_jitter(gram);
    const double logdet = 2.0 * chol.lower.diagonal().array().log().sum();
    const Eigen::VectorXd residual = data.outputs() - mean_obs;
    const Eigen::VectorXd alpha = cholesky_solve(chol.lower, residual);
    const double quad = residual.dot(alpha);
    return -0.5 * (quad + logdet + static_cast<double>(m) * std::log(2.0 * M_PI));
}

std::vector<double> hyperparam_grid() {
    std::vector<double> grid;
    grid.reserve(21);
    for (int k = 0; k < 21; ++k) {
        grid.push_back(std::pow(10.0, -2.0 + 0.15 * k));
    }
    return grid;
}

Kernel fit_hyperparams(const Kernel& kernel_family, const Dataset& data, double noise_var) {
    if (data.size() < 2) {
        throw InsufficientData("fit_hyperparams: needs at least two observations");
    }
    const double noise = std::max(noise_var, kNoiseFloor);
    const Eigen::Index m = data.size();
    const std::vector<double> grid = hyperparam_grid();

    double best_lml = -std::numeric_limits<double>::infinity();
    double best_lengthscale = grid.front();
    double best_variance = grid.front();

    for (double lengthscale : grid) {
        // Gram of the unit-variance kernel; scaling by the candidate variance
        // is elementwise, so it matches evaluating the scaled kernel directly.
        const Eigen::MatrixXd unit_gram =
            kernel_family.with_shared_hyperparams(lengthscale, 1.0).gram(data.inputs());
        for (double variance : grid) {
            Eigen::MatrixXd gram = variance * unit_gram;
            gram.diagonal().array() += noise;
            const CholeskyResult chol = cholesky_with_jitter(gram);
            const double logdet = 2.0 * chol.lower.diagonal().array().log().sum();
            const Eigen::VectorXd alpha = cholesky_solve(chol.lower, data.outputs());
            const double lml = -0.5 * (data.outputs().dot(alpha) + logdet +
                                       static_cast<double>(m) * std::log(2.0 * M_PI));
            if (lml > best_lml) {
                best_lml = lml;
                best_lengthscale = lengthscale;
                best_variance = variance;
            }
        }
    }
    return kernel_family.with_shared_hyperparams(best_lengthscale, best_variance);
}

GaussianDist discretize(const GpModel& model, const std::vector<Eigen::Index>& indices) {
    const Eigen::Index k = static_cast<Eigen::Index>(indices.size());
    for (Eigen::Index i : indices) {
        if (i < 0 || i >= model.size()) {
            throw RowNotOnGrid("discretize: index out of range");
        }
    }
    Eigen::VectorXd mean(k);
    Eigen::MatrixXd cov(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        mean(a) = model.mean()(indices[static_cast<std::size_t>(a)]);
        for (Eigen::Index b = 0; b < k; ++b) {
            cov(a, b) = model.cov()(indices[static_cast<std::size_t>(a)],
                                    indices[static_cast<std::size_t>(b)]);
        }
    }
    return GaussianDist(std::move(mean), symmetrized(cov));
}

GaussianDist discretize(const GpModel& model, const Eigen::MatrixXd& index_points) {
    return discretize(model, model.grid_indices_of(index_points));
}

}  // namespace cmbo
