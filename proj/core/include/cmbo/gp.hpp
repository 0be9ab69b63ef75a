#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cmbo/gaussian.hpp"
#include "cmbo/kernels.hpp"

namespace cmbo {

/// Observed input/output pairs. Rows must be unique (within 1e-12) and the
/// outputs finite.
class Dataset {
public:
    explicit Dataset(Eigen::Index dim = 0);
    Dataset(Eigen::MatrixXd inputs, Eigen::VectorXd outputs);

    Eigen::Index size() const { return inputs_.rows(); }
    Eigen::Index dim() const { return inputs_.cols(); }
    const Eigen::MatrixXd& inputs() const { return inputs_; }
    const Eigen::VectorXd& outputs() const { return outputs_; }

private:
    Eigen::MatrixXd inputs_;
    Eigen::VectorXd outputs_;
};

/// A GP restricted to a finite grid of candidate inputs: prior (or posterior)
/// mean values and covariance at all grid pairs, plus the observation noise
/// variance (floored at 1e-8). Grid rows must be unique within 1e-12 and the
/// covariance passes the same PSD check as GaussianDist.
class GpModel {
public:
    GpModel(Eigen::MatrixXd grid, Eigen::VectorXd mean, Eigen::MatrixXd cov, double noise_var);

    /// Zero-mean prior with covariance materialized from a kernel.
    static GpModel from_kernel(Eigen::MatrixXd grid, const Kernel& kernel, double noise_var);

    Eigen::Index size() const { return grid_.rows(); }
    Eigen::Index dim() const { return grid_.cols(); }
    const Eigen::MatrixXd& grid() const { return grid_; }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& cov() const { return cov_; }
    double noise_var() const { return noise_var_; }

    /// Index of a grid row matching x within 1e-12; throws RowNotOnGrid.
    Eigen::Index grid_index_of(const Eigen::VectorXd& x) const;
    std::vector<Eigen::Index> grid_indices_of(const Eigen::MatrixXd& points) const;

private:
    Eigen::MatrixXd grid_;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
    double noise_var_ = 1e-8;
};

/// Exact GP conditioning on the model grid: returns a new model over the same
/// grid whose mean/covariance are the posterior given the observations. All
/// data rows must lie on the grid. An empty dataset returns the prior.
GpModel posterior(const GpModel& model, const Dataset& data);

/// Gaussian log-density of the outputs under N(mean(X), cov(X, X) + noise*I).
double log_marginal_likelihood(const GpModel& model, const Dataset& data);

/// Deterministic grid search over a shared lengthscale and total signal
/// variance, both on 21-point log grids spanning [1e-2, 1e1]. Ties break
/// toward the smaller lengthscale, then the smaller variance. Needs >= 2
/// observations.
Kernel fit_hyperparams(const Kernel& kernel_family, const Dataset& data, double noise_var);

/// Restriction of the model to a subset of grid rows as a GaussianDist.
GaussianDist discretize(const GpModel& model, const Eigen::MatrixXd& index_points);
GaussianDist discretize(const GpModel& model, const std::vector<Eigen::Index>& indices);

/// Lengthscale/variance grid used by fit_hyperparams.
std::vector<double> hyperparam_grid();

}  // namespace cmbo
