#pragma once

#include <vector>

#include <Eigen/Dense>

namespace cmbo {

/// Stationary covariance functions over [0,1]^d inputs with per-dimension
/// lengthscales, plus two combinators: an elementwise product of kernels and
/// an overall variance scaling. Leaf kernels:
///   Matern12: s2 * exp(-r)
///   Matern32: s2 * (1 + sqrt(3) r) * exp(-sqrt(3) r)
///   Rbf:      s2 * exp(-r^2 / 2)
/// where r = sqrt(sum_i ((x_i - x2_i) / l_i)^2).
class Kernel {
public:
    enum class Family { Matern12, Matern32, Rbf, Product, Scaled };

    static Kernel matern12(Eigen::VectorXd lengthscales, double signal_variance = 1.0);
    static Kernel matern32(Eigen::VectorXd lengthscales, double signal_variance = 1.0);
    static Kernel rbf(Eigen::VectorXd lengthscales, double signal_variance = 1.0);
    static Kernel product(std::vector<Kernel> members);
    static Kernel scaled(double signal_variance, Kernel inner);

    double operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& x2) const;

    Eigen::MatrixXd gram(const Eigen::MatrixXd& points) const;
    Eigen::MatrixXd cross(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const;

    Family family() const { return family_; }
    Eigen::Index input_dim() const { return input_dim_; }

    /// Copy of this kernel with every leaf lengthscale replaced by the shared
    /// value and the total signal variance set to signal_variance. Used by the
    /// hyperparameter grid search.
    Kernel with_shared_hyperparams(double lengthscale, double signal_variance) const;

private:
    Kernel() = default;
    Kernel unit_variance_copy(double lengthscale) const;

    Family family_ = Family::Matern32;
    Eigen::VectorXd lengthscales_;  // leaves only
    double variance_ = 1.0;         // leaves and Scaled nodes
    std::vector<Kernel> children_;  // Product (>= 1), Scaled (exactly 1)
    Eigen::Index input_dim_ = 0;
};

}  // namespace cmbo
