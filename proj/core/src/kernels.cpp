#include "cmbo/kernels.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "cmbo/errors.hpp"

namespace cmbo {

namespace {

Eigen::VectorXd checked_lengthscales(Eigen::VectorXd lengthscales) {
    if (lengthscales.size() == 0) {
        throw InvalidArgument("Kernel: lengthscale vector must not be empty");
    }
    if ((lengthscales.array() <= 0.0).any()) {
        throw InvalidArgument("Kernel: lengthscales must be strictly positive");
    }
    return lengthscales;
}

double checked_variance(double signal_variance) {
    if (!(signal_variance > 0.0)) {
        throw InvalidArgument("Kernel: signal variance must be strictly positive");
    }
    return signal_variance;
}

}  // namespace

Kernel Kernel::matern12(Eigen::VectorXd lengthscales, double signal_variance) {
    Kernel k;
    k.family_ = Family::Matern12;
    k.lengthscales_ = checked_lengthscales(std::move(lengthscales));
    k.variance_ = checked_variance(signal_variance);
    k.input_dim_ = k.lengthscales_.size();
    return k;
}

Kernel Kernel::matern32(Eigen::VectorXd lengthscales, double signal_variance) {
    Kernel k = matern12(std::move(lengthscales), signal_variance);
    k.family_ = Family::Matern32;
    return k;
}

Kernel Kernel::rbf(Eigen::VectorXd lengthscales, double signal_variance) {
    Kernel k = matern12(std::move(lengthscales), signal_variance);
    k.family_ = Family::Rbf;
    return k;
}

Kernel Kernel::product(std::vector<Kernel> members) {
    if (members.empty()) {
        throw InvalidArgument("Kernel::product: needs at least one member");
    }
    Kernel k;
    k.family_ = Family::Product;
    k.input_dim_ = members.front().input_dim();
    for (const Kernel& m : members) {
        if (m.input_dim() != k.input_dim_) {
            throw DimensionMismatch("Kernel::product: members disagree on input dimension");
        }
    }
    k.children_ = std::move(members);
    return k;
}

Kernel Kernel::scaled(double signal_variance, Kernel inner) {
    Kernel k;
    k.family_ = Family::Scaled;
    k.variance_ = checked_variance(signal_variance);
    k.input_dim_ = inner.input_dim();
    k.children_.push_back(std::move(inner));
    return k;
}

double Kernel::operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& x2) const {
    switch (family_) {
        case Family::Product: {
            double value = 1.0;
            for (const Kernel& child : children_) value *= child(x, x2);
            return value;
        }
        case Family::Scaled:
            return variance_ * children_.front()(x, x2);
        default:
            break;
    }
    if (x.size() != lengthscales_.size() || x2.size() != lengthscales_.size()) {
        throw DimensionMismatch("Kernel: input dimension " + std::to_string(x.size()) + "/" +
                                std::to_string(x2.size()) + " does not match lengthscale count " +
                                std::to_string(lengthscales_.size()));
    }
    const double r2 = ((x - x2).array() / lengthscales_.array()).square().sum();
    switch (family_) {
        case Family::Matern12:
            return variance_ * std::exp(-std::sqrt(r2));
        case Family::Matern32: {
            const double t = std::sqrt(3.0 * r2);
            return variance_ * (1.0 + t) * std::exp(-t);
        }
        case Family::Rbf:
            return variance_ * std::exp(-0.5 * r2);
        default:
            throw InvalidArgument("Kernel: unknown family");
    }
}

Eigen::MatrixXd Kernel::gram(const Eigen::MatrixXd& points) const {
    const Eigen::Index n = points.rows();
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = (*this)(points.row(i).transpose(), points.row(j).transpose());
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

Eigen::MatrixXd Kernel::cross(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const {
    Eigen::MatrixXd out(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.rows(); ++j) {
            out(i, j) = (*this)(a.row(i).transpose(), b.row(j).transpose());
        }
    }
    return out;
}

Kernel Kernel::unit_variance_copy(double lengthscale) const {
    Kernel k = *this;
    k.variance_ = 1.0;
    if (k.family_ == Family::Product || k.family_ == Family::Scaled) {
        for (Kernel& child : k.children_) child = child.unit_variance_copy(lengthscale);
    } else {
        k.lengthscales_.setConstant(k.lengthscales_.size(), lengthscale);
    }
    return k;
}

Kernel Kernel::with_shared_hyperparams(double lengthscale, double signal_variance) const {
    if (!(lengthscale > 0.0)) {
        throw InvalidArgument("Kernel: shared lengthscale must be strictly positive");
    }
    Kernel unit = unit_variance_copy(lengthscale);
    if (unit.family_ == Family::Scaled) {
        unit.variance_ = checked_variance(signal_variance);
        return unit;
    }
    if (unit.family_ == Family::Product) {
        return scaled(signal_variance, std::move(unit));
    }
    unit.variance_ = checked_variance(signal_variance);
    return unit;
}

}  // namespace cmbo
