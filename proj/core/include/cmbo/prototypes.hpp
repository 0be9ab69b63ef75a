#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cmbo/gaussian.hpp"
#include "cmbo/gp.hpp"

namespace cmbo {

enum class PrototypeKind { GeometricCenter, WassersteinBarycenter };

std::string to_string(PrototypeKind kind);
PrototypeKind prototype_kind_from_string(const std::string& name);

/// Cluster surrogate. A geometric center keeps references to the member
/// posteriors and evaluates the average of their means/covariances at any
/// points lying on the member grids. A Wasserstein barycenter is pinned to the
/// grid it was solved on and can only be evaluated there.
class Prototype {
public:
    static Prototype geometric_center(std::vector<std::shared_ptr<const GpModel>> members);
    static Prototype barycenter(const std::vector<std::shared_ptr<const GpModel>>& members,
                                const Eigen::MatrixXd& grid, double tol = 1e-7,
                                int max_iter = 200);

    PrototypeKind kind() const { return kind_; }
    Eigen::Index num_members() const { return static_cast<Eigen::Index>(members_.size()); }

    Eigen::VectorXd mean_at(const Eigen::MatrixXd& points) const;
    Eigen::MatrixXd cov_at(const Eigen::MatrixXd& points) const;
    GaussianDist discretize(const Eigen::MatrixXd& points) const;

    /// Pinned representation (barycenter only).
    const GaussianDist& pinned() const;
    const Eigen::MatrixXd& pinned_grid() const;

private:
    Prototype() = default;

    PrototypeKind kind_ = PrototypeKind::GeometricCenter;
    std::vector<std::shared_ptr<const GpModel>> members_;
    std::shared_ptr<const GaussianDist> pinned_;
    Eigen::MatrixXd pinned_grid_points_;
};

}  // namespace cmbo
