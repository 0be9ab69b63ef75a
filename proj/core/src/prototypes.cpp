#include "cmbo/prototypes.hpp"

#include <utility>

#include "cmbo/distances.hpp"
#include "cmbo/errors.hpp"
#include "cmbo/linalg.hpp"

namespace cmbo {

namespace {
constexpr double kRowMatchTol = 1e-12;
}

std::string to_string(PrototypeKind kind) {
    return kind == PrototypeKind::GeometricCenter ? "geometric" : "barycenter";
}

PrototypeKind prototype_kind_from_string(const std::string& name) {
    if (name == "geometric" || name == "geo" || name == "center") {
        return PrototypeKind::GeometricCenter;
    }
    if (name == "barycenter" || name == "bary") return PrototypeKind::WassersteinBarycenter;
    throw InvalidArgument("unknown prototype kind: " + name);
}

Prototype Prototype::geometric_center(std::vector<std::shared_ptr<const GpModel>> members) {
    if (members.empty()) {
        throw EmptyCluster("geometric_center: cluster has no members");
    }
    for (const auto& m : members) {
        if (!m) throw InvalidArgument("geometric_center: null member");
    }
    Prototype p;
    p.kind_ = PrototypeKind::GeometricCenter;
    p.members_ = std::move(members);
    return p;
}

Prototype Prototype::barycenter(const std::vector<std::shared_ptr<const GpModel>>& members,
                                const Eigen::MatrixXd& grid, double tol, int max_iter) {
    if (members.empty()) {
        throw EmptyCluster("barycenter: cluster has no members");
    }
    std::vector<GaussianDist> dists;
    dists.reserve(members.size());
    for (const auto& m : members) {
        if (!m) throw InvalidArgument("barycenter: null member");
        dists.push_back(cmbo::discretize(*m, grid));
    }
    const auto n = static_cast<Eigen::Index>(members.size());
    const Eigen::VectorXd weights = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    BarycenterResult solved = wasserstein_barycenter(dists, weights, tol, max_iter);

    Prototype p;
    p.kind_ = PrototypeKind::WassersteinBarycenter;
    p.members_ = members;
    p.pinned_ = std::make_shared<const GaussianDist>(std::move(solved.barycenter));
    p.pinned_grid_points_ = grid;
    return p;
}

Eigen::VectorXd Prototype::mean_at(const Eigen::MatrixXd& points) const {
    if (kind_ == PrototypeKind::GeometricCenter) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(points.rows());
        for (const auto& m : members_) {
            const std::vector<Eigen::Index> idx = m->grid_indices_of(points);
            for (Eigen::Index i = 0; i < points.rows(); ++i) {
                out(i) += m->mean()(idx[static_cast<std::size_t>(i)]);
            }
        }
        return out / static_cast<double>(members_.size());
    }
    return discretize(points).mean();
}

Eigen::MatrixXd Prototype::cov_at(const Eigen::MatrixXd& points) const {
    if (kind_ == PrototypeKind::GeometricCenter) {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(points.rows(), points.rows());
        for (const auto& m : members_) {
            const std::vector<Eigen::Index> idx = m->grid_indices_of(points);
            for (Eigen::Index a = 0; a < points.rows(); ++a) {
                for (Eigen::Index b = 0; b < points.rows(); ++b) {
                    out(a, b) += m->cov()(idx[static_cast<std::size_t>(a)],
                                          idx[static_cast<std::size_t>(b)]);
                }
            }
        }
        return out / static_cast<double>(members_.size());
    }
    return discretize(points).cov();
}

GaussianDist Prototype::discretize(const Eigen::MatrixXd& points) const {
    if (kind_ == PrototypeKind::GeometricCenter) {
        return GaussianDist(mean_at(points), cov_at(points));
    }
    // Map the requested points onto the pinned grid.
    std::vector<Eigen::Index> idx;
    idx.reserve(static_cast<std::size_t>(points.rows()));
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        Eigen::Index found = -1;
        for (Eigen::Index j = 0; j < pinned_grid_points_.rows(); ++j) {
            if ((pinned_grid_points_.row(j) - points.row(i)).cwiseAbs().maxCoeff() <=
                kRowMatchTol) {
                found = j;
                break;
            }
        }
        if (found < 0) {
            throw RowNotOnGrid("Prototype: point is not on the pinned barycenter grid");
        }
        idx.push_back(found);
    }
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::VectorXd mean(k);
    Eigen::MatrixXd cov(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        mean(a) = pinned_->mean()(idx[static_cast<std::size_t>(a)]);
        for (Eigen::Index b = 0; b < k; ++b) {
            cov(a, b) = pinned_->cov()(idx[static_cast<std::size_t>(a)],
                                       idx[static_cast<std::size_t>(b)]);
        }
    }
    return GaussianDist(std::move(mean), symmetrized(cov));
}

const GaussianDist& Prototype::pinned() const {
    if (kind_ != PrototypeKind::WassersteinBarycenter || !pinned_) {
        throw InvalidArgument("Prototype: no pinned distribution for a geometric center");
    }
    return *pinned_;
}

const Eigen::MatrixXd& Prototype::pinned_grid() const {
    if (kind_ != PrototypeKind::WassersteinBarycenter) {
        throw InvalidArgument("Prototype: no pinned grid for a geometric center");
    }
    return pinned_grid_points_;
}

}  // namespace cmbo
