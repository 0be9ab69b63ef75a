#include "cmbo/weights.hpp"

#include <cmath>

#include "cmbo/errors.hpp"

namespace cmbo {

WeightState WeightState::uniform(Eigen::Index num_components) {
    if (num_components < 1) {
        throw InvalidArgument("WeightState: needs at least one component");
    }
    WeightState state;
    state.weights =
        Eigen::VectorXd::Constant(num_components, 1.0 / static_cast<double>(num_components));
    state.query_index = 0;
    return state;
}

WeightState update_weights(const Eigen::VectorXd& distances, const WeightState& prev) {
    const Eigen::Index c = prev.weights.size();
    if (distances.size() != c) {
        throw DimensionMismatch("update_weights: distance count does not match weight count");
    }
    if (!distances.allFinite() || (distances.array() < 0.0).any()) {
        throw NonFiniteDistance("update_weights: distances must be finite and nonnegative");
    }
    WeightState next;
    next.last_distances = distances;
    next.query_index = prev.query_index + 1;
    const double d_max = distances.maxCoeff();
    if (d_max == 0.0) {
        next.weights = Eigen::VectorXd::Constant(c, 1.0 / static_cast<double>(c));
        return next;
    }
    const Eigen::ArrayXd scores = (1.0 - distances.array() / d_max).exp();
    next.weights = (scores / scores.sum()).matrix();
    return next;
}

}  // namespace cmbo
