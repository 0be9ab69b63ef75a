#pragma once

#include <Eigen/Dense>

namespace cmbo {

/// Prototype weights at a given query index. Weights always form a simplex;
/// at query_index 0 they are exactly uniform.
struct WeightState {
    Eigen::VectorXd weights;
    Eigen::VectorXd last_distances;  // empty until the first update
    int query_index = 0;

    static WeightState uniform(Eigen::Index num_components);
};

/// Softmax-style update from prototype distances:
///   w_i = exp(1 - d_i / d_max) / sum_j exp(1 - d_j / d_max),
/// with all-zero distances mapping to the uniform vector. Distances must be
/// finite and nonnegative. The query index advances by one.
WeightState update_weights(const Eigen::VectorXd& distances, const WeightState& prev);

}  // namespace cmbo
