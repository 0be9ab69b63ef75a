#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cmbo/acquisition.hpp"
#include "cmbo/distances.hpp"
#include "cmbo/gp.hpp"
#include "cmbo/prototypes.hpp"
#include "cmbo/weights.hpp"

namespace cmbo {

/// One historical task: its stored observations. The posterior is fitted by
/// the run itself so that the model grid covers the target's candidate set.
struct MetaTask {
    std::string id;
    Eigen::MatrixXd inputs;   // m x d, unit hypercube
    Eigen::VectorXd outputs;  // m
};

/// The task being optimized: a finite candidate grid plus an oracle giving the
/// observation at a candidate row. y_min/y_max are the task's value range,
/// used for regret reporting only.
struct TargetTask {
    std::string id;
    Eigen::MatrixXd candidates;
    std::function<double(Eigen::Index)> oracle;
    double y_min = 0.0;
    double y_max = 1.0;
};

enum class Method { Cmbo, RandomSearch, VanillaGp, GlobalCen, IndiWeightJef };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

struct RunConfig {
    int num_clusters = 2;
    DistanceKind cluster_distance = DistanceKind::Wasserstein2;
    DistanceKind weight_distance = DistanceKind::Wasserstein2;  // stage-3 comparisons
    PrototypeKind prototype = PrototypeKind::GeometricCenter;
    AcquisitionKind acquisition = AcquisitionKind::GpUcb;
    double ucb_beta = 3.0;
    int num_queries = 50;  // T
    int num_initial = 5;   // N
    int clustering_grid_size = 100;
    int comparison_grid_size = 300;
    int kmeans_max_iter = 10;
    double noise_var = 1e-4;
    /// Interpolation factor applied to the softmax weights; 1.0 assigns them
    /// directly, smaller values blend with the previous weights.
    double weight_ema = 1.0;
    std::uint64_t seed = 0;
    std::string method_tag;  // derived from the method when empty
};

struct TraceRow {
    int tau = 0;                 // 0 for initial design rows
    Eigen::Index x_index = 0;    // row of the target candidate grid
    double y = 0.0;              // raw observed value
    double best_y = 0.0;         // raw best-so-far
    Eigen::VectorXd weights;     // empty for methods without prototype weights
    Eigen::VectorXd distances;   // empty until the first weight update
};

struct RunTrace {
    std::string method;
    std::uint64_t seed = 0;
    std::string grid_id;
    double y_min = 0.0;
    double y_max = 1.0;
    std::vector<TraceRow> rows;
    /// Stage-1 bookkeeping (prototype-based methods): which cluster each meta
    /// task landed in, in input order. Empty for baselines without clustering.
    std::vector<int> meta_cluster_assignments;

    double best_y() const;
    Eigen::Index best_x_index() const;  // final answer: argmax-y observation
};

/// Eq.-style prior synthesis: mean = sum_i w_i mu_i, covariance =
/// sum_i w_i^2 k_i, evaluated at eval_points. The squared weights keep the
/// combination a valid GP covariance.
GpModel synthesize_prior(const std::vector<Prototype>& prototypes, const WeightState& weights,
                         const Eigen::MatrixXd& eval_points, double noise_var);

/// The full three-stage loop: fit meta posteriors, cluster them, build
/// per-cluster prototypes, then run T queries with the adaptive prior and
/// distance-based weight updates.
RunTrace run_cmbo(const std::vector<MetaTask>& meta_tasks, const TargetTask& target,
                  const RunConfig& config);

/// Non-clustered baselines sharing the same trace format. RandomSearch and
/// VanillaGp ignore the meta tasks.
RunTrace run_baseline(Method method, const std::vector<MetaTask>& meta_tasks,
                      const TargetTask& target, const RunConfig& config);

/// Per-task fitting used in stage 1: standardize outputs, fit the product
/// Matern(3/2) x Matern(1/2) kernel by grid search, condition on the task
/// data. The model grid is the union of the task inputs and extra_points.
std::shared_ptr<const GpModel> fit_meta_posterior(const MetaTask& task,
                                                  const Eigen::MatrixXd& extra_points,
                                                  double noise_var);

}  // namespace cmbo
