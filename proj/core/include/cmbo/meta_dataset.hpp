#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cmbo/gp.hpp"

namespace cmbo {

struct TaskData {
    Eigen::MatrixXd inputs;   // rows in [0,1]^d after load-time rescaling
    Eigen::VectorXd outputs;
    double y_min = 0.0;
    double y_max = 0.0;
};

/// A search space: tasks keyed by id, all sharing one input dimension.
/// Inputs are min-max rescaled per dimension across the whole search space at
/// load time; the original-units transform is kept so saves round-trip.
struct MetaDataset {
    std::string search_space_id;
    int dim = 0;
    std::map<std::string, TaskData> tasks;
    Eigen::VectorXd scale_offset;  // original-units minimum per dimension
    Eigen::VectorXd scale_factor;  // original-units range per dimension (0 for constant dims)

    std::vector<std::string> task_ids() const;
};

/// Reads the JSON schema
///   {"search_space": str, "dim": int, "tasks": {id: {"X": [[...]], "y": [...]}}}.
/// Duplicate input rows within a task are dropped (first occurrence wins)
/// so task grids are valid candidate sets.
MetaDataset load_meta_dataset(const std::string& path);
MetaDataset meta_dataset_from_json(const std::string& text);

void save_meta_dataset(const MetaDataset& dataset, const std::string& path);
std::string meta_dataset_to_json(const MetaDataset& dataset);

/// Seeded shuffle of the task ids; ceil(ratio * K) ids go to the train side.
/// Both sides are returned sorted.
std::pair<std::vector<std::string>, std::vector<std::string>> split_tasks(
    const MetaDataset& dataset, double ratio, std::uint64_t seed);

/// Uniform without-replacement subsample of a task's observations. Counts at
/// or above the task size return everything.
Dataset subsample_meta_observations(const TaskData& task, Eigen::Index count,
                                    std::uint64_t seed);

/// Normalized simple regret: (y_max - best_y) / (y_max - y_min), clamped to
/// [0, 1]; zero when the task has no value range.
double nsr(double best_y, double y_min, double y_max);

}  // namespace cmbo
