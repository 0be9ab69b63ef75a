#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "cmbo/meta_dataset.hpp"
#include "cmbo/run.hpp"

namespace cmbo {

/// Parameters of the synthetic two-family benchmark: tasks in family "a"
/// observe a fixed smooth objective f plus Gaussian noise, tasks in family
/// "b" observe -f plus noise, all on one shared candidate grid. Family "a"
/// tasks store the full grid history; family "b" tasks store seeded partial
/// histories, mimicking uneven task coverage.
struct SynthSpec {
    int dim = 5;
    int grid_size = 480;
    int tasks_per_family = 5;
    double noise = 0.01;
    double family_b_obs_fraction = 0.6;
    std::uint64_t seed = 7;
};

/// The family objective: a smooth multimodal surface on [0,1]^d.
double synth_objective(const Eigen::VectorXd& x);

/// Shared candidate grid: seeded uniform draws in the unit hypercube.
Eigen::MatrixXd synth_grid(const SynthSpec& spec);

MetaDataset make_synth_dataset(const SynthSpec& spec);

/// A fresh task from one family, usable as a BO target. The candidate grid is
/// the dataset's shared grid; the oracle looks values up by row.
TargetTask make_synth_target(const SynthSpec& spec, bool family_a, std::uint64_t target_seed);

}  // namespace cmbo
