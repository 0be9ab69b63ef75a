#include "cmbo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cmbo/errors.hpp"
#include "cmbo/rng.hpp"

namespace cmbo {

namespace {

Eigen::VectorXd family_values(const Eigen::MatrixXd& grid, bool family_a, double noise,
                              std::uint64_t noise_seed) {
    Rng rng(noise_seed);
    const double sign = family_a ? 1.0 : -1.0;
    Eigen::VectorXd y(grid.rows());
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
        y(i) = sign * synth_objective(grid.row(i).transpose()) + noise * rng.normal();
    }
    return y;
}

void check_spec(const SynthSpec& spec) {
    if (spec.dim < 1 || spec.grid_size < 3 || spec.tasks_per_family < 1 || spec.noise < 0.0 ||
        !(spec.family_b_obs_fraction > 0.0 && spec.family_b_obs_fraction <= 1.0)) {
        throw InvalidArgument("SynthSpec: dim >= 1, grid_size >= 3, tasks >= 1, noise >= 0, "
                              "family_b_obs_fraction in (0, 1]");
    }
}

}  // namespace

double synth_objective(const Eigen::VectorXd& x) {
    const Eigen::Index d = x.size();
    const auto c = [&](Eigen::Index i) { return x(i % d); };
    // A broad landscape a GP can learn from a few dozen samples, plus
    // fine-scale detail that stays unresolved at that budget.
    const double smooth = 0.5 * std::sin(1.2 * M_PI * c(0) + 0.3) * std::cos(0.9 * M_PI * c(1)) +
                          0.4 * std::sin(1.4 * M_PI * c(2) + 1.0) +
                          0.3 * std::cos(1.1 * M_PI * c(3) + 0.5) +
                          0.25 * std::sin(0.8 * M_PI * c(4) + 0.9) + 0.2 * c(0);
    const double fine = std::sin(10.7 * M_PI * c(0) + 2.0) * std::sin(8.9 * M_PI * c(1) + 0.7) +
                        std::cos(12.3 * M_PI * c(2) + 0.5) * std::sin(10.1 * M_PI * c(3) + 1.3) +
                        0.8 * std::sin(9.7 * M_PI * c(4)) * std::cos(11.3 * M_PI * c(0));
    return smooth + 0.6 * fine;
}

Eigen::MatrixXd synth_grid(const SynthSpec& spec) {
    check_spec(spec);
    Rng rng(derive_seed(spec.seed, 0x617D));
    Eigen::MatrixXd grid(spec.grid_size, spec.dim);
    for (Eigen::Index i = 0; i < spec.grid_size; ++i) {
        for (int j = 0; j < spec.dim; ++j) grid(i, j) = rng.uniform();
    }
    return grid;
}

MetaDataset make_synth_dataset(const SynthSpec& spec) {
    check_spec(spec);
    const Eigen::MatrixXd grid = synth_grid(spec);

    MetaDataset out;
    out.search_space_id = "synthetic-two-family";
    out.dim = spec.dim;
    out.scale_offset = Eigen::VectorXd::Zero(spec.dim);
    out.scale_factor = Eigen::VectorXd::Ones(spec.dim);

    // Family "b" histories share a common core of grid rows plus a small
    // per-task remainder, so their coverage differences are uniform in size.
    const auto b_rows = std::max<Eigen::Index>(
        2, static_cast<Eigen::Index>(std::lround(spec.family_b_obs_fraction *
                                                 static_cast<double>(spec.grid_size))));
    const Eigen::Index core_rows = (3 * b_rows) / 4;
    std::vector<Eigen::Index> core;
    std::vector<Eigen::Index> outside;
    if (b_rows < spec.grid_size) {
        Rng core_rng(derive_seed(spec.seed, fnv1a("b/core")));
        core = core_rng.sample_without_replacement(spec.grid_size, core_rows);
        std::sort(core.begin(), core.end());
        std::vector<bool> in_core(static_cast<std::size_t>(spec.grid_size), false);
        for (Eigen::Index i : core) in_core[static_cast<std::size_t>(i)] = true;
        for (Eigen::Index i = 0; i < spec.grid_size; ++i) {
            if (!in_core[static_cast<std::size_t>(i)]) outside.push_back(i);
        }
    }

    for (int family = 0; family < 2; ++family) {
        const bool family_a = family == 0;
        for (int t = 0; t < spec.tasks_per_family; ++t) {
            const std::string id = (family_a ? "a" : "b") + std::to_string(t);
            const Eigen::VectorXd values =
                family_values(grid, family_a, spec.noise, derive_seed(spec.seed, fnv1a(id)));
            TaskData task;
            if (family_a || b_rows >= spec.grid_size) {
                task.inputs = grid;
                task.outputs = values;
            } else {
                std::vector<Eigen::Index> keep = core;
                Rng rng(derive_seed(spec.seed, fnv1a(id + "/rows")));
                const Eigen::Index extra = b_rows - core_rows;
                for (Eigen::Index pick : rng.sample_without_replacement(
                         static_cast<Eigen::Index>(outside.size()), extra)) {
                    keep.push_back(outside[static_cast<std::size_t>(pick)]);
                }
                std::sort(keep.begin(), keep.end());
                task.inputs.resize(b_rows, spec.dim);
                task.outputs.resize(b_rows);
                for (Eigen::Index i = 0; i < b_rows; ++i) {
                    task.inputs.row(i) = grid.row(keep[static_cast<std::size_t>(i)]);
                    task.outputs(i) = values(keep[static_cast<std::size_t>(i)]);
                }
            }
            task.y_min = task.outputs.minCoeff();
            task.y_max = task.outputs.maxCoeff();
            out.tasks.emplace(id, std::move(task));
        }
    }
    return out;
}

TargetTask make_synth_target(const SynthSpec& spec, bool family_a, std::uint64_t target_seed) {
    const Eigen::MatrixXd grid = synth_grid(spec);
    const Eigen::VectorXd values = family_values(
        grid, family_a, spec.noise, derive_seed(spec.seed, derive_seed(target_seed, 0x7A96)));

    TargetTask target;
    target.id = std::string("synth_target_") + (family_a ? "a" : "b") + "_" +
                std::to_string(target_seed);
    target.candidates = grid;
    target.y_min = values.minCoeff();
    target.y_max = values.maxCoeff();
    target.oracle = [values](Eigen::Index i) { return values(i); };
    return target;
}

}  // namespace cmbo
