#include "cmbo/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <utility>

#include "cmbo/clustering.hpp"
#include "cmbo/errors.hpp"
#include "cmbo/linalg.hpp"
#include "cmbo/rng.hpp"

namespace cmbo {

namespace {

constexpr std::uint64_t kGridStream = 0xA1;
constexpr std::uint64_t kKmeansStream = 0xB2;
constexpr std::uint64_t kInitStream = 0xC3;

struct Standardized {
    Eigen::VectorXd values;
    double mean = 0.0;
    double stddev = 1.0;
};

Standardized standardize(const Eigen::VectorXd& y) {
    if (y.size() == 0) return {Eigen::VectorXd(0), 0.0, 1.0};
    const double mu = y.mean();
    double sd = std::sqrt((y.array() - mu).square().sum() / static_cast<double>(y.size()));
    if (!(sd > 1e-12)) sd = 1.0;
    return {((y.array() - mu) / sd).matrix(), mu, sd};
}

Eigen::MatrixXd rows_at(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = m.row(idx[i]);
    }
    return out;
}

Eigen::MatrixXd union_rows(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    std::vector<Eigen::Index> extra;
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
        bool found = false;
        for (Eigen::Index j = 0; j < a.rows() && !found; ++j) {
            found = (a.row(j) - b.row(i)).cwiseAbs().maxCoeff() <= 1e-12;
        }
        for (Eigen::Index k : extra) {
            if (found) break;
            found = (b.row(k) - b.row(i)).cwiseAbs().maxCoeff() <= 1e-12;
        }
        if (!found) extra.push_back(i);
    }
    Eigen::MatrixXd out(a.rows() + static_cast<Eigen::Index>(extra.size()), a.cols());
    out.topRows(a.rows()) = a;
    for (std::size_t i = 0; i < extra.size(); ++i) {
        out.row(a.rows() + static_cast<Eigen::Index>(i)) = b.row(extra[i]);
    }
    return out;
}

std::vector<Eigen::Index> pick_subgrid(Eigen::Index total, Eigen::Index wanted, Rng& rng) {
    if (wanted >= total) {
        std::vector<Eigen::Index> all(static_cast<std::size_t>(total));
        std::iota(all.begin(), all.end(), Eigen::Index{0});
        return all;
    }
    std::vector<Eigen::Index> picked = rng.sample_without_replacement(total, wanted);
    std::sort(picked.begin(), picked.end());
    return picked;
}

std::string grid_hash(const Eigen::MatrixXd& m) {
    std::uint64_t h = 1469598103934665603ULL;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            const auto* bytes = reinterpret_cast<const unsigned char*>(&v);
            for (int k = 0; k < 8; ++k) {
                h ^= bytes[k];
                h *= 1099511628211ULL;
            }
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

double call_oracle(const TargetTask& target, Eigen::Index index) {
    if (!target.oracle) {
        throw InvalidArgument("run: target task has no oracle");
    }
    double y = std::numeric_limits<double>::quiet_NaN();
    try {
        y = target.oracle(index);
    } catch (const std::exception& e) {
        throw OracleFailure(std::string("run: oracle threw: ") + e.what());
    }
    if (!std::isfinite(y)) {
        throw OracleFailure("run: oracle returned a non-finite value");
    }
    return y;
}

void check_target(const TargetTask& target) {
    if (target.candidates.rows() < 1) {
        throw InvalidArgument("run: target candidate grid is empty");
    }
    if (!target.candidates.allFinite()) {
        throw InvalidArgument("run: target candidates must be finite");
    }
}

std::string default_tag(Method method, const RunConfig& cfg) {
    const auto abbrev = [](DistanceKind k) {
        return k == DistanceKind::Jeffreys ? std::string("jef") : std::string("wss");
    };
    switch (method) {
        case Method::Cmbo:
            return "cmbo_" + abbrev(cfg.cluster_distance) + "_" + abbrev(cfg.weight_distance) +
                   "_" + to_string(cfg.prototype);
        case Method::RandomSearch:
            return "random";
        case Method::VanillaGp:
            return "vanilla_gp";
        case Method::GlobalCen:
            return "global_cen";
        case Method::IndiWeightJef:
            return "indi_weight_jef";
    }
    return "unknown";
}

Kernel meta_kernel_template(Eigen::Index dim) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(dim);
    return Kernel::product({Kernel::matern32(ones), Kernel::matern12(ones)});
}

/// Shared loop for the prototype-weighted methods (cmbo, GlobalCen,
/// IndiWeight-Jef); the latter two are fixed configurations of the former.
RunTrace run_prototype_loop(const std::vector<MetaTask>& meta_tasks, const TargetTask& target,
                            const RunConfig& cfg, Method method) {
    check_target(target);
    const auto num_tasks = static_cast<int>(meta_tasks.size());
    if (num_tasks == 0) {
        throw InvalidArgument("run: prototype-based methods need at least one meta task");
    }
    int num_clusters = cfg.num_clusters;
    DistanceKind weight_distance = cfg.weight_distance;
    PrototypeKind prototype_kind = cfg.prototype;
    if (method == Method::GlobalCen) {
        num_clusters = 1;
        prototype_kind = PrototypeKind::GeometricCenter;
    } else if (method == Method::IndiWeightJef) {
        num_clusters = num_tasks;
        weight_distance = DistanceKind::Jeffreys;
        prototype_kind = PrototypeKind::GeometricCenter;
    }
    if (num_clusters < 1 || num_clusters > num_tasks) {
        throw InvalidC("run: cluster count " + std::to_string(num_clusters) + " outside [1, " +
                       std::to_string(num_tasks) + "]");
    }

    const Eigen::MatrixXd& candidates = target.candidates;
    const Eigen::Index total = candidates.rows();
    Rng grid_rng(derive_seed(cfg.seed, kGridStream));
    const std::vector<Eigen::Index> cmp_idx =
        pick_subgrid(total, cfg.comparison_grid_size, grid_rng);
    std::vector<Eigen::Index> clus_idx = pick_subgrid(total, cfg.clustering_grid_size, grid_rng);

    // A pinned barycenter cannot be re-evaluated off its grid, so the run is
    // restricted to one shared grid: clustering, comparisons and candidates
    // all use the comparison grid.
    std::vector<Eigen::Index> eval_idx;
    std::vector<Eigen::Index> cmp_pos;  // positions of the comparison grid within eval
    if (prototype_kind == PrototypeKind::WassersteinBarycenter) {
        clus_idx = cmp_idx;
        eval_idx = cmp_idx;
        cmp_pos.resize(cmp_idx.size());
        std::iota(cmp_pos.begin(), cmp_pos.end(), Eigen::Index{0});
    } else {
        eval_idx.resize(static_cast<std::size_t>(total));
        std::iota(eval_idx.begin(), eval_idx.end(), Eigen::Index{0});
        cmp_pos = cmp_idx;
    }
    const Eigen::MatrixXd eval_points = rows_at(candidates, eval_idx);
    const Eigen::MatrixXd cmp_points = rows_at(candidates, cmp_idx);
    const Eigen::MatrixXd clus_points = rows_at(candidates, clus_idx);

    // Stage 1: per-task posteriors and clustering.
    std::vector<std::shared_ptr<const GpModel>> models;
    models.reserve(meta_tasks.size());
    std::vector<GaussianDist> discretized;
    discretized.reserve(meta_tasks.size());
    for (const MetaTask& task : meta_tasks) {
        models.push_back(fit_meta_posterior(task, candidates, cfg.noise_var));
        discretized.push_back(discretize(*models.back(), clus_points));
    }
    std::vector<int> assignment(meta_tasks.size(), 0);
    if (method == Method::IndiWeightJef) {
        std::iota(assignment.begin(), assignment.end(), 0);
    } else {
        const Clustering clustering =
            kmeans_gd(discretized, num_clusters, cfg.cluster_distance,
                      derive_seed(cfg.seed, kKmeansStream), cfg.kmeans_max_iter);
        assignment = clustering.assignments;
    }

    // Stage 2: one prototype per cluster, pinned where the loop needs it.
    std::vector<Prototype> prototypes;
    std::vector<GaussianDist> proto_cmp;
    std::vector<Eigen::VectorXd> proto_mean;
    std::vector<Eigen::MatrixXd> proto_cov;
    for (int c = 0; c < num_clusters; ++c) {
        std::vector<std::shared_ptr<const GpModel>> members;
        for (std::size_t i = 0; i < models.size(); ++i) {
            if (assignment[i] == c) members.push_back(models[i]);
        }
        Prototype proto = prototype_kind == PrototypeKind::WassersteinBarycenter
                              ? Prototype::barycenter(members, cmp_points)
                              : Prototype::geometric_center(std::move(members));
        proto_cmp.push_back(proto.discretize(cmp_points));
        proto_mean.push_back(proto.mean_at(eval_points));
        proto_cov.push_back(proto.cov_at(eval_points));
        prototypes.push_back(std::move(proto));
    }

    // Stage 3: adaptive prior loop.
    RunTrace trace;
    trace.method = cfg.method_tag.empty() ? default_tag(method, cfg) : cfg.method_tag;
    trace.seed = cfg.seed;
    trace.grid_id = target.id.empty() ? grid_hash(candidates) : target.id;
    trace.y_min = target.y_min;
    trace.y_max = target.y_max;

    trace.meta_cluster_assignments = assignment;

    WeightState weights = WeightState::uniform(num_clusters);
    std::vector<Eigen::Index> queried;
    std::vector<double> raw;
    double best = -std::numeric_limits<double>::infinity();
    const auto observe = [&](Eigen::Index pos, int tau, const Eigen::VectorXd& w,
                             const Eigen::VectorXd& dists) {
        const double y = call_oracle(target, eval_idx[static_cast<std::size_t>(pos)]);
        queried.push_back(pos);
        raw.push_back(y);
        best = std::max(best, y);
        trace.rows.push_back({tau, eval_idx[static_cast<std::size_t>(pos)], y, best, w, dists});
    };

    const auto eval_count = static_cast<Eigen::Index>(eval_idx.size());
    Rng init_rng(derive_seed(cfg.seed, kInitStream));
    for (Eigen::Index pos : init_rng.sample_without_replacement(
             eval_count, std::min<Eigen::Index>(cfg.num_initial, eval_count))) {
        observe(pos, 0, weights.weights, Eigen::VectorXd());
    }

    for (int tau = 1; tau <= cfg.num_queries; ++tau) {
        if (static_cast<Eigen::Index>(queried.size()) >= eval_count) break;

        Eigen::VectorXd prior_mean = Eigen::VectorXd::Zero(eval_count);
        Eigen::MatrixXd prior_cov = Eigen::MatrixXd::Zero(eval_count, eval_count);
        for (int c = 0; c < num_clusters; ++c) {
            const double w = weights.weights(c);
            prior_mean += w * proto_mean[static_cast<std::size_t>(c)];
            prior_cov += w * w * proto_cov[static_cast<std::size_t>(c)];
        }
        const GpModel prior(eval_points, std::move(prior_mean), std::move(prior_cov),
                            cfg.noise_var);

        const Standardized std_y = standardize(
            Eigen::Map<const Eigen::VectorXd>(raw.data(), static_cast<Eigen::Index>(raw.size())));
        const Dataset observations(rows_at(eval_points, queried), std_y.values);
        const GpModel post = posterior(prior, observations);
        const double best_std = raw.empty() ? 0.0 : std_y.values.maxCoeff();

        AcquisitionParams params;
        params.ucb_beta = cfg.ucb_beta;
        params.excluded = queried;
        const AcquisitionResult chosen =
            acquisition(cfg.acquisition, post.mean(), post.cov().diagonal(), best_std, params);

        const double y = call_oracle(target, eval_idx[static_cast<std::size_t>(chosen.best_index)]);
        queried.push_back(chosen.best_index);
        raw.push_back(y);
        best = std::max(best, y);

        // Distances use the posterior that proposed this query (the new
        // observation enters the model at the next iteration).
        const GaussianDist current = discretize(post, cmp_pos);
        Eigen::VectorXd dists(num_clusters);
        for (int c = 0; c < num_clusters; ++c) {
            dists(c) = distance(weight_distance, proto_cmp[static_cast<std::size_t>(c)], current);
        }
        WeightState next = update_weights(dists, weights);
        if (cfg.weight_ema < 1.0) {
            next.weights =
                cfg.weight_ema * next.weights + (1.0 - cfg.weight_ema) * weights.weights;
        }
        weights = next;

        trace.rows.push_back({tau, eval_idx[static_cast<std::size_t>(chosen.best_index)], y, best,
                              weights.weights, dists});
    }
    return trace;
}

RunTrace run_random_search(const TargetTask& target, const RunConfig& cfg) {
    check_target(target);
    RunTrace trace;
    trace.method = cfg.method_tag.empty() ? default_tag(Method::RandomSearch, cfg) : cfg.method_tag;
    trace.seed = cfg.seed;
    trace.grid_id = target.id.empty() ? grid_hash(target.candidates) : target.id;
    trace.y_min = target.y_min;
    trace.y_max = target.y_max;

    const Eigen::Index total = target.candidates.rows();
    const Eigen::Index n_init = std::min<Eigen::Index>(cfg.num_initial, total);
    const Eigen::Index draws = std::min<Eigen::Index>(n_init + cfg.num_queries, total);
    Rng rng(derive_seed(cfg.seed, kInitStream));
    double best = -std::numeric_limits<double>::infinity();
    int count = 0;
    for (Eigen::Index index : rng.sample_without_replacement(total, draws)) {
        const double y = call_oracle(target, index);
        best = std::max(best, y);
        const int tau = count < n_init ? 0 : count - static_cast<int>(n_init) + 1;
        trace.rows.push_back({tau, index, y, best, Eigen::VectorXd(), Eigen::VectorXd()});
        ++count;
    }
    return trace;
}

RunTrace run_vanilla_gp(const TargetTask& target, const RunConfig& cfg) {
    check_target(target);
    RunTrace trace;
    trace.method = cfg.method_tag.empty() ? default_tag(Method::VanillaGp, cfg) : cfg.method_tag;
    trace.seed = cfg.seed;
    trace.grid_id = target.id.empty() ? grid_hash(target.candidates) : target.id;
    trace.y_min = target.y_min;
    trace.y_max = target.y_max;

    const Eigen::MatrixXd& candidates = target.candidates;
    const Eigen::Index total = candidates.rows();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(candidates.cols());

    std::vector<Eigen::Index> queried;
    std::vector<double> raw;
    double best = -std::numeric_limits<double>::infinity();
    Rng init_rng(derive_seed(cfg.seed, kInitStream));
    for (Eigen::Index pos : init_rng.sample_without_replacement(
             total, std::min<Eigen::Index>(cfg.num_initial, total))) {
        const double y = call_oracle(target, pos);
        queried.push_back(pos);
        raw.push_back(y);
        best = std::max(best, y);
        trace.rows.push_back({0, pos, y, best, Eigen::VectorXd(), Eigen::VectorXd()});
    }

    for (int tau = 1; tau <= cfg.num_queries; ++tau) {
        if (static_cast<Eigen::Index>(queried.size()) >= total) break;
        const Standardized std_y = standardize(
            Eigen::Map<const Eigen::VectorXd>(raw.data(), static_cast<Eigen::Index>(raw.size())));
        const Dataset observations(rows_at(candidates, queried), std_y.values);
        const Kernel kernel =
            observations.size() >= 2
                ? fit_hyperparams(Kernel::matern32(ones), observations, cfg.noise_var)
                : Kernel::matern32(ones);
        const GpModel prior = GpModel::from_kernel(candidates, kernel, cfg.noise_var);
        const GpModel post = posterior(prior, observations);
        const double best_std = raw.empty() ? 0.0 : std_y.values.maxCoeff();

        AcquisitionParams params;
        params.ucb_beta = cfg.ucb_beta;
        params.excluded = queried;
        const AcquisitionResult chosen =
            acquisition(cfg.acquisition, post.mean(), post.cov().diagonal(), best_std, params);
        const double y = call_oracle(target, chosen.best_index);
        queried.push_back(chosen.best_index);
        raw.push_back(y);
        best = std::max(best, y);
        trace.rows.push_back(
            {tau, chosen.best_index, y, best, Eigen::VectorXd(), Eigen::VectorXd()});
    }
    return trace;
}

}  // namespace

std::string to_string(Method method) {
    switch (method) {
        case Method::Cmbo:
            return "cmbo";
        case Method::RandomSearch:
            return "random";
        case Method::VanillaGp:
            return "vanilla";
        case Method::GlobalCen:
            return "global-cen";
        case Method::IndiWeightJef:
            return "indi-weight-jef";
    }
    return "cmbo";
}

Method method_from_string(const std::string& name) {
    if (name == "cmbo") return Method::Cmbo;
    if (name == "random" || name == "random-search") return Method::RandomSearch;
    if (name == "vanilla" || name == "vanilla-gp" || name == "gp") return Method::VanillaGp;
    if (name == "global-cen" || name == "global_cen") return Method::GlobalCen;
    if (name == "indi-weight-jef" || name == "indi_weight_jef") return Method::IndiWeightJef;
    throw InvalidArgument("unknown method: " + name);
}

double RunTrace::best_y() const {
    if (rows.empty()) throw InvalidArgument("RunTrace: empty trace");
    return rows.back().best_y;
}

Eigen::Index RunTrace::best_x_index() const {
    if (rows.empty()) throw InvalidArgument("RunTrace: empty trace");
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].y > rows[best].y) best = i;
    }
    return rows[best].x_index;
}

std::shared_ptr<const GpModel> fit_meta_posterior(const MetaTask& task,
                                                  const Eigen::MatrixXd& extra_points,
                                                  double noise_var) {
    if (task.inputs.rows() < 1) {
        throw InsufficientData("fit_meta_posterior: task has no observations");
    }
    if (extra_points.cols() != task.inputs.cols()) {
        throw DimensionMismatch("fit_meta_posterior: input dimensions differ");
    }
    const Standardized std_y = standardize(task.outputs);
    const Dataset data(task.inputs, std_y.values);
    const Kernel tmpl = meta_kernel_template(task.inputs.cols());
    // Single-observation tasks cannot be fitted; fall back to unit hyperparameters.
    const Kernel kernel = data.size() >= 2 ? fit_hyperparams(tmpl, data, noise_var)
                                           : tmpl.with_shared_hyperparams(1.0, 1.0);
    const Eigen::MatrixXd grid = union_rows(task.inputs, extra_points);
    const GpModel prior = GpModel::from_kernel(grid, kernel, noise_var);
    return std::make_shared<const GpModel>(posterior(prior, data));
}

GpModel synthesize_prior(const std::vector<Prototype>& prototypes, const WeightState& weights,
                         const Eigen::MatrixXd& eval_points, double noise_var) {
    if (prototypes.empty()) {
        throw InvalidArgument("synthesize_prior: no prototypes");
    }
    if (weights.weights.size() != static_cast<Eigen::Index>(prototypes.size())) {
        throw DimensionMismatch("synthesize_prior: weight count does not match prototypes");
    }
    if ((weights.weights.array() < 0.0).any() ||
        std::abs(weights.weights.sum() - 1.0) > 1e-9) {
        throw InvalidArgument("synthesize_prior: weights must form a simplex");
    }
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(eval_points.rows());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(eval_points.rows(), eval_points.rows());
    for (std::size_t i = 0; i < prototypes.size(); ++i) {
        const double w = weights.weights(static_cast<Eigen::Index>(i));
        mean += w * prototypes[i].mean_at(eval_points);
        cov += w * w * prototypes[i].cov_at(eval_points);
    }
    return GpModel(eval_points, std::move(mean), std::move(cov), noise_var);
}

RunTrace run_cmbo(const std::vector<MetaTask>& meta_tasks, const TargetTask& target,
                  const RunConfig& config) {
    return run_prototype_loop(meta_tasks, target, config, Method::Cmbo);
}

RunTrace run_baseline(Method method, const std::vector<MetaTask>& meta_tasks,
                      const TargetTask& target, const RunConfig& config) {
    switch (method) {
        case Method::Cmbo:
            return run_cmbo(meta_tasks, target, config);
        case Method::RandomSearch:
            return run_random_search(target, config);
        case Method::VanillaGp:
            return run_vanilla_gp(target, config);
        case Method::GlobalCen:
        case Method::IndiWeightJef:
            return run_prototype_loop(meta_tasks, target, config, method);
    }
    throw InvalidArgument("run_baseline: unknown method");
}

}  // namespace cmbo
