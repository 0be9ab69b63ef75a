// Command-line frontend: dataset synthesis, stage-1 clustering, experiment
// matrices, cluster-count sweeps and report aggregation.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cmbo/clustering.hpp"
#include "cmbo/errors.hpp"
#include "cmbo/experiment.hpp"
#include "cmbo/meta_dataset.hpp"
#include "cmbo/rng.hpp"
#include "cmbo/run.hpp"
#include "cmbo/synth.hpp"

namespace {

std::vector<std::string> split_csv_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    if (out.empty()) throw cmbo::InvalidArgument("empty list: '" + text + "'");
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw cmbo::DataError("cannot write '" + path + "'");
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

struct RunOptions {
    std::string data_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::string methods = "cmbo,vanilla,random";
    std::string afs = "ucb";
    std::string cluster_distance = "wasserstein";
    std::string cmp_distance = "wasserstein";
    std::string prototype = "geometric";
    cmbo::ExperimentConfig config;
};

void add_experiment_options(CLI::App* cmd, RunOptions& opt, bool with_methods) {
    cmd->add_option("--data", opt.data_path, "meta-dataset JSON file")->required();
    cmd->add_option("--T", opt.config.num_queries, "queries per BO run");
    cmd->add_option("--n-init", opt.config.num_initial, "random initial observations per run");
    cmd->add_option("--splits", opt.config.n_split_seeds, "number of train/test splits");
    cmd->add_option("--runs-per-target", opt.config.runs_per_target, "repeats per target task");
    cmd->add_option("--split-ratio", opt.config.split_ratio, "train fraction of the task split");
    cmd->add_option("--meta-obs", opt.config.meta_obs_per_task,
                    "observations subsampled per meta task");
    cmd->add_option("--clusters", opt.config.num_clusters, "cluster count C");
    cmd->add_option("--cluster-distance", opt.cluster_distance,
                    "clustering metric: wasserstein|jeffreys");
    cmd->add_option("--cmp-distance", opt.cmp_distance,
                    "weight-update metric: wasserstein|jeffreys");
    cmd->add_option("--prototype", opt.prototype, "cluster prototype: geometric|barycenter");
    cmd->add_option("--clustering-grid", opt.config.clustering_grid_size,
                    "index grid size for clustering");
    cmd->add_option("--comparison-grid", opt.config.comparison_grid_size,
                    "index grid size for weight distances");
    cmd->add_option("--max-candidates", opt.config.max_candidates,
                    "cap on the target candidate grid");
    cmd->add_option("--noise", opt.config.noise_var, "observation noise variance");
    cmd->add_option("--ema", opt.config.weight_ema,
                    "weight interpolation factor, 1 = direct assignment");
    cmd->add_option("--ucb-beta", opt.config.ucb_beta, "GP-UCB exploration coefficient");
    cmd->add_option("--threshold", opt.config.regret_threshold, "solvable-regret threshold");
    cmd->add_option("--workers", opt.config.workers,
                    "parallel cells (env CMBO_WORKERS overrides)");
    if (with_methods) {
        cmd->add_option("--methods,--method", opt.methods,
                        "comma list: cmbo,vanilla,random,global-cen,indi-weight-jef");
        cmd->add_option("--afs,--af", opt.afs, "comma list: ucb,ei,pi");
    }
}

cmbo::ExperimentConfig finalize_config(RunOptions& opt) {
    cmbo::ExperimentConfig cfg = opt.config;
    cfg.cluster_distance = cmbo::distance_kind_from_string(opt.cluster_distance);
    cfg.weight_distance = cmbo::distance_kind_from_string(opt.cmp_distance);
    cfg.prototype = cmbo::prototype_kind_from_string(opt.prototype);
    cfg.master_seed = opt.seed;
    cfg.methods.clear();
    for (const std::string& m : split_csv_list(opt.methods)) {
        cfg.methods.push_back(cmbo::method_from_string(m));
    }
    cfg.afs.clear();
    for (const std::string& a : split_csv_list(opt.afs)) {
        cfg.afs.push_back(cmbo::acquisition_kind_from_string(a));
    }
    if (const char* env = std::getenv("CMBO_WORKERS")) {
        try {
            cfg.workers = std::stoi(env);
        } catch (const std::exception&) {
            throw cmbo::InvalidArgument("CMBO_WORKERS is not an integer");
        }
    }
    cfg.validate();
    return cfg;
}

int run_synth(const cmbo::SynthSpec& spec, const std::string& out_path) {
    cmbo::save_meta_dataset(cmbo::make_synth_dataset(spec), out_path);
    std::cout << "wrote " << out_path << '\n';
    return 0;
}

struct ClusterOptions {
    std::string data_path;
    std::string out_path;
    int clusters = 2;
    std::string distance = "wasserstein";
    std::uint64_t seed = 0;
    int grid_size = 100;
    int meta_obs = 50;
    double noise = 1e-4;
    bool sweep = false;
    int c_min = 2;
    int c_max = 6;
};

int run_cluster(const ClusterOptions& opt) {
    const cmbo::MetaDataset ds = cmbo::load_meta_dataset(opt.data_path);
    const cmbo::DistanceKind kind = cmbo::distance_kind_from_string(opt.distance);
    const std::vector<std::string> ids = ds.task_ids();

    // Shared index grid drawn from the pooled task inputs.
    std::vector<Eigen::MatrixXd> task_inputs;
    Eigen::Index pool_rows = 0;
    for (const std::string& id : ids) {
        task_inputs.push_back(ds.tasks.at(id).inputs);
        pool_rows += task_inputs.back().rows();
    }
    Eigen::MatrixXd pool(pool_rows, ds.dim);
    Eigen::Index at = 0;
    for (const Eigen::MatrixXd& x : task_inputs) {
        pool.middleRows(at, x.rows()) = x;
        at += x.rows();
    }
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < pool.rows(); ++i) {
        bool dup = false;
        for (Eigen::Index j : keep) {
            if ((pool.row(i) - pool.row(j)).cwiseAbs().maxCoeff() <= 1e-12) {
                dup = true;
                break;
            }
        }
        if (!dup) keep.push_back(i);
    }
    cmbo::Rng grid_rng(cmbo::derive_seed(opt.seed, 0x617D));
    std::vector<Eigen::Index> picked;
    if (static_cast<Eigen::Index>(keep.size()) <= opt.grid_size) {
        picked = keep;
    } else {
        for (Eigen::Index p : grid_rng.sample_without_replacement(
                 static_cast<Eigen::Index>(keep.size()), opt.grid_size)) {
            picked.push_back(keep[static_cast<std::size_t>(p)]);
        }
        std::sort(picked.begin(), picked.end());
    }
    Eigen::MatrixXd grid(static_cast<Eigen::Index>(picked.size()), ds.dim);
    for (std::size_t i = 0; i < picked.size(); ++i) {
        grid.row(static_cast<Eigen::Index>(i)) = pool.row(picked[i]);
    }

    std::vector<cmbo::GaussianDist> posteriors;
    for (const std::string& id : ids) {
        const cmbo::Dataset sub = cmbo::subsample_meta_observations(
            ds.tasks.at(id), opt.meta_obs, cmbo::derive_seed(opt.seed, cmbo::fnv1a(id)));
        const cmbo::MetaTask task{id, sub.inputs(), sub.outputs()};
        const auto model = cmbo::fit_meta_posterior(task, grid, opt.noise);
        posteriors.push_back(cmbo::discretize(*model, grid));
    }

    const cmbo::Clustering clustering =
        cmbo::kmeans_gd(posteriors, opt.clusters, kind, opt.seed);
    const double intra = cmbo::intra_cluster_entropy(clustering, posteriors);
    std::optional<double> inter;
    if (clustering.num_clusters() >= 2) {
        inter = cmbo::inter_cluster_separation(clustering, posteriors);
    }

    nlohmann::json out = nlohmann::json::parse(cmbo::clustering_to_json(clustering, intra, inter));
    out["task_ids"] = ids;
    out["grid_size"] = grid.rows();
    if (opt.sweep) {
        const cmbo::SweepResult sweep =
            cmbo::sweep_cluster_count(posteriors, opt.c_min, opt.c_max, kind, opt.seed);
        nlohmann::json entries = nlohmann::json::array();
        for (const cmbo::SweepEntry& e : sweep.entries) {
            entries.push_back({{"num_clusters", e.num_clusters},
                               {"intra_ce", e.intra_ce},
                               {"inter_cs", e.inter_cs},
                               {"score", e.score}});
        }
        out["sweep"] = {{"entries", std::move(entries)}, {"recommended", sweep.recommended}};
    }

    const std::string text = out.dump(2);
    if (opt.out_path.empty()) {
        std::cout << text << '\n';
    } else {
        write_text(opt.out_path, text);
    }
    return 0;
}

int run_run(RunOptions& opt) {
    const cmbo::ExperimentConfig cfg = finalize_config(opt);
    const cmbo::MetaDataset ds = cmbo::load_meta_dataset(opt.data_path);
    cmbo::run_experiment(ds, cfg, opt.out_dir);
    std::cout << "traces written to " << opt.out_dir << '\n';
    return 0;
}

int run_sweep(RunOptions& opt, int c_min, int c_max, const std::string& out_path) {
    cmbo::ExperimentConfig cfg = finalize_config(opt);
    cfg.c_min = c_min;
    cfg.c_max = c_max;
    const cmbo::MetaDataset ds = cmbo::load_meta_dataset(opt.data_path);
    const std::vector<cmbo::ClusterSweepRow> rows =
        cmbo::sweep_cluster_counts_experiment(ds, cfg);
    std::ostringstream csv;
    cmbo::write_cluster_sweep_csv(csv, rows);
    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        write_text(out_path, csv.str());
        std::cout << "wrote " << out_path << '\n';
    }
    return 0;
}

int run_report(const std::string& traces_dir, const std::string& out_prefix, double threshold) {
    const std::vector<cmbo::TraceSummary> summaries = cmbo::read_traces_dir(traces_dir);
    const std::vector<cmbo::ReportRow> rows = cmbo::aggregate(summaries, threshold);
    std::ostringstream csv;
    cmbo::write_report_csv(csv, rows);
    if (out_prefix.empty()) {
        std::cout << csv.str();
    } else {
        write_text(out_prefix + ".csv", csv.str());
        write_text(out_prefix + ".json", cmbo::report_to_json(rows, threshold));
        std::cout << "wrote " << out_prefix << ".csv and " << out_prefix << ".json\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"clustering-based meta Bayesian optimization benchmark"};
    app.require_subcommand(1);

    // synth
    cmbo::SynthSpec synth_spec;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "generate the synthetic two-family meta-dataset");
    synth->add_option("--out", synth_out, "output JSON path")->required();
    synth->add_option("--seed", synth_spec.seed, "generator seed");
    synth->add_option("--dim", synth_spec.dim, "input dimension");
    synth->add_option("--grid-size", synth_spec.grid_size, "shared candidate grid size");
    synth->add_option("--tasks-per-family", synth_spec.tasks_per_family, "tasks per family");
    synth->add_option("--noise", synth_spec.noise, "observation noise (standard deviation)");

    // cluster
    ClusterOptions cluster_opt;
    auto* cluster = app.add_subcommand("cluster", "fit meta posteriors and cluster them");
    cluster->add_option("--data", cluster_opt.data_path, "meta-dataset JSON file")->required();
    cluster->add_option("--clusters", cluster_opt.clusters, "cluster count C");
    cluster->add_option("--distance", cluster_opt.distance, "wasserstein|jeffreys");
    cluster->add_option("--seed", cluster_opt.seed, "clustering seed");
    cluster->add_option("--grid-size", cluster_opt.grid_size, "shared index grid size");
    cluster->add_option("--meta-obs", cluster_opt.meta_obs, "observations per meta task");
    cluster->add_option("--noise", cluster_opt.noise, "observation noise variance");
    cluster->add_option("--out", cluster_opt.out_path, "output JSON path (default stdout)");
    cluster->add_flag("--sweep", cluster_opt.sweep, "also sweep the cluster count");
    cluster->add_option("--c-min", cluster_opt.c_min, "sweep lower bound");
    cluster->add_option("--c-max", cluster_opt.c_max, "sweep upper bound");

    // run
    RunOptions run_opt;
    auto* run = app.add_subcommand("run", "run the full experiment matrix");
    add_experiment_options(run, run_opt, true);
    run->add_option("--out-dir", run_opt.out_dir, "trace output directory")->required();
    run->add_option("--seed", run_opt.seed, "master seed")->required();

    // sweep-clusters
    RunOptions sweep_opt;
    int sweep_c_min = 2;
    int sweep_c_max = 6;
    std::string sweep_out;
    auto* sweep = app.add_subcommand("sweep-clusters",
                                     "mean-NSR curves while varying the cluster count");
    add_experiment_options(sweep, sweep_opt, false);
    sweep->add_option("--seed", sweep_opt.seed, "master seed")->required();
    sweep->add_option("--c-min", sweep_c_min, "lowest cluster count");
    sweep->add_option("--c-max", sweep_c_max, "highest cluster count");
    sweep->add_option("--out", sweep_out, "output CSV path (default stdout)");

    // report
    std::string report_dir;
    std::string report_out;
    double report_threshold = 0.005;
    auto* report = app.add_subcommand("report", "aggregate a directory of trace CSVs");
    report->add_option("--traces", report_dir, "directory of trace CSVs")->required();
    report->add_option("--out", report_out, "output prefix for .csv/.json (default stdout)");
    report->add_option("--threshold", report_threshold, "solvable-regret threshold");

    try {
        app.parse(argc, argv);
        if (synth->parsed()) return run_synth(synth_spec, synth_out);
        if (cluster->parsed()) return run_cluster(cluster_opt);
        if (run->parsed()) return run_run(run_opt);
        if (sweep->parsed()) return run_sweep(sweep_opt, sweep_c_min, sweep_c_max, sweep_out);
        if (report->parsed()) return run_report(report_dir, report_out, report_threshold);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const cmbo::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const cmbo::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
