#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cmbo/meta_dataset.hpp"
#include "cmbo/run.hpp"

namespace cmbo {

/// Settings for a full benchmark matrix: split seeds x test tasks x repeated
/// runs x methods x acquisition functions.
struct ExperimentConfig {
    double split_ratio = 0.85;
    int n_split_seeds = 5;
    int runs_per_target = 8;
    int num_queries = 50;   // T
    int num_initial = 5;    // N
    int meta_obs_per_task = 50;
    int num_clusters = 2;
    int c_min = 2;          // cluster-count sweep range
    int c_max = 6;
    std::vector<Method> methods{Method::Cmbo, Method::VanillaGp, Method::RandomSearch};
    std::vector<AcquisitionKind> afs{AcquisitionKind::GpUcb};
    DistanceKind cluster_distance = DistanceKind::Wasserstein2;
    DistanceKind weight_distance = DistanceKind::Wasserstein2;
    PrototypeKind prototype = PrototypeKind::GeometricCenter;
    double ucb_beta = 3.0;
    int clustering_grid_size = 100;
    int comparison_grid_size = 300;
    /// Target candidate sets larger than this are subsampled (seeded) so the
    /// dense grid algebra stays tractable.
    int max_candidates = 300;
    double regret_threshold = 0.005;
    double noise_var = 1e-4;
    double weight_ema = 1.0;
    std::uint64_t master_seed = 0;
    int workers = 1;

    void validate() const;
};

struct ExperimentCell {
    int split_index = 0;
    std::string task_id;
    int run_index = 0;
    Method method = Method::Cmbo;
    AcquisitionKind af = AcquisitionKind::GpUcb;
};

/// Stable method label used in trace files and reports; carries the cmbo
/// variant and, when several acquisition functions are in play, the AF.
std::string method_label(Method method, AcquisitionKind af, const ExperimentConfig& config);

std::vector<ExperimentCell> plan_experiment(const MetaDataset& dataset,
                                            const ExperimentConfig& config);

/// Runs one cell. The run seed is a pure function of (master seed, split
/// index, task id, run index), so matched cells across methods share their
/// initial design and partial reruns reproduce byte-identical traces.
RunTrace run_experiment_cell(const MetaDataset& dataset, const ExperimentConfig& config,
                             const ExperimentCell& cell);

std::string cell_run_id(const ExperimentCell& cell);
std::string cell_file_stem(const ExperimentCell& cell, const ExperimentConfig& config);

/// Full matrix; writes one CSV and one JSON per cell into out_dir, running up
/// to config.workers cells in parallel.
void run_experiment(const MetaDataset& dataset, const ExperimentConfig& config,
                    const std::string& out_dir);

struct TraceSummary {
    std::string run_id;
    std::string method;
    int first_tau = 0;
    std::vector<double> nsr;  // one value per tau, init rows collapsed
};

TraceSummary summarize_trace(const RunTrace& trace, const std::string& run_id);
std::vector<TraceSummary> read_traces_dir(const std::string& dir);

struct ReportRow {
    std::string method;
    int tau = 0;
    double mean_nsr = 0.0;
    double avg_rank = 0.0;
    double solvable_frac = 0.0;  // fraction of runs with nsr strictly below threshold
};

/// Per-tau mean NSR, average rank (ties averaged) within matched run groups,
/// and the solvable fraction at the threshold.
std::vector<ReportRow> aggregate(const std::vector<TraceSummary>& summaries, double threshold);

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);
std::string report_to_json(const std::vector<ReportRow>& rows, double threshold);

struct ClusterSweepRow {
    int num_clusters = 0;
    int tau = 0;
    double mean_nsr = 0.0;
};

/// Mean-NSR curve per cluster count in [c_min, c_max], using the cmbo variant
/// from the config over the whole experiment plan.
std::vector<ClusterSweepRow> sweep_cluster_counts_experiment(const MetaDataset& dataset,
                                                             const ExperimentConfig& config);
void write_cluster_sweep_csv(std::ostream& out, const std::vector<ClusterSweepRow>& rows);

}  // namespace cmbo
