#include "cmbo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cmbo/errors.hpp"
#include "cmbo/rng.hpp"
#include "cmbo/trace_io.hpp"
#include "format.hpp"

namespace fs = std::filesystem;

namespace cmbo {

namespace {

using detail::format_double;
using detail::sanitize_token;

// Seed fan-out streams; each level folds one coordinate of the cell.
constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kObsStream = 2;
constexpr std::uint64_t kCandStream = 3;
constexpr std::uint64_t kRunStream = 4;

std::uint64_t split_seed(const ExperimentConfig& cfg, int split_index) {
    return derive_seed(derive_seed(cfg.master_seed, kSplitStream),
                       static_cast<std::uint64_t>(split_index));
}

std::uint64_t task_stream_seed(const ExperimentConfig& cfg, std::uint64_t stream, int split_index,
                               const std::string& task_id) {
    std::uint64_t s = derive_seed(cfg.master_seed, stream);
    s = derive_seed(s, static_cast<std::uint64_t>(split_index));
    return derive_seed(s, fnv1a(task_id));
}

RunConfig cell_run_config(const ExperimentConfig& cfg, const ExperimentCell& cell) {
    RunConfig rc;
    rc.num_clusters = cfg.num_clusters;
    rc.cluster_distance = cfg.cluster_distance;
    rc.weight_distance = cfg.weight_distance;
    rc.prototype = cfg.prototype;
    rc.acquisition = cell.af;
    rc.ucb_beta = cfg.ucb_beta;
    rc.num_queries = cfg.num_queries;
    rc.num_initial = cfg.num_initial;
    rc.clustering_grid_size = cfg.clustering_grid_size;
    rc.comparison_grid_size = cfg.comparison_grid_size;
    rc.noise_var = cfg.noise_var;
    rc.weight_ema = cfg.weight_ema;
    rc.seed = derive_seed(task_stream_seed(cfg, kRunStream, cell.split_index, cell.task_id),
                          static_cast<std::uint64_t>(cell.run_index));
    rc.method_tag = method_label(cell.method, cell.af, cfg);
    return rc;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
        throw InvalidArgument("ExperimentConfig: split_ratio must lie in (0, 1)");
    }
    if (n_split_seeds < 1 || runs_per_target < 1 || num_queries < 1 || meta_obs_per_task < 1 ||
        num_clusters < 1 || clustering_grid_size < 1 || comparison_grid_size < 1 ||
        max_candidates < 2 || workers < 1) {
        throw InvalidArgument("ExperimentConfig: counts must be at least 1");
    }
    if (num_initial < 0) {
        throw InvalidArgument("ExperimentConfig: num_initial must be nonnegative");
    }
    if (c_min < 1 || c_min > c_max) {
        throw InvalidArgument("ExperimentConfig: invalid cluster sweep range");
    }
    if (methods.empty() || afs.empty()) {
        throw InvalidArgument("ExperimentConfig: methods and afs must be nonempty");
    }
    if (!(regret_threshold > 0.0)) {
        throw InvalidArgument("ExperimentConfig: regret threshold must be positive");
    }
    if (!(weight_ema > 0.0 && weight_ema <= 1.0)) {
        throw InvalidArgument("ExperimentConfig: weight_ema must lie in (0, 1]");
    }
}

std::string method_label(Method method, AcquisitionKind af, const ExperimentConfig& config) {
    std::string base;
    switch (method) {
        case Method::Cmbo:
            base = "cmbo_" +
                   std::string(config.cluster_distance == DistanceKind::Jeffreys ? "jef" : "wss") +
                   "_" +
                   std::string(config.weight_distance == DistanceKind::Jeffreys ? "jef" : "wss") +
                   "_" + to_string(config.prototype);
            break;
        case Method::RandomSearch:
            return "random";  // ignores the acquisition function
        case Method::VanillaGp:
            base = "vanilla_gp";
            break;
        case Method::GlobalCen:
            base = "global_cen";
            break;
        case Method::IndiWeightJef:
            base = "indi_weight_jef";
            break;
    }
    if (config.afs.size() > 1) base += "_" + to_string(af);
    return base;
}

std::vector<ExperimentCell> plan_experiment(const MetaDataset& dataset,
                                            const ExperimentConfig& config) {
    config.validate();
    std::vector<ExperimentCell> cells;
    for (int s = 0; s < config.n_split_seeds; ++s) {
        const auto [train, test] = split_tasks(dataset, config.split_ratio, split_seed(config, s));
        for (const std::string& task_id : test) {
            for (int r = 0; r < config.runs_per_target; ++r) {
                for (Method m : config.methods) {
                    if (m == Method::RandomSearch) {
                        cells.push_back({s, task_id, r, m, config.afs.front()});
                        continue;
                    }
                    for (AcquisitionKind af : config.afs) {
                        cells.push_back({s, task_id, r, m, af});
                    }
                }
            }
        }
    }
    return cells;
}

RunTrace run_experiment_cell(const MetaDataset& dataset, const ExperimentConfig& config,
                             const ExperimentCell& cell) {
    config.validate();
    const auto [train, test] = split_tasks(dataset, config.split_ratio,
                                           split_seed(config, cell.split_index));
    if (std::find(test.begin(), test.end(), cell.task_id) == test.end()) {
        throw InvalidArgument("run_experiment_cell: task '" + cell.task_id +
                              "' is not a test task of split " +
                              std::to_string(cell.split_index));
    }

    std::vector<MetaTask> meta;
    meta.reserve(train.size());
    for (const std::string& id : train) {
        const TaskData& td = dataset.tasks.at(id);
        const Dataset sub = subsample_meta_observations(
            td, config.meta_obs_per_task, task_stream_seed(config, kObsStream, cell.split_index, id));
        meta.push_back({id, sub.inputs(), sub.outputs()});
    }

    const TaskData& td = dataset.tasks.at(cell.task_id);
    Eigen::MatrixXd candidates = td.inputs;
    Eigen::VectorXd values = td.outputs;
    if (candidates.rows() > config.max_candidates) {
        Rng rng(task_stream_seed(config, kCandStream, cell.split_index, cell.task_id));
        std::vector<Eigen::Index> keep =
            rng.sample_without_replacement(candidates.rows(), config.max_candidates);
        std::sort(keep.begin(), keep.end());
        Eigen::MatrixXd x(config.max_candidates, candidates.cols());
        Eigen::VectorXd y(config.max_candidates);
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(keep.size()); ++i) {
            x.row(i) = candidates.row(keep[static_cast<std::size_t>(i)]);
            y(i) = values(keep[static_cast<std::size_t>(i)]);
        }
        candidates = std::move(x);
        values = std::move(y);
    }

    TargetTask target;
    target.id = cell.task_id;
    target.candidates = std::move(candidates);
    target.y_min = td.y_min;  // value range of the full task, not the capped grid
    target.y_max = td.y_max;
    const Eigen::VectorXd lookup = std::move(values);
    target.oracle = [lookup](Eigen::Index i) { return lookup(i); };

    const RunConfig rc = cell_run_config(config, cell);
    if (cell.method == Method::Cmbo) return run_cmbo(meta, target, rc);
    return run_baseline(cell.method, meta, target, rc);
}

std::string cell_run_id(const ExperimentCell& cell) {
    return "s" + std::to_string(cell.split_index) + "_" + sanitize_token(cell.task_id) + "_r" +
           std::to_string(cell.run_index);
}

std::string cell_file_stem(const ExperimentCell& cell, const ExperimentConfig& config) {
    return sanitize_token(method_label(cell.method, cell.af, config)) + "__" +
           to_string(cell.af) + "__" + cell_run_id(cell);
}

void run_experiment(const MetaDataset& dataset, const ExperimentConfig& config,
                    const std::string& out_dir) {
    config.validate();
    const std::vector<ExperimentCell> cells = plan_experiment(dataset, config);
    if (cells.empty()) {
        throw DataError("run_experiment: empty plan (no test tasks in any split)");
    }
    fs::create_directories(out_dir);

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    const auto worker = [&]() {
        while (true) {
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error) return;
            }
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            try {
                const ExperimentCell& cell = cells[i];
                const RunTrace trace = run_experiment_cell(dataset, config, cell);
                const std::string stem = (fs::path(out_dir) / cell_file_stem(cell, config)).string();
                {
                    std::ofstream out(stem + ".csv", std::ios::binary);
                    write_trace_csv(out, trace, cell_run_id(cell));
                }
                {
                    std::ofstream out(stem + ".json", std::ios::binary);
                    out << trace_to_json(trace, cell_run_id(cell), cell_run_config(config, cell))
                        << '\n';
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(config.workers), cells.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
}

TraceSummary summarize_trace(const RunTrace& trace, const std::string& run_id) {
    TraceSummary s;
    s.run_id = run_id;
    s.method = trace.method;
    std::map<int, double> by_tau;  // later rows win, collapsing the init rows
    for (const TraceRow& row : trace.rows) {
        by_tau[row.tau] = nsr(row.best_y, trace.y_min, trace.y_max);
    }
    if (by_tau.empty()) throw InvalidArgument("summarize_trace: empty trace");
    s.first_tau = by_tau.begin()->first;
    int expected = s.first_tau;
    for (const auto& [tau, value] : by_tau) {
        if (tau != expected++) {
            throw MismatchedTraceLengths("summarize_trace: non-contiguous tau values");
        }
        s.nsr.push_back(value);
    }
    return s;
}

std::vector<TraceSummary> read_traces_dir(const std::string& dir) {
    if (!fs::is_directory(dir)) {
        throw DataError("read_traces_dir: '" + dir + "' is not a directory");
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw DataError("read_traces_dir: no trace CSV files in '" + dir + "'");
    }

    std::vector<TraceSummary> out;
    for (const fs::path& file : files) {
        std::ifstream in(file);
        if (!in) throw DataError("read_traces_dir: cannot open '" + file.string() + "'");
        std::string line;
        if (!std::getline(in, line)) {
            throw ParseError("trace csv '" + file.string() + "': missing header");
        }
        std::vector<std::string> header;
        {
            std::stringstream ss(line);
            std::string field;
            while (std::getline(ss, field, ',')) header.push_back(field);
        }
        const auto col = [&](const std::string& name) {
            const auto it = std::find(header.begin(), header.end(), name);
            if (it == header.end()) {
                throw ParseError("trace csv '" + file.string() + "': missing column " + name);
            }
            return static_cast<std::size_t>(it - header.begin());
        };
        const std::size_t c_run = col("run_id"), c_method = col("method"), c_tau = col("tau"),
                          c_nsr = col("nsr");

        TraceSummary s;
        std::map<int, double> by_tau;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::vector<std::string> fields;
            std::stringstream ss(line);
            std::string field;
            while (std::getline(ss, field, ',')) fields.push_back(field);
            if (fields.size() < header.size()) {
                throw ParseError("trace csv '" + file.string() + "': short row");
            }
            s.run_id = fields[c_run];
            s.method = fields[c_method];
            try {
                by_tau[std::stoi(fields[c_tau])] = std::stod(fields[c_nsr]);
            } catch (const std::exception&) {
                throw ParseError("trace csv '" + file.string() + "': bad numeric field");
            }
        }
        if (by_tau.empty()) {
            throw ParseError("trace csv '" + file.string() + "': no rows");
        }
        s.first_tau = by_tau.begin()->first;
        int expected = s.first_tau;
        for (const auto& [tau, value] : by_tau) {
            if (tau != expected++) {
                throw MismatchedTraceLengths("trace csv '" + file.string() +
                                             "': non-contiguous tau values");
            }
            s.nsr.push_back(value);
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<ReportRow> aggregate(const std::vector<TraceSummary>& summaries, double threshold) {
    if (summaries.empty()) {
        throw DataError("aggregate: no traces");
    }
    const int first_tau = summaries.front().first_tau;
    const std::size_t length = summaries.front().nsr.size();
    for (const TraceSummary& s : summaries) {
        if (s.first_tau != first_tau || s.nsr.size() != length) {
            throw MismatchedTraceLengths("aggregate: traces disagree on tau range");
        }
    }

    std::map<std::string, std::vector<const TraceSummary*>> groups;  // run_id -> members
    std::map<std::string, std::vector<const TraceSummary*>> methods;
    for (const TraceSummary& s : summaries) {
        groups[s.run_id].push_back(&s);
        methods[s.method].push_back(&s);
    }

    std::map<std::string, std::vector<double>> rank_sum;
    std::map<std::string, std::vector<int>> rank_count;
    for (const auto& [method, traces] : methods) {
        rank_sum[method].assign(length, 0.0);
        rank_count[method].assign(length, 0);
    }
    for (const auto& [run_id, members] : groups) {
        for (std::size_t t = 0; t < length; ++t) {
            // Average-rank convention for ties.
            std::vector<std::size_t> order(members.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return members[a]->nsr[t] < members[b]->nsr[t];
            });
            std::size_t i = 0;
            while (i < order.size()) {
                std::size_t j = i;
                while (j + 1 < order.size() &&
                       members[order[j + 1]]->nsr[t] == members[order[i]]->nsr[t]) {
                    ++j;
                }
                const double rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
                for (std::size_t k = i; k <= j; ++k) {
                    const std::string& m = members[order[k]]->method;
                    rank_sum[m][t] += rank;
                    rank_count[m][t] += 1;
                }
                i = j + 1;
            }
        }
    }

    std::vector<ReportRow> rows;
    for (const auto& [method, traces] : methods) {
        for (std::size_t t = 0; t < length; ++t) {
            ReportRow row;
            row.method = method;
            row.tau = first_tau + static_cast<int>(t);
            double sum = 0.0;
            int solved = 0;
            for (const TraceSummary* s : traces) {
                sum += s->nsr[t];
                if (s->nsr[t] < threshold) ++solved;  // strictly below the threshold
            }
            row.mean_nsr = sum / static_cast<double>(traces.size());
            row.solvable_frac = static_cast<double>(solved) / static_cast<double>(traces.size());
            row.avg_rank = rank_count[method][t] > 0
                               ? rank_sum[method][t] / static_cast<double>(rank_count[method][t])
                               : 0.0;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
    out << "method,tau,mean_nsr,avg_rank,solvable_frac\n";
    for (const ReportRow& row : rows) {
        out << row.method << ',' << row.tau << ',' << format_double(row.mean_nsr) << ','
            << format_double(row.avg_rank) << ',' << format_double(row.solvable_frac) << '\n';
    }
}

std::string report_to_json(const std::vector<ReportRow>& rows, double threshold) {
    nlohmann::json j;
    j["threshold"] = threshold;
    nlohmann::json arr = nlohmann::json::array();
    for (const ReportRow& row : rows) {
        arr.push_back({{"method", row.method},
                       {"tau", row.tau},
                       {"mean_nsr", row.mean_nsr},
                       {"avg_rank", row.avg_rank},
                       {"solvable_frac", row.solvable_frac}});
    }
    j["rows"] = std::move(arr);
    return j.dump(1);
}

std::vector<ClusterSweepRow> sweep_cluster_counts_experiment(const MetaDataset& dataset,
                                                             const ExperimentConfig& config) {
    config.validate();
    std::vector<ClusterSweepRow> rows;
    for (int c = config.c_min; c <= config.c_max; ++c) {
        ExperimentConfig variant = config;
        variant.num_clusters = c;
        variant.methods = {Method::Cmbo};
        const std::vector<ExperimentCell> cells = plan_experiment(dataset, variant);
        if (cells.empty()) {
            throw DataError("sweep_cluster_counts_experiment: empty plan");
        }
        std::vector<TraceSummary> summaries;
        summaries.reserve(cells.size());
        for (const ExperimentCell& cell : cells) {
            summaries.push_back(
                summarize_trace(run_experiment_cell(dataset, variant, cell), cell_run_id(cell)));
        }
        const std::size_t length = summaries.front().nsr.size();
        for (const TraceSummary& s : summaries) {
            if (s.nsr.size() != length || s.first_tau != summaries.front().first_tau) {
                throw MismatchedTraceLengths("sweep_cluster_counts_experiment: ragged traces");
            }
        }
        for (std::size_t t = 0; t < length; ++t) {
            double sum = 0.0;
            for (const TraceSummary& s : summaries) sum += s.nsr[t];
            rows.push_back({c, summaries.front().first_tau + static_cast<int>(t),
                            sum / static_cast<double>(summaries.size())});
        }
    }
    return rows;
}

void write_cluster_sweep_csv(std::ostream& out, const std::vector<ClusterSweepRow>& rows) {
    out << "num_clusters,tau,mean_nsr\n";
    for (const ClusterSweepRow& row : rows) {
        out << row.num_clusters << ',' << row.tau << ',' << format_double(row.mean_nsr) << '\n';
    }
}

}  // namespace cmbo
