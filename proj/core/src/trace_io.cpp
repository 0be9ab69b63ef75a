#include "cmbo/trace_io.hpp"

#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cmbo/meta_dataset.hpp"
#include "format.hpp"

namespace cmbo {

namespace {
using detail::format_double;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace, const std::string& run_id) {
    const Eigen::Index num_weights = trace.rows.empty() ? 0 : trace.rows.front().weights.size();
    out << "run_id,method,tau,x_index,y,best_y,nsr";
    for (Eigen::Index i = 0; i < num_weights; ++i) out << ",w_" << (i + 1);
    out << '\n';
    for (const TraceRow& row : trace.rows) {
        out << run_id << ',' << trace.method << ',' << row.tau << ',' << row.x_index << ','
            << format_double(row.y) << ',' << format_double(row.best_y) << ','
            << format_double(nsr(row.best_y, trace.y_min, trace.y_max));
        for (Eigen::Index i = 0; i < num_weights; ++i) {
            out << ',' << format_double(i < row.weights.size() ? row.weights(i) : 0.0);
        }
        out << '\n';
    }
}

std::string trace_to_csv(const RunTrace& trace, const std::string& run_id) {
    std::ostringstream out;
    write_trace_csv(out, trace, run_id);
    return out.str();
}

std::string run_config_to_json(const RunConfig& config) {
    nlohmann::json j;
    j["num_clusters"] = config.num_clusters;
    j["cluster_distance"] = to_string(config.cluster_distance);
    j["weight_distance"] = to_string(config.weight_distance);
    j["prototype"] = to_string(config.prototype);
    j["acquisition"] = to_string(config.acquisition);
    j["ucb_beta"] = config.ucb_beta;
    j["num_queries"] = config.num_queries;
    j["num_initial"] = config.num_initial;
    j["clustering_grid_size"] = config.clustering_grid_size;
    j["comparison_grid_size"] = config.comparison_grid_size;
    j["kmeans_max_iter"] = config.kmeans_max_iter;
    j["noise_var"] = config.noise_var;
    j["weight_ema"] = config.weight_ema;
    j["seed"] = config.seed;
    j["method_tag"] = config.method_tag;
    return j.dump();
}

std::string trace_to_json(const RunTrace& trace, const std::string& run_id,
                          const RunConfig& config) {
    nlohmann::json j;
    j["run_id"] = run_id;
    j["method"] = trace.method;
    j["seed"] = trace.seed;
    j["grid_id"] = trace.grid_id;
    j["y_min"] = trace.y_min;
    j["y_max"] = trace.y_max;
    j["meta_cluster_assignments"] = trace.meta_cluster_assignments;
    j["config"] = nlohmann::json::parse(run_config_to_json(config));
    nlohmann::json rows = nlohmann::json::array();
    for (const TraceRow& row : trace.rows) {
        nlohmann::json r;
        r["tau"] = row.tau;
        r["x_index"] = row.x_index;
        r["y"] = row.y;
        r["best_y"] = row.best_y;
        r["nsr"] = nsr(row.best_y, trace.y_min, trace.y_max);
        r["weights"] = std::vector<double>(row.weights.data(),
                                           row.weights.data() + row.weights.size());
        r["distances"] = std::vector<double>(row.distances.data(),
                                             row.distances.data() + row.distances.size());
        rows.push_back(std::move(r));
    }
    j["trace"] = std::move(rows);
    return j.dump(1);
}

}  // namespace cmbo
