#include "cmbo/meta_dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "cmbo/errors.hpp"
#include "cmbo/rng.hpp"

namespace cmbo {

namespace {

using nlohmann::json;

Eigen::MatrixXd drop_duplicate_rows(const Eigen::MatrixXd& x, Eigen::VectorXd& y) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        bool dup = false;
        for (Eigen::Index j : keep) {
            if ((x.row(i) - x.row(j)).cwiseAbs().maxCoeff() <= 1e-12) {
                dup = true;
                break;
            }
        }
        if (!dup) keep.push_back(i);
    }
    if (static_cast<Eigen::Index>(keep.size()) == x.rows()) return x;
    Eigen::MatrixXd xs(static_cast<Eigen::Index>(keep.size()), x.cols());
    Eigen::VectorXd ys(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
        xs.row(static_cast<Eigen::Index>(i)) = x.row(keep[i]);
        ys(static_cast<Eigen::Index>(i)) = y(keep[i]);
    }
    y = ys;
    return xs;
}

}  // namespace

std::vector<std::string> MetaDataset::task_ids() const {
    std::vector<std::string> ids;
    ids.reserve(tasks.size());
    for (const auto& [id, task] : tasks) ids.push_back(id);
    return ids;
}

MetaDataset meta_dataset_from_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("meta dataset: ") + e.what());
    }
    if (!root.is_object() || !root.contains("search_space") || !root.contains("dim") ||
        !root.contains("tasks")) {
        throw SchemaError("meta dataset: expected fields search_space, dim, tasks");
    }
    if (!root["search_space"].is_string() || !root["dim"].is_number_integer() ||
        !root["tasks"].is_object()) {
        throw SchemaError("meta dataset: field types must be (string, int, object)");
    }

    MetaDataset out;
    out.search_space_id = root["search_space"].get<std::string>();
    out.dim = root["dim"].get<int>();
    if (out.dim < 1) {
        throw SchemaError("meta dataset: dim must be positive");
    }
    if (root["tasks"].empty()) {
        throw SchemaError("meta dataset: no tasks");
    }

    for (const auto& [task_id, body] : root["tasks"].items()) {
        if (!body.is_object() || !body.contains("X") || !body.contains("y") ||
            !body["X"].is_array() || !body["y"].is_array()) {
            throw SchemaError("meta dataset: task '" + task_id + "' must have arrays X and y");
        }
        const auto& xs = body["X"];
        const auto& ys = body["y"];
        if (ys.empty() || xs.empty()) {
            throw SchemaError("meta dataset: task '" + task_id + "' has no observations");
        }
        if (xs.size() != ys.size()) {
            throw SchemaError("meta dataset: task '" + task_id + "' has " +
                              std::to_string(xs.size()) + " inputs but " +
                              std::to_string(ys.size()) + " outputs");
        }
        const auto rows = static_cast<Eigen::Index>(xs.size());
        Eigen::MatrixXd x(rows, out.dim);
        Eigen::VectorXd y(rows);
        for (Eigen::Index i = 0; i < rows; ++i) {
            const auto& row = xs[static_cast<std::size_t>(i)];
            if (!row.is_array() || static_cast<int>(row.size()) != out.dim) {
                throw DimMismatch("meta dataset: task '" + task_id + "' row " +
                                  std::to_string(i) + " has " + std::to_string(row.size()) +
                                  " entries, expected " + std::to_string(out.dim));
            }
            for (int j = 0; j < out.dim; ++j) {
                if (!row[static_cast<std::size_t>(j)].is_number()) {
                    throw SchemaError("meta dataset: task '" + task_id + "' has a non-numeric input");
                }
                x(i, j) = row[static_cast<std::size_t>(j)].get<double>();
            }
            if (!ys[static_cast<std::size_t>(i)].is_number()) {
                throw SchemaError("meta dataset: task '" + task_id + "' has a non-numeric output");
            }
            y(i) = ys[static_cast<std::size_t>(i)].get<double>();
        }
        if (!x.allFinite() || !y.allFinite()) {
            throw SchemaError("meta dataset: task '" + task_id + "' has non-finite values");
        }
        TaskData task;
        task.inputs = drop_duplicate_rows(x, y);
        task.outputs = y;
        out.tasks.emplace(task_id, std::move(task));
    }

    // Min-max rescale per dimension across the whole search space; constant
    // dimensions map to 0.
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(out.dim, std::numeric_limits<double>::infinity());
    Eigen::VectorXd hi = -lo;
    for (const auto& [id, task] : out.tasks) {
        lo = lo.cwiseMin(task.inputs.colwise().minCoeff().transpose());
        hi = hi.cwiseMax(task.inputs.colwise().maxCoeff().transpose());
    }
    out.scale_offset = lo;
    out.scale_factor = (hi - lo).cwiseMax(0.0);
    for (auto& [id, task] : out.tasks) {
        for (int j = 0; j < out.dim; ++j) {
            if (out.scale_factor(j) > 0.0) {
                task.inputs.col(j) = (task.inputs.col(j).array() - lo(j)) / out.scale_factor(j);
            } else {
                task.inputs.col(j).setZero();
            }
        }
        task.y_min = task.outputs.minCoeff();
        task.y_max = task.outputs.maxCoeff();
    }
    return out;
}

MetaDataset load_meta_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("meta dataset: cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return meta_dataset_from_json(buf.str());
}

std::string meta_dataset_to_json(const MetaDataset& dataset) {
    json root;
    root["search_space"] = dataset.search_space_id;
    root["dim"] = dataset.dim;
    if (dataset.scale_offset.size() == dataset.dim) {
        root["scaling"] = {
            {"offset", std::vector<double>(dataset.scale_offset.data(),
                                           dataset.scale_offset.data() + dataset.dim)},
            {"factor", std::vector<double>(dataset.scale_factor.data(),
                                           dataset.scale_factor.data() + dataset.dim)}};
    }
    json tasks = json::object();
    for (const auto& [id, task] : dataset.tasks) {
        json xs = json::array();
        for (Eigen::Index i = 0; i < task.inputs.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index j = 0; j < task.inputs.cols(); ++j) row.push_back(task.inputs(i, j));
            xs.push_back(std::move(row));
        }
        json ysj = json::array();
        for (Eigen::Index i = 0; i < task.outputs.size(); ++i) ysj.push_back(task.outputs(i));
        tasks[id] = {{"X", std::move(xs)}, {"y", std::move(ysj)}};
    }
    root["tasks"] = std::move(tasks);
    return root.dump(1);
}

void save_meta_dataset(const MetaDataset& dataset, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ParseError("meta dataset: cannot write '" + path + "'");
    }
    out << meta_dataset_to_json(dataset) << '\n';
}

std::pair<std::vector<std::string>, std::vector<std::string>> split_tasks(
    const MetaDataset& dataset, double ratio, std::uint64_t seed) {
    if (dataset.tasks.size() < 2) {
        throw TooFewTasks("split_tasks: needs at least two tasks");
    }
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw InvalidArgument("split_tasks: ratio must lie in (0, 1)");
    }
    std::vector<std::string> ids = dataset.task_ids();  // sorted by map order
    Rng rng(seed);
    rng.shuffle(ids);
    const auto total = static_cast<double>(ids.size());
    auto n_train = static_cast<std::size_t>(std::ceil(ratio * total - 1e-9));
    n_train = std::min(n_train, ids.size());
    std::vector<std::string> train(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::string> test(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {std::move(train), std::move(test)};
}

Dataset subsample_meta_observations(const TaskData& task, Eigen::Index count,
                                    std::uint64_t seed) {
    const Eigen::Index total = task.inputs.rows();
    if (count <= 0) return Dataset(task.inputs.cols());
    if (count >= total) return Dataset(task.inputs, task.outputs);
    Rng rng(seed);
    std::vector<Eigen::Index> picked = rng.sample_without_replacement(total, count);
    std::sort(picked.begin(), picked.end());
    Eigen::MatrixXd x(count, task.inputs.cols());
    Eigen::VectorXd y(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        x.row(i) = task.inputs.row(picked[static_cast<std::size_t>(i)]);
        y(i) = task.outputs(picked[static_cast<std::size_t>(i)]);
    }
    return Dataset(std::move(x), std::move(y));
}

double nsr(double best_y, double y_min, double y_max) {
    if (!(y_max > y_min)) return 0.0;
    const double value = (y_max - best_y) / (y_max - y_min);
    return std::clamp(value, 0.0, 1.0);
}

}  // namespace cmbo
