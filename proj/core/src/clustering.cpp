#include "cmbo/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "cmbo/errors.hpp"
#include "cmbo/rng.hpp"

namespace cmbo {

namespace {

void check_same_dims(const std::vector<GaussianDist>& posteriors) {
    for (const GaussianDist& p : posteriors) {
        if (p.dim() != posteriors.front().dim()) {
            throw DimensionMismatch("kmeans_gd: posterior dimensions differ");
        }
    }
}

void check_clustering(const Clustering& clustering, const std::vector<GaussianDist>& posteriors) {
    if (clustering.assignments.size() != posteriors.size()) {
        throw DimensionMismatch("clustering metrics: assignment count does not match posteriors");
    }
}

Eigen::MatrixXd pairwise_wasserstein(const std::vector<GaussianDist>& posteriors) {
    const auto n = static_cast<Eigen::Index>(posteriors.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = wasserstein2(posteriors[static_cast<std::size_t>(i)],
                                          posteriors[static_cast<std::size_t>(j)]);
            out(i, j) = d;
            out(j, i) = d;
        }
    }
    return out;
}

double intra_from_pairwise(const Clustering& clustering, const Eigen::MatrixXd& dists) {
    const int num_clusters = clustering.num_clusters();
    double total = 0.0;
    for (int c = 0; c < num_clusters; ++c) {
        std::vector<Eigen::Index> members;
        for (std::size_t i = 0; i < clustering.assignments.size(); ++i) {
            if (clustering.assignments[i] == c) members.push_back(static_cast<Eigen::Index>(i));
        }
        const auto n = static_cast<double>(members.size());
        if (members.size() < 2) continue;  // singleton clusters contribute 0
        double sum = 0.0;
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                sum += dists(members[a], members[b]);
            }
        }
        total += 2.0 * sum / (n * (n - 1.0));
    }
    return total / static_cast<double>(num_clusters);
}

double inter_from_pairwise(const Clustering& clustering, const Eigen::MatrixXd& dists) {
    double sum = 0.0;
    std::int64_t pairs = 0;
    const auto n = static_cast<Eigen::Index>(clustering.assignments.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (clustering.assignments[static_cast<std::size_t>(i)] !=
                clustering.assignments[static_cast<std::size_t>(j)]) {
                sum += dists(i, j);
                ++pairs;
            }
        }
    }
    // Unordered pairs in both numerator and denominator; the ratio equals the
    // ordered-pair convention because the distance is symmetric.
    return pairs == 0 ? 0.0 : sum / static_cast<double>(pairs);
}

GaussianDist centroid_of(const std::vector<GaussianDist>& posteriors,
                         const std::vector<Eigen::Index>& members) {
    const Eigen::Index d = posteriors.front().dim();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i : members) {
        mean += posteriors[static_cast<std::size_t>(i)].mean();
        cov += posteriors[static_cast<std::size_t>(i)].cov();
    }
    const auto n = static_cast<double>(members.size());
    return GaussianDist(mean / n, cov / n);
}

}  // namespace

Clustering kmeans_gd(const std::vector<GaussianDist>& posteriors, int num_clusters,
                     DistanceKind kind, std::uint64_t seed, int max_iter) {
    const auto total = static_cast<int>(posteriors.size());
    if (total == 0) {
        throw InvalidArgument("kmeans_gd: no posteriors");
    }
    if (num_clusters < 1 || num_clusters > total) {
        throw InvalidC("kmeans_gd: cluster count " + std::to_string(num_clusters) +
                       " outside [1, " + std::to_string(total) + "]");
    }
    if (max_iter < 1) {
        throw InvalidArgument("kmeans_gd: max_iter must be positive");
    }
    check_same_dims(posteriors);

    // Greedy farthest-point seeding; only the first pick is randomized.
    Rng rng(seed);
    std::vector<Eigen::Index> chosen;
    std::vector<bool> is_chosen(posteriors.size(), false);
    std::vector<double> min_dist(posteriors.size(), std::numeric_limits<double>::infinity());
    const auto first = static_cast<Eigen::Index>(rng.uniform_int(total));
    chosen.push_back(first);
    is_chosen[static_cast<std::size_t>(first)] = true;
    while (static_cast<int>(chosen.size()) < num_clusters) {
        const GaussianDist& latest = posteriors[static_cast<std::size_t>(chosen.back())];
        for (std::size_t j = 0; j < posteriors.size(); ++j) {
            if (is_chosen[j]) continue;
            min_dist[j] = std::min(min_dist[j], distance(kind, posteriors[j], latest));
        }
        Eigen::Index best = -1;
        double best_val = -1.0;
        for (std::size_t j = 0; j < posteriors.size(); ++j) {
            if (is_chosen[j]) continue;
            if (min_dist[j] > best_val) {
                best_val = min_dist[j];
                best = static_cast<Eigen::Index>(j);
            }
        }
        chosen.push_back(best);
        is_chosen[static_cast<std::size_t>(best)] = true;
    }

    Clustering result;
    result.distance_kind = kind;
    result.seed = seed;
    result.centroids.reserve(static_cast<std::size_t>(num_clusters));
    for (Eigen::Index c : chosen) {
        result.centroids.push_back(posteriors[static_cast<std::size_t>(c)]);
    }

    std::vector<int> prev(posteriors.size(), -1);
    std::vector<int> cur(posteriors.size(), 0);
    std::vector<int> counts(static_cast<std::size_t>(num_clusters), 0);

    for (int pass = 1; pass <= max_iter; ++pass) {
        double cost_before = std::numeric_limits<double>::quiet_NaN();
        if (pass >= 2) {
            cost_before = 0.0;
            for (std::size_t i = 0; i < posteriors.size(); ++i) {
                cost_before += distance(kind, posteriors[i],
                                        result.centroids[static_cast<std::size_t>(prev[i])]);
            }
        }

        std::fill(counts.begin(), counts.end(), 0);
        std::vector<double> member_dist(posteriors.size(), 0.0);
        for (std::size_t i = 0; i < posteriors.size(); ++i) {
            int best_c = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < num_clusters; ++c) {
                const double d =
                    distance(kind, posteriors[i], result.centroids[static_cast<std::size_t>(c)]);
                if (d < best_d) {  // ties keep the lowest cluster id
                    best_d = d;
                    best_c = c;
                }
            }
            cur[i] = best_c;
            member_dist[i] = best_d;
            ++counts[static_cast<std::size_t>(best_c)];
        }

        // Empty-cluster repair: reseed with the member farthest from its
        // centroid, skipping members that would empty a singleton cluster.
        for (int c = 0; c < num_clusters; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) continue;
            std::size_t pick = posteriors.size();
            double pick_d = -1.0;
            for (std::size_t i = 0; i < posteriors.size(); ++i) {
                if (counts[static_cast<std::size_t>(cur[i])] < 2) continue;
                if (member_dist[i] > pick_d) {
                    pick_d = member_dist[i];
                    pick = i;
                }
            }
            --counts[static_cast<std::size_t>(cur[pick])];
            cur[pick] = c;
            ++counts[static_cast<std::size_t>(c)];
            result.centroids[static_cast<std::size_t>(c)] = posteriors[pick];
            member_dist[pick] = 0.0;
        }

        double cost_after = 0.0;
        for (std::size_t i = 0; i < posteriors.size(); ++i) cost_after += member_dist[i];
        result.pass_costs.push_back({cost_after, cost_before});
        result.iterations_run = pass;

        if (cur == prev) break;
        prev = cur;
        if (pass < max_iter) {
            for (int c = 0; c < num_clusters; ++c) {
                std::vector<Eigen::Index> members;
                for (std::size_t i = 0; i < posteriors.size(); ++i) {
                    if (cur[i] == c) members.push_back(static_cast<Eigen::Index>(i));
                }
                result.centroids[static_cast<std::size_t>(c)] = centroid_of(posteriors, members);
            }
        }
    }

    result.assignments = cur;
    result.member_counts = counts;
    return result;
}

double intra_cluster_entropy(const Clustering& clustering,
                             const std::vector<GaussianDist>& posteriors) {
    check_clustering(clustering, posteriors);
    return intra_from_pairwise(clustering, pairwise_wasserstein(posteriors));
}

double inter_cluster_separation(const Clustering& clustering,
                                const std::vector<GaussianDist>& posteriors) {
    check_clustering(clustering, posteriors);
    if (clustering.num_clusters() < 2) {
        throw SingleCluster("inter_cluster_separation: needs at least two clusters");
    }
    return inter_from_pairwise(clustering, pairwise_wasserstein(posteriors));
}

SweepResult sweep_cluster_count(const std::vector<GaussianDist>& posteriors, int c_min,
                                int c_max, DistanceKind kind, std::uint64_t seed) {
    const auto total = static_cast<int>(posteriors.size());
    if (c_min < 1 || c_max > total || c_min > c_max) {
        throw InvalidC("sweep_cluster_count: range [" + std::to_string(c_min) + ", " +
                       std::to_string(c_max) + "] outside [1, " + std::to_string(total) + "]");
    }
    const Eigen::MatrixXd dists = pairwise_wasserstein(posteriors);

    SweepResult result;
    for (int c = c_min; c <= c_max; ++c) {
        SweepEntry entry;
        entry.num_clusters = c;
        entry.clustering = kmeans_gd(posteriors, c, kind, seed);
        entry.intra_ce = intra_from_pairwise(entry.clustering, dists);
        entry.inter_cs = c == 1 ? 0.0 : inter_from_pairwise(entry.clustering, dists);
        result.entries.push_back(std::move(entry));
    }

    const auto scale = [](double value, double lo, double hi) {
        return hi > lo ? (value - lo) / (hi - lo) : 0.0;
    };
    double intra_lo = std::numeric_limits<double>::infinity(), intra_hi = -intra_lo;
    double inter_lo = std::numeric_limits<double>::infinity(), inter_hi = -inter_lo;
    for (const SweepEntry& e : result.entries) {
        intra_lo = std::min(intra_lo, e.intra_ce);
        intra_hi = std::max(intra_hi, e.intra_ce);
        inter_lo = std::min(inter_lo, e.inter_cs);
        inter_hi = std::max(inter_hi, e.inter_cs);
    }
    result.recommended = result.entries.front().num_clusters;
    double best_score = -std::numeric_limits<double>::infinity();
    for (SweepEntry& e : result.entries) {
        e.score = scale(e.inter_cs, inter_lo, inter_hi) - scale(e.intra_ce, intra_lo, intra_hi);
        if (e.score > best_score) {  // ties keep the smaller cluster count
            best_score = e.score;
            result.recommended = e.num_clusters;
        }
    }
    return result;
}

std::string clustering_to_json(const Clustering& clustering, std::optional<double> intra_ce,
                               std::optional<double> inter_cs) {
    nlohmann::json j;
    j["distance"] = to_string(clustering.distance_kind);
    j["seed"] = clustering.seed;
    j["iterations"] = clustering.iterations_run;
    j["assignments"] = clustering.assignments;
    j["member_counts"] = clustering.member_counts;
    if (intra_ce) j["intra_ce"] = *intra_ce;
    if (inter_cs) j["inter_cs"] = *inter_cs;
    return j.dump(2);
}

}  // namespace cmbo
