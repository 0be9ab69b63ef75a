#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cmbo/distances.hpp"
#include "cmbo/gaussian.hpp"

namespace cmbo {

/// Partition of discretized posteriors produced by kmeans_gd. Every cluster is
/// nonempty, member counts sum to the number of inputs, and each input sits at
/// (one of) its nearest centroids under distance_kind.
struct Clustering {
    std::vector<int> assignments;         // input index -> cluster id in [0, C)
    std::vector<GaussianDist> centroids;  // elementwise mean of member means/covs
    DistanceKind distance_kind = DistanceKind::Wasserstein2;
    int iterations_run = 0;               // assignment passes executed
    std::vector<int> member_counts;
    std::uint64_t seed = 0;

    /// Within-cluster cost bookkeeping, one entry per assignment pass. For
    /// pass t >= 2, cost_before is the previous assignment evaluated under the
    /// pass-t centroids; the assignment step can only lower it.
    struct PassCost {
        double cost_after = 0.0;
        double cost_before = 0.0;  // NaN for the first pass
    };
    std::vector<PassCost> pass_costs;

    int num_clusters() const { return static_cast<int>(centroids.size()); }
};

/// Lloyd iterations over Gaussian distributions with greedy farthest-point
/// seeding (first pick chosen by the seed). Centroids are updated as the
/// elementwise arithmetic mean of member means and covariances. Empty clusters
/// are repaired by reseeding with the member farthest from its centroid.
Clustering kmeans_gd(const std::vector<GaussianDist>& posteriors, int num_clusters,
                     DistanceKind kind, std::uint64_t seed, int max_iter = 10);

/// Mean over clusters of the average pairwise Wasserstein distance among
/// members; singleton clusters contribute 0.
double intra_cluster_entropy(const Clustering& clustering,
                             const std::vector<GaussianDist>& posteriors);

/// Mean Wasserstein distance over cross-cluster member pairs. Requires at
/// least two clusters.
double inter_cluster_separation(const Clustering& clustering,
                                const std::vector<GaussianDist>& posteriors);

struct SweepEntry {
    int num_clusters = 0;
    Clustering clustering;
    double intra_ce = 0.0;
    double inter_cs = 0.0;
    double score = 0.0;  // min-max scaled interCS minus min-max scaled intraCE
};

struct SweepResult {
    std::vector<SweepEntry> entries;
    int recommended = 0;  // argmax score, ties toward the smaller cluster count
};

/// Runs kmeans_gd for every cluster count in [c_min, c_max] and scores the
/// results. With a single cluster the separation term is taken as 0.
SweepResult sweep_cluster_count(const std::vector<GaussianDist>& posteriors, int c_min,
                                int c_max, DistanceKind kind, std::uint64_t seed);

std::string clustering_to_json(const Clustering& clustering,
                               std::optional<double> intra_ce = std::nullopt,
                               std::optional<double> inter_cs = std::nullopt);

}  // namespace cmbo
