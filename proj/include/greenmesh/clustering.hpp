#pragma once

#include <cstdint>
#include <vector>

#include "greenmesh/timeseries.hpp"

namespace greenmesh {

struct ClusterModel {
    int k = 0;
    std::vector<DailyProfile> centroids;
    std::vector<int> assignments; // profile index -> centroid index
    double bic = 0.0;
};

struct KmeansResult {
    std::vector<DailyProfile> centroids;
    std::vector<int> assignments;
    double sse = 0.0;
};

class Rng;

double sq_dist(const DailyProfile& a, const DailyProfile& b);

// Lloyd iterations with k-means++ seeding. Deterministic for a given rng
// state. Optional warm start: pass initial centroids via `init`.
KmeansResult kmeans(const std::vector<DailyProfile>& profiles, int k, Rng& rng,
                    double tol = 1e-6, int max_iter = 200,
                    const std::vector<DailyProfile>* init = nullptr);

// Identical-spherical-variance BIC of a fitted clustering; larger is better.
double cluster_bic(const std::vector<DailyProfile>& profiles,
                   const std::vector<DailyProfile>& centroids,
                   const std::vector<int>& assignments);

// Start from k_min centroids and repeatedly try to split clusters, keeping a
// split only when the model BIC improves after a global refit.
ClusterModel xmeans_cluster(const std::vector<DailyProfile>& profiles,
                            int k_min, int k_max, std::uint64_t seed);

} // namespace greenmesh
