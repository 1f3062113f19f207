#include "greenmesh/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "greenmesh/errors.hpp"
#include "greenmesh/rng.hpp"

namespace greenmesh {

double sq_dist(const DailyProfile& a, const DailyProfile& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

namespace {

int nearest(const DailyProfile& p, const std::vector<DailyProfile>& centroids) {
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = sq_dist(p, centroids[c]);
        if (d < bd) {
            bd = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

std::vector<DailyProfile> kmeanspp_init(const std::vector<DailyProfile>& profiles,
                                        int k, Rng& rng) {
    std::vector<DailyProfile> centroids;
    centroids.reserve(k);
    centroids.push_back(
        profiles[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(profiles.size()) - 1))]);
    std::vector<double> d2(profiles.size());
    while (static_cast<int>(centroids.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < profiles.size(); ++i) {
            double bd = std::numeric_limits<double>::infinity();
            for (const auto& c : centroids) bd = std::min(bd, sq_dist(profiles[i], c));
            d2[i] = bd;
            total += bd;
        }
        std::size_t pick = 0;
        if (total <= 0.0) {
            // All remaining points coincide with existing centroids.
            pick = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(profiles.size()) - 1));
        } else {
            double r = rng.uniform01() * total;
            for (std::size_t i = 0; i < profiles.size(); ++i) {
                r -= d2[i];
                if (r <= 0.0) {
                    pick = i;
                    break;
                }
                pick = i;
            }
        }
        centroids.push_back(profiles[pick]);
    }
    return centroids;
}

} // namespace

KmeansResult kmeans(const std::vector<DailyProfile>& profiles, int k, Rng& rng,
                    double tol, int max_iter,
                    const std::vector<DailyProfile>* init) {
    if (profiles.empty()) throw ValidationError("kmeans: no profiles");
    if (k < 1) throw ValidationError("kmeans: k must be >= 1");
    const std::size_t dim = profiles.front().size();
    for (const auto& p : profiles)
        if (p.size() != dim) throw ValidationError("kmeans: ragged profiles");
    k = std::min<int>(k, static_cast<int>(profiles.size()));

    KmeansResult res;
    res.centroids = init && !init->empty() ? *init : kmeanspp_init(profiles, k, rng);
    if (static_cast<int>(res.centroids.size()) != k)
        throw ValidationError("kmeans: warm start size != k");
    res.assignments.assign(profiles.size(), 0);

    double prev_sse = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iter; ++iter) {
        // Assign.
        res.sse = 0.0;
        for (std::size_t i = 0; i < profiles.size(); ++i) {
            res.assignments[i] = nearest(profiles[i], res.centroids);
            res.sse += sq_dist(profiles[i], res.centroids[res.assignments[i]]);
        }
        // Update.
        std::vector<DailyProfile> sums(k, DailyProfile(dim, 0.0));
        std::vector<int> counts(k, 0);
        for (std::size_t i = 0; i < profiles.size(); ++i) {
            const int c = res.assignments[i];
            ++counts[c];
            for (std::size_t j = 0; j < dim; ++j) sums[c][j] += profiles[i][j];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Re-seed an empty cluster at the point farthest from its
                // centroid (deterministic: first among ties).
                std::size_t far = 0;
                double fd = -1.0;
                for (std::size_t i = 0; i < profiles.size(); ++i) {
                    const double d = sq_dist(profiles[i], res.centroids[res.assignments[i]]);
                    if (d > fd) {
                        fd = d;
                        far = i;
                    }
                }
                res.centroids[c] = profiles[far];
            } else {
                for (std::size_t j = 0; j < dim; ++j)
                    res.centroids[c][j] = sums[c][j] / counts[c];
            }
        }
        if (prev_sse - res.sse <= tol && iter > 0) break;
        prev_sse = res.sse;
    }
    // Final assignment against the last centroid update.
    res.sse = 0.0;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        res.assignments[i] = nearest(profiles[i], res.centroids);
        res.sse += sq_dist(profiles[i], res.centroids[res.assignments[i]]);
    }
    return res;
}

double cluster_bic(const std::vector<DailyProfile>& profiles,
                   const std::vector<DailyProfile>& centroids,
                   const std::vector<int>& assignments) {
    const double R = static_cast<double>(profiles.size());
    const double M = static_cast<double>(profiles.front().size());
    const int K = static_cast<int>(centroids.size());
    double sse = 0.0;
    std::vector<double> rn(K, 0.0);
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        sse += sq_dist(profiles[i], centroids[assignments[i]]);
        rn[assignments[i]] += 1.0;
    }
    const double denom = std::max(1.0, R - K);
    const double var = std::max(sse / denom, 1e-12);
    const double two_pi = 6.283185307179586476925286766559;
    double loglik = 0.0;
    for (int c = 0; c < K; ++c) {
        if (rn[c] <= 0.0) continue;
        loglik += -0.5 * rn[c] * std::log(two_pi) -
                  0.5 * rn[c] * M * std::log(var) -
                  0.5 * (rn[c] - K) + rn[c] * std::log(rn[c] / R);
    }
    const double params = (K - 1) + M * K + 1;
    return loglik - 0.5 * params * std::log(R);
}

ClusterModel xmeans_cluster(const std::vector<DailyProfile>& profiles,
                            int k_min, int k_max, std::uint64_t seed) {
    if (profiles.empty()) throw ValidationError("xmeans: no profiles");
    if (k_min < 1 || k_min > k_max) throw ValidationError("xmeans: need 1 <= k_min <= k_max");
    const int n = static_cast<int>(profiles.size());
    k_max = std::min(k_max, n);
    k_min = std::min(k_min, n);

    Rng root(seed);
    KmeansResult cur = kmeans(profiles, k_min, root);
    double cur_bic = cluster_bic(profiles, cur.centroids, cur.assignments);

    while (static_cast<int>(cur.centroids.size()) < k_max) {
        const int k = static_cast<int>(cur.centroids.size());
        // Nominate splits: for each cluster, try 2-means on its members and
        // score the local BIC gain.
        struct Candidate {
            int cluster;
            double gain;
            DailyProfile a, b;
        };
        std::vector<Candidate> cands;
        for (int c = 0; c < k; ++c) {
            std::vector<DailyProfile> members;
            for (std::size_t i = 0; i < profiles.size(); ++i)
                if (cur.assignments[i] == c) members.push_back(profiles[i]);
            if (members.size() < 2) continue;
            double local_sse = 0.0;
            for (const auto& m : members) local_sse += sq_dist(m, cur.centroids[c]);
            if (local_sse <= 0.0) continue; // nothing to gain from splitting
            Rng sub = root.fork(static_cast<std::uint64_t>(c) + 1);
            KmeansResult two = kmeans(members, 2, sub);
            if (two.centroids.size() < 2) continue;
            std::vector<int> ones(members.size(), 0);
            const double parent = cluster_bic(members, {cur.centroids[c]}, ones);
            const double child = cluster_bic(members, two.centroids, two.assignments);
            if (child > parent)
                cands.push_back({c, child - parent, two.centroids[0], two.centroids[1]});
        }
        if (cands.empty()) break;
        std::stable_sort(cands.begin(), cands.end(),
                         [](const Candidate& x, const Candidate& y) { return x.gain > y.gain; });
        bool accepted = false;
        for (const auto& cand : cands) {
            std::vector<DailyProfile> warm;
            warm.reserve(k + 1);
            for (int c = 0; c < k; ++c) {
                if (c == cand.cluster) {
                    warm.push_back(cand.a);
                    warm.push_back(cand.b);
                } else {
                    warm.push_back(cur.centroids[c]);
                }
            }
            Rng refit = root.fork(0);
            KmeansResult next = kmeans(profiles, k + 1, refit, 1e-6, 200, &warm);
            const double next_bic = cluster_bic(profiles, next.centroids, next.assignments);
            if (next_bic > cur_bic) {
                cur = std::move(next);
                cur_bic = next_bic;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }

    ClusterModel model;
    model.k = static_cast<int>(cur.centroids.size());
    model.centroids = std::move(cur.centroids);
    model.assignments = std::move(cur.assignments);
    model.bic = cur_bic;
    return model;
}

} // namespace greenmesh
