#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace erb {

struct Clustering1D {
    std::vector<double> centers;       // by cluster id
    std::vector<int> assignment;       // cluster id per input point
    std::vector<std::int64_t> sizes;   // points per cluster, all >= 1
    int iterations = 0;
    bool converged = false;
};

struct KmeansOptions {
    int max_iter = 100;
    // When set, throws Error if within-cluster cost increases between
    // consecutive Lloyd steps.
    bool check_monotonic = false;
};

// Seeded k-means++ (first center uniform, later centers proportional to the
// squared distance to the nearest chosen one), then Lloyd iterations with
// nearest-center ties going to the lowest center id. Empty clusters are
// repaired by reseeding at the point farthest from its current center.
// Deterministic in (values, k, seed).
Clustering1D kmeanspp_1d(std::span<const double> values, std::size_t k, std::uint64_t seed,
                         const KmeansOptions& opts = {});

inline Clustering1D kmeanspp_1d(std::span<const double> values, std::size_t k, std::uint64_t seed,
                                int max_iter) {
    return kmeanspp_1d(values, k, seed, KmeansOptions{max_iter, false});
}

// Globally optimal 1-D k-means by dynamic programming over sorted values.
// Ties go to the partition with the lexicographically smallest boundaries.
// Clusters are numbered in ascending value order.
Clustering1D exact_kmeans_1d(std::span<const double> values, std::size_t k);

// Within-cluster sum of squares.
double wcss(std::span<const double> values, const Clustering1D& clustering);

} // namespace erb
