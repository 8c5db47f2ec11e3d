#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "erb/replay.hpp"

namespace erb {

struct CompressionSpec {
    Method method = Method::coreset;
    double ratio = 1.0;  // R >= 1
    std::uint64_t seed = 0;
    int max_iter = 100;                               // coreset clustering only
    std::optional<std::vector<double>> scores;        // sensitivity only, positive, length N
    std::optional<std::vector<int>> group_labels;     // group only, length N
};

// Dispatches on spec.method.
CompressedERB compress(const ReplayBuffer& buffer, const CompressionSpec& spec);

// k-means++ on rewards into k = max(1, floor(N/R)) clusters; one
// representative per cluster (reward nearest the center, ties to the lowest
// buffer index) weighted by cluster size. Entries ordered by ascending center.
CompressedERB compress_coreset(const ReplayBuffer& buffer, const CompressionSpec& spec);

// m experiences sampled uniformly without replacement, each weighted N/m and
// integerized by largest remainder.
CompressedERB compress_uniform(const ReplayBuffer& buffer, const CompressionSpec& spec);

// Nearest-rank quantiles of the reward distribution at midpoint levels
// (j - 0.5)/m.
CompressedERB compress_icdf(const ReplayBuffer& buffer, const CompressionSpec& spec);

// m draws with replacement, probability proportional to spec.scores; draws
// carry weight T/(m q_i), duplicates merge, then largest-remainder rounding.
CompressedERB sensitivity_sample(const ReplayBuffer& buffer, const CompressionSpec& spec);

// floor(m/g) uniform draws per group, weighted so each group's weights sum to
// its size.
CompressedERB group_sample(const ReplayBuffer& buffer, const CompressionSpec& spec);

// Full-size buffer with every entry repeated `weight` times, in entry order.
ReplayBuffer unpack(const CompressedERB& compressed);

// Every experience kept with weight 1, in buffer order (ratio 1).
CompressedERB wrap_identity(const ReplayBuffer& buffer);

// Scales raw nonnegative targets to integers summing to `total` by the
// largest-remainder rule (ties to the earlier index), with every entry
// getting at least 1. Requires total >= raw.size().
std::vector<std::uint64_t> largest_remainder_weights(std::span<const double> raw, std::uint64_t total);

} // namespace erb
