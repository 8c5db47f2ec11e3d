#include "erb/compress.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "erb/cluster1d.hpp"
#include "erb/rng.hpp"

namespace erb {

namespace {

void validate_common(const ReplayBuffer& buffer, const CompressionSpec& spec) {
    if (buffer.empty()) throw InvalidArgument("compress: empty buffer");
    if (!(spec.ratio >= 1.0)) throw InvalidArgument("compress: ratio must be >= 1");
}

CompressedERB make_shell(const ReplayBuffer& buffer, const CompressionSpec& spec) {
    CompressedERB c;
    c.method = spec.method;
    c.ratio = spec.ratio;
    c.original_size = buffer.size();
    c.obs_dim = buffer.obs_dim();
    c.num_actions = buffer.num_actions();
    c.env_id = buffer.env_id();
    c.seed = spec.seed;
    return c;
}

} // namespace

std::vector<std::uint64_t> largest_remainder_weights(std::span<const double> raw, std::uint64_t total) {
    const std::size_t n = raw.size();
    if (n == 0) throw InvalidArgument("largest_remainder_weights: empty targets");
    if (total < n) throw InvalidArgument("largest_remainder_weights: total smaller than entry count");
    double raw_sum = 0.0;
    for (double r : raw) {
        if (!(r >= 0.0) || !std::isfinite(r)) {
            throw InvalidArgument("largest_remainder_weights: targets must be nonnegative");
        }
        raw_sum += r;
    }
    if (!(raw_sum > 0.0)) throw InvalidArgument("largest_remainder_weights: target sum must be positive");

    std::vector<std::uint64_t> weights(n);
    std::vector<std::pair<double, std::size_t>> fractions(n);
    std::uint64_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double quota = raw[i] / raw_sum * static_cast<double>(total);
        const double fl = std::floor(quota);
        weights[i] = static_cast<std::uint64_t>(fl);
        assigned += weights[i];
        fractions[i] = {quota - fl, i};
    }
    // Floating error can leave assigned above total in pathological cases;
    // remainder distribution below assumes assigned <= total.
    while (assigned > total) {
        const auto it = std::max_element(weights.begin(), weights.end());
        --*it;
        --assigned;
    }
    std::uint64_t remainder = total - assigned;
    std::stable_sort(fractions.begin(), fractions.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; i < n && remainder > 0; ++i) {
        ++weights[fractions[i].second];
        --remainder;
    }
    while (remainder > 0) {
        ++weights[0];
        --remainder;
    }
    // Positive-weight invariant: transfer from the heaviest entries into any
    // zero-weight ones.
    for (std::size_t i = 0; i < n; ++i) {
        if (weights[i] > 0) continue;
        std::size_t donor = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (weights[j] >= 2 && (donor == n || weights[j] > weights[donor])) donor = j;
        }
        if (donor == n) throw Error("largest_remainder_weights: cannot satisfy minimum weight 1");
        --weights[donor];
        ++weights[i];
    }
    return weights;
}

CompressedERB compress_coreset(const ReplayBuffer& buffer, const CompressionSpec& spec) {
    validate_common(buffer, spec);
    const std::size_t n = buffer.size();
    const std::size_t k = static_cast<std::size_t>(compressed_entry_target(n, spec.ratio));
    const std::vector<double> rewards = buffer.reward_vector();
    const Clustering1D clustering =
        kmeanspp_1d(rewards, k, spec.seed, KmeansOptions{spec.max_iter, false});

    // Per cluster: member whose reward is nearest the center; ties to the
    // lowest buffer index (the scan order).
    std::vector<std::size_t> rep(k, n);
    std::vector<double> rep_dist(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const int c = clustering.assignment[i];
        const double d = std::abs(rewards[i] - clustering.centers[c]);
        if (rep[c] == n || d < rep_dist[c]) {
            rep[c] = i;
            rep_dist[c] = d;
        }
    }

    std::vector<std::size_t> cluster_order(k);
    std::iota(cluster_order.begin(), cluster_order.end(), std::size_t{0});
    std::sort(cluster_order.begin(), cluster_order.end(), [&](std::size_t a, std::size_t b) {
        if (clustering.centers[a] != clustering.centers[b]) {
            return clustering.centers[a] < clustering.centers[b];
        }
        return rep[a] < rep[b];
    });

    CompressedERB c = make_shell(buffer, spec);
    c.entries.reserve(k);
    for (std::size_t idx : cluster_order) {
        c.entries.push_back({buffer[rep[idx]], static_cast<std::uint64_t>(clustering.sizes[idx])});
    }
    c.validate();
    return c;
}

CompressedERB compress_uniform(const ReplayBuffer& buffer, const CompressionSpec& spec) {
    validate_common(buffer, spec);
    const std::size_t n = buffer.size();
    const std::size_t m = static_cast<std::size_t>(compressed_entry_target(n, spec.ratio));

    Rng rng(spec.seed);
    const std::vector<std::size_t> picks = sample_without_replacement(n, m, rng);
    const std::vector<double> raw(m, static_cast<double>(n) / static_cast<double>(m));
    const std::vector<std::uint64_t> weights = largest_remainder_weights(raw, n);

    CompressedERB c = make_shell(buffer, spec);
    c.entries.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        c.entries.push_back({buffer[picks[i]], weights[i]});
    }
    c.validate();
    return c;
}

CompressedERB compress_icdf(const ReplayBuffer& buffer, const CompressionSpec& spec) {
    validate_common(buffer, spec);
    const std::size_t n = buffer.size();
    const std::size_t m = static_cast<std::size_t>(compressed_entry_target(n, spec.ratio));
    const std::vector<double> rewards = buffer.reward_vector();

    // Stable sort by (reward, buffer index): within tied rewards the lower
    // buffer index comes first, so nearest-rank selection resolves ties
    // toward the lowest index.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rewards[a] != rewards[b]) return rewards[a] < rewards[b];
        return a < b;
    });

    // Quantile level (j - 0.5)/m -> nearest-rank ceil(q * n), 1-based.
    std::vector<std::size_t> reps;      // buffer indices, one per kept entry
    std::vector<double> level_weight;   // per kept entry, merged duplicates
    reps.reserve(m);
    const double per_level = static_cast<double>(n) / static_cast<double>(m);
    for (std::size_t j = 1; j <= m; ++j) {
        const double q = (static_cast<double>(j) - 0.5) / static_cast<double>(m);
        std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
        rank = std::clamp<std::size_t>(rank, 1, n);
        const std::size_t pick = order[rank - 1];
        if (!reps.empty() && reps.back() == pick) {
            level_weight.back() += per_level;
        } else {
            reps.push_back(pick);
            level_weight.push_back(per_level);
        }
    }
    const std::vector<std::uint64_t> weights = largest_remainder_weights(level_weight, n);

    CompressedERB c = make_shell(buffer, spec);
    c.entries.reserve(reps.size());
    for (std::size_t i = 0; i < reps.size(); ++i) {
        c.entries.push_back({buffer[reps[i]], weights[i]});
    }
    c.validate();
    return c;
}

CompressedERB sensitivity_sample(const ReplayBuffer& buffer, const CompressionSpec& spec) {
    validate_common(buffer, spec);
    const std::size_t n = buffer.size();
    if (!spec.scores) throw InvalidArgument("sensitivity_sample: scores are required");
    const std::vector<double>& scores = *spec.scores;
    if (scores.size() != n) throw InvalidArgument("sensitivity_sample: scores length must equal N");
    double total = 0.0;
    for (double q : scores) {
        if (!(q > 0.0) || !std::isfinite(q)) {
            throw InvalidArgument("sensitivity_sample: scores must be positive and finite");
        }
        total += q;
    }
    const std::size_t m = static_cast<std::size_t>(compressed_entry_target(n, spec.ratio));

    std::vector<double> cumulative(n);
    std::partial_sum(scores.begin(), scores.end(), cumulative.begin());

    Rng rng(spec.seed);
    // Draw with replacement proportional to scores; each draw of point i
    // carries weight T/(m q_i); duplicate draws merge by summing.
    std::map<std::size_t, double> drawn;  // buffer index -> merged real weight
    for (std::size_t d = 0; d < m; ++d) {
        const double u = rng.next_double() * total;
        std::size_t i = static_cast<std::size_t>(
            std::lower_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        if (i >= n) i = n - 1;
        drawn[i] += total / (static_cast<double>(m) * scores[i]);
    }

    std::vector<std::size_t> reps;
    std::vector<double> raw;
    reps.reserve(drawn.size());
    for (const auto& [idx, w] : drawn) {
        reps.push_back(idx);
        raw.push_back(w);
    }
    const std::vector<std::uint64_t> weights = largest_remainder_weights(raw, n);

    CompressedERB c = make_shell(buffer, spec);
    c.entries.reserve(reps.size());
    for (std::size_t i = 0; i < reps.size(); ++i) {
        c.entries.push_back({buffer[reps[i]], weights[i]});
    }
    c.validate();
    return c;
}

CompressedERB group_sample(const ReplayBuffer& buffer, const CompressionSpec& spec) {
    validate_common(buffer, spec);
    const std::size_t n = buffer.size();
    if (!spec.group_labels) throw InvalidArgument("group_sample: group labels are required");
    const std::vector<int>& labels = *spec.group_labels;
    if (labels.size() != n) throw InvalidArgument("group_sample: labels length must equal N");

    int max_label = -1;
    for (int l : labels) {
        if (l < 0) throw InvalidArgument("group_sample: labels must be nonnegative");
        max_label = std::max(max_label, l);
    }
    const std::size_t g = static_cast<std::size_t>(max_label) + 1;
    std::vector<std::vector<std::size_t>> groups(g);
    for (std::size_t i = 0; i < n; ++i) groups[labels[i]].push_back(i);
    for (std::size_t gi = 0; gi < g; ++gi) {
        if (groups[gi].empty()) {
            throw InvalidArgument("group_sample: group " + std::to_string(gi) + " is empty");
        }
    }

    const std::size_t m =
        std::max<std::size_t>(g, static_cast<std::size_t>(compressed_entry_target(n, spec.ratio)));
    const std::size_t per_group = m / g;

    Rng rng(spec.seed);
    CompressedERB c = make_shell(buffer, spec);
    for (std::size_t gi = 0; gi < g; ++gi) {
        const auto& members = groups[gi];
        const std::size_t draws = std::min(per_group, members.size());
        const std::vector<std::size_t> picks = sample_without_replacement(members.size(), draws, rng);
        const std::vector<double> raw(draws,
                                      static_cast<double>(members.size()) / static_cast<double>(draws));
        const std::vector<std::uint64_t> weights =
            largest_remainder_weights(raw, static_cast<std::uint64_t>(members.size()));
        for (std::size_t i = 0; i < draws; ++i) {
            c.entries.push_back({buffer[members[picks[i]]], weights[i]});
        }
    }
    c.validate();
    return c;
}

CompressedERB compress(const ReplayBuffer& buffer, const CompressionSpec& spec) {
    switch (spec.method) {
        case Method::coreset: return compress_coreset(buffer, spec);
        case Method::uniform: return compress_uniform(buffer, spec);
        case Method::icdf: return compress_icdf(buffer, spec);
        case Method::sensitivity: return sensitivity_sample(buffer, spec);
        case Method::group: return group_sample(buffer, spec);
    }
    throw InvalidArgument("compress: unknown method");
}

ReplayBuffer unpack(const CompressedERB& compressed) {
    compressed.validate();
    ReplayBuffer buffer(compressed.obs_dim, compressed.num_actions, compressed.env_id);
    for (const auto& we : compressed.entries) {
        for (std::uint64_t i = 0; i < we.weight; ++i) buffer.append(we.exp);
    }
    return buffer;
}

CompressedERB wrap_identity(const ReplayBuffer& buffer) {
    CompressedERB c;
    c.method = Method::uniform;
    c.ratio = 1.0;
    c.original_size = buffer.size();
    c.obs_dim = buffer.obs_dim();
    c.num_actions = buffer.num_actions();
    c.env_id = buffer.env_id();
    c.seed = 0;
    c.entries.reserve(buffer.size());
    for (const auto& e : buffer) c.entries.push_back({e, 1});
    if (!buffer.empty()) c.validate();
    return c;
}

} // namespace erb
