#include "erb/cluster1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "erb/replay.hpp"
#include "erb/rng.hpp"

namespace erb {

namespace {

void validate_inputs(std::span<const double> values, std::size_t k) {
    if (k == 0) throw InvalidArgument("kmeans: k must be positive");
    if (k > values.size()) throw InvalidArgument("kmeans: k exceeds the number of points");
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidArgument("kmeans: values must be finite");
    }
}

// Sort order of (value, original index); stable for duplicate values.
std::vector<std::size_t> sorted_order(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return a < b;
    });
    return order;
}

// Every point its own cluster, numbered in ascending value order.
Clustering1D identity_clustering(std::span<const double> values) {
    const std::size_t n = values.size();
    Clustering1D out;
    out.centers.resize(n);
    out.assignment.resize(n);
    out.sizes.assign(n, 1);
    const auto order = sorted_order(values);
    for (std::size_t rank = 0; rank < n; ++rank) {
        out.centers[rank] = values[order[rank]];
        out.assignment[order[rank]] = static_cast<int>(rank);
    }
    out.iterations = 1;
    out.converged = true;
    return out;
}

// k-means++ seeding over the points; returns chosen point positions
// (indices into `pts`).
std::vector<std::size_t> seed_centers(std::span<const double> pts, std::size_t k, Rng& rng) {
    const std::size_t n = pts.size();
    std::vector<std::size_t> chosen;
    chosen.reserve(k);
    std::vector<bool> is_chosen(n, false);

    const std::size_t first = rng.next_index(n);
    chosen.push_back(first);
    is_chosen[first] = true;

    std::vector<double> mind(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = pts[i] - pts[first];
        mind[i] = d * d;
    }
    while (chosen.size() < k) {
        double total = 0.0;
        for (double d : mind) total += d;
        std::size_t pick = n;
        if (total > 0.0) {
            double target = rng.next_double() * total;
            for (std::size_t i = 0; i < n; ++i) {
                target -= mind[i];
                if (target < 0.0 && mind[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
            if (pick == n) {
                // Rounding pushed the target past the end; take the last
                // point with positive mass.
                for (std::size_t i = n; i-- > 0;) {
                    if (mind[i] > 0.0) {
                        pick = i;
                        break;
                    }
                }
            }
        }
        if (pick == n) {
            // All remaining distances are zero (duplicate values): take the
            // lowest unchosen position.
            for (std::size_t i = 0; i < n; ++i) {
                if (!is_chosen[i]) {
                    pick = i;
                    break;
                }
            }
        }
        chosen.push_back(pick);
        is_chosen[pick] = true;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = pts[i] - pts[pick];
            mind[i] = std::min(mind[i], d * d);
        }
    }
    return chosen;
}

struct DistinctCenters {
    std::vector<double> values;  // ascending distinct center values
    std::vector<int> min_id;     // lowest center id at each value
};

DistinctCenters distinct_centers(const std::vector<double>& centers) {
    std::vector<std::pair<double, int>> byval(centers.size());
    for (std::size_t c = 0; c < centers.size(); ++c) {
        byval[c] = {centers[c], static_cast<int>(c)};
    }
    std::sort(byval.begin(), byval.end());
    DistinctCenters out;
    for (const auto& [v, id] : byval) {
        if (out.values.empty() || out.values.back() != v) {
            out.values.push_back(v);
            out.min_id.push_back(id);
        }
    }
    return out;
}

// Nearest center by absolute distance, ties to the lowest center id.
int nearest_center(const DistinctCenters& dc, double v) {
    const auto it = std::lower_bound(dc.values.begin(), dc.values.end(), v);
    const std::size_t right = static_cast<std::size_t>(it - dc.values.begin());
    if (right == dc.values.size()) return dc.min_id[right - 1];
    if (right == 0) return dc.min_id[0];
    const double dl = v - dc.values[right - 1];
    const double dr = dc.values[right] - v;
    if (dl < dr) return dc.min_id[right - 1];
    if (dr < dl) return dc.min_id[right];
    return std::min(dc.min_id[right - 1], dc.min_id[right]);
}

} // namespace

Clustering1D kmeanspp_1d(std::span<const double> values, std::size_t k, std::uint64_t seed,
                         const KmeansOptions& opts) {
    validate_inputs(values, k);
    if (opts.max_iter <= 0) throw InvalidArgument("kmeans: max_iter must be positive");
    const std::size_t n = values.size();
    if (k == n) return identity_clustering(values);

    const auto order = sorted_order(values);
    std::vector<double> sv(n);
    for (std::size_t p = 0; p < n; ++p) sv[p] = values[order[p]];

    Rng rng(seed);
    std::vector<double> centers(k);
    {
        const auto chosen = seed_centers(sv, k, rng);
        for (std::size_t c = 0; c < k; ++c) centers[c] = sv[chosen[c]];
    }

    std::vector<int> assign(n, -1);
    std::vector<int> prev_assign;
    std::vector<std::int64_t> sizes(k, 0);
    double prev_cost = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;

    const auto cost_of = [&]() {
        long double cost = 0.0L;
        for (std::size_t p = 0; p < n; ++p) {
            const long double d = sv[p] - centers[assign[p]];
            cost += d * d;
        }
        return static_cast<double>(cost);
    };
    const auto check_cost = [&](double cost) {
        if (opts.check_monotonic && cost > prev_cost * (1.0 + 1e-12) + 1e-12) {
            throw Error("kmeans: within-cluster cost increased during Lloyd iteration");
        }
        prev_cost = cost;
    };

    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        iterations = iter;
        prev_assign = assign;

        const DistinctCenters dc = distinct_centers(centers);
        std::fill(sizes.begin(), sizes.end(), 0);
        for (std::size_t p = 0; p < n; ++p) {
            assign[p] = nearest_center(dc, sv[p]);
            ++sizes[assign[p]];
        }

        // Reseed every empty cluster at the point farthest from its current
        // center; donor clusters must keep at least one point.
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] != 0) continue;
            std::size_t best = n;
            double best_dist = -1.0;
            for (std::size_t p = 0; p < n; ++p) {
                if (sizes[assign[p]] < 2) continue;
                const double d = std::abs(sv[p] - centers[assign[p]]);
                if (d > best_dist ||
                    (d == best_dist && best != n && order[p] < order[best])) {
                    best_dist = d;
                    best = p;
                }
            }
            --sizes[assign[best]];
            assign[best] = static_cast<int>(c);
            sizes[c] = 1;
            centers[c] = sv[best];
        }
        check_cost(cost_of());

        // Recompute centers as cluster means.
        std::vector<long double> sums(k, 0.0L);
        for (std::size_t p = 0; p < n; ++p) sums[assign[p]] += sv[p];
        std::vector<double> new_centers(k);
        for (std::size_t c = 0; c < k; ++c) {
            new_centers[c] = static_cast<double>(sums[c] / static_cast<long double>(sizes[c]));
        }
        const bool centers_stable = (new_centers == centers);
        centers = std::move(new_centers);
        check_cost(cost_of());

        if (centers_stable || assign == prev_assign) {
            converged = true;
            break;
        }
    }

    Clustering1D out;
    out.centers = std::move(centers);
    out.sizes = std::move(sizes);
    out.assignment.resize(n);
    for (std::size_t p = 0; p < n; ++p) out.assignment[order[p]] = assign[p];
    out.iterations = iterations;
    out.converged = converged;
    return out;
}

Clustering1D exact_kmeans_1d(std::span<const double> values, std::size_t k) {
    validate_inputs(values, k);
    const std::size_t n = values.size();
    const auto order = sorted_order(values);
    std::vector<double> sv(n);
    for (std::size_t p = 0; p < n; ++p) sv[p] = values[order[p]];

    // Prefix sums for O(1) segment costs.
    std::vector<long double> pre(n + 1, 0.0L), pre2(n + 1, 0.0L);
    for (std::size_t i = 0; i < n; ++i) {
        pre[i + 1] = pre[i] + sv[i];
        pre2[i + 1] = pre2[i] + static_cast<long double>(sv[i]) * sv[i];
    }
    const auto seg_cost = [&](std::size_t i, std::size_t j) {  // inclusive [i, j]
        const long double s = pre[j + 1] - pre[i];
        const long double s2 = pre2[j + 1] - pre2[i];
        const long double len = static_cast<long double>(j - i + 1);
        const long double c = s2 - s * s / len;
        return c > 0.0L ? c : 0.0L;
    };

    // suffix[m][i]: optimal cost of clustering sv[i..n-1] into m clusters.
    constexpr long double kInf = std::numeric_limits<long double>::infinity();
    std::vector<std::vector<long double>> suffix(k + 1, std::vector<long double>(n + 1, kInf));
    for (std::size_t i = 0; i < n; ++i) suffix[1][i] = seg_cost(i, n - 1);
    for (std::size_t m = 2; m <= k; ++m) {
        // Need at least m points in sv[i..n-1].
        for (std::size_t i = 0; i + m <= n; ++i) {
            long double best = kInf;
            for (std::size_t j = i; j + m <= n; ++j) {
                const long double c = seg_cost(i, j) + suffix[m - 1][j + 1];
                if (c < best) best = c;
            }
            suffix[m][i] = best;
        }
    }

    // Front-first greedy reconstruction: smallest segment end first yields the
    // lexicographically smallest boundaries among optimal partitions.
    Clustering1D out;
    out.centers.resize(k);
    out.sizes.resize(k);
    out.assignment.resize(n);
    std::size_t i = 0;
    for (std::size_t m = k; m >= 1; --m) {
        const std::size_t cluster = k - m;
        std::size_t end = n - m;  // last point of this segment if the rest get one each
        if (m > 1) {
            for (std::size_t j = i; j + m <= n; ++j) {
                if (seg_cost(i, j) + suffix[m - 1][j + 1] == suffix[m][i]) {
                    end = j;
                    break;
                }
            }
        } else {
            end = n - 1;
        }
        const long double s = pre[end + 1] - pre[i];
        const std::size_t len = end - i + 1;
        out.centers[cluster] = static_cast<double>(s / static_cast<long double>(len));
        out.sizes[cluster] = static_cast<std::int64_t>(len);
        for (std::size_t p = i; p <= end; ++p) out.assignment[order[p]] = static_cast<int>(cluster);
        i = end + 1;
    }
    out.iterations = 1;
    out.converged = true;
    return out;
}

double wcss(std::span<const double> values, const Clustering1D& clustering) {
    if (values.size() != clustering.assignment.size()) {
        throw InvalidArgument("wcss: assignment length does not match values");
    }
    long double cost = 0.0L;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const long double d = values[i] - clustering.centers[clustering.assignment[i]];
        cost += d * d;
    }
    return static_cast<double>(cost);
}

} // namespace erb
