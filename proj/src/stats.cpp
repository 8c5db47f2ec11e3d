#include "erb/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace erb {

namespace {

void validate_sample(const WeightedSample& s, const char* name) {
    if (s.values.empty()) throw InvalidArgument(std::string(name) + ": empty sample");
    if (s.values.size() != s.weights.size()) {
        throw InvalidArgument(std::string(name) + ": values and weights differ in length");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (!std::isfinite(s.values[i])) throw InvalidArgument(std::string(name) + ": non-finite value");
        if (!(s.weights[i] > 0.0) || !std::isfinite(s.weights[i])) {
            throw InvalidArgument(std::string(name) + ": weights must be positive and finite");
        }
        total += s.weights[i];
    }
    if (!(total > 0.0)) throw InvalidArgument(std::string(name) + ": weight sum must be positive");
}

struct MassPoint {
    double value;
    double mass_a;
    double mass_b;
};

// Merged support with per-point normalized masses, ascending by value.
std::vector<MassPoint> merged_support(const WeightedSample& a, const WeightedSample& b) {
    const double total_a = std::accumulate(a.weights.begin(), a.weights.end(), 0.0);
    const double total_b = std::accumulate(b.weights.begin(), b.weights.end(), 0.0);

    std::vector<MassPoint> pts;
    pts.reserve(a.values.size() + b.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        pts.push_back({a.values[i], a.weights[i] / total_a, 0.0});
    }
    for (std::size_t i = 0; i < b.values.size(); ++i) {
        pts.push_back({b.values[i], 0.0, b.weights[i] / total_b});
    }
    std::sort(pts.begin(), pts.end(),
              [](const MassPoint& x, const MassPoint& y) { return x.value < y.value; });

    std::vector<MassPoint> merged;
    for (const auto& p : pts) {
        if (!merged.empty() && merged.back().value == p.value) {
            merged.back().mass_a += p.mass_a;
            merged.back().mass_b += p.mass_b;
        } else {
            merged.push_back(p);
        }
    }
    return merged;
}

} // namespace

WeightedSample WeightedSample::unit(std::vector<double> values) {
    WeightedSample s;
    s.weights.assign(values.size(), 1.0);
    s.values = std::move(values);
    return s;
}

double wasserstein1(const WeightedSample& a, const WeightedSample& b) {
    validate_sample(a, "wasserstein1(a)");
    validate_sample(b, "wasserstein1(b)");
    const auto merged = merged_support(a, b);
    double fa = 0.0, fb = 0.0;
    double w1 = 0.0;
    for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
        fa += merged[i].mass_a;
        fb += merged[i].mass_b;
        w1 += std::abs(fa - fb) * (merged[i + 1].value - merged[i].value);
    }
    return w1;
}

double ks_stat(const WeightedSample& a, const WeightedSample& b) {
    validate_sample(a, "ks_stat(a)");
    validate_sample(b, "ks_stat(b)");
    const auto merged = merged_support(a, b);
    double fa = 0.0, fb = 0.0;
    double ks = 0.0;
    for (const auto& p : merged) {
        fa += p.mass_a;
        fb += p.mass_b;
        ks = std::max(ks, std::abs(fa - fb));
    }
    return std::min(ks, 1.0);
}

namespace {

// Continued fraction for the regularized incomplete beta (modified Lentz).
double betacf(double x, double a, double b) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-15;
    constexpr int max_terms = 500;

    double c = 1.0;
    double d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_terms; ++m) {
        const double m2 = 2.0 * m;
        double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
        d = 1.0 + num * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + num / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
        d = 1.0 + num * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + num / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double mult = d * c;
        h *= mult;
        if (std::abs(mult - 1.0) <= eps) break;
    }
    return h;
}

} // namespace

double regularized_incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
        throw InvalidArgument("regularized_incomplete_beta: need a,b > 0 and x in [0,1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(x, a, b) / a;
    }
    return 1.0 - front * betacf(1.0 - x, b, a) / b;
}

double student_t_cdf(double x, double dof) {
    if (!(dof > 0.0)) throw InvalidArgument("student_t_cdf: dof must be positive");
    const double tail = regularized_incomplete_beta(dof / (dof + x * x), 0.5 * dof, 0.5) / 2.0;
    return x >= 0.0 ? 1.0 - tail : tail;
}

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidArgument("paired_ttest: samples differ in length");
    const std::size_t n = a.size();
    if (n < 2) throw InvalidArgument("paired_ttest: need at least 2 pairs");

    long double sum = 0.0L;
    for (std::size_t i = 0; i < n; ++i) sum += static_cast<long double>(a[i]) - b[i];
    const double mean = static_cast<double>(sum / static_cast<long double>(n));

    long double ss = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const long double d = (static_cast<long double>(a[i]) - b[i]) - mean;
        ss += d * d;
    }
    const double var = static_cast<double>(ss / static_cast<long double>(n - 1));
    if (!(var > 0.0)) {
        throw InvalidArgument("paired_ttest: zero-variance differences (degenerate pairing)");
    }

    TTestResult r;
    r.n = static_cast<int>(n);
    r.mean_diff = mean;
    r.t = mean / std::sqrt(var / static_cast<double>(n));
    const double dof = static_cast<double>(n - 1);
    // Two-sided tail: P(|T| >= |t|) = I_{dof/(dof+t^2)}(dof/2, 1/2).
    r.p = regularized_incomplete_beta(dof / (dof + r.t * r.t), 0.5 * dof, 0.5);
    r.p = std::clamp(r.p, 0.0, 1.0);
    return r;
}

DistributionReport distribution_report(const WeightedSample& original, const WeightedSample& compressed,
                                       int num_bins) {
    validate_sample(original, "distribution_report(original)");
    validate_sample(compressed, "distribution_report(compressed)");
    if (num_bins < 1) throw InvalidArgument("distribution_report: num_bins must be positive");

    DistributionReport report;
    report.w1 = wasserstein1(original, compressed);
    report.ks = ks_stat(original, compressed);

    double lo = original.values[0], hi = original.values[0];
    for (double v : original.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (double v : compressed.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double width = (hi - lo) / num_bins;

    report.bins.resize(num_bins);
    for (int i = 0; i < num_bins; ++i) {
        report.bins[i].left = lo + width * i;
        report.bins[i].right = (i + 1 == num_bins) ? hi : lo + width * (i + 1);
    }
    const auto accumulate = [&](const WeightedSample& s, bool into_original) {
        const double total = std::accumulate(s.weights.begin(), s.weights.end(), 0.0);
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            int bin = static_cast<int>((s.values[i] - lo) / width);
            bin = std::clamp(bin, 0, num_bins - 1);
            const double density = s.weights[i] / total / width;
            if (into_original) {
                report.bins[bin].density_original += density;
            } else {
                report.bins[bin].density_compressed += density;
            }
        }
    };
    accumulate(original, true);
    accumulate(compressed, false);
    return report;
}

DistributionReport distribution_report(const ReplayBuffer& original, const CompressedERB& compressed,
                                       int num_bins) {
    if (original.empty()) throw InvalidArgument("distribution_report: empty original buffer");
    if (compressed.entries.empty()) throw InvalidArgument("distribution_report: empty compressed buffer");
    WeightedSample orig = WeightedSample::unit(original.reward_vector());
    WeightedSample comp;
    comp.values = compressed.reward_vector();
    comp.weights.reserve(compressed.entries.size());
    for (const auto& we : compressed.entries) {
        comp.weights.push_back(static_cast<double>(we.weight));
    }
    return distribution_report(orig, comp, num_bins);
}

} // namespace erb
