#pragma once

#include <span>
#include <vector>

#include "erb/replay.hpp"

namespace erb {

// Weighted empirical 1-D distribution.
struct WeightedSample {
    std::vector<double> values;
    std::vector<double> weights;  // positive, same length as values

    static WeightedSample unit(std::vector<double> values);
};

// Exact Wasserstein-1 between two weighted empirical distributions
// (weights normalized to 1).
double wasserstein1(const WeightedSample& a, const WeightedSample& b);

// Kolmogorov-Smirnov statistic: sup |F_a - F_b| over the merged support.
double ks_stat(const WeightedSample& a, const WeightedSample& b);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    int n = 0;
    double mean_diff = 0.0;
};

// Two-sided paired t-test on equal-length samples. Throws InvalidArgument
// for n < 2 or zero-variance differences.
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b);

double regularized_incomplete_beta(double x, double a, double b);
double student_t_cdf(double x, double dof);

struct HistogramBin {
    double left = 0.0;
    double right = 0.0;
    double density_original = 0.0;
    double density_compressed = 0.0;
};

struct DistributionReport {
    double w1 = 0.0;
    double ks = 0.0;
    std::vector<HistogramBin> bins;
};

// W1 and KS between the original rewards (unit weights) and the compressed
// representatives (entry weights), plus aligned fixed-bin histograms.
DistributionReport distribution_report(const ReplayBuffer& original, const CompressedERB& compressed,
                                       int num_bins = 50);

DistributionReport distribution_report(const WeightedSample& original, const WeightedSample& compressed,
                                       int num_bins = 50);

} // namespace erb
