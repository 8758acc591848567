#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gff {

struct Summary {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
  std::size_t n = 0;
};

Summary summarize(std::span<const double> xs);

// log sum_i exp(x_i), two-pass with the max subtracted.
double log_sum_exp(std::span<const double> xs);

double normal_cdf(double x);

// Two-sample Kolmogorov-Smirnov.  Inputs need not be sorted.
struct KsResult {
  double stat = 0.0;
  double p_value = 1.0;
  std::size_t n1 = 0, n2 = 0;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// One-sample KS against a continuous CDF.
KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);

// Kolmogorov tail Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double ks_tail(double lambda);

double pearson_correlation(std::span<const double> x, std::span<const double> y);

// P(X >= a) for each threshold, from a sample.
std::vector<double> exceedance_probabilities(std::span<const double> xs,
                                             std::span<const double> thresholds);

}  // namespace gff
