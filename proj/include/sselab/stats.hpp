#pragma once

#include <span>
#include <vector>

namespace sselab::stats {

/// Sample values with optional non-negative weights summing to one.
struct SampleSet {
  std::vector<double> values;
  std::vector<double> weights;

  bool weighted() const { return !weights.empty(); }
  void validate() const;
};

struct Summary {
  double mean = 0.0;
  double variance = 0.0;
  double stderr_mean = 0.0;
  std::size_t n = 0;
};

/// Correctly rounded sum (Shewchuk partials), independent of input order.
double exact_sum(std::span<const double> values);

/// Mean, unbiased variance and standard error; needs n >= 2.
Summary summary(const SampleSet& s);
Summary summary(std::span<const double> values);

double silverman_bandwidth(const SampleSet& s);

struct Density {
  std::vector<double> values;
  double bandwidth = 0.0;
  bool degenerate = false;
};

/// Gaussian kernel density estimate on `grid` with the Silverman bandwidth.
/// A zero-variance sample falls back to a kernel one grid step wide and sets
/// `degenerate`.
Density kde(const SampleSet& s, std::span<const double> grid);

/// Trapezoid rule on a (possibly non-uniform) grid.
double trapezoid(std::span<const double> grid, std::span<const double> values);

/// Empirical CDF of `s` evaluated at each grid point.
std::vector<double> ecdf(const SampleSet& s, std::span<const double> grid);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_distance(const SampleSet& a, const SampleSet& b);

/// Two-sample KS critical value c(alpha) sqrt((n + m) / (n m)) for the
/// asymptotic Kolmogorov distribution.
double ks_critical(double c_alpha, std::size_t n, std::size_t m);

struct Histogram {
  std::vector<double> edges;
  std::vector<double> density;
};

Histogram histogram(std::span<const double> values, double lo, double hi, int bins);

}  // namespace sselab::stats
