#include "sselab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "sselab/error.hpp"

namespace sselab::stats {

void SampleSet::validate() const {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample set");
  for (double v : values)
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "sample value");
  if (weighted()) {
    if (weights.size() != values.size()) throw Error(ErrorKind::DimensionMismatch, "weights vs values");
    for (double w : weights)
      if (!(w >= 0.0)) throw Error(ErrorKind::InvalidArgument, "negative weight");
    if (std::abs(exact_sum(weights) - 1.0) > 1e-9) throw Error(ErrorKind::InvalidArgument, "weights must sum to 1");
  }
}

double exact_sum(std::span<const double> values) {
  std::vector<double> partials;
  for (double x : values) {
    std::size_t i = 0;
    for (double y : partials) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[i++] = lo;
      x = hi;
    }
    partials.resize(i);
    partials.push_back(x);
  }
  // Round the partials to nearest, including the half-way correction.
  if (partials.empty()) return 0.0;
  auto n = partials.size();
  double hi = partials[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

Summary summary(const SampleSet& s) {
  s.validate();
  const std::size_t n = s.values.size();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "summary needs at least two samples");
  std::vector<double> terms(n);
  Summary out;
  out.n = n;
  if (!s.weighted()) {
    out.mean = exact_sum(s.values) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) terms[i] = (s.values[i] - out.mean) * (s.values[i] - out.mean);
    out.variance = exact_sum(terms) / static_cast<double>(n - 1);
  } else {
    for (std::size_t i = 0; i < n; ++i) terms[i] = s.weights[i] * s.values[i];
    out.mean = exact_sum(terms);
    std::vector<double> w2(n);
    for (std::size_t i = 0; i < n; ++i) {
      terms[i] = s.weights[i] * (s.values[i] - out.mean) * (s.values[i] - out.mean);
      w2[i] = s.weights[i] * s.weights[i];
    }
    const double denom = 1.0 - exact_sum(w2);
    out.variance = denom > 0.0 ? exact_sum(terms) / denom : 0.0;
  }
  out.stderr_mean = std::sqrt(out.variance / static_cast<double>(n));
  return out;
}

Summary summary(std::span<const double> values) {
  return summary(SampleSet{std::vector<double>(values.begin(), values.end()), {}});
}

double silverman_bandwidth(const SampleSet& s) {
  const Summary sm = summary(s);
  return 1.06 * std::sqrt(sm.variance) * std::pow(static_cast<double>(sm.n), -0.2);
}

Density kde(const SampleSet& s, std::span<const double> grid) {
  s.validate();
  if (s.values.size() < 10) throw Error(ErrorKind::InvalidArgument, "kde needs at least 10 samples");
  Density out;
  out.bandwidth = silverman_bandwidth(s);
  if (out.bandwidth <= 0.0) {
    out.degenerate = true;
    out.bandwidth = grid.size() > 1 ? std::abs(grid[1] - grid[0]) : 1e-6;
  }
  const double n = static_cast<double>(s.values.size());
  const double norm = 1.0 / (out.bandwidth * std::sqrt(2.0 * std::numbers::pi));
  out.values.resize(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      const double z = (grid[g] - s.values[i]) / out.bandwidth;
      const double w = s.weighted() ? s.weights[i] : 1.0 / n;
      acc += w * std::exp(-0.5 * z * z);
    }
    out.values[g] = norm * acc;
  }
  return out;
}

double trapezoid(std::span<const double> grid, std::span<const double> values) {
  if (grid.size() != values.size()) throw Error(ErrorKind::DimensionMismatch, "trapezoid");
  double acc = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) acc += 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
  return acc;
}

namespace {

struct Sorted {
  std::vector<double> x;
  std::vector<double> cum;  // cumulative weight up to and including x[i]
};

Sorted sorted_cdf(const SampleSet& s) {
  s.validate();
  std::vector<std::size_t> idx(s.values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s.values[a] < s.values[b]; });
  Sorted out;
  out.x.reserve(idx.size());
  out.cum.reserve(idx.size());
  const double uw = 1.0 / static_cast<double>(idx.size());
  double c = 0.0;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    c += s.weighted() ? s.weights[idx[j]] : uw;
    out.x.push_back(s.values[idx[j]]);
    out.cum.push_back(s.weighted() ? c : static_cast<double>(j + 1) * uw);
  }
  return out;
}

}  // namespace

std::vector<double> ecdf(const SampleSet& s, std::span<const double> grid) {
  const Sorted sc = sorted_cdf(s);
  std::vector<double> out(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto it = std::upper_bound(sc.x.begin(), sc.x.end(), grid[g]);
    out[g] = it == sc.x.begin() ? 0.0 : sc.cum[static_cast<std::size_t>(it - sc.x.begin()) - 1];
  }
  return out;
}

double ks_distance(const SampleSet& a, const SampleSet& b) {
  const Sorted sa = sorted_cdf(a);
  const Sorted sb = sorted_cdf(b);
  std::size_t i = 0, j = 0;
  double fa = 0.0, fb = 0.0, d = 0.0;
  while (i < sa.x.size() || j < sb.x.size()) {
    double x;
    if (j >= sb.x.size() || (i < sa.x.size() && sa.x[i] <= sb.x[j]))
      x = sa.x[i];
    else
      x = sb.x[j];
    while (i < sa.x.size() && sa.x[i] <= x) fa = sa.cum[i++];
    while (j < sb.x.size() && sb.x[j] <= x) fb = sb.cum[j++];
    d = std::max(d, std::abs(fa - fb));
  }
  return std::min(d, 1.0);
}

double ks_critical(double c_alpha, std::size_t n, std::size_t m) {
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return c_alpha * std::sqrt((nn + mm) / (nn * mm));
}

Histogram histogram(std::span<const double> values, double lo, double hi, int bins) {
  if (bins < 1 || !(hi > lo)) throw Error(ErrorKind::InvalidArgument, "histogram range");
  Histogram h;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  const double w = (hi - lo) / bins;
  for (int i = 0; i <= bins; ++i) h.edges[static_cast<std::size_t>(i)] = lo + w * i;
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (double v : values) {
    if (v < lo || v > hi) continue;
    auto b = static_cast<int>((v - lo) / w);
    if (b == bins) b = bins - 1;
    counts[static_cast<std::size_t>(b)] += 1.0;
  }
  h.density.resize(counts.size());
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < counts.size(); ++i) h.density[i] = n > 0 ? counts[i] / (n * w) : 0.0;
  return h;
}

}  // namespace sselab::stats
