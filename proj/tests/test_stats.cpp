#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sselab/error.hpp"
#include "sselab/stats.hpp"

using namespace sselab;
using namespace sselab::stats;

TEST_CASE("exact sum is order independent") {
  std::vector<double> v{1e16, 1.0, -1e16};
  CHECK(exact_sum(v) == 1.0);
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> xs(10000);
  for (double& x : xs) x = u(g) * std::pow(10.0, 8 * u(g));
  const double ref = exact_sum(xs);
  for (int i = 0; i < 5; ++i) {
    std::shuffle(xs.begin(), xs.end(), g);
    CHECK(exact_sum(xs) == ref);
  }
}

TEST_CASE("summary statistics") {
  std::vector<double> v{1, 2, 3, 4};
  const auto s = summary(std::span<const double>(v));
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.variance == doctest::Approx(5.0 / 3.0));
  CHECK(s.stderr_mean == doctest::Approx(std::sqrt(5.0 / 12.0)));
  CHECK(s.n == 4);
  SampleSet w{{0.0, 1.0}, {0.25, 0.75}};
  CHECK(summary(w).mean == doctest::Approx(0.75));
  SampleSet bad{{0.0, 1.0}, {0.5, 0.6}};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("kernel density estimate") {
  std::mt19937_64 g(2);
  std::normal_distribution<double> d(0.0, 1.0);
  SampleSet s;
  for (int i = 0; i < 5000; ++i) s.values.push_back(d(g));
  const double sd = std::sqrt(summary(s).variance);
  CHECK(silverman_bandwidth(s) == doctest::Approx(1.06 * sd * std::pow(5000.0, -0.2)));
  std::vector<double> grid(801);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = -8.0 + 16.0 * i / 800.0;
  const auto k = kde(s, grid);
  CHECK(trapezoid(grid, k.values) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(k.values[400] == doctest::Approx(1.0 / std::sqrt(2 * std::numbers::pi)).epsilon(0.05));
  SampleSet flat{std::vector<double>(20, 1.0), {}};
  std::vector<double> fg(101);
  for (std::size_t i = 0; i < fg.size(); ++i) fg[i] = i / 100.0;
  const auto fk = kde(flat, fg);
  CHECK(fk.degenerate);
  CHECK(trapezoid(fg, fk.values) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("Kolmogorov-Smirnov distance") {
  SampleSet a{{1, 2, 3, 4}, {}}, b{{1, 2, 3, 4}, {}}, c{{10, 11}, {}};
  CHECK(ks_distance(a, b) == 0.0);
  CHECK(ks_distance(a, c) == 1.0);
  SampleSet d{{1, 2}, {}};
  CHECK(ks_distance(a, d) == doctest::Approx(0.5));
  CHECK(ks_critical(1.36, 2000, 2000) == doctest::Approx(1.36 * std::sqrt(2.0 / 2000)));
  const auto e = ecdf(a, std::vector<double>{0.0, 2.0, 2.5, 9.0});
  CHECK(e == std::vector<double>{0.0, 0.5, 0.5, 1.0});
}

TEST_CASE("histogram density integrates to one") {
  std::vector<double> v{0.1, 0.2, 0.25, 0.7, 0.9};
  const auto h = histogram(v, 0.0, 1.0, 4);
  double mass = 0.0;
  for (std::size_t i = 0; i < h.density.size(); ++i) mass += h.density[i] * (h.edges[i + 1] - h.edges[i]);
  CHECK(mass == doctest::Approx(1.0));
  CHECK(h.density[0] == doctest::Approx(2 / 5.0 / 0.25));  // 0.25 opens the second bin
}
