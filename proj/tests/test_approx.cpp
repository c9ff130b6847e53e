#include <doctest.h>

#include <cmath>

#include "sselab/approx.hpp"
#include "sselab/laws.hpp"

using namespace sselab;
using namespace sselab::approx;

namespace {
const std::complex<double> I1{0.0, 1.0};
}

TEST_CASE("first-order matrix entries") {
  const double g = 0.2, k = 0.1;
  const auto m0 = first_order_matrix(0.0, g, k);
  CHECK(std::abs(m0(0, 0) + g * g) < 1e-15);
  CHECK(std::abs(m0(0, 1) - g * g) < 1e-15);
  CHECK(std::abs(m0(0, 2) - I1 * k) < 1e-15);
  CHECK(std::abs(m0(2, 0) - 2.0 * I1 * (-g * g)) < 1e-15);  // p = -gamma^2 at t = 0
  const auto minf = first_order_matrix(1e4, g, k);
  CHECK(std::abs(minf(2, 0) - 2.0 * I1 * (-g * g / 2)) < 1e-14);
  CHECK(calibrated_second_moment(g, 0.0, 3.0) == doctest::Approx(0.12));
}

TEST_CASE("second-order matrix entries") {
  const double g = 0.3, k = 0.2, t = 1.5;
  const auto m = second_order_matrix(t, g, k);
  CHECK(std::abs(m(5, 5) + (3 * k + 2 * g * g)) < 1e-15);
  CHECK(std::abs(m(3, 0) - g * g) < 1e-15);
  CHECK(std::abs(m(3, 3) + (2 * k + g * g)) < 1e-15);
  const double q = k * calibrated_second_moment(g, k, t) - 2 * g * g;
  CHECK(std::abs(m(5, 3) - 2.0 * I1 * q) < 1e-15);
  CHECK(std::abs(m(5, 4) + 2.0 * I1 * q) < 1e-15);
}

TEST_CASE("noiseless closure keeps fidelity one") {
  for (int order : {1, 2}) {
    const auto s = integrate_closure(ClosureSystem::pauli(order, 0.0, 0.0, 0.3), 5.0, 1e-2);
    for (double f : s.fidelity) CHECK(f == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("RK4 self-convergence") {
  for (int order : {1, 2}) {
    const auto sys = ClosureSystem::pauli(order, 0.0, 0.2, 0.1);
    const auto a = integrate_closure(sys, 10.0, 1e-3);
    const auto b = integrate_closure(sys, 10.0, 5e-4);
    CHECK(std::abs(a.fidelity.back() - b.fidelity.back()) <= 1e-8);
  }
}

TEST_CASE("short-time agreement with the exact mean") {
  const double g = 0.2, k = 0.1, t = 1e-3;
  const double exact = laws::series_mean_variance(laws::pauli_law(0.0), NoiseModel::ou(g, k), t).mean;
  for (int order : {1, 2}) {
    const auto s = integrate_closure(ClosureSystem::pauli(order, 0.0, g, k), t, 1e-4);
    CHECK(std::abs(s.fidelity.back() - exact) < 10 * t * t * g * g);
  }
}

TEST_CASE("second order tracks the exact mean at least as well as first order") {
  const double g = 0.2, k = 0.1;
  const auto o1 = integrate_closure(ClosureSystem::pauli(1, 0.0, g, k), 30.0, 1e-3, 10);
  const auto o2 = integrate_closure(ClosureSystem::pauli(2, 0.0, g, k), 30.0, 1e-3, 10);
  std::size_t stop = o1.t.size();
  for (std::size_t j = 0; j < o1.t.size(); ++j)
    if (o1.fidelity[j] < 0.95 || o1.fidelity[j] > 1.0) {
      stop = j;
      break;
    }
  REQUIRE(stop < o1.t.size());
  double e1 = 0, e2 = 0;
  for (std::size_t j = 0; j <= stop; ++j) {
    const double ex = laws::series_mean_variance(laws::pauli_law(0.0), NoiseModel::ou(g, k), o1.t[j]).mean;
    e1 = std::max(e1, std::abs(o1.fidelity[j] - ex));
    e2 = std::max(e2, std::abs(o2.fidelity[j] - ex));
  }
  CHECK(e2 <= e1);
  CHECK(o1.max_imag_residue < 1e-12);
}
