#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "sselab/error.hpp"
#include "sselab/laws.hpp"
#include "sselab/magnus.hpp"

using namespace sselab;
using namespace sselab::laws;
using qstate::Axis;

namespace {
const cplx I1{0.0, 1.0};

// |<phi| exp(-i S dx) |phi>|^2 by direct exponentiation.
double direct_fidelity(const ComplexMatrix& S, const PureState& phi, double dx) {
  const ComplexMatrix U = qstate::mat_exp(ComplexMatrix(-I1 * dx * S));
  return std::norm(phi.amplitudes().dot(U * phi.amplitudes()));
}

PureState random_state(int dim, std::mt19937_64& g) {
  std::normal_distribution<double> d;
  ComplexVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = cplx(d(g), d(g));
  return PureState(v);
}

std::vector<double> grid(int n, double lo = -7.0, double hi = 7.0) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = lo + (hi - lo) * i / (n - 1);
  return x;
}
}  // namespace

TEST_CASE("cosine series arithmetic") {
  const auto c = CosineSeries::from_terms({{1, 1.0}});
  const auto c2 = c * c;
  CHECK(c2.coeff(0) == doctest::Approx(0.5));
  CHECK(c2.coeff(2) == doctest::Approx(0.5));
  const auto a = CosineSeries::from_terms({{0, 0.3}, {1, -0.2}, {3, 0.7}});
  const auto b = CosineSeries::from_terms({{2, 1.1}, {5, 0.4}});
  for (double x : grid(50)) {
    CHECK((a * b)(x) == doctest::Approx(a(x) * b(x)).epsilon(1e-13));
    CHECK((a - b)(x) == doctest::Approx(a(x) - b(x)).epsilon(1e-13));
  }
  CHECK((a * CosineSeries::constant(1.0)).coefficients() == a.coefficients());
  CHECK(a.terms().size() == 3);
}

TEST_CASE("pauli law") {
  CHECK(pauli_law(1.0).max_harmonic() == 0);
  CHECK(pauli_law(1.0)(0.7) == doctest::Approx(1.0));
  CHECK(pauli_law(0.0)(std::numbers::pi / 2) == doctest::Approx(0.0).scale(1.0));
  std::mt19937_64 g(3);
  for (int i = 0; i < 10; ++i) {
    const PureState phi = random_state(2, g);
    const auto X = qstate::pauli(Axis::X);
    const double s0 = qstate::expect_real(X, phi);
    const auto law = pauli_law(s0);
    CHECK(law(0.0) == doctest::Approx(1.0));
    for (double x : grid(21)) {
      CHECK(law(x) == doctest::Approx(std::pow(std::cos(x), 2) + s0 * s0 * std::pow(std::sin(x), 2)));
      CHECK(law(x) == doctest::Approx(direct_fidelity(X, phi, x)).epsilon(1e-12));
    }
  }
  const double th = 0.4;
  CHECK(pauli_law(std::sin(2 * th))(0.0) == doctest::Approx(1.0));
}

TEST_CASE("projection law") {
  CHECK(projection_law(0.0)(1.3) == doctest::Approx(1.0));
  CHECK(projection_law(1.0)(1.3) == doctest::Approx(1.0));
  const auto half = projection_law(std::sqrt(0.5));
  CHECK(half.coeff(0) == doctest::Approx(0.5));
  CHECK(half.coeff(1) == doctest::Approx(0.5));
  std::mt19937_64 g(4);
  const auto P = qstate::projector_one();
  for (int i = 0; i < 10; ++i) {
    const PureState phi = random_state(2, g);
    const double s0 = std::sqrt(qstate::expect_real(P, phi));
    for (double x : grid(21)) CHECK(projection_law(s0)(x) == doctest::Approx(direct_fidelity(P, phi, x)).epsilon(1e-12));
  }
}

TEST_CASE("two-qubit laws") {
  const auto p00 = two_qubit_law(0.0, 0.0, NoiseClass::Pauli);
  CHECK(p00.coeff(0) == doctest::Approx(3.0 / 8));
  CHECK(p00.coeff(2) == doctest::Approx(0.5));
  CHECK(p00.coeff(4) == doctest::Approx(1.0 / 8));
  const auto ghz = two_qubit_law(0.0, 1.0, NoiseClass::Pauli);
  for (double x : grid(31)) {
    CHECK(p00(x) == doctest::Approx(std::pow(std::cos(x), 4)).scale(1.0).epsilon(1e-13));
    CHECK(ghz(x) == doctest::Approx(std::pow(std::cos(2 * x), 2)).scale(1.0).epsilon(1e-13));
  }
  CHECK(two_qubit_law(0.6, 0.2, NoiseClass::Projection)(0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(two_qubit_law(2.0, -1.0, NoiseClass::Pauli), Error);

  // Any state (entangled or not): S0 = <S>, R0 = <Q x Q>.
  std::mt19937_64 g(9);
  for (auto cls : {NoiseClass::Pauli, NoiseClass::Projection}) {
    const ComplexMatrix Q = cls == NoiseClass::Pauli ? qstate::pauli(Axis::X) : qstate::projector_one();
    const ComplexMatrix S = qstate::collective(Q, 2);
    const ComplexMatrix R = qstate::kron(Q, Q);
    for (int i = 0; i < 8; ++i) {
      const PureState phi = random_state(4, g);
      const auto law = two_qubit_law(qstate::expect_real(S, phi), qstate::expect_real(R, phi), cls);
      for (double x : grid(25)) CHECK(law(x) == doctest::Approx(direct_fidelity(S, phi, x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("product law factors the joint law") {
  const auto c2 = pauli_law(0.0);
  const auto prod2 = product_law({c2, c2});
  const auto two = two_qubit_law(0.0, 0.0, NoiseClass::Pauli);
  for (int m = 0; m <= 4; ++m) CHECK(prod2.coeff(m) == doctest::Approx(two.coeff(m)).scale(1.0).epsilon(1e-15));
  const auto three = product_law({c2, c2, c2});
  for (double x : grid(31)) CHECK(three(x) == doctest::Approx(std::pow(std::cos(x), 6)).scale(1.0).epsilon(1e-13));

  std::mt19937_64 g(12);
  const auto X = qstate::pauli(Axis::X);
  const ComplexMatrix S = qstate::collective(X, 3);
  for (int i = 0; i < 5; ++i) {
    std::vector<PureState> q;
    std::vector<CosineSeries> singles;
    for (int j = 0; j < 3; ++j) {
      q.push_back(random_state(2, g));
      singles.push_back(pauli_law(qstate::expect_real(X, q.back())));
    }
    const PureState phi = tensor(tensor(q[0], q[1]), q[2]);
    const auto law = product_law(singles);
    for (double x : grid(25)) CHECK(std::abs(law(x) - direct_fidelity(S, phi, x)) < 1e-12);
  }
}

TEST_CASE("laws stay inside [0, 1]") {
  std::mt19937_64 g(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0), big(-50.0, 50.0);
  for (int i = 0; i < 50; ++i) {
    const double s0 = u(g);
    for (const auto& law : {pauli_law(s0), projection_law(s0)}) {
      for (int j = 0; j < 20; ++j) {
        const double f = law(big(g));
        CHECK(f >= -1e-12);
        CHECK(f <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("mean and variance agree with the closed forms") {
  std::mt19937_64 g(33);
  std::uniform_real_distribution<double> ug(0.05, 0.6), uk(0.01, 2.0), ut(0.0, 20.0), us(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double gm = ug(g), k = uk(g), t = ut(g), s0 = us(g);
    const double a = 1 - s0 * s0;
    const double tau = std::exp(-k * t) * std::sinh(k * t) / k;
    auto mv = series_mean_variance(pauli_law(s0), NoiseModel::ou(gm, k), t);
    CHECK(mv.mean == doctest::Approx(0.5 * (1 + s0 * s0) + 0.5 * a * std::exp(-2 * gm * gm * tau)).epsilon(1e-12));
    CHECK(mv.variance ==
          doctest::Approx(a * a / 8 * std::pow(1 - std::exp(-4 * gm * gm * tau), 2)).epsilon(1e-9).scale(1e-3));
    const double w = (1 - std::exp(-k * t)) * gm * gm / k;
    mv = series_mean_variance(pauli_law(s0), NoiseModel::ou(gm, k, InitialData::Stationary), t);
    CHECK(mv.mean == doctest::Approx(0.5 * (1 + s0 * s0) + 0.5 * a * std::exp(-2 * w)).epsilon(1e-12));
    CHECK(mv.variance == doctest::Approx(a * a / 8 * std::pow(1 - std::exp(-4 * w), 2)).epsilon(1e-9).scale(1e-3));
    mv = series_mean_variance(pauli_law(s0), NoiseModel::white(gm), t);
    CHECK(mv.mean == doctest::Approx(0.5 * (1 + s0 * s0) + 0.5 * a * std::exp(-2 * gm * gm * t)).epsilon(1e-12));
  }
  CHECK(series_mean_variance(pauli_law(0.0), NoiseModel::ou(0.2, 0.1), 1.0).mean ==
        doctest::Approx(0.96503).epsilon(1e-5));
  const auto lim = series_mean_variance(pauli_law(0.3), NoiseModel::white(0.5), 500.0);
  CHECK(lim.mean == doctest::Approx(0.5 * 1.09));
  CHECK(lim.variance == doctest::Approx(0.91 * 0.91 / 8));
  const double s2 = 0.5, gm = 0.1, k = 0.1;
  const auto proj = series_mean_variance(projection_law(std::sqrt(s2)), NoiseModel::ou(gm, k, InitialData::Stationary), 1e4);
  CHECK(proj.mean == doctest::Approx(1 - 2 * (1 - s2) * s2 * (1 - std::exp(-gm * gm / (2 * k)))).epsilon(1e-12));
}

TEST_CASE("variance equals a quadrature of the squared law") {
  const auto models = {NoiseModel::white(0.3), NoiseModel::ou(0.2, 0.4), NoiseModel::ou(0.2, 0.4, InitialData::Stationary)};
  for (const auto& law : {pauli_law(0.4), projection_law(0.6), two_qubit_law(0.1, 0.3, NoiseClass::Pauli),
                          two_qubit_law(0.5, 0.1, NoiseClass::Projection)}) {
    for (const auto& m : models) {
      for (double t : {0.3, 2.0, 9.0}) {
        const double v = increment_variance(m, t);
        const double e1 = oracle::gaussian_expect([&](double x) { return law(x); }, v, 120);
        const double e2 = oracle::gaussian_expect([&](double x) { return law(x) * law(x); }, v, 120);
        const auto mv = series_mean_variance(law, m, t);
        CHECK(mv.mean == doctest::Approx(e1).epsilon(1e-10));
        CHECK(mv.variance == doctest::Approx(e2 - e1 * e1).epsilon(1e-8).scale(1e-6));
      }
    }
  }
}

TEST_CASE("OU limit fidelity dominates white noise") {
  for (double gm : {0.05, 0.2, 0.5})
    for (double k : {0.01, 0.3, 3.0})
      for (double s0 : {0.0, 0.5, 0.9}) {
        const double ou = 0.5 * (1 + s0 * s0) + 0.5 * (1 - s0 * s0) * std::exp(-gm * gm / k);
        const double wn = 0.5 * (1 + s0 * s0);
        CHECK(ou >= wn);
        const double t_inf = 200.0 / k;
        CHECK(series_mean_variance(pauli_law(s0), NoiseModel::ou(gm, k), t_inf).mean >=
              series_mean_variance(pauli_law(s0), NoiseModel::white(gm), t_inf).mean - 1e-12);
      }
}

TEST_CASE("direct distribution sampling") {
  RngStream s(5, streams::law_samples(0));
  for (double f : sample_distribution(pauli_law(0.0), NoiseModel::white(0.0), 1.0, 50, s)) CHECK(f == 1.0);
  const auto law = pauli_law(0.2);
  const auto m = NoiseModel::ou(0.2, 0.1);
  const auto xs = sample_distribution(law, m, 2.0, 20000, s);
  double sum = 0, sum2 = 0;
  for (double f : xs) {
    CHECK(f >= law.min_on_grid() - 1e-12);
    CHECK(f <= 1.0 + 1e-12);
    sum += f;
    sum2 += f * f;
  }
  const double mean = sum / xs.size();
  const double se = std::sqrt((sum2 / xs.size() - mean * mean) / xs.size());
  CHECK(std::abs(mean - series_mean_variance(law, m, 2.0).mean) < 3 * se);
}

TEST_CASE("diagonalization reproduces the closed-form laws") {
  for (double s0 : {0.0, 0.35, 0.8, 1.0}) {
    const auto sol = diagonalized_solve(pauli_system(s0, 0.3));
    const auto law = pauli_law(s0);
    for (double x : grid(101)) CHECK(std::abs(sol(x)(0) - law(x)) < 1e-10);
    const auto psol = diagonalized_solve(projection_system(s0, 0.3));
    const auto plaw = projection_law(s0);
    for (double x : grid(101)) CHECK(std::abs(psol(x)(0) - plaw(x)) < 1e-10);
  }
  LinearSdeSystem zero{Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Zero(2),
                       Eigen::VectorXd::Zero(2), Eigen::Vector2d(0.3, 0.7)};
  CHECK((diagonalized_solve(zero)(2.5) - zero.V0).norm() < 1e-15);

  // Printed projection B has real eigenvalues and gives cosh, not cos.
  auto printed = projection_system(0.6, 0.3);
  printed.B(2, 1) = 1.0;
  CHECK_THROWS_AS(diagonalized_solve(printed), Error);
}

TEST_CASE("the non-commuting system is routed away from diagonalization") {
  const Eigen::MatrixXd Ac = magnus::commutator_matrix(), B = magnus::noise_matrix();
  LinearSdeSystem ten{Ac + 0.08 * B * B, B, Eigen::VectorXd::Zero(10), Eigen::VectorXd::Zero(10),
                      Eigen::VectorXd::Unit(10, 0)};
  try {
    diagonalized_solve(ten);
    FAIL("expected NotDiagonalizable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotDiagonalizable);
  }
}

TEST_CASE("law export") {
  ScenarioLaw law{pauli_law(0.5), 0.5, 0.0, false, NoiseModel::ou(0.2, 0.1)};
  const auto j = to_json(law);
  CHECK(j["harmonics"].size() == 2);
  CHECK(j["harmonics"][1][0] == 2);
  CHECK(j["s0"] == 0.5);
  CHECK(j["r0"].is_null());
  CHECK(j["model"]["kind"] == "ou");
}
