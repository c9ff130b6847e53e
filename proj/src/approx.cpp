#include "sselab/approx.hpp"

#include <cmath>

#include "sselab/error.hpp"

namespace sselab::approx {

namespace {
using cplx = std::complex<double>;
const cplx kI{0.0, 1.0};

void check(double gamma, double k) {
  if (!(gamma >= 0.0) || !(k >= 0.0) || !std::isfinite(gamma) || !std::isfinite(k))
    throw Error(ErrorKind::InvalidArgument, "closure needs gamma >= 0 and k >= 0");
}
}  // namespace

double calibrated_second_moment(double gamma, double k, double t) {
  if (k == 0.0) return gamma * gamma * t;
  return -gamma * gamma * std::expm1(-2.0 * k * t) / (2.0 * k);
}

Eigen::MatrixXcd first_order_matrix(double t, double gamma, double k) {
  check(gamma, k);
  const double g2 = gamma * gamma;
  const double p = k * calibrated_second_moment(gamma, k, t) - g2;
  Eigen::MatrixXcd m(3, 3);
  m << -g2, g2, kI * k,
       g2, -g2, -kI * k,
       2.0 * kI * p, -2.0 * kI * p, -k - 2.0 * g2;
  return m;
}

Eigen::MatrixXcd second_order_matrix(double t, double gamma, double k) {
  check(gamma, k);
  const double g2 = gamma * gamma;
  const double q = k * calibrated_second_moment(gamma, k, t) - 2.0 * g2;
  const cplx z = 0.0;
  Eigen::MatrixXcd m(6, 6);
  m << -g2, g2, kI * k, z, z, z,
       g2, -g2, -kI * k, z, z, z,
       -2.0 * kI * g2, 2.0 * kI * g2, -(k + 2.0 * g2), 2.0 * kI * k, -2.0 * kI * k, z,
       g2, z, -2.0 * kI * g2, -(2.0 * k + g2), g2, kI * k,
       z, g2, 2.0 * kI * g2, g2, -(2.0 * k + g2), -kI * k,
       z, z, 2.0 * g2, 2.0 * kI * q, -2.0 * kI * q, -(3.0 * k + 2.0 * g2);
  return m;
}

ClosureSystem ClosureSystem::pauli(int order, double s0, double gamma, double k) {
  check(gamma, k);
  ClosureSystem sys;
  sys.order = order;
  if (order == 1) {
    sys.matrix_fn = [gamma, k](double t) { return first_order_matrix(t, gamma, k); };
    sys.v0 = Eigen::VectorXcd::Zero(3);
  } else if (order == 2) {
    sys.matrix_fn = [gamma, k](double t) { return second_order_matrix(t, gamma, k); };
    sys.v0 = Eigen::VectorXcd::Zero(6);
  } else {
    throw Error(ErrorKind::InvalidArgument, "closure order must be 1 or 2");
  }
  sys.v0(0) = 1.0;
  sys.v0(1) = s0 * s0;
  return sys;
}

ClosureSeries integrate_closure(const ClosureSystem& system, double T, double dt, std::size_t record_every) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw Error(ErrorKind::InvalidArgument, "integrate_closure needs dt > 0, T >= 0");
  if (record_every < 1) throw Error(ErrorKind::InvalidArgument, "record_every must be >= 1");
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  Eigen::VectorXcd v = system.v0;
  ClosureSeries out;
  const auto record = [&](double t) {
    out.t.push_back(t);
    out.fidelity.push_back(v(0).real());
    const double im = std::abs(v(0).imag());
    out.imag_residue.push_back(im);
    out.max_imag_residue = std::max(out.max_imag_residue, im);
  };
  record(0.0);
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n) * dt;
    const Eigen::MatrixXcd m0 = system.matrix_fn(t);
    const Eigen::MatrixXcd mh = system.matrix_fn(t + 0.5 * dt);
    const Eigen::MatrixXcd m1 = system.matrix_fn(t + dt);
    const Eigen::VectorXcd k1 = m0 * v;
    const Eigen::VectorXcd k2 = mh * (v + 0.5 * dt * k1);
    const Eigen::VectorXcd k3 = mh * (v + 0.5 * dt * k2);
    const Eigen::VectorXcd k4 = m1 * (v + dt * k3);
    v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if ((n + 1) % record_every == 0 || n + 1 == steps) record(static_cast<double>(n + 1) * dt);
  }
  return out;
}

}  // namespace sselab::approx
