#include "sselab/magnus.hpp"

#include <cmath>

#include "sselab/error.hpp"

namespace sselab::magnus {

namespace {
const cplx kI{0.0, 1.0};
using Mat = Eigen::MatrixXd;
}  // namespace

void NonCommutingSystem::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorKind::InvalidArgument, "alpha must be positive");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw Error(ErrorKind::InvalidArgument, "gamma must be >= 0");
  if (sigma1 == qstate::Axis::I || sigma2 == qstate::Axis::I || sigma1 == sigma2)
    throw Error(ErrorKind::InvalidArgument, "sigma_1 and sigma_2 must be distinct Pauli axes");
}

std::optional<std::string> NonCommutingSystem::warning() const {
  if (epsilon2() >= 0.5)
    return "gamma^2/alpha = " + std::to_string(epsilon2()) + " is not small; the Magnus mean is unreliable";
  return std::nullopt;
}

ComplexMatrix NonCommutingSystem::s1() const { return qstate::pauli(sigma1); }
ComplexMatrix NonCommutingSystem::s2() const { return qstate::pauli(sigma2); }
ComplexMatrix NonCommutingSystem::s3() const { return -kI * (s1() * s2()); }

Eigen::Vector3d NonCommutingSystem::bloch(const PureState& phi) const {
  return {qstate::expect_real(s1(), phi), qstate::expect_real(s2(), phi), qstate::expect_real(s3(), phi)};
}

Mat commutator_matrix() {
  Mat a = Mat::Zero(10, 10);
  a(2, 9) = -2;
  a(3, 9) = 2;
  a(5, 6) = -2;
  a(6, 5) = 2;
  a(7, 8) = -2;
  a(8, 7) = 2;
  a(9, 2) = 4;
  a(9, 3) = -4;
  return a;
}

Mat noise_matrix() {
  Mat b = Mat::Zero(10, 10);
  b(0, 5) = -1;
  b(1, 8) = 1;
  b(2, 5) = 1;
  b(3, 8) = -1;
  b(4, 6) = 1;
  b(4, 7) = -1;
  b(5, 0) = 2;
  b(5, 2) = -2;
  b(6, 4) = -1;
  b(6, 9) = -1;
  b(7, 4) = 1;
  b(7, 9) = 1;
  b(8, 1) = -2;
  b(8, 3) = 2;
  b(9, 6) = 1;
  b(9, 7) = -1;
  return b;
}

Eigen::VectorXd observable_vector(const NonCommutingSystem& sys, const PureState& psi, const PureState& phi) {
  if (psi.dim() != 2 || phi.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "observable_vector needs qubits");
  const ComplexVector& p = psi.amplitudes();
  const ComplexVector& f = phi.amplitudes();
  const ComplexMatrix s[3] = {sys.s1(), sys.s2(), sys.s3()};
  const cplx ov = f.dot(p);  // phi^dag psi
  cplx m[3];
  for (int i = 0; i < 3; ++i) m[i] = f.dot(s[i] * p);  // phi^dag s_i psi

  Eigen::VectorXd v(10);
  v(0) = std::norm(ov);
  for (int i = 0; i < 3; ++i) v(1 + i) = std::norm(m[i]);
  for (int i = 0; i < 3; ++i) {
    const cplx z = m[i] * std::conj(ov);
    v(4 + i) = std::real(kI * (z - std::conj(z)));
  }
  v(7) = 2.0 * std::real(m[1] * std::conj(m[0]));
  v(8) = 2.0 * std::real(m[2] * std::conj(m[0]));
  v(9) = 2.0 * std::real(m[2] * std::conj(m[1]));
  return v;
}

TenSystem build_system(const NonCommutingSystem& sys, const PureState& phi0) {
  sys.validate();
  return {commutator_matrix(), noise_matrix(), observable_vector(sys, phi0, phi0)};
}

Mat rotating_frame_D(double t, double alpha) {
  static const Mat B = noise_matrix();
  static const Mat Ac = commutator_matrix();
  static const Mat C = Ac * B - B * Ac;
  return std::cos(2.0 * alpha * t) * B - 0.5 * std::sin(2.0 * alpha * t) * C;
}

Mat magnus_generator(const NonCommutingSystem& sys, double t) {
  const Mat B = noise_matrix();
  const Mat Ac = commutator_matrix();
  const Mat C = Ac * B - B * Ac;
  const double w = 2.0 * sys.alpha;
  // D^2 = cos^2 B^2 - (sin cos / 2){B, C} + (sin^2 / 4) C^2
  const double icc = 0.5 * t + std::sin(2.0 * w * t) / (4.0 * w);
  const double iss = 0.5 * t - std::sin(2.0 * w * t) / (4.0 * w);
  const double isc = std::pow(std::sin(w * t), 2) / (2.0 * w);
  const Mat D2 = icc * (B * B) - 0.5 * isc * (B * C + C * B) + 0.25 * iss * (C * C);
  return 0.5 * sys.gamma * sys.gamma * D2;
}

double wn_mean_fidelity(const NonCommutingSystem& sys, const PureState& phi0, double t) {
  const TenSystem ten = build_system(sys, phi0);
  const Mat rot = qstate::mat_exp(Mat(sys.alpha * t * ten.Ac));
  const Mat u = qstate::mat_exp(magnus_generator(sys, t));
  return (rot * u * ten.V0)(0);
}

double wn_mean_exact(const NonCommutingSystem& sys, const PureState& phi0, double t) {
  const TenSystem ten = build_system(sys, phi0);
  const Mat gen = sys.alpha * ten.Ac + 0.5 * sys.gamma * sys.gamma * ten.B * ten.B;
  return (qstate::mat_exp(Mat(gen * t)) * ten.V0)(0);
}

namespace {

// int_0^s e^{kappa x} cos(w x) dx and the sine counterpart.
double exp_cos_integral(double kappa, double w, double s) {
  const double d = kappa * kappa + w * w;
  return (std::exp(kappa * s) * (kappa * std::cos(w * s) + w * std::sin(w * s)) - kappa) / d;
}

double exp_sin_integral(double kappa, double w, double s) {
  const double d = kappa * kappa + w * w;
  return (std::exp(kappa * s) * (kappa * std::sin(w * s) - w * std::cos(w * s)) + w) / d;
}

// int_0^t {e^{-kappa s} D(s), int_0^s e^{kappa s'} D(s') ds'} ds
Mat anticommutator_integral(double kappa, double alpha, double t) {
  const Mat B = noise_matrix();
  const Mat Ac = commutator_matrix();
  const Mat C = Ac * B - B * Ac;
  const double w = 2.0 * alpha;
  constexpr int panels = 400;
  const double h = t / panels;
  Mat acc = Mat::Zero(10, 10);
  for (int i = 0; i <= panels; ++i) {
    const double s = i * h;
    const Mat inner = exp_cos_integral(kappa, w, s) * B - 0.5 * exp_sin_integral(kappa, w, s) * C;
    const Mat outer = std::exp(-kappa * s) * rotating_frame_D(s, alpha);
    const double weight = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += weight * (outer * inner + inner * outer);
  }
  return acc * (h / 3.0);
}

}  // namespace

ApproximateValue ou_second_order_mean(const NonCommutingSystem& sys, const PureState& phi0, const NoiseModel& model,
                                      double t) {
  if (model.kind != NoiseKind::OrnsteinUhlenbeck)
    throw Error(ErrorKind::InvalidArgument, "ou_second_order_mean needs an OU model");
  if (std::abs(model.gamma - sys.gamma) > 0.0)
    throw Error(ErrorKind::InvalidArgument, "noise model and system disagree on gamma");
  const TenSystem ten = build_system(sys, phi0);
  const double g2 = sys.gamma * sys.gamma;
  const double k = model.k;
  Mat u = Mat::Identity(10, 10) + magnus_generator(sys, t);
  if (k > 0.0 && t > 0.0) {
    u -= 0.5 * g2 * k * anticommutator_integral(k, sys.alpha, t);
    u += 0.25 * g2 * k * anticommutator_integral(2.0 * k, sys.alpha, t);
  }
  const Mat rot = qstate::mat_exp(Mat(sys.alpha * t * ten.Ac));
  ApproximateValue out;
  out.value = (rot * u * ten.V0)(0);
  out.nonphysical = out.value < 0.0 || out.value > 1.0;
  return out;
}

}  // namespace sselab::magnus
