#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "sselab/noise.hpp"
#include "sselab/qstate.hpp"

namespace sselab::magnus {

/// H = alpha sigma_1, S = sigma_2, with sigma_3 = -i sigma_1 sigma_2 so that
/// [sigma_1, sigma_2] = 2i sigma_3 for any ordered pair of distinct Paulis.
struct NonCommutingSystem {
  double alpha = 1.0;
  double gamma = 0.0;
  qstate::Axis sigma1 = qstate::Axis::X;
  qstate::Axis sigma2 = qstate::Axis::Z;

  void validate() const;
  double epsilon2() const { return gamma * gamma / alpha; }
  /// Set when gamma^2 / alpha >= 0.5, where the expansion is unreliable.
  std::optional<std::string> warning() const;

  ComplexMatrix s1() const;
  ComplexMatrix s2() const;
  ComplexMatrix s3() const;
  ComplexMatrix hamiltonian() const { return alpha * s1(); }
  ComplexMatrix noise_operator() const { return s2(); }
  /// (C1, C2, C3) with C_i = <phi|sigma_i|phi>.
  Eigen::Vector3d bloch(const PureState& phi) const;
};

struct TenSystem {
  Eigen::MatrixXd Ac;
  Eigen::MatrixXd B;
  Eigen::VectorXd V0;
};

Eigen::MatrixXd commutator_matrix();
Eigen::MatrixXd noise_matrix();

/// The 10 observables (F, |phi^dag s_i psi|^2, cross terms i(...), symmetric products).
Eigen::VectorXd observable_vector(const NonCommutingSystem& sys, const PureState& psi, const PureState& phi);

TenSystem build_system(const NonCommutingSystem& sys, const PureState& phi0);

/// exp(-alpha Ac t) B exp(alpha Ac t) = cos(2 alpha t) B - sin(2 alpha t)/2 [Ac, B].
Eigen::MatrixXd rotating_frame_D(double t, double alpha = 1.0);

/// (gamma^2/2) int_0^t D(s)^2 ds from the closed-form trigonometric integrals.
Eigen::MatrixXd magnus_generator(const NonCommutingSystem& sys, double t);

/// First-order Magnus mean fidelity under white noise.
double wn_mean_fidelity(const NonCommutingSystem& sys, const PureState& phi0, double t);

/// Exact white-noise mean, first component of exp((alpha Ac + gamma^2/2 B^2) t) V0.
double wn_mean_exact(const NonCommutingSystem& sys, const PureState& phi0, double t);

struct ApproximateValue {
  double value = 0.0;
  /// Value outside [0, 1]; the expansion is known to produce these.
  bool nonphysical = false;
};

/// Second-order expansion of the OU mean with the two anticommutator
/// corrections (outer integral by composite Simpson, 400 panels).
ApproximateValue ou_second_order_mean(const NonCommutingSystem& sys, const PureState& phi0, const NoiseModel& model,
                                      double t);

}  // namespace sselab::magnus
