#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace sselab::approx {

/// E[X_t^2] of the calibrated OU process, gamma^2 t when k = 0.
double calibrated_second_moment(double gamma, double k, double t);

/// Closure under E[X^2 V] = E[X^2] E[V] for V = (F, |phi^dag S psi|^2, cross term).
Eigen::MatrixXcd first_order_matrix(double t, double gamma, double k);

/// Closure one order higher, V extended by X V components.
Eigen::MatrixXcd second_order_matrix(double t, double gamma, double k);

struct ClosureSystem {
  int order = 1;
  std::function<Eigen::MatrixXcd(double)> matrix_fn;
  Eigen::VectorXcd v0;

  /// Pauli noise with calibrated OU noise; s0 = |<S>|.
  static ClosureSystem pauli(int order, double s0, double gamma, double k);
};

struct ClosureSeries {
  std::vector<double> t;
  std::vector<double> fidelity;
  /// |Im V_1| at each recorded time.
  std::vector<double> imag_residue;
  double max_imag_residue = 0.0;
};

/// Classical RK4 on dV/dt = M(t) V in complex arithmetic.
ClosureSeries integrate_closure(const ClosureSystem& system, double T, double dt = 1e-3,
                                std::size_t record_every = 1);

}  // namespace sselab::approx
