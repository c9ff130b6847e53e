#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sselab/error.hpp"

namespace sselab {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kNormTol = 1e-10;

/// Normalized amplitude vector of a register of 2^n levels.
class PureState {
 public:
  /// Normalizes `amplitudes`; throws on a zero or non-finite vector.
  explicit PureState(ComplexVector amplitudes);

  static PureState basis(Eigen::Index dim, Eigen::Index index);

  Eigen::Index dim() const { return amps_.size(); }
  const ComplexVector& amplitudes() const { return amps_; }
  cplx operator[](Eigen::Index i) const { return amps_[i]; }

  /// Overlap <this|other>.
  cplx overlap(const PureState& other) const;

 private:
  ComplexVector amps_;
};

PureState tensor(const PureState& a, const PureState& b);

namespace qstate {

enum class Axis { I, X, Y, Z };

Axis parse_axis(const std::string& name);
std::string to_string(Axis axis);

ComplexMatrix identity(Eigen::Index dim);
ComplexMatrix pauli(Axis axis);
/// |1><1| = (I - Z)/2.
ComplexMatrix projector_one();
/// e^{i phase}|0><1| + e^{-i phase}|1><0|.
ComplexMatrix coupling(double phase);
/// Omega * coupling(phase) + Delta/2 * |1><1|.
ComplexMatrix control(double omega, double phase, double delta);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
/// Tensor product of a list of same-register factors, left to right.
ComplexMatrix kron(const std::vector<ComplexMatrix>& factors);
/// Q acting on qubit `site` of an n-qubit register (site 0 is leftmost).
ComplexMatrix embed(const ComplexMatrix& q, int site, int n_qubits);
/// Sum over sites of Q_j embedded on each site.
ComplexMatrix collective(const ComplexMatrix& q, int n_qubits);
/// Sum of tensor terms; every term must have the same dimension.
ComplexMatrix sum(const std::vector<ComplexMatrix>& terms);

bool is_hermitian(const ComplexMatrix& a, double tol = kHermitianTol);

/// AB - BA, or AB + BA when `anti` is set.
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b, bool anti = false);

/// phi^dagger A phi.
cplx expect_value(const ComplexMatrix& a, const PureState& phi);
/// Real part of phi^dagger A phi; throws if A is not Hermitian.
double expect_real(const ComplexMatrix& a, const PureState& phi);

/// Matrix exponential by scaling and squaring with a Pade kernel.
ComplexMatrix mat_exp(const ComplexMatrix& a);
Eigen::MatrixXd mat_exp(const Eigen::MatrixXd& a);

/// Builds an operator from a textual spec. Terms are joined by '+', tensor
/// factors by '*'. A factor is one of i, x, y, z, p1 (|1><1|),
/// control(omega,phase,delta), or a real scalar, e.g. "x*i + i*x", "0.5*z".
ComplexMatrix build_operator(const std::string& spec);

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* what);

}  // namespace qstate
}  // namespace sselab
