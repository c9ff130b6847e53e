#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sselab/noise.hpp"
#include "sselab/qstate.hpp"
#include "sselab/rng.hpp"

namespace sselab::laws {

/// Finite series sum_m c_m cos(m x), stored densely by harmonic.
class CosineSeries {
 public:
  CosineSeries() = default;
  explicit CosineSeries(std::vector<double> coefficients);

  static CosineSeries constant(double c);
  static CosineSeries from_terms(const std::vector<std::pair<int, double>>& terms);

  int max_harmonic() const { return static_cast<int>(c_.size()) - 1; }
  double coeff(int m) const;
  const std::vector<double>& coefficients() const { return c_; }
  /// Non-zero (m, c_m) pairs in increasing m.
  std::vector<std::pair<int, double>> terms() const;

  double operator()(double x) const;

  CosineSeries operator+(const CosineSeries& o) const;
  CosineSeries operator-(const CosineSeries& o) const;
  CosineSeries operator*(double s) const;
  /// Product expanded back into harmonics via cos a cos b = (cos(a-b) + cos(a+b)) / 2.
  CosineSeries operator*(const CosineSeries& o) const;

  /// Extremes on an n-point uniform grid over one period.
  double min_on_grid(int n = 10000) const;
  double max_on_grid(int n = 10000) const;

 private:
  void trim();
  std::vector<double> c_;
};

CosineSeries operator*(double s, const CosineSeries& c);

enum class NoiseClass { Pauli, Projection };
std::string to_string(NoiseClass c);
NoiseClass parse_noise_class(const std::string& s);

/// cos^2 x + s0^2 sin^2 x as harmonics {0, 2}.
CosineSeries pauli_law(double s0);
/// 1 - 2 (1 - s0^2) s0^2 (1 - cos x). Here s0^2 is the expectation of the
/// projector in the initial state.
CosineSeries projection_law(double s0);
/// Two qubits under S = Q x I + I x Q with R = Q x Q; s0 = <S>, r0 = <R>.
/// Throws InvalidLaw if the series leaves [0, 1] on a 10^4-point grid.
CosineSeries two_qubit_law(double s0, double r0, NoiseClass cls);
/// Pointwise product of per-qubit laws.
CosineSeries product_law(const std::vector<CosineSeries>& singles);

/// Checks that the law stays in [0, 1] (within 1e-12) on a grid.
bool is_valid_fidelity_law(const CosineSeries& law, double tol = 1e-12);

struct MeanVariance {
  double mean = 0.0;
  double variance = 0.0;
};

/// Exact mean and variance of law(X_t - X_0) from the Gaussian characteristic
/// function of the increment.
MeanVariance series_mean_variance(const CosineSeries& law, const NoiseModel& model, double t);

/// Draws n increments from the terminal law and evaluates the series.
std::vector<double> sample_distribution(const CosineSeries& law, const NoiseModel& model, double t, std::size_t n,
                                        RngStream& stream);

struct ScenarioLaw {
  CosineSeries series;
  double s0 = 0.0;
  double r0 = 0.0;
  bool has_r0 = false;
  NoiseModel model;
};

nlohmann::json to_json(const ScenarioLaw& law);
nlohmann::json to_json(const NoiseModel& model);

/// dV = A V dt + B V dX + a dt + b dX.
struct LinearSdeSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd V0;
};

/// V = (F, |phi^dag S psi|^2, cross term) for S^2 = I.
LinearSdeSystem pauli_system(double s0, double gamma);
/// V = (F, 2 Re(phi^dag S psi psi^dag phi), cross term) for S^2 = S; s0^2 = <S>.
LinearSdeSystem projection_system(double s0, double gamma);

/// Pathwise solution V(dX) = P (exp(Lambda dX)(Z0 - c) + c) of a system
/// whose drift is (gamma^2/2) B^2 plus the matching affine part.
class DiagonalizedSolution {
 public:
  Eigen::VectorXd operator()(double dx) const;
  const Eigen::VectorXcd& eigenvalues() const { return lambda_; }

 private:
  friend DiagonalizedSolution diagonalized_solve(const LinearSdeSystem& sys);
  Eigen::MatrixXcd P_;
  Eigen::VectorXcd lambda_;
  Eigen::VectorXcd z0_minus_c_;
  Eigen::VectorXd c_;
};

/// Throws NotDiagonalizable when B has no eigenbasis or A (or a) is not the
/// matching function of B; the non-commuting system lands here.
DiagonalizedSolution diagonalized_solve(const LinearSdeSystem& sys);

}  // namespace sselab::laws
