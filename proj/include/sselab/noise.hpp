#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sselab/rng.hpp"

namespace sselab {

enum class NoiseKind { WhiteNoise, OrnsteinUhlenbeck };
enum class InitialData { Calibrated, Stationary };

std::string to_string(NoiseKind kind);
std::string to_string(InitialData init);
NoiseKind parse_noise_kind(const std::string& s);
InitialData parse_initial_data(const std::string& s);

/// Driving process X_t: white noise (gamma W_t) or the OU process
/// dX = -k X dt + gamma dW with calibrated (X_0 = 0) or stationary start.
struct NoiseModel {
  NoiseKind kind = NoiseKind::WhiteNoise;
  double gamma = 0.0;
  double k = 0.0;
  InitialData init = InitialData::Calibrated;

  static NoiseModel white(double gamma);
  static NoiseModel ou(double gamma, double k, InitialData init = InitialData::Calibrated);

  /// Throws on negative parameters or a white-noise model with k != 0 or a stationary start.
  void validate() const;
  bool stationary() const { return kind == NoiseKind::OrnsteinUhlenbeck && init == InitialData::Stationary; }
  /// Standard deviation of the stationary law, gamma / sqrt(2k).
  double stationary_sd() const;
  /// Draws X_0 according to the initial-data mode.
  double draw_initial(RngStream& stream) const;
};

struct GaussianLaw {
  double mean = 0.0;
  double variance = 0.0;
};

struct NoisePath {
  std::vector<double> times;
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

/// Exact-transition sample path on a uniform grid (last step shortened if
/// T is not a multiple of dt).
NoisePath sample_path(const NoiseModel& model, double T, double dt, RngStream& stream);

/// Variance of X_t - X_0.
double increment_variance(const NoiseModel& model, double t);

/// Law of X_t - X_0; Gaussian with zero mean for both process families.
GaussianLaw terminal_increment_law(const NoiseModel& model, double t);

/// E[cos(alpha (X_t - X_0))] = exp(-alpha^2 v(t) / 2).
double expected_cos(double alpha, const NoiseModel& model, double t);

/// (2n - 1)!! evaluated in floating point; n in [0, 12].
double double_factorial_odd(int n);

/// E[(X_t - X_0)^{2n}] = (2n - 1)!! v(t)^n for 1 <= n <= 12.
double raw_even_moment(int n, const NoiseModel& model, double t);

/// E[X_t^m | X_0] for the OU process (m <= 12) from the closed
/// even/odd coefficient families a[l, w] and b[l, w].
double conditional_moment(int m, double x0, const NoiseModel& model, double t);

/// Coefficients of the conditional-moment solution; empty products are 1.
double coeff_a(int l, int w);
double coeff_b(int l, int w);

}  // namespace sselab
