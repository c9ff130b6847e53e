#include "sselab/noise.hpp"

#include <cmath>

#include "sselab/error.hpp"

namespace sselab {

std::string to_string(NoiseKind kind) { return kind == NoiseKind::WhiteNoise ? "wn" : "ou"; }
std::string to_string(InitialData init) { return init == InitialData::Calibrated ? "calibrated" : "stationary"; }

NoiseKind parse_noise_kind(const std::string& s) {
  if (s == "wn" || s == "white") return NoiseKind::WhiteNoise;
  if (s == "ou") return NoiseKind::OrnsteinUhlenbeck;
  throw Error(ErrorKind::InvalidArgument, "unknown noise kind '" + s + "'");
}

InitialData parse_initial_data(const std::string& s) {
  if (s == "calibrated") return InitialData::Calibrated;
  if (s == "stationary") return InitialData::Stationary;
  throw Error(ErrorKind::InvalidArgument, "unknown initial data '" + s + "'");
}

NoiseModel NoiseModel::white(double gamma) {
  NoiseModel m{NoiseKind::WhiteNoise, gamma, 0.0, InitialData::Calibrated};
  m.validate();
  return m;
}

NoiseModel NoiseModel::ou(double gamma, double k, InitialData init) {
  NoiseModel m{NoiseKind::OrnsteinUhlenbeck, gamma, k, init};
  m.validate();
  return m;
}

void NoiseModel::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw Error(ErrorKind::InvalidArgument, "gamma must be >= 0");
  if (!(k >= 0.0) || !std::isfinite(k)) throw Error(ErrorKind::InvalidArgument, "k must be >= 0");
  if (kind == NoiseKind::WhiteNoise && (k != 0.0 || init != InitialData::Calibrated))
    throw Error(ErrorKind::InvalidArgument, "white noise has k = 0 and calibrated initial data");
}

double NoiseModel::stationary_sd() const {
  if (kind != NoiseKind::OrnsteinUhlenbeck || k <= 0.0)
    throw Error(ErrorKind::InvalidArgument, "stationary law needs an OU model with k > 0");
  return gamma / std::sqrt(2.0 * k);
}

double NoiseModel::draw_initial(RngStream& stream) const {
  if (!stationary()) return 0.0;
  return stationary_sd() * stream.normal();
}

NoisePath sample_path(const NoiseModel& model, double T, double dt, RngStream& stream) {
  model.validate();
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  if (!(T >= dt)) throw Error(ErrorKind::InvalidArgument, "T must be >= dt");

  NoisePath path;
  path.seed = stream.seed();
  path.stream_id = stream.stream_id();
  const auto full = static_cast<std::size_t>(std::floor(T / dt + 1e-9));
  path.times.reserve(full + 2);
  path.values.reserve(full + 2);

  double x = model.draw_initial(stream);
  double t = 0.0;
  path.times.push_back(t);
  path.values.push_back(x);

  auto advance = [&](double h) {
    double decay = 1.0, sd = model.gamma * std::sqrt(h);
    if (model.k > 0.0) {
      decay = std::exp(-model.k * h);
      sd = model.gamma * std::sqrt(-std::expm1(-2.0 * model.k * h) / (2.0 * model.k));
    }
    x = x * decay + sd * stream.normal();
  };

  for (std::size_t i = 1; i <= full; ++i) {
    advance(dt);
    t = static_cast<double>(i) * dt;
    path.times.push_back(t);
    path.values.push_back(x);
  }
  const double rest = T - t;
  if (rest > 1e-9 * T) {
    advance(rest);
    path.times.push_back(T);
    path.values.push_back(x);
  }
  return path;
}

double increment_variance(const NoiseModel& model, double t) {
  model.validate();
  if (t < 0.0) throw Error(ErrorKind::InvalidArgument, "negative time");
  const double g2 = model.gamma * model.gamma;
  if (model.kind == NoiseKind::WhiteNoise || model.k == 0.0) return g2 * t;
  const double k = model.k;
  if (model.init == InitialData::Calibrated) return g2 * -std::expm1(-2.0 * k * t) / (2.0 * k);
  return g2 * -std::expm1(-k * t) / k;
}

GaussianLaw terminal_increment_law(const NoiseModel& model, double t) { return {0.0, increment_variance(model, t)}; }

double expected_cos(double alpha, const NoiseModel& model, double t) {
  return std::exp(-0.5 * alpha * alpha * increment_variance(model, t));
}

double double_factorial_odd(int n) {
  if (n < 0 || n > 12) throw Error(ErrorKind::InvalidArgument, "double factorial guard: n must be in [0, 12]");
  double r = 1.0;
  for (int j = 2 * n - 1; j > 1; j -= 2) r *= j;
  return r;
}

double raw_even_moment(int n, const NoiseModel& model, double t) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "raw_even_moment needs n >= 1");
  return double_factorial_odd(n) * std::pow(increment_variance(model, t), n);
}

double coeff_a(int l, int w) {
  double r = std::ldexp(1.0, l);
  for (int q = l + 1; q <= w; ++q) r *= static_cast<double>(q * (2 * q - 1)) / (q - l);
  return r;
}

double coeff_b(int l, int w) {
  double r = std::ldexp(1.0, l);
  for (int q = l; q <= w - 1; ++q) r *= static_cast<double>((1 + q) * (3 + 2 * q)) / (q - l + 1);
  return r;
}

double conditional_moment(int m, double x0, const NoiseModel& model, double t) {
  model.validate();
  if (model.kind != NoiseKind::OrnsteinUhlenbeck)
    throw Error(ErrorKind::InvalidArgument, "conditional_moment is defined for the OU process");
  if (m < 0 || m > 12) throw Error(ErrorKind::InvalidArgument, "conditional_moment guard: m must be in [0, 12]");
  if (t < 0.0) throw Error(ErrorKind::InvalidArgument, "negative time");

  const double k = model.k;
  const double g2 = model.gamma * model.gamma;
  // (e^{2kt} - 1)^{w-l} k^l / (2k)^w regrouped as s^{w-l} 2^{-l} with
  // s = (e^{2kt} - 1) / (2k), which stays finite as k -> 0.
  const double s = k > 0.0 ? std::expm1(2.0 * k * t) / (2.0 * k) : t;
  const double x0sq_half = 0.5 * x0 * x0;

  const bool even = m % 2 == 0;
  const int w = even ? m / 2 : (m - 1) / 2;
  double acc = 0.0;
  for (int l = 0; l <= w; ++l) {
    const double c = even ? coeff_a(l, w) : coeff_b(l, w);
    acc += c * std::pow(g2 * s, w - l) * std::pow(x0sq_half, l);
  }
  if (even) return std::exp(-2.0 * w * k * t) * acc;
  return std::exp(-(2.0 * w + 1.0) * k * t) * acc * x0;
}

}  // namespace sselab
