#include "sselab/sde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sselab/error.hpp"
#include "sselab/parallel.hpp"
#include "sselab/stats.hpp"

namespace sselab::sde {

namespace {
const cplx kI{0.0, 1.0};
}

std::string to_string(Scheme s) { return s == Scheme::EulerMaruyama ? "em" : "platen"; }

Scheme parse_scheme(const std::string& s) {
  if (s == "em" || s == "euler" || s == "euler-maruyama") return Scheme::EulerMaruyama;
  if (s == "platen") return Scheme::PlatenWeak2;
  throw Error(ErrorKind::InvalidArgument, "unknown scheme '" + s + "'");
}

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  if (!(T > 0.0)) throw Error(ErrorKind::InvalidArgument, "T must be positive");
  if (n_paths < 1) throw Error(ErrorKind::InvalidArgument, "n_paths must be >= 1");
  if (record_every < 1) throw Error(ErrorKind::InvalidArgument, "record_every must be >= 1");
  const double ratio = T / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
    throw Error(ErrorKind::InvalidArgument, "T / dt must be an integer");
}

std::size_t SimConfig::steps() const { return static_cast<std::size_t>(std::llround(T / dt)); }

DriftDiffusion drift_diffusion(const JointState& y, const ComplexMatrix& H, const ComplexMatrix& S,
                               const NoiseModel& model) {
  qstate::require_same_dim(H, S, "drift_diffusion H vs S");
  if (y.psi.size() != H.rows()) throw Error(ErrorKind::DimensionMismatch, "drift_diffusion state");
  const double g = model.gamma;
  const ComplexVector s_psi = S * y.psi;
  DriftDiffusion out;
  out.state_drift = -kI * (H * y.psi) + kI * model.k * y.x * s_psi - 0.5 * g * g * (S.adjoint() * s_psi);
  out.state_diffusion = -kI * g * s_psi;
  out.noise_drift = -model.k * y.x;
  out.noise_diffusion = g;
  return out;
}

Stepper::Stepper(const ComplexMatrix& H, const ComplexMatrix& S, const NoiseModel& model, Scheme scheme, double dt,
                 bool renormalize)
    : H_(H), S_(S), model_(model), scheme_(scheme), dt_(dt), sqdt_(std::sqrt(dt)), renormalize_(renormalize) {
  qstate::require_same_dim(H, S, "Stepper H vs S");
  model_.validate();
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  const double g = model_.gamma;
  base_ = -kI * H_ - 0.5 * g * g * (S_.adjoint() * S_);
  const Eigen::Index n = H_.rows();
  for (ComplexVector* v : {&a_, &b_, &bar_, &a_bar_, &plus_, &minus_, &b_plus_, &b_minus_, &tmp_}) v->resize(n);
}

void Stepper::drift(const ComplexVector& psi, double x, ComplexVector& out) {
  out.noalias() = base_ * psi;
  if (model_.k != 0.0) {
    tmp_.noalias() = S_ * psi;
    out += (kI * (model_.k * x)) * tmp_;
  }
}

void Stepper::diffusion(const ComplexVector& psi, ComplexVector& out) {
  out.noalias() = S_ * psi;
  out *= -kI * model_.gamma;
}

void Stepper::step(JointState& y, double draw) {
  const double k = model_.k;
  const double g = model_.gamma;
  const double dw = draw * sqdt_;

  drift(y.psi, y.x, a_);
  diffusion(y.psi, b_);
  const double ax = -k * y.x;

  if (scheme_ == Scheme::EulerMaruyama) {
    y.psi += dt_ * a_ + dw * b_;
    y.x += ax * dt_ + g * dw;
  } else {
    // Supporting values: bar = Y + a dt + b dW, plus/minus = Y + a dt +- b sqrt(dt).
    bar_ = y.psi + dt_ * a_ + dw * b_;
    const double x_bar = y.x + ax * dt_ + g * dw;
    plus_ = y.psi + dt_ * a_ + sqdt_ * b_;
    minus_ = y.psi + dt_ * a_ - sqdt_ * b_;

    drift(bar_, x_bar, a_bar_);
    diffusion(plus_, b_plus_);
    diffusion(minus_, b_minus_);

    const double ito = (draw * draw - 1.0) * sqdt_;
    y.psi += (0.5 * dt_) * (a_bar_ + a_) + (0.25 * dw) * (b_plus_ + b_minus_ + 2.0 * b_) +
             (0.25 * ito) * (b_plus_ - b_minus_);
    // The noise diffusion is the constant gamma, so its correction term vanishes.
    y.x += 0.5 * (-k * x_bar + ax) * dt_ + g * dw;
  }

  if (renormalize_) {
    const double n = y.psi.norm();
    if (n > 0.0 && std::isfinite(n)) y.psi /= n;
  }
}

JointState step(const JointState& y, const ComplexMatrix& H, const ComplexMatrix& S, const NoiseModel& model,
                const SimConfig& config, RngStream& stream) {
  Stepper stepper(H, S, model, config.scheme, config.dt, config.renormalize);
  JointState out = y;
  stepper.step(out, stream);
  return out;
}

PureState target_evolution(const ComplexMatrix& H, const PureState& phi0, double t) {
  if (H.rows() != phi0.dim()) throw Error(ErrorKind::DimensionMismatch, "target_evolution");
  if (H.isZero(0.0)) return phi0;
  const ComplexMatrix U = qstate::mat_exp(ComplexMatrix(-kI * t * H));
  return PureState(U * phi0.amplitudes());
}

std::vector<SummaryRow> summarize(const std::vector<double>& times, const std::vector<PathResult>& paths) {
  std::vector<SummaryRow> rows(times.size());
  std::vector<double> f;
  for (std::size_t j = 0; j < times.size(); ++j) {
    f.clear();
    for (const PathResult& p : paths)
      if (!p.aborted) f.push_back(p.fidelity[j]);
    rows[j].t = times[j];
    rows[j].n_effective = f.size();
    if (f.size() >= 2) {
      const stats::Summary s = stats::summary(f);
      rows[j].mean = s.mean;
      rows[j].variance = s.variance;
      rows[j].stderr_mean = s.stderr_mean;
    } else if (f.size() == 1) {
      rows[j].mean = f[0];
    }
  }
  return rows;
}

SimulationResult simulate_paths(const ComplexMatrix& H, const ComplexMatrix& S, const NoiseModel& model,
                                const PureState& phi0, const SimConfig& config) {
  config.validate();
  model.validate();
  qstate::require_same_dim(H, S, "simulate_paths H vs S");
  if (H.rows() != phi0.dim()) throw Error(ErrorKind::DimensionMismatch, "simulate_paths initial state");
  if (model.stationary() && model.k <= 0.0)
    throw Error(ErrorKind::InvalidArgument, "stationary initial data needs k > 0");

  const std::size_t steps = config.steps();
  std::vector<std::size_t> record_steps{0};
  for (std::size_t s = config.record_every; s <= steps; s += config.record_every) record_steps.push_back(s);
  if (record_steps.back() != steps) record_steps.push_back(steps);

  SimulationResult result;
  result.times.reserve(record_steps.size());
  std::vector<ComplexVector> targets;
  targets.reserve(record_steps.size());
  for (std::size_t s : record_steps) {
    const double t = static_cast<double>(s) * config.dt;
    result.times.push_back(t);
    targets.push_back(target_evolution(H, phi0, t).amplitudes());
  }

  result.paths.resize(config.n_paths);
  std::vector<int> clamp_violation(config.n_paths, 0);

  parallel_for(config.n_paths, resolve_threads(config.threads), [&](std::size_t i) {
    RngStream stream(config.master_seed, streams::path(config.series, i));
    Stepper stepper(H, S, model, config.scheme, config.dt, config.renormalize);
    PathResult& out = result.paths[i];
    out.x.reserve(record_steps.size());
    out.fidelity.reserve(record_steps.size());

    JointState y{phi0.amplitudes(), model.draw_initial(stream)};
    std::size_t next_record = 0;
    for (std::size_t s = 0; s <= steps; ++s) {
      if (s > 0) {
        stepper.step(y, stream);
        const double norm = y.psi.norm();
        if (!std::isfinite(norm) || !std::isfinite(y.x) || norm > kAbortNorm) {
          out.aborted = true;
          out.abort_step = s;
          std::ostringstream msg;
          msg << "path " << i << " aborted at step " << s << " (norm " << norm << ", X " << y.x << ")";
          out.diagnostic = msg.str();
          return;
        }
        out.max_norm_drift = std::max(out.max_norm_drift, std::abs(norm - 1.0));
      }
      if (next_record < record_steps.size() && record_steps[next_record] == s) {
        double f = std::norm(targets[next_record].dot(y.psi));
        if (f < -kClampViolation || f > 1.0 + kClampViolation) clamp_violation[i] = 1;
        f = std::clamp(f, 0.0, 1.0);
        out.x.push_back(y.x);
        out.fidelity.push_back(f);
        if (config.keep_states) out.states.push_back(y.psi);
        ++next_record;
      }
    }
  });

  for (const auto& p : result.paths)
    if (p.aborted) ++result.aborted;
  if (static_cast<double>(result.aborted) > kMaxAbortFraction * static_cast<double>(config.n_paths)) {
    std::string first;
    for (const auto& p : result.paths)
      if (p.aborted) {
        first = p.diagnostic;
        break;
      }
    throw Error(ErrorKind::SimulationFailed, std::to_string(result.aborted) + " of " +
                                                 std::to_string(config.n_paths) + " paths aborted; first: " + first);
  }
  for (std::size_t i = 0; i < config.n_paths; ++i)
    if (clamp_violation[i])
      throw Error(ErrorKind::SimulationFailed,
                  "path " + std::to_string(i) + " produced a fidelity outside [0, 1] beyond tolerance");
  result.summary = summarize(result.times, result.paths);
  return result;
}

}  // namespace sselab::sde
