#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sselab/noise.hpp"
#include "sselab/qstate.hpp"
#include "sselab/rng.hpp"

namespace sselab::sde {

enum class Scheme { EulerMaruyama, PlatenWeak2 };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

/// Y = (psi, X): register state and the current value of the noise process.
struct JointState {
  ComplexVector psi;
  double x = 0.0;
};

struct SimConfig {
  double dt = 1e-3;
  double T = 1.0;
  Scheme scheme = Scheme::PlatenWeak2;
  bool renormalize = true;
  std::size_t n_paths = 1;
  std::uint64_t master_seed = 0;
  /// Record every n-th step (the final step is always recorded).
  std::size_t record_every = 1;
  /// Selects a disjoint family of path streams for multi-series runs.
  std::uint64_t series = 0;
  /// 0 picks the SSELAB_THREADS / hardware default.
  unsigned threads = 0;
  bool keep_states = false;

  void validate() const;
  std::size_t steps() const;
};

/// Drift a(Y) and diffusion b(Y) of the joint system
///   d psi = (-iH + ikX S - gamma^2/2 S^dag S) psi dt - i gamma S psi dW
///   dX    = -k X dt + gamma dW
struct DriftDiffusion {
  ComplexVector state_drift;
  ComplexVector state_diffusion;
  double noise_drift = 0.0;
  double noise_diffusion = 0.0;
};

DriftDiffusion drift_diffusion(const JointState& y, const ComplexMatrix& H, const ComplexMatrix& S,
                               const NoiseModel& model);

/// Operators of one SSE with preallocated work buffers. Not thread-safe;
/// each worker owns its own instance.
class Stepper {
 public:
  Stepper(const ComplexMatrix& H, const ComplexMatrix& S, const NoiseModel& model, Scheme scheme, double dt,
          bool renormalize);

  /// One step driven by the given standard-normal draw.
  void step(JointState& y, double draw);
  /// One step with a fresh draw from `stream`.
  void step(JointState& y, RngStream& stream) { step(y, stream.normal()); }

  Eigen::Index dim() const { return H_.rows(); }

 private:
  void drift(const ComplexVector& psi, double x, ComplexVector& out);
  void diffusion(const ComplexVector& psi, ComplexVector& out);

  ComplexMatrix H_;
  ComplexMatrix S_;
  ComplexMatrix base_;  // -iH - gamma^2/2 S^dag S
  NoiseModel model_;
  Scheme scheme_;
  double dt_;
  double sqdt_;
  bool renormalize_;
  ComplexVector a_, b_, bar_, a_bar_, plus_, minus_, b_plus_, b_minus_, tmp_;
};

/// Stateless single step for callers that do not keep a Stepper around.
JointState step(const JointState& y, const ComplexMatrix& H, const ComplexMatrix& S, const NoiseModel& model,
                const SimConfig& config, RngStream& stream);

/// Noiseless target phi_t = exp(-iHt) phi_0.
PureState target_evolution(const ComplexMatrix& H, const PureState& phi0, double t);

struct PathResult {
  std::vector<double> x;
  std::vector<double> fidelity;
  std::vector<ComplexVector> states;
  double max_norm_drift = 0.0;
  bool aborted = false;
  std::size_t abort_step = 0;
  std::string diagnostic;
};

struct SummaryRow {
  double t = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double stderr_mean = 0.0;
  std::size_t n_effective = 0;
};

struct SimulationResult {
  std::vector<double> times;
  std::vector<PathResult> paths;
  std::vector<SummaryRow> summary;
  std::size_t aborted = 0;
};

/// Integrates n_paths independent trajectories. Path i draws from stream
/// (master_seed, streams::path(series, i)), so results do not depend on the
/// worker count. Aborted paths (NaN or norm > 1.5) are excluded from the
/// summary; more than 1% aborts, or a fidelity outside [-1e-6, 1 + 1e-6]
/// before clamping, throws.
SimulationResult simulate_paths(const ComplexMatrix& H, const ComplexMatrix& S, const NoiseModel& model,
                                const PureState& phi0, const SimConfig& config);

/// Per-time summary of the non-aborted paths.
std::vector<SummaryRow> summarize(const std::vector<double>& times, const std::vector<PathResult>& paths);

inline constexpr double kAbortNorm = 1.5;
inline constexpr double kMaxAbortFraction = 0.01;
inline constexpr double kClampTolerance = 1e-9;
inline constexpr double kClampViolation = 1e-6;

}  // namespace sselab::sde
