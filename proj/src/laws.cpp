#include "sselab/laws.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "sselab/error.hpp"

namespace sselab::laws {

CosineSeries::CosineSeries(std::vector<double> coefficients) : c_(std::move(coefficients)) {
  for (double c : c_)
    if (!std::isfinite(c)) throw Error(ErrorKind::NonFinite, "cosine series coefficient is not finite");
  trim();
}

CosineSeries CosineSeries::constant(double c) { return CosineSeries(std::vector<double>{c}); }

CosineSeries CosineSeries::from_terms(const std::vector<std::pair<int, double>>& terms) {
  int top = 0;
  for (const auto& [m, c] : terms) {
    if (m < 0) throw Error(ErrorKind::InvalidArgument, "negative harmonic");
    top = std::max(top, m);
  }
  std::vector<double> c(static_cast<std::size_t>(top) + 1, 0.0);
  for (const auto& [m, v] : terms) c[static_cast<std::size_t>(m)] += v;
  return CosineSeries(std::move(c));
}

void CosineSeries::trim() {
  while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
}

double CosineSeries::coeff(int m) const {
  if (m < 0 || m >= static_cast<int>(c_.size())) return 0.0;
  return c_[static_cast<std::size_t>(m)];
}

std::vector<std::pair<int, double>> CosineSeries::terms() const {
  std::vector<std::pair<int, double>> out;
  for (std::size_t m = 0; m < c_.size(); ++m)
    if (c_[m] != 0.0) out.emplace_back(static_cast<int>(m), c_[m]);
  return out;
}

double CosineSeries::operator()(double x) const {
  double s = 0.0;
  for (std::size_t m = 0; m < c_.size(); ++m)
    if (c_[m] != 0.0) s += c_[m] * (m == 0 ? 1.0 : std::cos(static_cast<double>(m) * x));
  return s;
}

CosineSeries CosineSeries::operator+(const CosineSeries& o) const {
  std::vector<double> c(std::max(c_.size(), o.c_.size()), 0.0);
  for (std::size_t m = 0; m < c_.size(); ++m) c[m] += c_[m];
  for (std::size_t m = 0; m < o.c_.size(); ++m) c[m] += o.c_[m];
  return CosineSeries(std::move(c));
}

CosineSeries CosineSeries::operator-(const CosineSeries& o) const { return *this + o * -1.0; }

CosineSeries CosineSeries::operator*(double s) const {
  std::vector<double> c = c_;
  for (double& v : c) v *= s;
  return CosineSeries(std::move(c));
}

CosineSeries operator*(double s, const CosineSeries& c) { return c * s; }

CosineSeries CosineSeries::operator*(const CosineSeries& o) const {
  if (c_.empty() || o.c_.empty()) return CosineSeries();
  std::vector<double> c(c_.size() + o.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0.0) continue;
    for (std::size_t j = 0; j < o.c_.size(); ++j) {
      const double p = 0.5 * c_[i] * o.c_[j];
      c[i + j] += p;
      c[i > j ? i - j : j - i] += p;
    }
  }
  return CosineSeries(std::move(c));
}

double CosineSeries::min_on_grid(int n) const {
  double lo = (*this)(0.0);
  for (int i = 1; i < n; ++i) lo = std::min(lo, (*this)(2.0 * std::numbers::pi * i / n));
  return lo;
}

double CosineSeries::max_on_grid(int n) const {
  double hi = (*this)(0.0);
  for (int i = 1; i < n; ++i) hi = std::max(hi, (*this)(2.0 * std::numbers::pi * i / n));
  return hi;
}

std::string to_string(NoiseClass c) { return c == NoiseClass::Pauli ? "pauli" : "projection"; }

NoiseClass parse_noise_class(const std::string& s) {
  if (s == "pauli") return NoiseClass::Pauli;
  if (s == "projection") return NoiseClass::Projection;
  throw Error(ErrorKind::InvalidArgument, "unknown noise class '" + s + "'");
}

namespace {
void require_unit(double v, double bound, const char* what) {
  if (!std::isfinite(v) || std::abs(v) > bound + 1e-12)
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " out of range");
}
}  // namespace

CosineSeries pauli_law(double s0) {
  require_unit(s0, 1.0, "s0");
  const double s2 = s0 * s0;
  return CosineSeries::from_terms({{0, 0.5 * (1.0 + s2)}, {2, 0.5 * (1.0 - s2)}});
}

CosineSeries projection_law(double s0) {
  require_unit(s0, 1.0, "s0");
  const double s2 = s0 * s0;
  const double w = 2.0 * (1.0 - s2) * s2;
  return CosineSeries::from_terms({{0, 1.0 - w}, {1, w}});
}

bool is_valid_fidelity_law(const CosineSeries& law, double tol) {
  return law.min_on_grid() >= -tol && law.max_on_grid() <= 1.0 + tol;
}

CosineSeries two_qubit_law(double s0, double r0, NoiseClass cls) {
  require_unit(s0, 2.0, "s0");
  require_unit(r0, 1.0, "r0");
  CosineSeries law;
  if (cls == NoiseClass::Pauli) {
    // (1/4)[s^2 + (r-1)^2 + 2(1 - r^2) cos 2x + (1 - s + r)(1 + s + r) cos^2 2x]
    const CosineSeries cos2 = CosineSeries::from_terms({{2, 1.0}});
    law = 0.25 * (CosineSeries::constant(s0 * s0 + (r0 - 1.0) * (r0 - 1.0)) + 2.0 * (1.0 - r0 * r0) * cos2 +
                  (1.0 - s0 + r0) * (1.0 + s0 + r0) * (cos2 * cos2));
  } else {
    // 1 - 2(c - 1)(s^2 + s(2r(c - 1) - 1) - 2r[r(c - 1) + c]) with c = cos x
    const CosineSeries c = CosineSeries::from_terms({{1, 1.0}});
    const CosineSeries one = CosineSeries::constant(1.0);
    const CosineSeries u = c - one;
    const CosineSeries inner = CosineSeries::constant(s0 * s0) + s0 * (2.0 * r0 * u - one) - 2.0 * r0 * (r0 * u + c);
    law = one - 2.0 * (u * inner);
  }
  if (!is_valid_fidelity_law(law))
    throw Error(ErrorKind::InvalidLaw, "two-qubit law with s0=" + std::to_string(s0) + ", r0=" +
                                           std::to_string(r0) + " leaves [0, 1]");
  return law;
}

CosineSeries product_law(const std::vector<CosineSeries>& singles) {
  CosineSeries out = CosineSeries::constant(1.0);
  for (const auto& s : singles) out = out * s;
  return out;
}

MeanVariance series_mean_variance(const CosineSeries& law, const NoiseModel& model, double t) {
  const auto expect = [&](const CosineSeries& s) {
    double e = 0.0;
    for (const auto& [m, c] : s.terms()) e += c * expected_cos(static_cast<double>(m), model, t);
    return e;
  };
  MeanVariance mv;
  mv.mean = expect(law);
  mv.variance = std::max(0.0, expect(law * law) - mv.mean * mv.mean);
  return mv;
}

std::vector<double> sample_distribution(const CosineSeries& law, const NoiseModel& model, double t, std::size_t n,
                                        RngStream& stream) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "sample_distribution needs n >= 1");
  const double sd = std::sqrt(increment_variance(model, t));
  std::vector<double> out(n);
  for (double& v : out) v = law(sd * stream.normal());
  return out;
}

nlohmann::json to_json(const NoiseModel& model) {
  return {{"kind", to_string(model.kind)}, {"gamma", model.gamma}, {"k", model.k}, {"init", to_string(model.init)}};
}

nlohmann::json to_json(const ScenarioLaw& law) {
  nlohmann::json h = nlohmann::json::array();
  for (const auto& [m, c] : law.series.terms()) h.push_back({m, c});
  nlohmann::json j = {{"harmonics", h}, {"s0", law.s0}, {"model", to_json(law.model)}};
  j["r0"] = law.has_r0 ? nlohmann::json(law.r0) : nlohmann::json(nullptr);
  return j;
}

LinearSdeSystem pauli_system(double s0, double gamma) {
  const double g2 = gamma * gamma;
  LinearSdeSystem sys;
  sys.A = g2 * (Eigen::Matrix3d() << -1, 1, 0, 1, -1, 0, 0, 0, -2).finished();
  sys.B = (Eigen::Matrix3d() << 0, 0, -1, 0, 0, 1, 2, -2, 0).finished();
  sys.a = Eigen::Vector3d::Zero();
  sys.b = Eigen::Vector3d::Zero();
  sys.V0 = Eigen::Vector3d(1.0, s0 * s0, 0.0);
  return sys;
}

LinearSdeSystem projection_system(double s0, double gamma) {
  const double g2 = gamma * gamma;
  const double p = s0 * s0;
  LinearSdeSystem sys;
  sys.A = -0.5 * g2 * (Eigen::Matrix3d() << 0, 1, 0, 0, 1, 0, 0, 0, 1).finished();
  // Cross term taken as 2 Im(phi^dag S psi psi^dag phi); B then has the
  // spectrum {0, +-i} that the cosine law requires.
  sys.B = (Eigen::Matrix3d() << 0, 0, 1, 0, 0, 1, 0, -1, 0).finished();
  sys.a = g2 * p * p * Eigen::Vector3d(1.0, 1.0, 0.0);
  sys.b = Eigen::Vector3d(0.0, 0.0, 2.0 * p * p);
  sys.V0 = Eigen::Vector3d(1.0, 2.0 * p, 0.0);
  return sys;
}

DiagonalizedSolution diagonalized_solve(const LinearSdeSystem& sys) {
  const Eigen::Index n = sys.B.rows();
  if (sys.B.cols() != n || sys.A.rows() != n || sys.A.cols() != n || sys.a.size() != n || sys.b.size() != n ||
      sys.V0.size() != n)
    throw Error(ErrorKind::DimensionMismatch, "diagonalized_solve");

  const Eigen::MatrixXd B2 = sys.B * sys.B;
  const double scale = std::max({1.0, sys.A.norm(), B2.norm()});
  // A must be lambda B^2 for some lambda >= 0 (lambda = gamma^2 / 2).
  double lambda = 0.0;
  if (B2.squaredNorm() > 0.0) lambda = (sys.A.cwiseProduct(B2)).sum() / B2.squaredNorm();
  if ((sys.A - lambda * B2).norm() > 1e-10 * scale || lambda < -1e-14)
    throw Error(ErrorKind::NotDiagonalizable, "drift matrix is not (gamma^2/2) B^2; use the Magnus route");

  // Shift c with B c = -b; then the affine drift must equal lambda B b.
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sys.B);
  const Eigen::VectorXd c = cod.solve(-sys.b);
  if ((sys.B * c + sys.b).norm() > 1e-10 * std::max(1.0, sys.b.norm()))
    throw Error(ErrorKind::NotDiagonalizable, "b is not in the range of B");
  if ((sys.a - lambda * sys.B * sys.b).norm() > 1e-10 * std::max(1.0, sys.a.norm()))
    throw Error(ErrorKind::NotDiagonalizable, "affine drift a is incompatible with B and b");

  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(sys.B.cast<cplx>());
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NotDiagonalizable, "eigensolver failed");
  const Eigen::MatrixXcd& P = es.eigenvectors();
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(P);
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(P);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) < 1e-8 * sv(0)) throw Error(ErrorKind::NotDiagonalizable, "B has no eigenbasis");

  DiagonalizedSolution sol;
  sol.P_ = P;
  sol.lambda_ = es.eigenvalues();
  sol.c_ = c;
  sol.z0_minus_c_ = lu.solve((sys.V0 - c).cast<cplx>());
  return sol;
}

Eigen::VectorXd DiagonalizedSolution::operator()(double dx) const {
  const Eigen::VectorXcd z = (lambda_ * dx).array().exp().matrix().cwiseProduct(z0_minus_c_);
  return (P_ * z).real() + c_;
}

}  // namespace sselab::laws
