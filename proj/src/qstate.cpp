#include "sselab/qstate.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include <unsupported/Eigen/MatrixFunctions>

namespace sselab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::NonFinite: return "non-finite value";
    case ErrorKind::NotDiagonalizable: return "not diagonalizable";
    case ErrorKind::InvalidLaw: return "invalid law";
    case ErrorKind::SimulationFailed: return "simulation failed";
    case ErrorKind::Config: return "config error";
  }
  return "error";
}

PureState::PureState(ComplexVector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) throw Error(ErrorKind::InvalidArgument, "empty state");
  if (!amps_.allFinite()) throw Error(ErrorKind::NonFinite, "state amplitudes");
  const double norm = amps_.norm();
  if (norm == 0.0) throw Error(ErrorKind::InvalidArgument, "zero state vector");
  amps_ /= norm;
}

PureState PureState::basis(Eigen::Index dim, Eigen::Index index) {
  if (index < 0 || index >= dim) throw Error(ErrorKind::InvalidArgument, "basis index out of range");
  ComplexVector v = ComplexVector::Zero(dim);
  v[index] = 1.0;
  return PureState(std::move(v));
}

cplx PureState::overlap(const PureState& other) const {
  if (other.dim() != dim()) throw Error(ErrorKind::DimensionMismatch, "overlap");
  return amps_.dot(other.amps_);
}

PureState tensor(const PureState& a, const PureState& b) {
  ComplexVector v(a.dim() * b.dim());
  for (Eigen::Index i = 0; i < a.dim(); ++i) v.segment(i * b.dim(), b.dim()) = a[i] * b.amplitudes();
  return PureState(std::move(v));
}

namespace qstate {

Axis parse_axis(const std::string& name) {
  if (name == "i" || name == "I") return Axis::I;
  if (name == "x" || name == "X") return Axis::X;
  if (name == "y" || name == "Y") return Axis::Y;
  if (name == "z" || name == "Z") return Axis::Z;
  throw Error(ErrorKind::InvalidArgument, "unknown Pauli axis '" + name + "'");
}

std::string to_string(Axis axis) {
  switch (axis) {
    case Axis::I: return "i";
    case Axis::X: return "x";
    case Axis::Y: return "y";
    case Axis::Z: return "z";
  }
  return "?";
}

ComplexMatrix identity(Eigen::Index dim) { return ComplexMatrix::Identity(dim, dim); }

ComplexMatrix pauli(Axis axis) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  const cplx i{0.0, 1.0};
  switch (axis) {
    case Axis::I: m(0, 0) = 1.0; m(1, 1) = 1.0; break;
    case Axis::X: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
    case Axis::Y: m(0, 1) = -i; m(1, 0) = i; break;
    case Axis::Z: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
  }
  return m;
}

ComplexMatrix projector_one() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(1, 1) = 1.0;
  return m;
}

ComplexMatrix coupling(double phase) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = std::polar(1.0, phase);
  m(1, 0) = std::polar(1.0, -phase);
  return m;
}

ComplexMatrix control(double omega, double phase, double delta) {
  return omega * coupling(phase) + 0.5 * delta * projector_one();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix kron(const std::vector<ComplexMatrix>& factors) {
  if (factors.empty()) throw Error(ErrorKind::InvalidArgument, "empty tensor product");
  ComplexMatrix out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
  return out;
}

ComplexMatrix embed(const ComplexMatrix& q, int site, int n_qubits) {
  if (q.rows() != 2 || q.cols() != 2) throw Error(ErrorKind::DimensionMismatch, "embed expects a 1-qubit operator");
  if (site < 0 || site >= n_qubits) throw Error(ErrorKind::InvalidArgument, "embed site out of range");
  std::vector<ComplexMatrix> factors(static_cast<std::size_t>(n_qubits), identity(2));
  factors[static_cast<std::size_t>(site)] = q;
  return kron(factors);
}

ComplexMatrix collective(const ComplexMatrix& q, int n_qubits) {
  std::vector<ComplexMatrix> terms;
  for (int j = 0; j < n_qubits; ++j) terms.push_back(embed(q, j, n_qubits));
  return sum(terms);
}

ComplexMatrix sum(const std::vector<ComplexMatrix>& terms) {
  if (terms.empty()) throw Error(ErrorKind::InvalidArgument, "empty operator sum");
  ComplexMatrix out = terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) {
    require_same_dim(out, terms[i], "operator sum");
    out += terms[i];
  }
  return out;
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": " + std::to_string(a.rows()) + "x" +
                                                  std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                                                  "x" + std::to_string(b.cols()));
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b, bool anti) {
  require_same_dim(a, b, "commutator");
  return anti ? ComplexMatrix(a * b + b * a) : ComplexMatrix(a * b - b * a);
}

cplx expect_value(const ComplexMatrix& a, const PureState& phi) {
  if (a.rows() != phi.dim() || a.cols() != phi.dim()) throw Error(ErrorKind::DimensionMismatch, "expect_value");
  return phi.amplitudes().dot(a * phi.amplitudes());
}

double expect_real(const ComplexMatrix& a, const PureState& phi) {
  if (!is_hermitian(a)) throw Error(ErrorKind::InvalidArgument, "expect_real needs a Hermitian operator");
  return expect_value(a, phi).real();
}

ComplexMatrix mat_exp(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::DimensionMismatch, "mat_exp needs a square matrix");
  if (!a.allFinite()) throw Error(ErrorKind::NonFinite, "mat_exp input");
  return a.exp();
}

Eigen::MatrixXd mat_exp(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::DimensionMismatch, "mat_exp needs a square matrix");
  if (!a.allFinite()) throw Error(ErrorKind::NonFinite, "mat_exp input");
  return a.exp();
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Splits on `sep` at parenthesis depth zero.
std::vector<std::string> split_top(const std::string& s, char sep) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(trim(cur));
  return parts;
}

bool parse_number(const std::string& s, double& out) {
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end != s.c_str() && *end == '\0';
}

ComplexMatrix build_term(const std::string& term) {
  double scale = 1.0;
  std::vector<ComplexMatrix> factors;
  for (const std::string& f : split_top(term, '*')) {
    double value = 0.0;
    if (f.empty()) throw Error(ErrorKind::InvalidArgument, "empty factor in operator '" + term + "'");
    if (parse_number(f, value)) {
      scale *= value;
    } else if (f == "p1") {
      factors.push_back(projector_one());
    } else if (f.rfind("control(", 0) == 0 && f.back() == ')') {
      const auto args = split_top(f.substr(8, f.size() - 9), ',');
      double v[3];
      if (args.size() != 3 || !parse_number(args[0], v[0]) || !parse_number(args[1], v[1]) ||
          !parse_number(args[2], v[2]))
        throw Error(ErrorKind::InvalidArgument, "control() takes omega, phase, delta");
      factors.push_back(control(v[0], v[1], v[2]));
    } else {
      factors.push_back(pauli(parse_axis(f)));
    }
  }
  if (factors.empty()) throw Error(ErrorKind::InvalidArgument, "operator term without factors: '" + term + "'");
  return scale * kron(factors);
}

}  // namespace

ComplexMatrix build_operator(const std::string& spec) {
  const std::string s = trim(spec);
  if (s.empty()) throw Error(ErrorKind::InvalidArgument, "empty operator spec");
  std::vector<ComplexMatrix> terms;
  for (const std::string& t : split_top(s, '+')) terms.push_back(build_term(t));
  return sum(terms);
}

}  // namespace qstate
}  // namespace sselab
