#include "lambda_forge/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lambda_forge/errors.hpp"

namespace lf {

namespace {

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

std::string shape(std::size_t a, std::size_t b) {
  std::ostringstream os;
  os << a << "x" << b;
  return os.str();
}

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

QOperator::QOperator(Matrix data, std::size_t dim_a, std::size_t dim_b)
    : data_(std::move(data)), dim_a_(dim_a), dim_b_(dim_b) {
  if (dim_a == 0 || dim_b == 0) throw InvalidDimension("QOperator: zero subsystem dimension");
  const auto n = static_cast<Eigen::Index>(dim_a * dim_b);
  if (data_.rows() != n || data_.cols() != n) {
    throw InvalidDimension("QOperator: matrix is " + shape(data_.rows(), data_.cols()) +
                           " but dims " + shape(dim_a, dim_b) + " require side " +
                           std::to_string(n));
  }
}

QOperator::QOperator(Matrix data) : QOperator(data, static_cast<std::size_t>(data.rows()), 1) {}

QOperator QOperator::identity(std::size_t dim_a, std::size_t dim_b) {
  const auto n = static_cast<Eigen::Index>(dim_a * dim_b);
  return QOperator(Matrix::Identity(n, n), dim_a, dim_b);
}

QOperator QOperator::zero(std::size_t dim_a, std::size_t dim_b) {
  const auto n = static_cast<Eigen::Index>(dim_a * dim_b);
  return QOperator(Matrix::Zero(n, n), dim_a, dim_b);
}

bool QOperator::is_hermitian(double rel_tol) const {
  const double scale = max_abs(data_);
  if (scale == 0.0) return true;
  return max_abs(data_ - data_.adjoint()) < rel_tol * scale;
}

QOperator QOperator::adjoint() const { return QOperator(data_.adjoint(), dim_a_, dim_b_); }

void QOperator::check_same_shape(const QOperator& o) const {
  if (o.side() != side()) {
    throw InvalidDimension("QOperator: side mismatch " + std::to_string(side()) + " vs " +
                           std::to_string(o.side()));
  }
}

QOperator& QOperator::operator+=(const QOperator& o) {
  check_same_shape(o);
  data_ += o.data_;
  return *this;
}

QOperator& QOperator::operator-=(const QOperator& o) {
  check_same_shape(o);
  data_ -= o.data_;
  return *this;
}

QOperator& QOperator::operator*=(Complex s) {
  data_ *= s;
  return *this;
}

QOperator operator*(const QOperator& a, const QOperator& b) {
  a.check_same_shape(b);
  return QOperator(a.data_ * b.data_, a.dim_a_, a.dim_b_);
}

QOperator annihilation(std::size_t dim) {
  if (dim < 2) throw InvalidDimension("annihilation: dim must be >= 2, got " + std::to_string(dim));
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) m(k - 1, k) = std::sqrt(static_cast<double>(k));
  return QOperator(std::move(m), dim);
}

QOperator creation(std::size_t dim) { return annihilation(dim).adjoint(); }

QOperator number_operator(std::size_t dim) {
  if (dim < 1) throw InvalidDimension("number_operator: dim must be >= 1");
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) m(k, k) = static_cast<double>(k);
  return QOperator(std::move(m), dim);
}

QOperator sigma_minus() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return QOperator(std::move(m), 2);
}

QOperator sigma_plus() { return sigma_minus().adjoint(); }

QOperator sigma_z() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = -1.0;
  m(1, 1) = 1.0;
  return QOperator(std::move(m), 2);
}

QOperator sigma_x() { return sigma_minus() + sigma_plus(); }

QOperator projector(std::size_t dim, std::size_t level) {
  if (level >= dim) throw InvalidDimension("projector: level outside space");
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix m = Matrix::Zero(n, n);
  m(static_cast<Eigen::Index>(level), static_cast<Eigen::Index>(level)) = 1.0;
  return QOperator(std::move(m), dim);
}

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

QOperator tensor(const QOperator& a, const QOperator& b) {
  return QOperator(kron(a.matrix(), b.matrix()), a.side(), b.side());
}

Eigensystem eigendecompose(const QOperator& h, std::size_t k) {
  if (!h.is_hermitian()) throw ContractViolation("eigendecompose: operator is not Hermitian");
  if (k == 0 || k > h.side()) {
    throw ContractViolation("eigendecompose: k=" + std::to_string(k) + " outside [1, " +
                            std::to_string(h.side()) + "]");
  }
  // Symmetrize so round-off asymmetry below the Hermiticity tolerance does not leak in.
  const Matrix sym = 0.5 * (h.matrix() + h.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw ContractViolation("eigendecompose: solver failed");
  Eigensystem out;
  const auto kk = static_cast<Eigen::Index>(k);
  out.values.resize(k);
  for (Eigen::Index i = 0; i < kk; ++i) out.values[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  out.vectors = solver.eigenvectors().leftCols(kk);
  return out;
}

QState::QState(Matrix rho, std::size_t dim_a, std::size_t dim_b)
    : rho_(std::move(rho)), dim_a_(dim_a), dim_b_(dim_b) {
  const auto n = static_cast<Eigen::Index>(dim_a * dim_b);
  if (n == 0 || rho_.rows() != n || rho_.cols() != n) {
    throw InvalidDimension("QState: density matrix shape does not match dims " + shape(dim_a, dim_b));
  }
  const double tr_err = std::abs(rho_.trace() - Complex(1.0));
  if (tr_err >= kTraceTol) {
    throw ContractViolation("QState: |trace - 1| = " + sci(tr_err));
  }
  const double herm = max_abs(rho_ - rho_.adjoint());
  if (herm >= kHermitianTol * std::max(1.0, max_abs(rho_))) {
    throw ContractViolation("QState: density matrix not Hermitian (" + sci(herm) + ")");
  }
  const double lmin = min_eigenvalue();
  if (lmin <= -kPositivityTol) {
    throw ContractViolation("QState: negative eigenvalue " + sci(lmin));
  }
}

QState QState::pure(const Vector& psi, std::size_t dim_a, std::size_t dim_b) {
  const double norm = psi.norm();
  if (norm == 0.0) throw ContractViolation("QState::pure: zero vector");
  const Vector v = psi / norm;
  Matrix rho = v * v.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return QState(std::move(rho), dim_a, dim_b);
}

QState QState::basis(std::size_t level, std::size_t dim_a, std::size_t dim_b) {
  const auto n = static_cast<Eigen::Index>(dim_a * dim_b);
  if (level >= dim_a * dim_b) throw InvalidDimension("QState::basis: level outside space");
  Matrix rho = Matrix::Zero(n, n);
  rho(static_cast<Eigen::Index>(level), static_cast<Eigen::Index>(level)) = 1.0;
  return QState(std::move(rho), dim_a, dim_b);
}

double QState::min_eigenvalue() const {
  const Matrix sym = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

QState tensor(const QState& a, const QState& b) {
  return QState(kron(a.rho(), b.rho()), a.side(), b.side());
}

QState coherent_state(std::size_t dim, Complex alpha) {
  if (dim < 1) throw InvalidDimension("coherent_state: dim must be >= 1");
  Vector psi(static_cast<Eigen::Index>(dim));
  Complex term = 1.0;
  for (std::size_t n = 0; n < dim; ++n) {
    if (n > 0) term *= alpha / std::sqrt(static_cast<double>(n));
    psi(static_cast<Eigen::Index>(n)) = term;
  }
  return QState::pure(psi, dim);
}

Complex expectation(const QOperator& op, const QState& state) {
  if (op.side() != state.side()) {
    throw InvalidDimension("expectation: operator side " + std::to_string(op.side()) +
                           " vs state side " + std::to_string(state.side()));
  }
  // tr(A B) = sum_ij A_ij B_ji
  return (op.matrix().transpose().cwiseProduct(state.rho())).sum();
}

std::size_t Trajectory::column(const std::string& name) const {
  const auto it = std::find(observables.begin(), observables.end(), name);
  if (it == observables.end()) throw ContractViolation("Trajectory: no observable '" + name + "'");
  return static_cast<std::size_t>(it - observables.begin());
}

std::vector<double> Trajectory::series(const std::string& name) const {
  const auto c = static_cast<Eigen::Index>(column(name));
  std::vector<double> out(static_cast<std::size_t>(values.rows()));
  for (Eigen::Index i = 0; i < values.rows(); ++i) out[static_cast<std::size_t>(i)] = values(i, c);
  return out;
}

}  // namespace lf
