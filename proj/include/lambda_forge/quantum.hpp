#pragma once

// Truncated Fock-space operator algebra.
//
// Composite spaces are ordered (A ⊗ B); for the circuit and Λ models A is
// the resonator and B the fluxonium / two-level system, so a basis index is
// n_a * dim_b + n_b.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lf {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;

class QOperator {
 public:
  QOperator() = default;
  /// Throws InvalidDimension unless data is square with side dim_a * dim_b.
  QOperator(Matrix data, std::size_t dim_a, std::size_t dim_b = 1);
  explicit QOperator(Matrix data);

  static QOperator identity(std::size_t dim_a, std::size_t dim_b = 1);
  static QOperator zero(std::size_t dim_a, std::size_t dim_b = 1);

  const Matrix& matrix() const { return data_; }
  std::size_t dim_a() const { return dim_a_; }
  std::size_t dim_b() const { return dim_b_; }
  std::size_t side() const { return dim_a_ * dim_b_; }

  /// max|M - M^dagger| < rel_tol * max|M|.
  bool is_hermitian(double rel_tol = 1e-12) const;
  QOperator adjoint() const;

  QOperator& operator+=(const QOperator& o);
  QOperator& operator-=(const QOperator& o);
  QOperator& operator*=(Complex s);

  friend QOperator operator+(QOperator a, const QOperator& b) { return a += b; }
  friend QOperator operator-(QOperator a, const QOperator& b) { return a -= b; }
  friend QOperator operator*(QOperator a, Complex s) { return a *= s; }
  friend QOperator operator*(Complex s, QOperator a) { return a *= s; }
  friend QOperator operator*(QOperator a, double s) { return a *= Complex(s); }
  friend QOperator operator*(double s, QOperator a) { return a *= Complex(s); }
  /// Operator product; dims of the left operand are kept.
  friend QOperator operator*(const QOperator& a, const QOperator& b);

 private:
  void check_same_shape(const QOperator& o) const;

  Matrix data_;
  std::size_t dim_a_ = 0;
  std::size_t dim_b_ = 1;
};

/// Ladder operator with sqrt(k) at (k-1, k). Throws InvalidDimension for dim < 2.
QOperator annihilation(std::size_t dim);
QOperator creation(std::size_t dim);
QOperator number_operator(std::size_t dim);

// Two-level operators in the basis (|g>, |e>) with sigma_z |e> = +|e>.
QOperator sigma_minus();
QOperator sigma_plus();
QOperator sigma_z();
QOperator sigma_x();
QOperator projector(std::size_t dim, std::size_t level);

/// Kronecker product A ⊗ B with dims (side(A), side(B)).
QOperator tensor(const QOperator& a, const QOperator& b);

struct Eigensystem {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column k pairs with values[k]
};

/// Lowest k eigenpairs of a Hermitian operator. Throws ContractViolation for
/// non-Hermitian input or k outside [1, side].
Eigensystem eigendecompose(const QOperator& h, std::size_t k);

class QState {
 public:
  QState() = default;
  /// Validates trace, Hermiticity and positivity; throws ContractViolation.
  QState(Matrix rho, std::size_t dim_a, std::size_t dim_b = 1);

  static QState pure(const Vector& psi, std::size_t dim_a, std::size_t dim_b = 1);
  /// |level><level| on a dim_a x dim_b space.
  static QState basis(std::size_t level, std::size_t dim_a, std::size_t dim_b = 1);

  const Matrix& rho() const { return rho_; }
  std::size_t dim_a() const { return dim_a_; }
  std::size_t dim_b() const { return dim_b_; }
  std::size_t side() const { return dim_a_ * dim_b_; }

  double trace() const { return rho_.trace().real(); }
  double min_eigenvalue() const;

  static constexpr double kTraceTol = 1e-9;
  static constexpr double kPositivityTol = 1e-9;
  static constexpr double kHermitianTol = 1e-12;

 private:
  Matrix rho_;
  std::size_t dim_a_ = 0;
  std::size_t dim_b_ = 1;
};

QState tensor(const QState& a, const QState& b);

/// Truncated coherent state: normalized series sum alpha^n/sqrt(n!) |n>.
QState coherent_state(std::size_t dim, Complex alpha);

/// tr(op rho). Throws InvalidDimension on mismatched sides.
Complex expectation(const QOperator& op, const QState& state);

struct Trajectory {
  std::vector<double> times;
  std::vector<std::string> observables;
  RealMatrix values;  // n_times x n_observables

  std::size_t column(const std::string& name) const;
  std::vector<double> series(const std::string& name) const;
};

}  // namespace lf
