#include <doctest.h>

#include <cmath>
#include <random>

#include "lambda_forge/errors.hpp"
#include "lambda_forge/quantum.hpp"
#include "lambda_forge/units.hpp"

using namespace lf;

TEST_CASE("annihilation operator entries") {
  const Matrix a2 = annihilation(2).matrix();
  CHECK(a2(0, 1) == Complex(1.0));
  CHECK(a2(0, 0) == Complex(0.0));
  CHECK(a2(1, 0) == Complex(0.0));
  CHECK(a2(1, 1) == Complex(0.0));
  CHECK(annihilation(3).matrix()(1, 2).real() == doctest::Approx(1.41421).epsilon(1e-5));
  CHECK_THROWS_AS(annihilation(1), InvalidDimension);
}

TEST_CASE("truncated commutator is identity except the top entry") {
  const QOperator a = annihilation(10);
  const Matrix c = (a * a.adjoint() - a.adjoint() * a).matrix();
  for (Eigen::Index i = 0; i < 10; ++i) {
    for (Eigen::Index j = 0; j < 10; ++j) {
      const double expect = i != j ? 0.0 : (i == 9 ? -9.0 : 1.0);
      CHECK(std::abs(c(i, j) - expect) < 1e-14);
    }
  }
}

TEST_CASE("tensor products") {
  CHECK(tensor(QOperator::identity(2), QOperator::identity(3)).matrix().isApprox(Matrix::Identity(6, 6)));
  const Eigensystem es = eigendecompose(tensor(sigma_z(), QOperator::identity(2)), 4);
  CHECK(es.values[0] == doctest::Approx(-1.0));
  CHECK(es.values[1] == doctest::Approx(-1.0));
  CHECK(es.values[2] == doctest::Approx(1.0));
  CHECK(es.values[3] == doctest::Approx(1.0));
  // ((0,1),(1,0)): row index 0*2+1, column 1*2+0
  const QOperator t = tensor(annihilation(2), creation(2));
  CHECK(t.matrix()(1, 2) == Complex(1.0));
  CHECK(t.dim_a() == 2);
  CHECK(t.dim_b() == 2);
}

TEST_CASE("eigendecompose: diagonal, oscillator and random Hermitian") {
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 3.0, 1.0, 2.0;
  const Eigensystem es = eigendecompose(QOperator(d), 2);
  REQUIRE(es.values.size() == 2);
  CHECK(es.values[0] == doctest::Approx(1.0));
  CHECK(es.values[1] == doctest::Approx(2.0));

  const double w = kTwoPi * 6.82e9;
  const QOperator h = w * (number_operator(8) + 0.5 * QOperator::identity(8));
  const Eigensystem osc = eigendecompose(h, 8);
  for (std::size_t k = 1; k < 8; ++k) {
    CHECK((osc.values[k] - osc.values[k - 1]) / kTwoPi == doctest::Approx(6.82e9).epsilon(1e-12));
  }

  std::mt19937 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(8, 8);
  for (Eigen::Index i = 0; i < 8; ++i) {
    for (Eigen::Index j = 0; j < 8; ++j) m(i, j) = Complex(n(rng), n(rng));
  }
  const Matrix herm = 0.5 * (m + m.adjoint());
  const Eigensystem r = eigendecompose(QOperator(herm), 8);
  for (std::size_t k = 0; k < 8; ++k) {
    const Vector v = r.vectors.col(static_cast<Eigen::Index>(k));
    CHECK((herm * v - r.values[k] * v).norm() < 1e-9);
    if (k > 0) CHECK(r.values[k] >= r.values[k - 1]);
  }
  CHECK((r.vectors.adjoint() * r.vectors - Matrix::Identity(8, 8)).norm() < 1e-10);
}

TEST_CASE("eigendecompose rejects non-Hermitian input and bad k") {
  CHECK_THROWS_AS(eigendecompose(annihilation(3), 1), ContractViolation);
  CHECK_THROWS_AS(eigendecompose(sigma_z(), 3), ContractViolation);
  CHECK_THROWS_AS(eigendecompose(sigma_z(), 0), ContractViolation);
}

TEST_CASE("QState invariants are enforced") {
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 0) = 0.5;
  CHECK_THROWS_AS(QState(bad, 2), ContractViolation);
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.1;
  neg(1, 1) = -0.1;
  CHECK_THROWS_AS(QState(neg, 2), ContractViolation);
  Matrix nonherm = Matrix::Identity(2, 2) * 0.5;
  nonherm(0, 1) = 0.1;
  CHECK_THROWS_AS(QState(nonherm, 2), ContractViolation);
  CHECK_NOTHROW(QState(Matrix::Identity(2, 2) * 0.5, 2));
}

TEST_CASE("expectation values") {
  const QState e = QState::basis(1, 2);
  CHECK(expectation(QOperator::identity(2), e).real() == doctest::Approx(1.0));
  CHECK(expectation(sigma_z(), e).real() == doctest::Approx(1.0));
  CHECK(expectation(sigma_z(), QState::basis(0, 2)).real() == doctest::Approx(-1.0));

  const QState coh = coherent_state(20, 0.59);
  CHECK(expectation(number_operator(20), coh).real() == doctest::Approx(0.3481).epsilon(1e-9));
  CHECK(std::abs(expectation(number_operator(20), coh).imag()) < 1e-10);
  CHECK_THROWS_AS(expectation(number_operator(3), coh), InvalidDimension);
}

TEST_CASE("coherent state is normalized after truncation") {
  const QState s = coherent_state(4, 1.5);
  CHECK(s.trace() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(expectation(annihilation(40), coherent_state(40, Complex(0.3, -0.4))).real() ==
        doctest::Approx(0.3).epsilon(1e-12));
}
