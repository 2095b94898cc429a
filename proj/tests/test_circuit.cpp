#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lambda_forge/circuit.hpp"
#include "lambda_forge/errors.hpp"
#include "lambda_forge/units.hpp"

using namespace lf;

namespace {

CircuitSpec defaults(double flux = 6.5) {
  CircuitSpec s = CircuitSpec::calibrated_defaults();
  s.phi_ext_f = flux;
  return s;
}

std::vector<double> lowest_hz(const QOperator& h, std::size_t k) {
  const Eigensystem es = eigendecompose(h, k);
  std::vector<double> out;
  for (double e : es.values) out.push_back(e / kTwoPi);
  return out;
}

}  // namespace

TEST_CASE("calibrated defaults hit the device frequencies") {
  const DressedCircuit dc(defaults());
  CHECK(dc.energy({1, 0}) == doctest::Approx(500e6).epsilon(0.05));
  CHECK(dc.energy({0, 1}) == doctest::Approx(6.82e9).epsilon(0.02));
  const double gf = dc.energy({2, 0});
  CHECK(gf > 5e9);
  CHECK(gf < 15e9);
}

TEST_CASE("spec invariants") {
  CircuitSpec s = defaults();
  s.dim_q = 19;
  CHECK_THROWS_AS(s.validate(), ContractViolation);
  s = defaults();
  s.dim_r = 2;
  CHECK_THROWS_AS(s.validate(), ContractViolation);
  s = defaults();
  s.l_r = 0.2 * s.l_q;
  CHECK_THROWS_AS(s.validate(), ContractViolation);
  CHECK_NOTHROW(defaults().validate());
}

TEST_CASE("decoupled limit reproduces fluxonium plus resonator") {
  const CircuitSpec s = defaults(0.0);
  const QOperator h = build_hamiltonian(s, HamiltonianTerms{false, false});
  CHECK(h.is_hermitian());
  const std::vector<double> q = fluxonium_spectrum(s, 8);
  const double fr = derive(s).f_r;
  std::vector<double> sums;
  for (double e : q) {
    for (int n = 0; n < 4; ++n) sums.push_back(e + n * fr);
  }
  std::sort(sums.begin(), sums.end());
  const std::vector<double> full = lowest_hz(h, 8);
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(std::abs((full[k] - full[0]) - sums[k]) < 1.0);
  }
}

TEST_CASE("cos term matches an eigendecomposition in a padded basis") {
  const CircuitSpec s = defaults(6.3);
  const CircuitDerived d = derive(s);
  const std::size_t big = 200;
  const auto n = static_cast<Eigen::Index>(s.dim_q);
  const Matrix a = annihilation(big).matrix();
  const Matrix phi = d.phi_zpf_q * (a + a.adjoint());
  const Matrix q = d.n_zpf_q * (a.adjoint() - a);
  const Eigensystem es = eigendecompose(QOperator(phi), big);
  Eigen::VectorXcd cosd(static_cast<Eigen::Index>(big));
  for (std::size_t k = 0; k < big; ++k) cosd(static_cast<Eigen::Index>(k)) = std::cos(es.values[k] + kTwoPi * s.phi_ext_f);
  const Matrix cosm = es.vectors * cosd.asDiagonal() * es.vectors.adjoint();
  const Matrix oracle = (-4.0 * s.ec_f * (q * q) + 0.5 * d.el_q * (phi * phi) - s.ej_f * cosm).topLeftCorner(n, n);
  const Matrix built = fluxonium_operators(s).h.matrix();
  CHECK((built - oracle).cwiseAbs().maxCoeff() < 1e-6 * s.ej_f);
}

TEST_CASE("truncation convergence of the lowest six levels") {
  CircuitSpec s = defaults();
  const std::vector<double> base = lowest_hz(build_hamiltonian(s), 6);
  s.dim_q += 20;
  s.dim_r += 4;
  const std::vector<double> bigger = lowest_hz(build_hamiltonian(s), 6);
  for (std::size_t k = 1; k < 6; ++k) {
    CHECK(std::abs((base[k] - base[0]) - (bigger[k] - bigger[0])) < 1e3);
  }
}

TEST_CASE("undersized basis raises TruncationError") {
  CircuitSpec s = defaults(0.5);
  s.ej_f = 60e9;
  s.dim_q = 20;
  CHECK_THROWS_AS(build_hamiltonian(s), TruncationError);
}

TEST_CASE("fluxonium spectrum is symmetric about sweet spots") {
  for (double spot : {0.5, 6.5}) {
    const auto lo = fluxonium_spectrum(defaults(spot - 0.01), 6);
    const auto hi = fluxonium_spectrum(defaults(spot + 0.01), 6);
    for (std::size_t k = 1; k < 6; ++k) CHECK(lo[k] == doctest::Approx(hi[k]).epsilon(1e-6));
  }
}

TEST_CASE("qubit frequency is first-order flux insensitive at sweet spots") {
  const double d = 1e-3;
  for (double spot : {0.5, 2.5, 6.5}) {
    const double up = fluxonium_spectrum(defaults(spot + d), 2)[1];
    const double down = fluxonium_spectrum(defaults(spot - d), 2)[1];
    CHECK(std::abs((up - down) / (2.0 * d) * 1e-3) < 1e3);
  }
  // off a sweet spot the same difference is large
  const double up = fluxonium_spectrum(defaults(6.3 + d), 2)[1];
  const double down = fluxonium_spectrum(defaults(6.3 - d), 2)[1];
  CHECK(std::abs((up - down) / (2.0 * d) * 1e-3) > 1e5);
}

TEST_CASE("coupling prefactors follow the closed forms") {
  const CircuitSpec s = defaults();
  const CircuitDerived d = derive(s);
  const CouplingReport c = three_wave_coefficients(s);
  const double ls = d.l_s_tot, lq = s.l_q, lr = s.l_r;
  const double e = d.array.c3 * s.snail_ej;
  const double den = std::pow(lr + ls, 3);
  CHECK(c.coeff_gf == doctest::Approx(3.0 * e * std::pow(ls / lq, 2) * lr * lr * ls / den).epsilon(1e-12));
  CHECK(c.coeff_g0e1 == doctest::Approx(3.0 * e * (ls / lq) * lr * ls * ls / den).epsilon(1e-12));
  CHECK(c.g3_bare == doctest::Approx(6.0 * d.phi_zpf_r * std::abs(e) * (ls / lq) * lr * ls * ls / den).epsilon(1e-12));
  CHECK(c.coeff_g0e1 / c.coeff_gf == doctest::Approx(lq / ls).epsilon(1e-12));
  CHECK(c.coeff_g0e1 / c.coeff_gf == doctest::Approx(50.0).epsilon(1e-6));
}

TEST_CASE("no shared resonator inductance means no three-wave mixing") {
  CircuitSpec s = defaults();
  s.l_r = 0.0;
  const CouplingReport c = three_wave_coefficients(s);
  CHECK(c.coeff_gf == 0.0);
  CHECK(c.coeff_g0e1 == 0.0);
  CHECK(c.g3_bare == 0.0);
}

TEST_CASE("bare coupling grows across sweet spots and vanishes at zero flux") {
  CHECK(three_wave_coefficients(defaults(0.0)).g3_bare == doctest::Approx(0.0));
  double last = 0.0;
  for (int m = 0; m <= 6; ++m) {
    const double g = three_wave_coefficients(defaults(m + 0.5)).g3_bare;
    CHECK(g > last);
    last = g;
  }
}

TEST_CASE("matrix elements at the 6.5 sweet spot") {
  const DressedCircuit dc(defaults(), HamiltonianTerms{true, false});
  const QOperator pq = dc.phi_q();
  const double ge = std::abs(dc.matrix_element(pq, {0, 0}, {1, 0}));
  const double gf = std::abs(dc.matrix_element(pq, {0, 0}, {2, 0}));
  CHECK(gf < 1e-8 * ge);
  CHECK(std::abs(dc.matrix_element(pq * pq, {0, 0}, {2, 0}, Basis::bare)) > 0.01);

  const QOperator prq = dc.phi_r_phi_q();
  const double m1 = std::abs(dc.matrix_element(prq, {0, 0}, {1, 1}));
  CHECK(m1 >= 1.0);
  CHECK(m1 <= 3.0);
  const double b1 = std::abs(dc.matrix_element(prq, {0, 0}, {1, 1}, Basis::bare));
  const double b2 = std::abs(dc.matrix_element(prq, {1, 0}, {0, 1}, Basis::bare));
  CHECK(b1 == doctest::Approx(b2).epsilon(1e-6));
  CHECK(dc.overlap({1, 1}) > 0.5);
}

TEST_CASE("selection rules at a sweet spot") {
  const auto report = selection_rule_report(defaults());
  REQUIRE(!report.empty());
  auto find = [&](StateLabel a, StateLabel b) {
    for (const auto& e : report) {
      if ((e.i == a && e.j == b) || (e.i == b && e.j == a)) return e;
    }
    FAIL("pair missing from report");
    return report.front();
  };
  CHECK(find({0, 0}, {1, 0}).allowed_phi_q);
  const SelectionEntry forbidden = find({0, 0}, {1, 1});
  CHECK_FALSE(forbidden.allowed_phi_q);
  CHECK(forbidden.allowed_phi_r_phi_q);
  // total parity (-1)^(q + n): φ_q connects opposite fluxonium parity at fixed n
  for (const auto& e : report) {
    const bool same_total = (e.i.q + e.i.n + e.j.q + e.j.n) % 2 == 0;
    if (same_total) CHECK_FALSE(e.allowed_phi_q);
  }
  CHECK_THROWS_AS(selection_rule_report(defaults(6.3)), ParityUndefined);
  CHECK(at_sweet_spot(2.5));
  CHECK(at_sweet_spot(3.0));
  CHECK_FALSE(at_sweet_spot(2.6));
}

TEST_CASE("effective g3 at the reference photon numbers") {
  const CircuitSpec s = defaults();
  CHECK(effective_g3(s, 0.0) == 0.0);
  const double g035 = effective_g3(s, std::sqrt(0.35));
  CHECK(g035 > 0.5 * 0.87e6);
  CHECK(g035 < 1.5 * 0.87e6);
  const double g43 = effective_g3(s, std::sqrt(4.3));
  CHECK(g43 > 0.5 * 3e6);
  CHECK(g43 < 1.5 * 3e6);
  CHECK(effective_g3(s, 10.0 * 0.3) == doctest::Approx(10.0 * effective_g3(s, 0.3)).epsilon(1e-12));
}

TEST_CASE("g3 over epsilon") {
  const double r = g3_over_epsilon(defaults(), 16.8e6);
  CHECK(r > 0.001);
  CHECK(r < 0.009);
  CHECK(g3_over_epsilon(defaults(0.0), 16.8e6) < 1e-12);
  CHECK(g3_over_epsilon(defaults(0.5), 16.8e6) < r);
}

TEST_CASE("state labels") {
  CHECK(StateLabel::parse("e1") == StateLabel{1, 1});
  CHECK(StateLabel{2, 3}.str() == "f3");
  CHECK_THROWS(StateLabel::parse("z1"));
}
