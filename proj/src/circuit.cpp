#include "lambda_forge/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lambda_forge/errors.hpp"
#include "lambda_forge/units.hpp"

namespace lf {

namespace {

constexpr std::size_t kPad = 4;
constexpr int kLabelLevelsQ = 6;
constexpr int kLabelLevelsR = 4;

RealMatrix ladder(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  RealMatrix b = RealMatrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) b(k - 1, k) = std::sqrt(static_cast<double>(k));
  return b;
}

/// (zpf (b + b†))^k built on dim + kPad levels, then truncated.
RealMatrix position_power(double zpf, std::size_t dim, int k) {
  const RealMatrix b = ladder(dim + kPad);
  const RealMatrix x = zpf * (b + b.transpose());
  RealMatrix p = RealMatrix::Identity(x.rows(), x.cols());
  for (int i = 0; i < k; ++i) p = p * x;
  const auto n = static_cast<Eigen::Index>(dim);
  return p.topLeftCorner(n, n);
}

/// cos and sin of zpf (b + b†) from analytic displacement matrix elements.
void cos_sin_phase(double zpf, std::size_t dim, RealMatrix& c, RealMatrix& s) {
  const auto n = static_cast<Eigen::Index>(dim);
  c = RealMatrix::Zero(n, n);
  s = RealMatrix::Zero(n, n);
  const double x = zpf * zpf;
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto lo = static_cast<unsigned>(std::min(m, k));
      const auto hi = static_cast<unsigned>(std::max(m, k));
      const unsigned d = hi - lo;
      const double mag = std::exp(0.5 * (std::lgamma(lo + 1.0) - std::lgamma(hi + 1.0)) +
                                  d * std::log(zpf) - 0.5 * x) *
                         std::assoc_laguerre(lo, d, x);
      // i^d split into real (even d) and imaginary (odd d) parts
      if (d % 2 == 0) {
        c(m, k) = ((d / 2) % 2 == 0) ? mag : -mag;
      } else {
        s(m, k) = (((d - 1) / 2) % 2 == 0) ? mag : -mag;
      }
    }
  }
}

template <class M>
M kron(const M& a, const M& b) {
  M out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

struct HzHamiltonian {
  RealMatrix h;      // Hz
  RealMatrix phi_q;  // full space
  RealMatrix phi_r;
};

struct FluxoniumReal {
  RealMatrix h, phi, charge;  // charge operator is i * this
};

FluxoniumReal fluxonium_real(const CircuitSpec& spec);

HzHamiltonian build_hz(const CircuitSpec& spec, const HamiltonianTerms& terms) {
  spec.validate();
  const CircuitDerived d = derive(spec);
  const auto dq = static_cast<Eigen::Index>(spec.dim_q);
  const auto dr = static_cast<Eigen::Index>(spec.dim_r);
  const RealMatrix iq = RealMatrix::Identity(dq, dq);
  const RealMatrix ir = RealMatrix::Identity(dr, dr);

  const FluxoniumReal fl = fluxonium_real(spec);
  const RealMatrix& phq = fl.phi;
  const RealMatrix phr = position_power(d.phi_zpf_r, spec.dim_r, 1);

  RealMatrix num_r = RealMatrix::Zero(dr, dr);
  for (Eigen::Index k = 0; k < dr; ++k) num_r(k, k) = static_cast<double>(k);

  HzHamiltonian out;
  out.h = kron(ir, fl.h) + d.f_r * kron(num_r, iq);
  if (terms.linear_coupling) out.h -= d.j * kron(phr, phq);
  if (terms.three_wave && d.e3 != 0.0) {
    const RealMatrix phq2 = position_power(d.phi_zpf_q, spec.dim_q, 2);
    const RealMatrix phq3 = position_power(d.phi_zpf_q, spec.dim_q, 3);
    const RealMatrix phr2 = position_power(d.phi_zpf_r, spec.dim_r, 2);
    const RealMatrix phr3 = position_power(d.phi_zpf_r, spec.dim_r, 3);
    const double a = d.a, b = d.b;
    out.h += d.e3 * (a * a * a * kron(ir, phq3) + 3.0 * a * a * b * kron(phr, phq2) +
                     3.0 * a * b * b * kron(phr2, phq) + b * b * b * kron(phr3, iq));
  }
  out.h = 0.5 * (out.h + out.h.adjoint()).eval();
  out.phi_q = kron(ir, phq);
  out.phi_r = kron(phr, iq);
  return out;
}

void check_truncation(const Eigen::VectorXd& ground, std::size_t dim_r, std::size_t dim_q) {
  const std::size_t top_r = dim_r - std::max<std::size_t>(1, dim_r / 10);
  const std::size_t top_q = dim_q - std::max<std::size_t>(1, dim_q / 10);
  double leak = 0.0;
  for (std::size_t nr = 0; nr < dim_r; ++nr) {
    for (std::size_t nq = 0; nq < dim_q; ++nq) {
      if (nr >= top_r || nq >= top_q) {
        leak += std::pow(ground(static_cast<Eigen::Index>(nr * dim_q + nq)), 2);
      }
    }
  }
  if (leak > 1e-6) {
    std::ostringstream os;
    os << "circuit: ground state has weight " << leak << " in the top 10% of the basis (dim_r="
       << dim_r << ", dim_q=" << dim_q << ")";
    throw TruncationError(os.str());
  }
}

}  // namespace

SnailSpec CircuitSpec::snail() const {
  return SnailSpec(snail_alpha, snail_n, flux_map(phi_ext_f, area_ratio), snail_ej);
}

void CircuitSpec::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw ContractViolation(std::string("CircuitSpec: ") + what);
  };
  need(ej_f > 0.0, "ej_f must be positive");
  need(ec_f > 0.0, "ec_f must be positive");
  need(l_q > 0.0, "l_q must be positive");
  need(l_r >= 0.0, "l_r must be non-negative");
  need(c_r > 0.0, "c_r must be positive");
  need(n_array >= 1, "n_array must be >= 1");
  need(area_ratio > 0.0, "area_ratio must be positive");
  need(std::isfinite(phi_ext_f), "phi_ext_f must be finite");
  need(dim_q >= 20, "dim_q must be >= 20");
  need(dim_r >= 3, "dim_r must be >= 3");
  const SnailCoeffs s = array_coeffs(taylor_coeffs(snail()), n_array);
  if (!(l_q > 10.0 * (l_r + s.l_s))) {
    std::ostringstream os;
    os << "CircuitSpec: l_q = " << l_q << " H is not > 10 (l_r + l_s_tot) = " << 10.0 * (l_r + s.l_s);
    throw ContractViolation(os.str());
  }
}

CircuitSpec CircuitSpec::calibrated_defaults() {
  CircuitSpec s;
  s.ej_f = 7508127497.2564821;
  s.ec_f = 2.5e9;
  s.l_q = 3.2692302561356243e-07;
  s.l_r = 6.5384605122712483e-09;
  s.c_r = 4.1651521519776319e-14;
  s.snail_alpha = 0.4;
  s.snail_n = 3;
  s.snail_ej = 175675569603.55405;
  s.n_array = 5;
  s.area_ratio = kDefaultAreaRatio;
  s.phi_ext_f = 6.5;
  s.dim_q = 60;
  s.dim_r = 6;
  return s;
}

CircuitDerived derive(const CircuitSpec& spec) {
  CircuitDerived d;
  d.single = taylor_coeffs(spec.snail());
  d.array = array_coeffs(d.single, spec.n_array);
  d.l_s_tot = d.array.l_s;
  d.el_q = kPhi0 * kPhi0 / (spec.l_q * kPlanck);
  const double l_res = spec.l_r + d.l_s_tot;
  d.f_r = 1.0 / (kTwoPi * std::sqrt(l_res * spec.c_r));
  const double z = std::sqrt(l_res / spec.c_r);
  d.phi_zpf_r = std::sqrt(kHbar * z / 2.0) / kPhi0;
  d.phi_zpf_q = std::pow(2.0 * spec.ec_f / d.el_q, 0.25);
  d.n_zpf_q = std::pow(d.el_q / (32.0 * spec.ec_f), 0.25);
  d.j = kPhi0 * kPhi0 * d.l_s_tot / (spec.l_q * l_res) / kPlanck;
  d.a = spec.l_r * d.l_s_tot / (spec.l_q * l_res);
  d.b = d.l_s_tot / l_res;
  d.e3 = d.array.c3 * spec.snail_ej;
  return d;
}

namespace {

FluxoniumReal fluxonium_real(const CircuitSpec& spec) {
  const CircuitDerived d = derive(spec);
  const std::size_t dim = spec.dim_q;
  const auto n = static_cast<Eigen::Index>(dim);

  const RealMatrix b = ladder(dim + kPad);
  const RealMatrix phi_pad = d.phi_zpf_q * (b + b.transpose());
  // n = i n_zpf (b† - b), so n² = -n_zpf² (b† - b)²
  const RealMatrix q_pad = d.n_zpf_q * (b.transpose() - b);
  const RealMatrix n2 = -(q_pad * q_pad).topLeftCorner(n, n);
  const RealMatrix phi2 = (phi_pad * phi_pad).topLeftCorner(n, n);

  RealMatrix c, s;
  cos_sin_phase(d.phi_zpf_q, dim, c, s);
  const double theta = kTwoPi * spec.phi_ext_f;
  // cos(φ + θ) = cos φ cos θ - sin φ sin θ
  const RealMatrix cos_shifted = std::cos(theta) * c - std::sin(theta) * s;

  FluxoniumReal out;
  out.h = 4.0 * spec.ec_f * n2 + 0.5 * d.el_q * phi2 - spec.ej_f * cos_shifted;
  out.h = 0.5 * (out.h + out.h.transpose()).eval();
  out.phi = phi_pad.topLeftCorner(n, n);
  out.charge = q_pad.topLeftCorner(n, n);
  return out;
}

}  // namespace

FluxoniumOperators fluxonium_operators(const CircuitSpec& spec) {
  const FluxoniumReal f = fluxonium_real(spec);
  const std::size_t dim = spec.dim_q;
  return FluxoniumOperators{QOperator(f.h.cast<Complex>(), dim), QOperator(f.phi.cast<Complex>(), dim),
                            QOperator(Complex(0.0, 1.0) * f.charge.cast<Complex>(), dim)};
}

std::vector<double> fluxonium_spectrum(const CircuitSpec& spec, std::size_t k) {
  const Eigensystem es = eigendecompose(fluxonium_operators(spec).h, k);
  std::vector<double> out(es.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = es.values[i] - es.values[0];
  return out;
}

QOperator resonator_phase(const CircuitSpec& spec) {
  const CircuitDerived d = derive(spec);
  return QOperator(position_power(d.phi_zpf_r, spec.dim_r, 1).cast<Complex>(), spec.dim_r);
}

QOperator build_hamiltonian(const CircuitSpec& spec, const HamiltonianTerms& terms) {
  HzHamiltonian hz = build_hz(spec, terms);
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(hz.h);
  check_truncation(solver.eigenvectors().col(0), spec.dim_r, spec.dim_q);
  return QOperator((kTwoPi * hz.h).cast<Complex>(), spec.dim_r, spec.dim_q);
}

std::string StateLabel::str() const {
  static const char names[] = "gefhijklmn";
  std::string s;
  s += (q >= 0 && q < 10) ? names[q] : '?';
  s += std::to_string(n);
  return s;
}

StateLabel StateLabel::parse(const std::string& s) {
  static const std::string names = "gefhijklmn";
  if (s.size() < 2) throw ContractViolation("StateLabel: cannot parse '" + s + "'");
  const auto q = names.find(s[0]);
  if (q == std::string::npos) throw ContractViolation("StateLabel: unknown level '" + s + "'");
  std::size_t used = 0;
  const int n = std::stoi(s.substr(1), &used);
  if (used != s.size() - 1 || n < 0) throw ContractViolation("StateLabel: bad photon number in '" + s + "'");
  return StateLabel{static_cast<int>(q), n};
}

DressedCircuit::DressedCircuit(const CircuitSpec& spec, const HamiltonianTerms& terms) : spec_(spec) {
  HzHamiltonian hz = build_hz(spec, terms);
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(hz.h);
  if (solver.info() != Eigen::Success) throw ContractViolation("DressedCircuit: eigensolver failed");
  check_truncation(solver.eigenvectors().col(0), spec.dim_r, spec.dim_q);
  vectors_ = solver.eigenvectors().cast<Complex>();

  const auto& ev = solver.eigenvalues();
  energies_.resize(static_cast<std::size_t>(ev.size()));
  for (Eigen::Index i = 0; i < ev.size(); ++i) energies_[static_cast<std::size_t>(i)] = ev(i) - ev(0);

  Eigen::SelfAdjointEigenSolver<RealMatrix> qsolver(fluxonium_real(spec).h);
  bare_q_ = qsolver.eigenvectors().cast<Complex>();

  levels_q_ = std::min<int>(kLabelLevelsQ, static_cast<int>(spec.dim_q));
  levels_r_ = std::min<int>(kLabelLevelsR, static_cast<int>(spec.dim_r));
  const auto dr = static_cast<Eigen::Index>(spec.dim_r);
  const auto dq = static_cast<Eigen::Index>(spec.dim_q);

  // Project every dressed state onto (n_r, fluxonium level) product states.
  const Matrix to_bare = kron<Matrix>(Matrix::Identity(dr, dr), bare_q_).adjoint();
  const RealMatrix weights = (to_bare * vectors_).cwiseAbs2();

  for (int n = 0; n < levels_r_; ++n) {
    for (int q = 0; q < levels_q_; ++q) {
      Eigen::Index best = 0;
      const double w = weights.row(n * dq + q).maxCoeff(&best);
      label_index_.push_back(static_cast<std::size_t>(best));
      label_overlap_.push_back(w);
    }
  }
  for (Eigen::Index k = 0; k < weights.cols(); ++k) {
    Eigen::Index best = 0;
    weights.col(k).maxCoeff(&best);
    labels_.push_back(StateLabel{static_cast<int>(best % dq), static_cast<int>(best / dq)});
  }

  phi_q_full_ = QOperator(hz.phi_q.cast<Complex>(), spec.dim_r, spec.dim_q);
  phi_r_full_ = QOperator(hz.phi_r.cast<Complex>(), spec.dim_r, spec.dim_q);
}

std::size_t DressedCircuit::index(const StateLabel& l) const {
  if (l.q < 0 || l.q >= levels_q_ || l.n < 0 || l.n >= levels_r_) {
    throw ContractViolation("DressedCircuit: label " + l.str() + " outside the labeled range");
  }
  const auto k = static_cast<std::size_t>(l.n * levels_q_ + l.q);
  if (label_overlap_[k] < 0.5) {
    std::ostringstream os;
    os << "DressedCircuit: label " << l.str() << " is ambiguous (best overlap " << label_overlap_[k] << ")";
    throw LabelingError(os.str());
  }
  return label_index_[k];
}

double DressedCircuit::overlap(const StateLabel& l) const {
  index(l);
  return label_overlap_[static_cast<std::size_t>(l.n * levels_q_ + l.q)];
}

double DressedCircuit::energy(const StateLabel& l) const { return energies_[index(l)]; }

StateLabel DressedCircuit::label_of(std::size_t k) const {
  if (k >= labels_.size()) throw ContractViolation("DressedCircuit: state index out of range");
  return labels_[k];
}

Vector DressedCircuit::state(const StateLabel& l, Basis basis) const {
  if (basis == Basis::dressed) return vectors_.col(static_cast<Eigen::Index>(index(l)));
  if (l.q < 0 || l.q >= static_cast<int>(spec_.dim_q) || l.n < 0 || l.n >= static_cast<int>(spec_.dim_r)) {
    throw ContractViolation("DressedCircuit: bare label " + l.str() + " outside the basis");
  }
  const auto dq = static_cast<Eigen::Index>(spec_.dim_q);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(spec_.dim_r) * dq);
  v.segment(l.n * dq, dq) = bare_q_.col(l.q);
  return v;
}

Complex DressedCircuit::matrix_element(const QOperator& op, const StateLabel& i, const StateLabel& j,
                                       Basis basis) const {
  if (op.side() != spec_.dim_r * spec_.dim_q) throw InvalidDimension("matrix_element: operator side mismatch");
  return state(i, basis).dot(op.matrix() * state(j, basis));
}

CouplingReport three_wave_coefficients(const CircuitSpec& spec) {
  const CircuitDerived d = derive(spec);
  const double s = d.l_s_tot, q = spec.l_q, r = spec.l_r;
  const double den = std::pow(r + s, 3);
  CouplingReport c;
  c.coeff_gf = 3.0 * d.e3 * (s / q) * (s / q) * r * r * s / den;
  c.coeff_g0e1 = 3.0 * d.e3 * (s / q) * r * s * s / den;
  c.g3_bare = 6.0 * d.phi_zpf_r * std::abs(d.e3) * (s / q) * r * s * s / den;
  return c;
}

namespace {

double phi_r_phi_q_element(const CircuitSpec& spec, Basis basis) {
  const DressedCircuit dc(spec, HamiltonianTerms{true, false});
  return std::abs(dc.matrix_element(dc.phi_r_phi_q(), {0, 0}, {1, 1}, basis));
}

}  // namespace

CouplingReport coupling_coefficients(const CircuitSpec& spec, Complex alpha_r, Basis basis) {
  CouplingReport c = three_wave_coefficients(spec);
  c.matrix_element_phi_r_phi_q = phi_r_phi_q_element(spec, basis);
  c.g3_eff = c.g3_bare * std::abs(alpha_r) * c.matrix_element_phi_r_phi_q;
  return c;
}

double effective_g3(const CircuitSpec& spec, Complex alpha_r, Basis basis) {
  return coupling_coefficients(spec, alpha_r, basis).g3_eff;
}

double g3_over_epsilon(const CircuitSpec& spec, double kappa_hz, Basis basis) {
  const DressedCircuit dc(spec, HamiltonianTerms{true, false});
  const double m = std::abs(dc.matrix_element(dc.phi_r_phi_q(), {0, 0}, {1, 1}, basis));
  const double f_q = dc.energy({1, 0});
  // α_r / ε for a tone detuned by +f_q from the resonator
  const double response = 1.0 / std::abs(Complex(-f_q, kappa_hz / 2.0));
  return three_wave_coefficients(spec).g3_bare * m * response;
}

bool at_sweet_spot(double phi_ext_f) {
  const double frac = phi_ext_f - std::floor(phi_ext_f);
  return std::abs(frac - 0.5) < 1e-6 || frac < 1e-6 || frac > 1.0 - 1e-6;
}

std::vector<SelectionEntry> selection_rule_report(const CircuitSpec& spec, double threshold) {
  if (!at_sweet_spot(spec.phi_ext_f)) {
    std::ostringstream os;
    os << "selection_rule_report: phi_ext_f = " << spec.phi_ext_f
       << " is not a sweet spot; the potential has no parity there";
    throw ParityUndefined(os.str());
  }
  const DressedCircuit dc(spec, HamiltonianTerms{true, false});
  const QOperator prq = dc.phi_r_phi_q();
  const std::size_t count = 6;
  std::vector<SelectionEntry> out;
  double max_q = 0.0, max_rq = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      SelectionEntry e;
      e.i = dc.label_of(i);
      e.j = dc.label_of(j);
      e.phi_q = std::abs(dc.matrix_element(dc.phi_q(), e.i, e.j));
      e.phi_r_phi_q = std::abs(dc.matrix_element(prq, e.i, e.j));
      max_q = std::max(max_q, e.phi_q);
      max_rq = std::max(max_rq, e.phi_r_phi_q);
      out.push_back(e);
    }
  }
  for (auto& e : out) {
    e.allowed_phi_q = e.phi_q > threshold * max_q;
    e.allowed_phi_r_phi_q = e.phi_r_phi_q > threshold * max_rq;
  }
  return out;
}

}  // namespace lf
