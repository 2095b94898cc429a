#include "lambda_forge/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lambda_forge/errors.hpp"

namespace lf {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b* (fifth minus embedded fourth order weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

/// Right-hand side written as X + X^dag with X = -i H_eff rho + sum L rho L^dag / 2,
/// which keeps every stage exactly Hermitian.
class LindbladRhs {
 public:
  LindbladRhs(const QOperator& h, std::span<const CollapseOperator> collapse) {
    const auto n = static_cast<Eigen::Index>(h.side());
    Matrix heff = h.matrix();
    for (const auto& c : collapse) {
      if (c.rate < 0.0) throw ContractViolation("lindblad: negative collapse rate");
      if (c.op.side() != h.side()) throw InvalidDimension("lindblad: collapse operator side mismatch");
      if (c.rate == 0.0) continue;
      const Matrix l = std::sqrt(c.rate) * c.op.matrix();
      heff -= Complex(0.0, 0.5) * (l.adjoint() * l);
      jumps_.push_back(l);
      jumps_adj_.push_back(l.adjoint());
    }
    minus_i_heff_ = Complex(0.0, -1.0) * heff;
    scratch_.resize(n, n);
  }

  void operator()(const Matrix& rho, Matrix& out) {
    out.noalias() = minus_i_heff_ * rho;
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
      scratch_.noalias() = jumps_[k] * rho;
      out.noalias() += 0.5 * scratch_ * jumps_adj_[k];
    }
    // Hermitize last: an anti-Hermitian round-off part is not damped by the
    // jump term alone and would otherwise grow and leak into the trace.
    out += out.adjoint().eval();
  }

 private:
  Matrix minus_i_heff_;
  std::vector<Matrix> jumps_;
  std::vector<Matrix> jumps_adj_;
  Matrix scratch_;
};

double error_norm(const Matrix& err, const Matrix& y0, const Matrix& y1, const IntegratorOptions& o) {
  double acc = 0.0;
  const Eigen::Index n = err.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double scale = o.atol + o.rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    const double r = std::abs(err(i)) / scale;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(n));
}

std::string time_str(double t) {
  std::ostringstream os;
  os.precision(6);
  os << t << " s";
  return os.str();
}

void record(const Matrix& rho, std::span<const Observable> observables, RealMatrix& values,
            Eigen::Index row) {
  for (std::size_t k = 0; k < observables.size(); ++k) {
    const Complex v = (observables[k].op.matrix().transpose().cwiseProduct(rho)).sum();
    values(row, static_cast<Eigen::Index>(k)) = v.real();
  }
}

}  // namespace

Evolution lindblad_evolve(const QOperator& h, std::span<const CollapseOperator> collapse,
                          const QState& rho0, std::span<const double> times,
                          std::span<const Observable> observables, const IntegratorOptions& options,
                          bool keep_states) {
  if (!h.is_hermitian()) throw ContractViolation("lindblad_evolve: Hamiltonian is not Hermitian");
  if (rho0.side() != h.side()) throw InvalidDimension("lindblad_evolve: state/Hamiltonian side mismatch");
  if (times.empty()) throw ContractViolation("lindblad_evolve: no output times");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] < times[i - 1]) throw ContractViolation("lindblad_evolve: times must be non-decreasing");
  }
  for (const auto& o : observables) {
    if (o.op.side() != h.side()) throw InvalidDimension("lindblad_evolve: observable '" + o.name + "' side mismatch");
  }

  LindbladRhs rhs(h, collapse);
  const auto n = static_cast<Eigen::Index>(h.side());

  Evolution out;
  out.trajectory.times.assign(times.begin(), times.end());
  for (const auto& o : observables) out.trajectory.observables.push_back(o.name);
  out.trajectory.values.resize(static_cast<Eigen::Index>(times.size()),
                               static_cast<Eigen::Index>(observables.size()));
  if (keep_states) out.states.reserve(times.size());

  Matrix y = 0.5 * (rho0.rho() + rho0.rho().adjoint());
  Matrix k1(n, n), k2(n, n), k3(n, n), k4(n, n), k5(n, n), k6(n, n), k7(n, n);
  Matrix tmp(n, n), y_new(n, n), err(n, n);

  const double span = times.back() - times.front();
  const double min_step = options.min_step_fraction * std::max(span, 1e-300);

  double t = times.front();
  rhs(y, k1);

  // Initial step guess from the scale of the derivative.
  double h_step = 0.0;
  {
    const double d0 = y.norm();
    const double d1 = k1.norm();
    h_step = (d1 > 0.0) ? 0.01 * std::max(d0, options.atol) / d1 : span;
    if (h_step <= 0.0 || !std::isfinite(h_step)) h_step = span;
  }

  auto store = [&](std::size_t idx) {
    record(y, observables, out.trajectory.values, static_cast<Eigen::Index>(idx));
    if (keep_states) out.states.emplace_back(0.5 * (y + y.adjoint()), rho0.dim_a(), rho0.dim_b());
  };

  std::size_t next = 0;
  while (next < times.size() && times[next] <= t) store(next++);

  std::size_t steps = 0;
  while (next < times.size()) {
    const double target = times[next];
    double h_try = std::min(h_step, target - t);
    const bool lands = (h_try == target - t);

    if (++steps > options.max_steps) {
      throw StiffnessError("lindblad_evolve: step budget exhausted at t = " + time_str(t));
    }

    tmp = y + h_try * a21 * k1;
    rhs(tmp, k2);
    tmp = y + h_try * (a31 * k1 + a32 * k2);
    rhs(tmp, k3);
    tmp = y + h_try * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(tmp, k4);
    tmp = y + h_try * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(tmp, k5);
    tmp = y + h_try * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(tmp, k6);
    y_new = y + h_try * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(y_new, k7);
    err = h_try * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double en = error_norm(err, y, y_new, options);
    if (!std::isfinite(en)) {
      throw StiffnessError("lindblad_evolve: non-finite error estimate at t = " + time_str(t));
    }
    if (en <= 1.0) {
      t = lands ? target : t + h_try;
      y.swap(y_new);
      k1.swap(k7);
      ++out.accepted_steps;
      const double factor = (en == 0.0) ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      // A step shortened to land on an output time says nothing about the natural step.
      h_step = lands ? std::max(h_step, h_try * factor) : h_try * factor;
      while (next < times.size() && times[next] <= t) store(next++);
    } else {
      ++out.rejected_steps;
      h_step = h_try * std::max(0.2, 0.9 * std::pow(en, -0.2));
    }
    if (h_step < min_step) {
      throw StiffnessError("lindblad_evolve: step size underflow (" + std::to_string(h_step) +
                           " s) at t = " + time_str(t));
    }
  }
  return out;
}

Vector vectorize(const Matrix& rho) {
  return Eigen::Map<const Vector>(rho.data(), rho.size());
}

Matrix unvectorize(const Vector& v, Eigen::Index side) {
  return Eigen::Map<const Matrix>(v.data(), side, side);
}

Matrix liouvillian(const QOperator& h, std::span<const CollapseOperator> collapse) {
  const auto n = static_cast<Eigen::Index>(h.side());
  const Matrix id = Matrix::Identity(n, n);
  auto kron = [](const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  };
  // vec(A X B) = (B^T ⊗ A) vec(X)
  Matrix sup = Complex(0.0, -1.0) * (kron(id, h.matrix()) - kron(h.matrix().transpose(), id));
  for (const auto& c : collapse) {
    if (c.rate < 0.0) throw ContractViolation("liouvillian: negative collapse rate");
    if (c.op.side() != h.side()) throw InvalidDimension("liouvillian: collapse operator side mismatch");
    if (c.rate == 0.0) continue;
    const Matrix l = c.op.matrix();
    const Matrix ldl = l.adjoint() * l;
    sup += c.rate * (kron(l.conjugate(), l) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id));
  }
  return sup;
}

double liouvillian_residual(const Matrix& superop, const QState& rho) {
  const double scale = superop.norm();
  if (scale == 0.0) return 0.0;
  return (superop * vectorize(rho.rho())).norm() / scale;
}

QState steady_state(const QOperator& h, std::span<const CollapseOperator> collapse) {
  if (!h.is_hermitian()) throw ContractViolation("steady_state: Hamiltonian is not Hermitian");
  const bool any_rate = std::any_of(collapse.begin(), collapse.end(),
                                    [](const CollapseOperator& c) { return c.rate > 0.0; });
  if (!any_rate) throw DegenerateSteadyState("steady_state: no dissipation, fixed point is not unique");

  const Matrix sup = liouvillian(h, collapse);
  const auto n = static_cast<Eigen::Index>(h.side());
  Eigen::BDCSVD<Matrix> svd(sup, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const Eigen::Index m = sv.size();
  const double tol = 1e-12 * std::max(1.0, static_cast<double>(m)) * sv(0);
  Eigen::Index null_dim = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (sv(i) <= tol) ++null_dim;
  }
  if (null_dim != 1) {
    throw DegenerateSteadyState("steady_state: Liouvillian null space has dimension " +
                                std::to_string(null_dim));
  }
  const Vector v = svd.matrixV().col(m - 1);
  Matrix rho = unvectorize(v, n);
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return QState(std::move(rho), h.dim_a(), h.dim_b());
}

}  // namespace lf
