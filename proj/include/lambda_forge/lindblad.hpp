#pragma once

#include <span>
#include <string>
#include <vector>

#include "lambda_forge/quantum.hpp"

namespace lf {

/// Dissipator sqrt(rate) * op; rate in 1/s.
struct CollapseOperator {
  QOperator op;
  double rate = 0.0;
};

struct Observable {
  std::string name;
  QOperator op;
};

/// Dormand-Prince 5(4) step control.
struct IntegratorOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  /// Steps smaller than this fraction of the integration span are a stiffness failure.
  double min_step_fraction = 1e-13;
  std::size_t max_steps = 100'000'000;
};

struct Evolution {
  Trajectory trajectory;
  std::vector<QState> states;  // one per requested time, empty unless keep_states
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

/// Integrates drho/dt = -i[H, rho] + sum_k rate_k (L rho L^dag - {L^dag L, rho}/2)
/// with H given in angular frequency (H / hbar, rad/s). Observables are
/// recorded as Re tr(O rho) at every requested time; times must be
/// non-decreasing and start at or after zero (rho0 is the state at times[0]).
Evolution lindblad_evolve(const QOperator& h, std::span<const CollapseOperator> collapse,
                          const QState& rho0, std::span<const double> times,
                          std::span<const Observable> observables = {},
                          const IntegratorOptions& options = {}, bool keep_states = true);

/// Column-stacked superoperator: vec(L(rho)) = liouvillian * vec(rho).
Matrix liouvillian(const QOperator& h, std::span<const CollapseOperator> collapse);

/// Unique fixed point of the Liouvillian. Throws DegenerateSteadyState if
/// the null space is not one-dimensional.
QState steady_state(const QOperator& h, std::span<const CollapseOperator> collapse);

/// ||L(rho)||_F relative to ||L||_F; the steady-state acceptance measure.
double liouvillian_residual(const Matrix& superop, const QState& rho);

Vector vectorize(const Matrix& rho);
Matrix unvectorize(const Vector& v, Eigen::Index side);

}  // namespace lf
