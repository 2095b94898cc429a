#include "lambda_forge/raman.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lambda_forge/errors.hpp"
#include "lambda_forge/fit.hpp"
#include "lambda_forge/units.hpp"

namespace lf {

namespace {

constexpr double kLeakageLimit = 1e-4;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Population of the highest resonator level, the truncation witness.
QOperator top_level_projector(std::size_t dim_r) {
  return tensor(projector(dim_r, dim_r - 1), QOperator::identity(2));
}

void check_leakage(const Trajectory& tr, std::size_t dim_r) {
  const auto top = tr.series("top_level");
  const double worst = *std::max_element(top.begin(), top.end());
  if (worst > kLeakageLimit) {
    throw TruncationError("lambda simulation: resonator level " + std::to_string(dim_r - 1) +
                          " reaches population " + fmt(worst) + "; raise dim_r");
  }
}

}  // namespace

void LambdaParams::validate() const {
  if (!(kappa > 0.0)) throw ContractViolation("LambdaParams: kappa must be positive");
  if (gamma_up < 0.0 || gamma_down < 0.0) throw ContractViolation("LambdaParams: bath rates must be >= 0");
  if (dim_r < 4) throw InvalidDimension("LambdaParams: dim_r must be >= 4, got " + std::to_string(dim_r));
  for (double v : {delta_r, delta, chi, epsilon, g3}) {
    if (!std::isfinite(v)) throw ContractViolation("LambdaParams: non-finite frequency");
  }
}

BathRates bath_rates(double gamma_1, double p_g_th) {
  if (gamma_1 < 0.0) throw ContractViolation("bath_rates: gamma_1 must be >= 0");
  if (p_g_th < 0.0 || p_g_th > 1.0) throw ContractViolation("bath_rates: P_g^th outside [0, 1]");
  return BathRates{(1.0 - p_g_th) * gamma_1, p_g_th * gamma_1};
}

Complex coherent_amplitude(double epsilon, double kappa, double delta_r) {
  if (kappa == 0.0 && delta_r == 0.0) {
    throw DegenerateDrive("coherent_amplitude: kappa and delta_r both zero");
  }
  return epsilon / Complex(-delta_r, kappa / 2.0);
}

double cooling_rate(double g3, double kappa) {
  if (!(kappa > 0.0)) throw ContractViolation("cooling_rate: kappa must be positive");
  if (!(g3 < kappa / 4.0)) {
    throw OutOfRegime("cooling_rate: g3/kappa = " + fmt(g3 / kappa) +
                      " violates g3 < kappa/4 needed for adiabatic elimination");
  }
  return kTwoPi * 4.0 * g3 * g3 / kappa;
}

CooledPopulations cooled_populations(double g3, double kappa, double gamma_up, double gamma_down) {
  if (kappa < 0.0 || gamma_up < 0.0 || gamma_down < 0.0) {
    throw ContractViolation("cooled_populations: rates must be >= 0");
  }
  const double pump = 4.0 * std::pow(kTwoPi * g3, 2);
  const double ka = kTwoPi * kappa;
  const double den = pump + ka * (gamma_up + gamma_down);
  if (!(den > 0.0)) throw ContractViolation("cooled_populations: all rates are zero");
  return CooledPopulations{(pump + ka * gamma_down) / den, (pump + ka * gamma_up) / den};
}

Amplitudes forward_amplitudes(double a, double g3, double p_g_th, double kappa, double gamma_1) {
  const BathRates r = bath_rates(gamma_1, p_g_th);
  const CooledPopulations c = cooled_populations(g3, kappa, r.gamma_up, r.gamma_down);
  return Amplitudes{a * (2.0 * p_g_th - 1.0), a * (2.0 * c.p_g_red - 1.0), a * (2.0 * c.p_e_blue - 1.0)};
}

double thermal_temperature(double p_g, double f_q) {
  if (!(p_g > 0.5 && p_g < 1.0)) throw ContractViolation("thermal_temperature: P_g must lie in (0.5, 1)");
  return kPlanck * f_q / (kBoltzmann * std::log(p_g / (1.0 - p_g)));
}

namespace {

// Unknowns u = (A, y = g3/kappa, p); with x = 4 y² κ/Γ1 (κ angular)
//   A(2p - 1)              = a_th
//   A(x + 2p - 1)/(x + 1)  = a_red
//   A(x + 1 - 2p)/(x + 1)  = a_blue
struct System {
  double a_th, a_red, a_blue, k_over_g;

  Eigen::Vector3d residual(const Eigen::Vector3d& u) const {
    const double a = u(0), y = u(1), p = u(2);
    const double x = 4.0 * y * y * k_over_g;
    return {a * (2.0 * p - 1.0) - a_th, a * (x + 2.0 * p - 1.0) / (x + 1.0) - a_red,
            a * (x + 1.0 - 2.0 * p) / (x + 1.0) - a_blue};
  }

  Eigen::Matrix3d jacobian(const Eigen::Vector3d& u) const {
    const double a = u(0), y = u(1), p = u(2);
    const double x = 4.0 * y * y * k_over_g;
    const double dx = 8.0 * y * k_over_g;
    const double s = x + 1.0;
    Eigen::Matrix3d j;
    j << 2.0 * p - 1.0, 0.0, 2.0 * a,
        (x + 2.0 * p - 1.0) / s, 2.0 * a * (1.0 - p) / (s * s) * dx, 2.0 * a / s,
        (x + 1.0 - 2.0 * p) / s, 2.0 * a * p / (s * s) * dx, -2.0 * a / s;
    return j;
  }
};

bool physical(const Eigen::Vector3d& u) {
  return u(0) > 0.0 && u(1) >= 0.0 && u(2) >= 0.0 && u(2) <= 1.0 && u.allFinite();
}

}  // namespace

CalibrationResult calibrate(double a_th, double a_red, double a_blue, double kappa, double gamma_1,
                            double f_q) {
  if (!(a_th > 0.0)) throw ContractViolation("calibrate: a_th must be positive");
  if (!(a_red > a_th && a_blue > a_th)) {
    throw ContractViolation("calibrate: need a_red, a_blue > a_th (cooling must increase contrast)");
  }
  if (!(kappa > 0.0) || !(gamma_1 > 0.0)) throw ContractViolation("calibrate: kappa and gamma_1 must be positive");

  const System sys{a_th, a_red, a_blue, kTwoPi * kappa / gamma_1};
  const double scale = std::max({a_th, a_red, a_blue});
  constexpr int kMaxIter = 200;
  constexpr double kTol = 1e-12;

  const Eigen::Vector3d guess0(a_red, 1.0 / 20.0, 0.5 + a_th / (2.0 * a_red));
  const std::array<Eigen::Vector3d, 4> starts = {
      guess0, Eigen::Vector3d(a_red * 1.2, 0.1, 0.5 + a_th / (2.4 * a_red)),
      Eigen::Vector3d(a_red * 0.9, 0.02, 0.5 + a_th / (1.8 * a_red)),
      Eigen::Vector3d(a_red * 1.5, 0.2, 0.5 + a_th / (3.0 * a_red))};

  double last_residual = 0.0;
  int total_iter = 0;
  for (const auto& start : starts) {
    Eigen::Vector3d u = start;
    double r = sys.residual(u).norm() / scale;
    for (int it = 0; it < kMaxIter && r > kTol; ++it, ++total_iter) {
      const Eigen::Vector3d f = sys.residual(u);
      const Eigen::Vector3d step = sys.jacobian(u).fullPivLu().solve(-f);
      double lambda = 1.0;
      Eigen::Vector3d trial = u + step;
      double rt = sys.residual(trial).norm() / scale;
      while ((!std::isfinite(rt) || rt >= r) && lambda > 1e-6) {
        lambda *= 0.5;
        trial = u + lambda * step;
        rt = sys.residual(trial).norm() / scale;
      }
      u = trial;
      r = rt;
    }
    last_residual = r;
    if (r <= kTol && u(1) < 0.0) u(1) = -u(1);  // y enters only through y²
    if (r <= kTol && physical(u)) {
      CalibrationResult out;
      out.a_half_distance = u(0);
      out.g3 = u(1) * kappa;
      out.p_g_th = u(2);
      const BathRates b = bath_rates(gamma_1, out.p_g_th);
      const CooledPopulations c = cooled_populations(out.g3, kappa, b.gamma_up, b.gamma_down);
      out.p_g_red = c.p_g_red;
      out.p_e_blue = c.p_e_blue;
      out.temperature = thermal_temperature(out.p_g_th, f_q);
      out.residual = r;
      out.iterations = total_iter;
      return out;
    }
  }
  throw NoSolution("calibrate: Newton iteration found no physical root (final relative residual " +
                   fmt(last_residual) + ")");
}

double stark_shift(double g3, double delta_r) {
  if (delta_r == 0.0) throw DegenerateDrive("stark_shift: zero detuning");
  return g3 * g3 / delta_r;
}

double raman_rabi_rate(double g3, double epsilon, double delta_r) {
  if (delta_r == 0.0) throw DegenerateDrive("raman_rabi_rate: zero detuning");
  return 2.0 * g3 * epsilon / delta_r;
}

QOperator ground_projector(std::size_t dim_r) {
  return tensor(QOperator::identity(dim_r), projector(2, 0));
}

QOperator excited_projector(std::size_t dim_r) {
  return tensor(QOperator::identity(dim_r), projector(2, 1));
}

QOperator lambda_hamiltonian(const LambdaParams& p) {
  p.validate();
  const std::size_t d = p.dim_r;
  const QOperator a = tensor(annihilation(d), QOperator::identity(2));
  const QOperator ad = a.adjoint();
  const QOperator num = ad * a;
  const QOperator sz = tensor(QOperator::identity(d), sigma_z());
  const QOperator sm = tensor(QOperator::identity(d), sigma_minus());
  const QOperator sp = sm.adjoint();
  QOperator h = p.delta_r * num + (p.delta / 2.0) * sz + (p.chi / 2.0) * (num * sz) +
                p.epsilon * (a + ad) + p.g3 * (a * sm + ad * sp);
  return kTwoPi * h;
}

std::vector<CollapseOperator> lambda_collapse(const LambdaParams& p) {
  const std::size_t d = p.dim_r;
  const QOperator a = tensor(annihilation(d), QOperator::identity(2));
  const QOperator sm = tensor(QOperator::identity(d), sigma_minus());
  return {{a, kTwoPi * p.kappa}, {sm, p.gamma_down}, {sm.adjoint(), p.gamma_up}};
}

QState thermal_state(std::size_t dim_r, double p_g) {
  if (p_g < 0.0 || p_g > 1.0) throw ContractViolation("thermal_state: p_g outside [0, 1]");
  const auto n = static_cast<Eigen::Index>(2 * dim_r);
  Matrix rho = Matrix::Zero(n, n);
  rho(0, 0) = p_g;
  rho(1, 1) = 1.0 - p_g;
  return QState(std::move(rho), dim_r, 2);
}

Chevron simulate_raman_rabi(const LambdaParams& p, std::span<const double> delta_grid,
                            std::span<const double> times, const QState& rho0, Execution exec,
                            const IntegratorOptions& opts) {
  p.validate();
  if (delta_grid.empty() || times.empty()) throw ContractViolation("simulate_raman_rabi: empty grid");
  if (rho0.dim_a() != p.dim_r || rho0.dim_b() != 2) {
    throw InvalidDimension("simulate_raman_rabi: rho0 must live on dim_r x 2");
  }
  const std::vector<Observable> obs = {{"p_g", ground_projector(p.dim_r)},
                                       {"top_level", top_level_projector(p.dim_r)}};
  const auto rows = parallel_map(
      delta_grid.size(),
      [&](std::size_t i) {
        LambdaParams q = p;
        q.delta = delta_grid[i];
        const Evolution ev = lindblad_evolve(lambda_hamiltonian(q), lambda_collapse(q), rho0, times, obs,
                                             opts, false);
        check_leakage(ev.trajectory, p.dim_r);
        return ev.trajectory.series("p_g");
      },
      exec);

  Chevron c;
  c.deltas.assign(delta_grid.begin(), delta_grid.end());
  c.times.assign(times.begin(), times.end());
  c.p_g.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(times.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < times.size(); ++k) {
      c.p_g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
  }
  return c;
}

ChevronFit analyze_chevron(const Chevron& c) {
  if (c.deltas.size() < 3) throw ContractViolation("analyze_chevron: need at least 3 detunings");
  if (c.times.size() < 4) throw ContractViolation("analyze_chevron: need at least 4 time samples");
  ChevronFit fit;
  for (Eigen::Index i = 0; i < c.p_g.rows(); ++i) {
    fit.contrast.push_back(c.p_g.row(i).maxCoeff() - c.p_g.row(i).minCoeff());
  }
  fit.center = peak_location(c.deltas, fit.contrast, 2);

  std::size_t row = 0;
  for (std::size_t i = 1; i < c.deltas.size(); ++i) {
    if (std::abs(c.deltas[i] - fit.center) < std::abs(c.deltas[row] - fit.center)) row = i;
  }
  std::vector<double> trace(c.times.size());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    trace[k] = c.p_g(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(k));
  }
  const double span = c.times.back() - c.times.front();
  fit.oscillation_frequency = dominant_frequency(c.times, trace, 1.0 / span);
  return fit;
}

Trajectory simulate_cooling(const LambdaParams& p, Direction direction, std::span<const double> times,
                            const QState& rho0, const IntegratorOptions& opts) {
  p.validate();
  if (times.size() < 2) throw ContractViolation("simulate_cooling: need at least 2 output times");
  if (rho0.dim_a() != p.dim_r || rho0.dim_b() != 2) {
    throw InvalidDimension("simulate_cooling: rho0 must live on dim_r x 2");
  }
  const std::size_t d = p.dim_r;
  const QOperator a = tensor(annihilation(d), QOperator::identity(2));
  const QOperator ad = a.adjoint();
  const QOperator num = ad * a;
  const QOperator sz = tensor(QOperator::identity(d), sigma_z());
  const QOperator sm = tensor(QOperator::identity(d), sigma_minus());
  const QOperator sp = sm.adjoint();

  // Tone on the χ-shifted sideband: both |e,0>-|g,1> and |g,0>-|e,1> become
  // resonant for a qubit detuning of -χ/2.
  const QOperator coupling = direction == Direction::red ? ad * sm + a * sp : a * sm + ad * sp;
  const QOperator h = kTwoPi * ((-p.chi / 4.0) * sz + (p.chi / 2.0) * (num * sz) + p.g3 * coupling);

  const std::vector<Observable> obs = {{"p_g", ground_projector(d)},
                                       {"p_e", excited_projector(d)},
                                       {"n_r", num},
                                       {"top_level", top_level_projector(d)}};
  Evolution ev = lindblad_evolve(h, lambda_collapse(p), rho0, times, obs, opts, false);
  check_leakage(ev.trajectory, d);
  return ev.trajectory;
}

Trajectory simulate_cooling(const LambdaParams& p, Direction direction, double duration,
                            const QState& rho0, std::size_t n_times, const IntegratorOptions& opts) {
  if (!(duration > 0.0)) throw ContractViolation("simulate_cooling: duration must be positive");
  if (n_times < 2) throw ContractViolation("simulate_cooling: need at least 2 output times");
  std::vector<double> times(n_times);
  for (std::size_t i = 0; i < n_times; ++i) times[i] = duration * static_cast<double>(i) / static_cast<double>(n_times - 1);
  return simulate_cooling(p, direction, times, rho0, opts);
}

}  // namespace lf
