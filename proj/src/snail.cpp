#include "lambda_forge/snail.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lambda_forge/errors.hpp"
#include "lambda_forge/units.hpp"

namespace lf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kCoarsePoints = 720;

// Flux reduced to (-0.5, 0.5] so every image of the same bias lands on the
// same minimum.
double reduce_flux(double phi_ext_s) {
  double r = phi_ext_s - std::round(phi_ext_s);
  if (r <= -0.5) r += 1.0;
  return r;
}

}  // namespace

SnailSpec::SnailSpec(double alpha, int n, double phi_ext_s, double ej_hz)
    : alpha_(alpha), n_(n), phi_ext_s_(phi_ext_s), ej_hz_(ej_hz) {
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw ContractViolation("SnailSpec: alpha must lie in (0, 0.5), got " + std::to_string(alpha));
  }
  if (n < 1) throw ContractViolation("SnailSpec: n must be >= 1, got " + std::to_string(n));
  if (!(ej_hz > 0.0)) throw ContractViolation("SnailSpec: ej must be positive");
  if (!std::isfinite(phi_ext_s)) throw ContractViolation("SnailSpec: flux must be finite");
}

double snail_potential(double phi, const SnailSpec& spec) {
  return snail_potential_derivative(phi, spec, 0);
}

double snail_potential_derivative(double phi, const SnailSpec& spec, int k) {
  const double a = spec.alpha();
  const double n = spec.n();
  const double theta = (kTwoPi * spec.phi_ext_s() - phi) / n;
  switch (k) {
    case 0: return -a * std::cos(phi) - n * std::cos(theta);
    case 1: return a * std::sin(phi) - std::sin(theta);
    case 2: return a * std::cos(phi) + std::cos(theta) / n;
    case 3: return -a * std::sin(phi) + std::sin(theta) / (n * n);
    case 4: return -a * std::cos(phi) - std::cos(theta) / (n * n * n);
    default: throw ContractViolation("snail_potential_derivative: order must be 0..4");
  }
}

double find_minimum(const SnailSpec& spec) {
  const SnailSpec s = spec.with_flux(reduce_flux(spec.phi_ext_s()));
  auto u = [&](double x) { return snail_potential(x, s); };

  double best_x = kPi;
  double best_u = u(kPi);
  const double step = 2.0 * kPi / kCoarsePoints;
  for (int i = 1; i < kCoarsePoints; ++i) {
    const double x = -kPi + i * step;
    const double v = u(x);
    if (v < best_u) {
      best_u = v;
      best_x = x;
    }
  }

  // golden section on the bracketing cell pair
  constexpr double invphi = 0.6180339887498949;
  double lo = best_x - step;
  double hi = best_x + step;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = u(x1), f2 = u(x2);
  while (hi - lo > 1e-12) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = u(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = u(x2);
    }
  }
  double x = 0.5 * (lo + hi);

  // Newton polish on U' brings |U'| to machine level.
  for (int it = 0; it < 4; ++it) {
    const double d2 = snail_potential_derivative(x, s, 2);
    if (d2 <= 0.0) break;
    x -= snail_potential_derivative(x, s, 1) / d2;
  }
  if (x <= -kPi) x += 2.0 * kPi;
  if (x > kPi) x -= 2.0 * kPi;

  const double d1 = snail_potential_derivative(x, s, 1);
  const double d2 = snail_potential_derivative(x, s, 2);
  if (!(std::abs(d1) < 1e-12) || !(d2 > 0.0)) {
    throw NoMinimum("find_minimum: no stationary minimum (U'=" + std::to_string(d1) +
                    ", U''=" + std::to_string(d2) + ")");
  }
  return x;
}

SnailCoeffs taylor_coeffs(const SnailSpec& spec) {
  const SnailSpec s = spec.with_flux(reduce_flux(spec.phi_ext_s()));
  SnailCoeffs c;
  c.phi_min = find_minimum(s);
  c.c2 = snail_potential_derivative(c.phi_min, s, 2) / 2.0;
  c.c3 = snail_potential_derivative(c.phi_min, s, 3) / 6.0;
  c.c4 = snail_potential_derivative(c.phi_min, s, 4) / 24.0;
  if (!(c.c2 > 0.0)) throw NoMinimum("taylor_coeffs: c2 is not positive");
  c.l_s = kPhi0 * kPhi0 / (2.0 * c.c2 * kPlanck * s.ej_hz());
  return c;
}

SnailCoeffs array_coeffs(const SnailCoeffs& single, int n_array) {
  if (n_array < 1) throw ContractViolation("array_coeffs: N must be >= 1");
  const double n = n_array;
  SnailCoeffs t = single;
  t.c2 = single.c2 / n;
  t.c3 = single.c3 / (n * n);
  t.c4 = single.c4 / (n * n * n);
  t.l_s = single.l_s * n;
  return t;
}

double flux_map(double phi_ext_f, double area_ratio) {
  if (!(area_ratio > 0.0)) throw ContractViolation("flux_map: area ratio must be positive");
  return phi_ext_f / area_ratio;
}

}  // namespace lf
