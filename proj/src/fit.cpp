#include "lambda_forge/fit.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "lambda_forge/errors.hpp"
#include "lambda_forge/units.hpp"

namespace lf {

namespace {

double power_at(std::span<const double> t, const std::vector<double>& y, double f) {
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) acc += y[i] * std::polar(1.0, -kTwoPi * f * t[i]);
  return std::norm(acc);
}

}  // namespace

double dominant_frequency(std::span<const double> times, std::span<const double> values, double f_min) {
  if (times.size() != values.size() || times.size() < 4) {
    throw ContractViolation("dominant_frequency: need at least 4 matched samples");
  }
  const double span = times.back() - times.front();
  if (!(span > 0.0)) throw ContractViolation("dominant_frequency: zero time span");

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  std::vector<double> y(values.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = values[i] - mean;

  const double f_nyq = 0.5 * static_cast<double>(times.size() - 1) / span;
  const double df = 1.0 / (16.0 * span);
  const double start = std::max(f_min, df);
  if (start >= f_nyq) throw ContractViolation("dominant_frequency: f_min above Nyquist");

  std::vector<double> grid, power;
  for (double f = start; f <= f_nyq; f += df) {
    grid.push_back(f);
    power.push_back(power_at(times, y, f));
  }
  const auto k = static_cast<std::size_t>(std::max_element(power.begin(), power.end()) - power.begin());
  if (k == 0 || k + 1 == power.size()) return grid[k];
  const double p0 = power[k - 1], p1 = power[k], p2 = power[k + 1];
  const double den = p0 - 2.0 * p1 + p2;
  const double shift = (den != 0.0) ? 0.5 * (p0 - p2) / den : 0.0;
  return grid[k] + shift * df;
}

Parabola fit_parabola(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw ContractViolation("fit_parabola: need >= 3 points");
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    a(i, 0) = xi * xi;
    a(i, 1) = xi;
    a(i, 2) = 1.0;
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
  return Parabola{c(0), c(1), c(2)};
}

double peak_location(std::span<const double> x, std::span<const double> y, int half_width) {
  if (x.size() != y.size() || x.size() < 3) throw ContractViolation("peak_location: need >= 3 points");
  const auto n = static_cast<long>(x.size());
  const long k = std::max_element(y.begin(), y.end()) - y.begin();
  long lo = std::max(0L, k - half_width);
  long hi = std::min(n - 1, k + half_width);
  while (hi - lo < 2) {
    if (lo > 0) --lo;
    else ++hi;
  }
  // Centre the abscissa to keep the normal equations well scaled.
  const double x0 = x[static_cast<std::size_t>(k)];
  const double scale = std::max(std::abs(x[static_cast<std::size_t>(hi)] - x[static_cast<std::size_t>(lo)]), 1e-300);
  std::vector<double> xs, ys;
  for (long i = lo; i <= hi; ++i) {
    xs.push_back((x[static_cast<std::size_t>(i)] - x0) / scale);
    ys.push_back(y[static_cast<std::size_t>(i)]);
  }
  const Parabola p = fit_parabola(xs, ys);
  if (!(p.a < 0.0)) return x0;
  return x0 + p.vertex() * scale;
}

}  // namespace lf
