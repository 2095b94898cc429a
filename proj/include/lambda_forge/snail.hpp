#pragma once

#include <cstddef>

namespace lf {

/// One SNAIL: n large junctions (energy ej) in a loop with a single junction
/// of energy alpha * ej, threaded by phi_ext_s flux quanta.
class SnailSpec {
 public:
  /// Throws ContractViolation unless 0 < alpha < 0.5, n >= 1, ej_hz > 0.
  SnailSpec(double alpha, int n, double phi_ext_s, double ej_hz);

  double alpha() const { return alpha_; }
  int n() const { return n_; }
  double phi_ext_s() const { return phi_ext_s_; }
  double ej_hz() const { return ej_hz_; }

  SnailSpec with_flux(double phi_ext_s) const { return SnailSpec(alpha_, n_, phi_ext_s, ej_hz_); }

 private:
  double alpha_;
  int n_;
  double phi_ext_s_;
  double ej_hz_;
};

/// Expansion U/E_J ≈ U_min + c2 x^2 + c3 x^3 + c4 x^4 around phi_min.
struct SnailCoeffs {
  double phi_min = 0.0;  // rad
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double l_s = 0.0;  // H
};

inline constexpr double kDefaultAreaRatio = 60.0;

/// U/E_J = -alpha cos(phi) - n cos((2 pi phi_ext_s - phi) / n).
double snail_potential(double phi, const SnailSpec& spec);

/// k-th derivative of snail_potential in phi, k = 0..4.
double snail_potential_derivative(double phi, const SnailSpec& spec, int k);

/// Global minimum in (-pi, pi]. Throws NoMinimum if the refined point is
/// not a stationary minimum.
double find_minimum(const SnailSpec& spec);

SnailCoeffs taylor_coeffs(const SnailSpec& spec);

/// Series composition of identical SNAILs.
SnailCoeffs array_coeffs(const SnailCoeffs& single, int n_array);

double flux_map(double phi_ext_f, double area_ratio = kDefaultAreaRatio);

}  // namespace lf
