#pragma once

#include <span>

namespace lf {

/// Frequency (Hz) of the largest Fourier component of the mean-subtracted
/// samples, searched above f_min on a grid 16x finer than 1/T and refined by
/// quadratic interpolation. Samples need not be uniform.
double dominant_frequency(std::span<const double> times, std::span<const double> values,
                          double f_min = 0.0);

struct Parabola {
  double a = 0.0, b = 0.0, c = 0.0;  // a x² + b x + c
  double vertex() const { return -b / (2.0 * a); }
};

/// Least-squares parabola; needs at least three distinct x.
Parabola fit_parabola(std::span<const double> x, std::span<const double> y);

/// Vertex of the parabola through `half_width` points either side of the
/// maximum of y (clipped at the ends).
double peak_location(std::span<const double> x, std::span<const double> y, int half_width = 2);

}  // namespace lf
