#pragma once

#include <span>
#include <vector>

#include "lambda_forge/circuit.hpp"
#include "lambda_forge/parallel.hpp"
#include "lambda_forge/quantum.hpp"
#include "lambda_forge/raman.hpp"

namespace lf {

struct SpectroscopyMap {
  std::vector<double> fluxes;          // Φ₀, fluxonium loop
  std::vector<double> drive_freqs;     // Hz
  std::vector<double> transition;      // Hz, E(e,1) - E(g,0) per flux
  std::vector<double> g3;              // Hz per flux
  RealMatrix visibility;               // fluxes x drive_freqs, excess P_e over thermal
};

/// Steady-state excess excited population of the driven, damped Λ system
/// for a tone at drive_freq near the |g,0>-|e,1> line. Uses kappa, bath
/// rates and dim_r from `lambda`; detunings are set per point.
double steady_state_visibility(const LambdaParams& lambda, double g3, double detuning);

/// For every flux point: dressed |g,0>-|e,1> frequency and g3 at resonator
/// amplitude alpha_r_abs, then the visibility across drive_freqs.
SpectroscopyMap spectroscopy_sweep(const CircuitSpec& spec, const LambdaParams& lambda,
                                   std::span<const double> drive_freqs, std::span<const double> fluxes,
                                   double alpha_r_abs, Execution exec = Execution::parallel);

/// Peak visibility per flux point.
std::vector<double> peak_visibility(const SpectroscopyMap& map);

}  // namespace lf
