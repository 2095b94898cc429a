#pragma once

// Flux sweeps over the circuit model. Each point is independent; rows come
// back in grid order for both execution modes.

#include <span>
#include <vector>

#include "lambda_forge/circuit.hpp"
#include "lambda_forge/parallel.hpp"
#include "lambda_forge/snail.hpp"

namespace lf {

struct SnailRow {
  double phi_ext_f = 0, phi_ext_s = 0;
  SnailCoeffs single;
  SnailCoeffs array;
};

std::vector<SnailRow> snail_sweep(double alpha, int n, double ej_hz, int n_array, double area_ratio,
                                  std::span<const double> fluxes, Execution exec = Execution::parallel);

struct SpectrumRow {
  double phi_ext_f = 0;
  std::vector<double> levels;  // Hz above ground
};

std::vector<SpectrumRow> spectrum_sweep(const CircuitSpec& spec, std::span<const double> fluxes,
                                        std::size_t levels, Execution exec = Execution::parallel);

struct CouplingRow {
  double phi_ext_f = 0;
  CouplingReport report;
};

std::vector<CouplingRow> coupling_sweep(const CircuitSpec& spec, std::span<const double> fluxes,
                                        Complex alpha_r, Execution exec = Execution::parallel);

}  // namespace lf
