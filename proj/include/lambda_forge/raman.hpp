#pragma once

// Λ-system physics around the |g,0> - |e,1> (and |e,0> - |g,1>) Raman
// transitions: closed-form cooling model, calibration inversion, and master-
// equation simulations. Frequencies are Hz, rates 1/s.

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "lambda_forge/lindblad.hpp"
#include "lambda_forge/parallel.hpp"
#include "lambda_forge/quantum.hpp"

namespace lf {

struct LambdaParams {
  double delta_r = 150e6;
  double delta = 0.0;
  double chi = 0.7e6;
  double epsilon = 0.0;
  double g3 = 0.0;
  double kappa = 16.8e6;
  double gamma_up = 0.0;    // 1/s
  double gamma_down = 0.0;  // 1/s
  std::size_t dim_r = 6;

  void validate() const;
  /// g3 < kappa / 4, required by the adiabatic-elimination formulas.
  bool adiabatic() const { return g3 < kappa / 4.0; }
};

struct BathRates {
  double gamma_up = 0.0;
  double gamma_down = 0.0;
};

/// Γ↓ = P_g^th Γ1, Γ↑ = (1 - P_g^th) Γ1.
BathRates bath_rates(double gamma_1, double p_g_th);

/// α_r = ε / (iκ/2 - Δ_r). Throws DegenerateDrive when κ = Δ_r = 0.
Complex coherent_amplitude(double epsilon, double kappa, double delta_r);

/// Γ_cool = 4 g3² / κ in 1/s. Throws OutOfRegime unless g3 < κ/4.
double cooling_rate(double g3, double kappa);

struct CooledPopulations {
  double p_g_red = 0.0;
  double p_e_blue = 0.0;
};

CooledPopulations cooled_populations(double g3, double kappa, double gamma_up, double gamma_down);

struct Amplitudes {
  double a_th = 0.0;
  double a_red = 0.0;
  double a_blue = 0.0;
};

/// Readout amplitudes A(2P - 1) for the thermal, red-cooled and blue-pumped qubit.
Amplitudes forward_amplitudes(double a, double g3, double p_g_th, double kappa, double gamma_1);

struct CalibrationResult {
  double a_half_distance = 0.0;
  double g3 = 0.0;  // Hz
  double p_g_th = 0.0;
  double p_g_red = 0.0;
  double p_e_blue = 0.0;
  double temperature = 0.0;  // K
  double residual = 0.0;     // relative
  int iterations = 0;
};

/// Inverts forward_amplitudes by damped Newton iteration.
CalibrationResult calibrate(double a_th, double a_red, double a_blue, double kappa, double gamma_1,
                            double f_q = 500e6);

/// Two-level Boltzmann temperature for ground population p_g at splitting f_q.
double thermal_temperature(double p_g, double f_q);

double stark_shift(double g3, double delta_r);
double raman_rabi_rate(double g3, double epsilon, double delta_r);

/// H/ħ (rad/s) on resonator ⊗ qubit:
/// Δ_r a†a + (Δ/2)σ_z + (χ/2)a†aσ_z + ε(a + a†) + g3(aσ₋ + a†σ₊).
QOperator lambda_hamiltonian(const LambdaParams& p);

/// √κ a, √Γ↓ σ₋, √Γ↑ σ₊.
std::vector<CollapseOperator> lambda_collapse(const LambdaParams& p);

/// Resonator vacuum ⊗ diag(p_g, 1 - p_g).
QState thermal_state(std::size_t dim_r, double p_g);

/// Population observables on resonator ⊗ qubit.
QOperator ground_projector(std::size_t dim_r);
QOperator excited_projector(std::size_t dim_r);

struct Chevron {
  std::vector<double> deltas;  // Hz
  std::vector<double> times;   // s
  RealMatrix p_g;              // deltas x times
};

Chevron simulate_raman_rabi(const LambdaParams& p, std::span<const double> delta_grid,
                            std::span<const double> times, const QState& rho0,
                            Execution exec = Execution::parallel, const IntegratorOptions& opts = {});

struct ChevronFit {
  double center = 0.0;                // Hz, two-photon detuning of maximum contrast
  double oscillation_frequency = 0.0; // Hz, at the row closest to center
  std::vector<double> contrast;       // max - min of P_g per row
};

ChevronFit analyze_chevron(const Chevron& c);

enum class Direction { red, blue };

/// Resonant sideband tone only: red couples |e,0>-|g,1>, blue |g,0>-|e,1>.
/// Records p_g, p_e and n_r at n_times points over [0, duration].
Trajectory simulate_cooling(const LambdaParams& p, Direction direction, double duration,
                            const QState& rho0, std::size_t n_times = 101,
                            const IntegratorOptions& opts = {});

/// Same, on explicit output times; rho0 is the state at times.front().
Trajectory simulate_cooling(const LambdaParams& p, Direction direction, std::span<const double> times,
                            const QState& rho0, const IntegratorOptions& opts = {});

}  // namespace lf
