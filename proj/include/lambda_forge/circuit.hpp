#pragma once

// Fluxonium coupled to an antenna resonator through a shared SNAIL array.
//
// Phases are dimensionless (flux / reduced flux quantum). Energies are
// quoted in Hz (E / h); build_hamiltonian returns H / hbar in rad/s.

#include <complex>
#include <string>
#include <vector>

#include "lambda_forge/quantum.hpp"
#include "lambda_forge/snail.hpp"

namespace lf {

struct CircuitSpec {
  double ej_f = 0.0;  // Hz
  double ec_f = 0.0;  // Hz
  double l_q = 0.0;   // H
  double l_r = 0.0;   // H
  double c_r = 0.0;   // F

  double snail_alpha = 0.4;
  int snail_n = 3;
  double snail_ej = 0.0;  // Hz, large junctions
  int n_array = 5;
  double area_ratio = kDefaultAreaRatio;

  double phi_ext_f = 0.5;  // Φ₀
  std::size_t dim_q = 60;
  std::size_t dim_r = 6;

  SnailSpec snail() const;
  /// Throws ContractViolation on any broken invariant.
  void validate() const;

  /// Device-matched values (E_J, C_r tuned by tools/calibrate_circuit).
  static CircuitSpec calibrated_defaults();
};

struct CircuitDerived {
  SnailCoeffs single;
  SnailCoeffs array;   // c*_tot, l_s_tot
  double l_s_tot = 0;  // H
  double el_q = 0;     // Hz, φ₀²/L_q
  double f_r = 0;      // Hz, bare resonator frequency with the SNAIL in series
  double phi_zpf_r = 0;
  double phi_zpf_q = 0;
  double n_zpf_q = 0;
  double j = 0;        // Hz, linear coupling
  double a = 0;        // qubit-phase weight on the SNAIL phase
  double b = 0;        // resonator-phase weight on the SNAIL phase
  double e3 = 0;       // Hz, c3_tot * E_J^S
};

CircuitDerived derive(const CircuitSpec& spec);

struct HamiltonianTerms {
  bool linear_coupling = true;
  bool three_wave = true;
};

/// Fluxonium alone in its linearized-mode oscillator basis, in Hz.
struct FluxoniumOperators {
  QOperator h;    // Hz
  QOperator phi;  // inductive-branch phase
  QOperator n;    // charge
};
FluxoniumOperators fluxonium_operators(const CircuitSpec& spec);

/// Lowest k fluxonium levels relative to the ground level, Hz.
std::vector<double> fluxonium_spectrum(const CircuitSpec& spec, std::size_t k);

/// Resonator phase φ_zpf (a + a†) on dim_r levels.
QOperator resonator_phase(const CircuitSpec& spec);

/// H / hbar (rad/s) on resonator ⊗ fluxonium. Throws TruncationError when
/// the ground state puts more than 1e-6 weight in the top 10% of either mode.
QOperator build_hamiltonian(const CircuitSpec& spec, const HamiltonianTerms& terms = {});

/// Bare product-state label: fluxonium level q (0=g, 1=e, 2=f, ...) and photon number n.
struct StateLabel {
  int q = 0;
  int n = 0;
  std::string str() const;
  static StateLabel parse(const std::string& s);  // "g0", "e1", ...
  friend bool operator==(const StateLabel&, const StateLabel&) = default;
};

enum class Basis { dressed, bare };

class DressedCircuit {
 public:
  DressedCircuit(const CircuitSpec& spec, const HamiltonianTerms& terms = {});

  const CircuitSpec& spec() const { return spec_; }
  /// Energy above the dressed ground state, Hz.
  double energy(const StateLabel& l) const;
  /// Full-space fluxonium and resonator phase operators.
  const QOperator& phi_q() const { return phi_q_full_; }
  const QOperator& phi_r() const { return phi_r_full_; }
  QOperator phi_r_phi_q() const { return phi_r_full_ * phi_q_full_; }

  Complex matrix_element(const QOperator& op, const StateLabel& i, const StateLabel& j,
                         Basis basis = Basis::dressed) const;
  /// Dressed eigenvector index assigned to a bare label.
  std::size_t index(const StateLabel& l) const;
  double overlap(const StateLabel& l) const;
  const std::vector<double>& energies() const { return energies_; }
  /// Label of the k-th lowest dressed state.
  StateLabel label_of(std::size_t k) const;

 private:
  Vector state(const StateLabel& l, Basis basis) const;

  CircuitSpec spec_;
  Matrix bare_q_;           // fluxonium eigenvectors (columns)
  Matrix vectors_;          // dressed eigenvectors
  std::vector<double> energies_;  // Hz above ground
  std::vector<StateLabel> labels_;
  std::vector<std::size_t> label_index_;
  std::vector<double> label_overlap_;
  int levels_q_ = 0;
  int levels_r_ = 0;
  QOperator phi_q_full_;
  QOperator phi_r_full_;
};

struct CouplingReport {
  double g3_bare = 0;     // Hz
  double coeff_gf = 0;    // Hz
  double coeff_g0e1 = 0;  // Hz
  double g3_eff = 0;      // Hz
  double matrix_element_phi_r_phi_q = 0;
};

/// Closed-form coupling prefactors only.
CouplingReport three_wave_coefficients(const CircuitSpec& spec);

/// Prefactors plus the dressed matrix element and g3 at resonator amplitude alpha_r.
CouplingReport coupling_coefficients(const CircuitSpec& spec, Complex alpha_r = 0.0,
                                     Basis basis = Basis::dressed);

/// g3 = g3_bare |alpha_r| |<g,0|φ_r φ_q|e,1>|, Hz.
double effective_g3(const CircuitSpec& spec, Complex alpha_r, Basis basis = Basis::dressed);

/// g3 / ε for one tone at ω_r + ω_q that drives both the cavity directly and
/// the |g,0>-|e,1> transition.
double g3_over_epsilon(const CircuitSpec& spec, double kappa_hz, Basis basis = Basis::dressed);

struct SelectionEntry {
  StateLabel i, j;
  double phi_q = 0;
  double phi_r_phi_q = 0;
  bool allowed_phi_q = false;
  bool allowed_phi_r_phi_q = false;
};

/// Matrix elements between the lowest 6 dressed states of the parity-
/// preserving Hamiltonian. Throws ParityUndefined away from a sweet spot.
std::vector<SelectionEntry> selection_rule_report(const CircuitSpec& spec,
                                                  double threshold = 1e-6);

bool at_sweet_spot(double phi_ext_f);

}  // namespace lf
