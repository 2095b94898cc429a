#include "lambda_forge/spectroscopy.hpp"

#include <algorithm>

#include "lambda_forge/errors.hpp"
#include "lambda_forge/lindblad.hpp"

namespace lf {

double steady_state_visibility(const LambdaParams& lambda, double g3, double detuning) {
  LambdaParams p = lambda;
  p.delta_r = 0.0;
  p.chi = 0.0;
  p.epsilon = 0.0;
  p.g3 = g3;
  p.delta = detuning;
  const double gamma_1 = p.gamma_up + p.gamma_down;
  if (!(gamma_1 > 0.0)) throw ContractViolation("steady_state_visibility: qubit bath rates are zero");
  const QState rho = steady_state(lambda_hamiltonian(p), lambda_collapse(p));
  const double p_e = expectation(excited_projector(p.dim_r), rho).real();
  return p_e - p.gamma_up / gamma_1;
}

SpectroscopyMap spectroscopy_sweep(const CircuitSpec& spec, const LambdaParams& lambda,
                                   std::span<const double> drive_freqs, std::span<const double> fluxes,
                                   double alpha_r_abs, Execution exec) {
  if (drive_freqs.empty()) throw ContractViolation("spectroscopy_sweep: empty drive frequency grid");
  if (fluxes.empty()) throw ContractViolation("spectroscopy_sweep: empty flux grid");
  lambda.validate();

  struct Row {
    double transition = 0.0;
    double g3 = 0.0;
    std::vector<double> vis;
  };
  const auto rows = parallel_map(
      fluxes.size(),
      [&](std::size_t i) {
        CircuitSpec s = spec;
        s.phi_ext_f = fluxes[i];
        Row r;
        const DressedCircuit full(s);
        r.transition = full.energy({1, 1}) - full.energy({0, 0});
        r.g3 = effective_g3(s, alpha_r_abs);
        r.vis.reserve(drive_freqs.size());
        for (double f : drive_freqs) r.vis.push_back(steady_state_visibility(lambda, r.g3, r.transition - f));
        return r;
      },
      exec);

  SpectroscopyMap m;
  m.fluxes.assign(fluxes.begin(), fluxes.end());
  m.drive_freqs.assign(drive_freqs.begin(), drive_freqs.end());
  m.visibility.resize(static_cast<Eigen::Index>(fluxes.size()), static_cast<Eigen::Index>(drive_freqs.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    m.transition.push_back(rows[i].transition);
    m.g3.push_back(rows[i].g3);
    for (std::size_t k = 0; k < drive_freqs.size(); ++k) {
      m.visibility(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i].vis[k];
    }
  }
  return m;
}

std::vector<double> peak_visibility(const SpectroscopyMap& map) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < map.visibility.rows(); ++i) out.push_back(map.visibility.row(i).maxCoeff());
  return out;
}

}  // namespace lf
