#include "lambda_forge/sweep.hpp"

#include <atomic>

#include "lambda_forge/errors.hpp"
#include "lambda_forge/units.hpp"

namespace lf {

namespace {
std::atomic<int> g_max_jobs{0};
}

void set_max_jobs(int jobs) {
  if (jobs < 0) throw ContractViolation("set_max_jobs: jobs must be >= 0");
  g_max_jobs = jobs;
}

int max_jobs() { return g_max_jobs; }

std::vector<SnailRow> snail_sweep(double alpha, int n, double ej_hz, int n_array, double area_ratio,
                                  std::span<const double> fluxes, Execution exec) {
  return parallel_map(
      fluxes.size(),
      [&](std::size_t i) {
        SnailRow r;
        r.phi_ext_f = fluxes[i];
        r.phi_ext_s = flux_map(fluxes[i], area_ratio);
        r.single = taylor_coeffs(SnailSpec(alpha, n, r.phi_ext_s, ej_hz));
        r.array = array_coeffs(r.single, n_array);
        return r;
      },
      exec);
}

std::vector<SpectrumRow> spectrum_sweep(const CircuitSpec& spec, std::span<const double> fluxes,
                                        std::size_t levels, Execution exec) {
  return parallel_map(
      fluxes.size(),
      [&](std::size_t i) {
        CircuitSpec s = spec;
        s.phi_ext_f = fluxes[i];
        const Eigensystem es = eigendecompose(build_hamiltonian(s), levels);
        SpectrumRow r;
        r.phi_ext_f = fluxes[i];
        for (double e : es.values) r.levels.push_back((e - es.values[0]) / kTwoPi);
        return r;
      },
      exec);
}

std::vector<CouplingRow> coupling_sweep(const CircuitSpec& spec, std::span<const double> fluxes,
                                        Complex alpha_r, Execution exec) {
  return parallel_map(
      fluxes.size(),
      [&](std::size_t i) {
        CircuitSpec s = spec;
        s.phi_ext_f = fluxes[i];
        return CouplingRow{fluxes[i], coupling_coefficients(s, alpha_r)};
      },
      exec);
}

}  // namespace lf
