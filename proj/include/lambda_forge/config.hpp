#pragma once

// Experiment configuration: a JSON tree with sections circuit, snail, lambda,
// grids and output. Dimensioned keys carry a unit suffix (`kappa-mhz`,
// `l-q-nh`, `t1-us`); a bare key means the SI unit. Unknown keys are errors.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lambda_forge/circuit.hpp"
#include "lambda_forge/raman.hpp"

namespace lf::cli {

struct LambdaSettings {
  LambdaParams params;       // bath rates already derived from t1 and p_g_th
  double t1 = 5.7e-6;        // s
  double p_g_th = 0.6;
  double f_q = 500e6;        // Hz, for the Boltzmann temperature
  double alpha_r = 0.02;     // |α_r| used by spectroscopy and couplings
  double cool_g3 = 0.87e6;   // Hz, sideband coupling for `cool`
  double p_g_init = 0.94;    // ground population before a chevron
  double noise_floor = 1e-4; // spectroscopy visibility treated as unobservable below this
  IntegratorOptions integrator;
  double gamma_1() const { return 1.0 / t1; }
};

struct Grids {
  std::vector<double> flux;               // Φ₀
  std::vector<double> spectroscopy_flux;  // Φ₀
  std::vector<double> drive;              // Hz
  std::vector<double> detuning;           // Hz
  std::vector<double> time;               // s, chevron
  std::vector<double> cool_time;          // s
};

struct OutputSettings {
  std::string directory = "out";
  bool svg = true;
};

struct ExperimentConfig {
  CircuitSpec circuit;
  std::size_t levels = 6;
  LambdaSettings lambda;
  Grids grids;
  OutputSettings output;
  nlohmann::json resolved;  // canonical SI form with defaults filled in

  std::uint64_t hash() const;
};

/// `--section.key value` pairs, applied after the file.
using Overrides = std::vector<std::pair<std::string, std::string>>;

/// The built-in defaults as a raw config tree.
nlohmann::json default_tree();

/// Resolve a raw tree plus overrides. `output_env`, when non-empty, replaces
/// output.directory unless an override sets it. Throws ConfigError.
ExperimentConfig resolve(const nlohmann::json& raw, const Overrides& overrides = {},
                         const std::string& output_env = {});

/// Read and resolve a config file; an empty path means the built-in defaults.
ExperimentConfig load(const std::string& path, const Overrides& overrides = {},
                      const std::string& output_env = {});

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace lf::cli
