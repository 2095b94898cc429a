#include "lambda_forge/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "lambda_forge/circuit.hpp"
#include "lambda_forge/config.hpp"
#include "lambda_forge/errors.hpp"
#include "lambda_forge/output.hpp"
#include "lambda_forge/parallel.hpp"
#include "lambda_forge/raman.hpp"
#include "lambda_forge/spectroscopy.hpp"
#include "lambda_forge/sweep.hpp"

namespace lf::cli {

using nlohmann::json;

namespace {

struct Product {
  Table table;
  json results = json::object();
  std::optional<std::string> svg;
};

struct CalibrateInputs {
  double a_th = 0.0, a_red = 0.0, a_blue = 0.0;
};

std::vector<double> scaled(const std::vector<double>& v, double s) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [s](double x) { return x * s; });
  return out;
}

Product snail_coeffs(const ExperimentConfig& cfg) {
  const CircuitSpec& c = cfg.circuit;
  const auto rows = snail_sweep(c.snail_alpha, c.snail_n, c.snail_ej, c.n_array, c.area_ratio, cfg.grids.flux);
  Product p;
  p.table.header = {"phi_ext_f", "phi_ext_s", "phi_min", "c2", "c3", "c4", "c2_tot", "c3_tot", "l_s_tot_nH"};
  LinePlot plot{"SNAIL Taylor coefficients", "fluxonium-loop flux (Phi0)", "coefficient (units of E_J)", {}};
  Series s2{"c2", {}, {}}, s3{"c3", {}, {}}, s4{"c4", {}, {}};
  for (const SnailRow& r : rows) {
    p.table.rows.push_back({r.phi_ext_f, r.phi_ext_s, r.single.phi_min, r.single.c2, r.single.c3, r.single.c4,
                            r.array.c2, r.array.c3, r.array.l_s * 1e9});
    for (Series* s : {&s2, &s3, &s4}) s->x.push_back(r.phi_ext_f);
    s2.y.push_back(r.single.c2);
    s3.y.push_back(r.single.c3);
    s4.y.push_back(r.single.c4);
  }
  plot.series = {s2, s3, s4};
  p.svg = render_svg(plot);
  return p;
}

Product spectrum(const ExperimentConfig& cfg) {
  const auto rows = spectrum_sweep(cfg.circuit, cfg.grids.flux, cfg.levels);
  Product p;
  p.table.header = {"phi_ext_f"};
  for (std::size_t k = 1; k < cfg.levels; ++k) p.table.header.push_back("level_" + std::to_string(k) + "_hz");
  LinePlot plot{"Coupled spectrum", "fluxonium-loop flux (Phi0)", "energy above ground (GHz)", {}};
  plot.series.resize(cfg.levels - 1);
  for (std::size_t k = 1; k < cfg.levels; ++k) plot.series[k - 1].name = "level " + std::to_string(k);
  for (const SpectrumRow& r : rows) {
    std::vector<double> row = {r.phi_ext_f};
    for (std::size_t k = 1; k < r.levels.size(); ++k) {
      row.push_back(r.levels[k]);
      plot.series[k - 1].x.push_back(r.phi_ext_f);
      plot.series[k - 1].y.push_back(r.levels[k] / 1e9);
    }
    p.table.rows.push_back(std::move(row));
  }
  p.svg = render_svg(plot);
  return p;
}

Product couplings(const ExperimentConfig& cfg) {
  const double alpha = cfg.lambda.alpha_r;
  const double kappa = cfg.lambda.params.kappa;
  struct Row {
    CouplingReport report;
    double g3_over_eps;
  };
  const auto& fluxes = cfg.grids.flux;
  const auto rows = parallel_map(fluxes.size(), [&](std::size_t i) {
    CircuitSpec s = cfg.circuit;
    s.phi_ext_f = fluxes[i];
    return Row{coupling_coefficients(s, alpha), g3_over_epsilon(s, kappa)};
  });
  Product p;
  p.table.header = {"phi_ext_f",        "g3_bare_hz", "coeff_gf_hz",     "coeff_g0e1_hz",
                    "matrix_element",   "g3_eff_hz",  "g3_over_epsilon"};
  Series bare{"g3 bare", {}, {}}, eff{"g3 at |alpha_r|", {}, {}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const CouplingReport& r = rows[i].report;
    p.table.rows.push_back({fluxes[i], r.g3_bare, r.coeff_gf, r.coeff_g0e1, r.matrix_element_phi_r_phi_q, r.g3_eff,
                            rows[i].g3_over_eps});
    bare.x.push_back(fluxes[i]);
    bare.y.push_back(r.g3_bare / 1e6);
    eff.x.push_back(fluxes[i]);
    eff.y.push_back(r.g3_eff / 1e6);
  }
  p.results["alpha_r"] = alpha;
  p.svg = render_svg(LinePlot{"Three-wave coupling", "fluxonium-loop flux (Phi0)", "coupling (MHz)", {bare, eff}});
  return p;
}

Product spectroscopy(const ExperimentConfig& cfg) {
  const SpectroscopyMap m = spectroscopy_sweep(cfg.circuit, cfg.lambda.params, cfg.grids.drive,
                                               cfg.grids.spectroscopy_flux, cfg.lambda.alpha_r);
  Product p;
  p.table.header = {"phi_ext_f", "drive_hz", "transition_hz", "g3_hz", "visibility"};
  for (std::size_t i = 0; i < m.fluxes.size(); ++i) {
    for (std::size_t j = 0; j < m.drive_freqs.size(); ++j) {
      p.table.rows.push_back({m.fluxes[i], m.drive_freqs[j], m.transition[i], m.g3[i],
                              m.visibility(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
    }
  }
  const auto peaks = peak_visibility(m);
  p.results["peak_visibility"] = peaks;
  std::vector<bool> visible;
  for (double v : peaks) visible.push_back(v > cfg.lambda.noise_floor);
  p.results["noise_floor"] = cfg.lambda.noise_floor;
  p.results["above_noise_floor"] = visible;
  p.results["max_visibility"] = *std::max_element(peaks.begin(), peaks.end());
  p.svg = render_svg(Heatmap{"Two-tone spectroscopy (steady state)", "drive frequency (GHz)",
                             "fluxonium-loop flux (Phi0)", "excess P_e", scaled(m.drive_freqs, 1e-9), m.fluxes,
                             m.visibility});
  return p;
}

Product cool(const ExperimentConfig& cfg) {
  LambdaParams lp = cfg.lambda.params;
  lp.g3 = cfg.lambda.cool_g3;
  const QState rho0 = thermal_state(lp.dim_r, cfg.lambda.p_g_th);
  const auto& t = cfg.grids.cool_time;
  const Trajectory red = simulate_cooling(lp, Direction::red, t, rho0, cfg.lambda.integrator);
  const Trajectory blue = simulate_cooling(lp, Direction::blue, t, rho0, cfg.lambda.integrator);
  Product p;
  p.table.header = {"time_s", "p_g_red", "p_e_red", "n_r_red", "p_g_blue", "p_e_blue", "n_r_blue"};
  const auto gr = red.series("p_g"), er = red.series("p_e"), nr = red.series("n_r");
  const auto gb = blue.series("p_g"), eb = blue.series("p_e"), nb = blue.series("n_r");
  for (std::size_t i = 0; i < t.size(); ++i) p.table.rows.push_back({t[i], gr[i], er[i], nr[i], gb[i], eb[i], nb[i]});

  const CooledPopulations c = cooled_populations(lp.g3, lp.kappa, lp.gamma_up, lp.gamma_down);
  p.results["closed_form"] = {{"p_g_red", c.p_g_red}, {"p_e_blue", c.p_e_blue}};
  p.results["simulated_final"] = {{"p_g_red", gr.back()}, {"p_e_blue", eb.back()}};
  p.results["cooling_rate_per_s"] = lp.adiabatic() ? json(cooling_rate(lp.g3, lp.kappa)) : json(nullptr);
  const auto us = scaled(t, 1e6);
  p.svg = render_svg(LinePlot{"Sideband cooling and pumping", "time (us)", "population",
                              {{"P_g (red tone)", us, gr}, {"P_e (blue tone)", us, eb}}});
  return p;
}

Product chevron(const ExperimentConfig& cfg) {
  const LambdaParams& lp = cfg.lambda.params;
  const Chevron c = simulate_raman_rabi(lp, cfg.grids.detuning, cfg.grids.time,
                                       thermal_state(lp.dim_r, cfg.lambda.p_g_init), Execution::parallel,
                                       cfg.lambda.integrator);
  const ChevronFit fit = analyze_chevron(c);
  Product p;
  p.table.header = {"delta_hz", "time_s", "p_g"};
  for (std::size_t i = 0; i < c.deltas.size(); ++i) {
    for (std::size_t k = 0; k < c.times.size(); ++k) {
      p.table.rows.push_back({c.deltas[i], c.times[k], c.p_g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k))});
    }
  }
  p.results["fitted_center_hz"] = fit.center;
  p.results["fitted_rabi_hz"] = fit.oscillation_frequency;
  p.results["predicted_stark_shift_hz"] = stark_shift(lp.g3, lp.delta_r);
  p.results["predicted_rabi_hz"] = raman_rabi_rate(lp.g3, lp.epsilon, lp.delta_r);
  p.results["contrast"] = fit.contrast;
  p.svg = render_svg(Heatmap{"Raman-Rabi chevron", "time (us)", "two-photon detuning (kHz)", "P_g",
                             scaled(c.times, 1e6), scaled(c.deltas, 1e-3), c.p_g});
  return p;
}

Product calibrate_cmd(const ExperimentConfig& cfg, const CalibrateInputs& in) {
  const LambdaSettings& l = cfg.lambda;
  if (!(in.a_th > 0.0)) throw ConfigError("--a-th: must be positive");
  if (!(in.a_red > in.a_th && in.a_blue > in.a_th)) {
    throw ConfigError("--a-red/--a-blue: both must exceed --a-th (cooling increases contrast)");
  }
  const CalibrationResult r = calibrate(in.a_th, in.a_red, in.a_blue, l.params.kappa, l.gamma_1(), l.f_q);
  Product p;
  p.table.header = {"a_half_distance", "g3_hz", "p_g_th", "p_g_red", "p_e_blue", "temperature_k", "residual",
                    "iterations"};
  p.table.rows.push_back({r.a_half_distance, r.g3, r.p_g_th, r.p_g_red, r.p_e_blue, r.temperature, r.residual,
                          static_cast<double>(r.iterations)});
  p.results["inputs"] = {{"a_th", in.a_th}, {"a_red", in.a_red}, {"a_blue", in.a_blue}};
  p.results["temperature_mk"] = r.temperature * 1e3;
  return p;
}

/// Pulls `--section.key value` and `--section.key=value` out of args.
Overrides split_overrides(std::vector<std::string>& args) {
  Overrides out;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    const std::string name = a.rfind("--", 0) == 0 ? a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2) : "";
    if (name.find('.') == std::string::npos) {
      rest.push_back(a);
      continue;
    }
    if (const auto eq = a.find('='); eq != std::string::npos) {
      out.emplace_back(name, a.substr(eq + 1));
    } else if (i + 1 < args.size()) {
      out.emplace_back(name, args[++i]);
    } else {
      throw ConfigError("override '--" + name + "' needs a value");
    }
  }
  args = std::move(rest);
  return out;
}

void emit(const std::string& name, const ExperimentConfig& cfg, const Product& p, double seconds) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output.directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  write_csv((dir / (name + ".csv")).string(), p.table);
  if (cfg.output.svg && p.svg) write_text((dir / (name + ".svg")).string(), *p.svg);
  RunInfo info{name, cfg.resolved, cfg.hash(), seconds, p.results};
  json meta = metadata(info);
  meta["versions"]["cli11"] = CLI11_VERSION;
  write_text((dir / (name + ".json")).string(), meta.dump(2) + "\n");
}

}  // namespace

int run(const std::vector<std::string>& argv) {
  std::vector<std::string> args = argv;
  Overrides overrides;
  try {
    overrides = split_overrides(args);
  } catch (const ConfigError& e) {
    std::cerr << "lambda_forge: " << e.what() << "\n";
    return kExitConfig;
  }

  CLI::App app{"Simulation and analysis of a fluxonium Lambda-system cooling experiment", "lambda_forge"};
  app.set_version_flag("--version", "lambda_forge 0.1.0");
  app.require_subcommand(1);

  std::string config_path;
  int jobs = 0;
  CalibrateInputs cal;

  using Runner = std::function<Product(const ExperimentConfig&)>;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"snail-coeffs", "SNAIL Taylor coefficients across the flux grid"},
      {"spectrum", "coupled circuit spectrum across the flux grid"},
      {"couplings", "three-wave coupling coefficients and g3 across the flux grid"},
      {"spectroscopy", "steady-state two-tone spectroscopy map"},
      {"cool", "sideband cooling and pumping trajectories"},
      {"chevron", "Raman-Rabi chevron and its fitted centre and rate"},
      {"calibrate", "invert measured amplitudes into g3, P_g^th and temperature"}};
  const std::map<std::string, Runner> runners = {
      {"snail-coeffs", snail_coeffs},
      {"spectrum", spectrum},
      {"couplings", couplings},
      {"spectroscopy", spectroscopy},
      {"cool", cool},
      {"chevron", chevron},
      {"calibrate", [&](const ExperimentConfig& c) { return calibrate_cmd(c, cal); }}};

  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "JSON config file (built-in defaults when omitted)");
    sub->add_option("-j,--jobs", jobs, "maximum worker threads (0 = all)")->check(CLI::NonNegativeNumber);
    sub->footer("Any config field can be overridden with --section.key value, e.g. --lambda.g3-mhz 3.0");
    if (name == "calibrate") {
      sub->add_option("--a-th", cal.a_th, "thermal readout amplitude")->required();
      sub->add_option("--a-red", cal.a_red, "amplitude after red-sideband cooling")->required();
      sub->add_option("--a-blue", cal.a_blue, "amplitude after blue-sideband pumping")->required();
    }
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const char* env = std::getenv("LAMBDA_FORGE_OUTPUT");
    const ExperimentConfig cfg = load(config_path, overrides, env ? env : "");
    set_max_jobs(jobs);
    const auto t0 = std::chrono::steady_clock::now();
    const Product p = runners.at(name)(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit(name, cfg, p, secs);
    std::printf("%s: wrote %s/%s.csv (%zu rows, %.2f s)\n", name.c_str(), cfg.output.directory.c_str(), name.c_str(),
                p.table.rows.size(), secs);
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "lambda_forge " << name << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "lambda_forge " << name << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "lambda_forge " << name << ": numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace lf::cli
