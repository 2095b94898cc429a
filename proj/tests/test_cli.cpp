#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include "lambda_forge/commands.hpp"
#include "lambda_forge/config.hpp"
#include "lambda_forge/errors.hpp"
#include "lambda_forge/output.hpp"
#include "lambda_forge/raman.hpp"

using namespace lf;
using namespace lf::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lf_cli_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

int run_args(std::initializer_list<std::string> args) { return run(std::vector<std::string>(args)); }

std::vector<double> annotation(const std::string& svg, const std::string& kind) {
  const std::regex re("data-kind=\"" + kind + "\" data-value=\"([^\"]+)\"");
  std::vector<double> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    out.push_back(std::stod((*it)[1]));
  }
  return out;
}

struct EnvGuard {
  explicit EnvGuard(const char* value) {
    if (value) ::setenv("LAMBDA_FORGE_OUTPUT", value, 1);
    else ::unsetenv("LAMBDA_FORGE_OUTPUT");
  }
  ~EnvGuard() { ::unsetenv("LAMBDA_FORGE_OUTPUT"); }
};

}  // namespace

TEST_CASE("CSV round trip keeps full precision") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1e9, 1e9);
  Table t{{"a", "b", "c"}, {}};
  for (int i = 0; i < 50; ++i) t.rows.push_back({u(rng), u(rng) * 1e-15, 1.0 / (i + 3.0)});
  const fs::path dir = scratch("csv");
  write_csv((dir / "t.csv").string(), t);
  const Table back = read_csv((dir / "t.csv").string());
  CHECK(back.header == t.header);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(std::abs(back.rows[i][j] - t.rows[i][j]) <= 1e-12 * std::abs(t.rows[i][j]));
    }
  }
  CHECK_THROWS_AS(write_csv((dir / "missing" / "t.csv").string(), t), IoError);
}

TEST_CASE("line plot SVG is deterministic and annotates the extremes") {
  LinePlot plot{"t", "x (s)", "y", {{"one", {0, 1, 2, 3}, {0.5, -2.25, 7.125, 1.0}}, {"two", {0, 1}, {3.0, 9.5}}}};
  const std::string a = render_svg(plot), b = render_svg(plot);
  CHECK(a == b);
  CHECK(annotation(a, "min") == std::vector<double>{-2.25});
  CHECK(annotation(a, "max") == std::vector<double>{9.5});
  CHECK(a.size() <= kMaxSvgBytes);

  LinePlot single{"p", "x", "y", {{"dot", {1.0}, {4.0}}}};
  const std::string s = render_svg(single);
  CHECK(s.find("<circle") != std::string::npos);
  CHECK(annotation(s, "min") == std::vector<double>{4.0});

  CHECK_THROWS_AS(render_svg(LinePlot{"e", "x", "y", {}}), ContractViolation);
}

TEST_CASE("heatmap SVG has a monotone colour scale and bounded size") {
  Heatmap m{"h", "x", "y", "z", {}, {}, {}};
  const int n = 900;
  for (int j = 0; j < n; ++j) m.x.push_back(j);
  for (int i = 0; i < n; ++i) m.y.push_back(i);
  m.z.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m.z(i, j) = std::sin(0.01 * i) + 0.002 * j;
  }
  const std::string svg = render_svg(m);
  CHECK(svg.size() <= kMaxSvgBytes);
  CHECK(annotation(svg, "min")[0] == m.z.minCoeff());
  CHECK(annotation(svg, "max")[0] == m.z.maxCoeff());

  // colour bar: 32 swatches from low to high
  const std::regex re("width=\"14\" height=\"6.1\" fill=\"#([0-9a-f]{6})\"");
  std::vector<std::array<int, 3>> bar;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    const std::string hex = (*it)[1];
    bar.push_back({std::stoi(hex.substr(0, 2), nullptr, 16), std::stoi(hex.substr(2, 2), nullptr, 16),
                   std::stoi(hex.substr(4, 2), nullptr, 16)});
  }
  REQUIRE(bar.size() == 32);
  for (std::size_t k = 1; k < bar.size(); ++k) {
    CHECK(bar[k][0] >= bar[k - 1][0]);
    CHECK(bar[k][1] >= bar[k - 1][1]);
    CHECK(bar[k][2] <= bar[k - 1][2]);
  }
  CHECK(render_svg(m) == svg);
}

TEST_CASE("shipped config resolves to the built-in defaults") {
  const ExperimentConfig builtin = load("");
  const ExperimentConfig shipped = load(LF_SOURCE_DIR "/configs/default.json");
  CHECK(shipped.resolved == builtin.resolved);
  CHECK(shipped.hash() == builtin.hash());
  CHECK(builtin.hash() == fnv1a(builtin.resolved.dump()));
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("unit suffixes convert to SI") {
  const ExperimentConfig a = resolve(json{{"lambda", {{"kappa-mhz", 16.8}}}});
  const ExperimentConfig b = resolve(json{{"lambda", {{"kappa-khz", 16800.0}}}});
  const ExperimentConfig c = resolve(json{{"lambda", {{"kappa", 16.8e6}}}});
  CHECK(a.lambda.params.kappa == doctest::Approx(16.8e6));
  CHECK(b.lambda.params.kappa == doctest::Approx(a.lambda.params.kappa));
  CHECK(c.lambda.params.kappa == a.lambda.params.kappa);
  const ExperimentConfig t = resolve(json{{"lambda", {{"t1-ns", 5700.0}}}});
  CHECK(t.lambda.t1 == doctest::Approx(5.7e-6));
  const ExperimentConfig l = resolve(json{{"circuit", {{"l-q-uh", 0.33}}}});
  CHECK(l.circuit.l_q == doctest::Approx(0.33e-6));
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(resolve(json{{"lambda", {{"kappa-mzh", 1.0}}}}), ConfigError);
  CHECK_THROWS_AS(resolve(json{{"bogus", json::object()}}), ConfigError);
  CHECK_THROWS_AS(resolve(json{{"grids", {{"flux", json::array()}}}}), ConfigError);
  CHECK_THROWS_AS(resolve(json{{"grids", {{"flux", {{"start", 0}, {"stop", 1}, {"count", 1}}}}}}), ConfigError);
  CHECK_THROWS_AS(resolve(json{{"lambda", {{"kappa-mhz", -1.0}}}}), ConfigError);
  CHECK_THROWS_AS(resolve(json{{"lambda", {{"p-g-th", 1.5}}}}), ConfigError);
  CHECK_THROWS_AS(resolve(json{{"circuit", {{"dim-q", 5}}}}), ConfigError);
  CHECK_THROWS_AS(load("/nonexistent/lf.json"), ConfigError);
  try {
    resolve(json{{"grids", {{"flux", json::array()}}}});
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("grids.flux") != std::string::npos);
  }
}

TEST_CASE("overrides and output directory precedence") {
  const ExperimentConfig o = resolve(json::object(), {{"lambda.g3-mhz", "2.5"}});
  CHECK(o.lambda.params.g3 == doctest::Approx(2.5e6));
  // an override replaces the file value even under a different unit suffix
  const ExperimentConfig f = resolve(json{{"lambda", {{"g3-khz", 100.0}}}}, {{"lambda.g3-mhz", "2.5"}});
  CHECK(f.lambda.params.g3 == doctest::Approx(2.5e6));
  CHECK(resolve(json::object(), {}, "from-env").output.directory == "from-env");
  CHECK(resolve(json{{"output", {{"directory", "from-file"}}}}, {}, "from-env").output.directory == "from-env");
  CHECK(resolve(json::object(), {{"output.directory", "\"cli\""}}, "from-env").output.directory == "cli");
  const ExperimentConfig g = resolve(json::object(), {{"grids.flux", "[0.5, 1.5, 2.5]"}});
  CHECK(g.grids.flux == std::vector<double>{0.5, 1.5, 2.5});
}

TEST_CASE("cli: snail-coeffs writes csv, svg and metadata") {
  EnvGuard env(nullptr);
  const fs::path dir = scratch("snail");
  REQUIRE(run_args({"snail-coeffs", "--output.directory", dir.string()}) == kExitOk);
  CHECK(fs::exists(dir / "snail-coeffs.csv"));
  CHECK(fs::exists(dir / "snail-coeffs.svg"));
  const json meta = read_json(dir / "snail-coeffs.json");
  CHECK(meta["command"] == "snail-coeffs");
  CHECK(meta["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
  CHECK(meta.contains("versions"));
  CHECK(meta["versions"].contains("cli11"));
  const Table t = read_csv((dir / "snail-coeffs.csv").string());
  CHECK(t.header.front() == "phi_ext_f");
  CHECK(t.rows.size() == load("").grids.flux.size());

  const std::string first = slurp(dir / "snail-coeffs.csv");
  const std::string svg = slurp(dir / "snail-coeffs.svg");
  REQUIRE(run_args({"snail-coeffs", "--output.directory=" + dir.string(), "-j", "1"}) == kExitOk);
  CHECK(slurp(dir / "snail-coeffs.csv") == first);
  CHECK(slurp(dir / "snail-coeffs.svg") == svg);
}

TEST_CASE("cli: environment variable and explicit override") {
  const fs::path env_dir = scratch("env");
  const fs::path cli_dir = scratch("explicit");
  EnvGuard env(env_dir.c_str());
  REQUIRE(run_args({"snail-coeffs", "--output.formats", "[\"csv\", \"json\"]"}) == kExitOk);
  CHECK(fs::exists(env_dir / "snail-coeffs.csv"));
  CHECK_FALSE(fs::exists(env_dir / "snail-coeffs.svg"));
  REQUIRE(run_args({"snail-coeffs", "--output.directory", cli_dir.string()}) == kExitOk);
  CHECK(fs::exists(cli_dir / "snail-coeffs.csv"));
}

TEST_CASE("cli: error exit codes") {
  const fs::path dir = scratch("errors");
  EnvGuard env(dir.c_str());
  CHECK(run_args({"snail-coeffs", "--grids.flux", "[]"}) == kExitConfig);
  CHECK(run_args({"snail-coeffs", "--lambda.kappa-mzh", "1"}) == kExitConfig);
  CHECK(run_args({"snail-coeffs", "-c", "/nonexistent/lf.json"}) == kExitConfig);
  CHECK(run_args({"no-such-command"}) == kExitConfig);
  CHECK(run_args({"calibrate", "--a-th", "0.2"}) == kExitConfig);
  CHECK(run_args({"calibrate", "--a-th", "0.5", "--a-red", "0.4", "--a-blue", "0.9"}) == kExitConfig);
  CHECK(run_args({"snail-coeffs", "--grids.flux"}) == kExitConfig);
  CHECK_FALSE(fs::exists(dir / "snail-coeffs.csv"));
  // a resonator drive far beyond the basis leaks out of the truncation
  CHECK(run_args({"chevron", "--lambda.epsilon-mhz", "2000", "--lambda.delta-r-mhz", "10", "--grids.detuning-mhz",
                  "[0, 0.1, 0.2]", "--grids.time-us", "[0, 0.05, 0.1, 0.15, 0.2]"}) == kExitNumerical);
}

TEST_CASE("cli: calibrate recovers a forward-generated tuple") {
  const fs::path dir = scratch("calibrate");
  EnvGuard env(dir.c_str());
  const ExperimentConfig cfg = load("");
  const Amplitudes amp = forward_amplitudes(0.977, 0.9e6, 0.602, cfg.lambda.params.kappa, cfg.lambda.gamma_1());
  auto g17 = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  REQUIRE(run(std::vector<std::string>{"calibrate", "--a-th", g17(amp.a_th), "--a-red", g17(amp.a_red), "--a-blue",
                                       g17(amp.a_blue)}) == kExitOk);
  const Table t = read_csv((dir / "calibrate.csv").string());
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0][0] == doctest::Approx(0.977).epsilon(1e-8));
  CHECK(t.rows[0][1] == doctest::Approx(0.9e6).epsilon(1e-8));
  CHECK(t.rows[0][2] == doctest::Approx(0.602).epsilon(1e-8));
  const json meta = read_json(dir / "calibrate.json");
  CHECK(meta["results"]["temperature_mk"].get<double>() == doctest::Approx(t.rows[0][5] * 1e3));

  REQUIRE(run_args({"calibrate", "--a-th", "0.2", "--a-red", "0.88", "--a-blue", "0.83"}) == kExitOk);
  const Table ex = read_csv((dir / "calibrate.csv").string());
  const Amplitudes fwd = forward_amplitudes(ex.rows[0][0], ex.rows[0][1], ex.rows[0][2], cfg.lambda.params.kappa,
                                            cfg.lambda.gamma_1());
  CHECK(fwd.a_th == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(fwd.a_red == doctest::Approx(0.88).epsilon(1e-9));
  CHECK(fwd.a_blue == doctest::Approx(0.83).epsilon(1e-9));
}

TEST_CASE("cli: chevron reports the fitted Raman rate") {
  const fs::path dir = scratch("chevron");
  EnvGuard env(dir.c_str());
  REQUIRE(run_args({"chevron", "--grids.detuning-mhz", "{\"start\": -0.3, \"stop\": 0.1, \"count\": 5}"}) == kExitOk);
  const json meta = read_json(dir / "chevron.json");
  CHECK(meta["results"]["fitted_rabi_hz"].get<double>() == doctest::Approx(2e6).epsilon(0.1));
  CHECK(meta["results"]["predicted_rabi_hz"].get<double>() == doctest::Approx(2.032e6).epsilon(1e-12));
  const Table t = read_csv((dir / "chevron.csv").string());
  CHECK(t.header == std::vector<std::string>{"delta_hz", "time_s", "p_g"});
  CHECK(t.rows.size() == 5 * load("").grids.time.size());
  const std::string svg = slurp(dir / "chevron.svg");
  double lo = 1.0, hi = 0.0;
  for (const auto& r : t.rows) {
    lo = std::min(lo, r[2]);
    hi = std::max(hi, r[2]);
  }
  CHECK(annotation(svg, "min")[0] == lo);
  CHECK(annotation(svg, "max")[0] == hi);
}
