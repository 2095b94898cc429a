#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "lambda_forge/parallel.hpp"
#include "lambda_forge/raman.hpp"
#include "lambda_forge/spectroscopy.hpp"
#include "lambda_forge/sweep.hpp"

using namespace lf;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

}  // namespace

TEST_CASE("parallel_map preserves order") {
  auto f = [](std::size_t i) { return std::sin(static_cast<double>(i)) * static_cast<double>(i); };
  CHECK(parallel_map(1000, f, Execution::serial) == parallel_map(1000, f, Execution::parallel));
  CHECK(parallel_map(0, f).empty());
}

TEST_CASE("parallel_map rethrows worker exceptions") {
  auto f = [](std::size_t i) -> int {
    if (i == 37) throw std::runtime_error("boom");
    return static_cast<int>(i);
  };
  CHECK_THROWS_WITH_AS(parallel_map(100, f, Execution::parallel), "boom", std::runtime_error);
  CHECK_THROWS_AS(parallel_map(100, f, Execution::serial), std::runtime_error);
}

TEST_CASE("job cap round trips") {
  set_max_jobs(2);
  CHECK(max_jobs() == 2);
  set_max_jobs(0);
  CHECK(max_jobs() == 0);
}

TEST_CASE("snail sweep is identical in both modes") {
  const auto flux = linspace(0.0, 7.0, 57);
  const auto s = snail_sweep(0.4, 3, 175e9, 5, 60.0, flux, Execution::serial);
  const auto p = snail_sweep(0.4, 3, 175e9, 5, 60.0, flux, Execution::parallel);
  REQUIRE(s.size() == p.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s[i].phi_ext_f == p[i].phi_ext_f);
    CHECK(s[i].array.c2 == p[i].array.c2);
    CHECK(s[i].array.c3 == p[i].array.c3);
    CHECK(s[i].array.c4 == p[i].array.c4);
  }
}

TEST_CASE("spectrum sweep is identical in both modes") {
  const CircuitSpec spec = CircuitSpec::calibrated_defaults();
  const auto flux = linspace(6.3, 6.7, 4);
  const auto s = spectrum_sweep(spec, flux, 4, Execution::serial);
  const auto p = spectrum_sweep(spec, flux, 4, Execution::parallel);
  REQUIRE(s.size() == p.size());
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i].levels == p[i].levels);
}

TEST_CASE("chevron is identical in both modes") {
  LambdaParams p;
  p.epsilon = 50.8e6;
  p.g3 = 3e6;
  p.gamma_down = 1.0e5;
  p.gamma_up = 0.7e5;
  const auto deltas = linspace(-1e6, 1e6, 4);
  const auto times = linspace(0.0, 0.5e-6, 20);
  const Chevron s = simulate_raman_rabi(p, deltas, times, thermal_state(6, 0.94), Execution::serial);
  const Chevron q = simulate_raman_rabi(p, deltas, times, thermal_state(6, 0.94), Execution::parallel);
  CHECK(s.p_g == q.p_g);
}

TEST_CASE("spectroscopy sweep is identical in both modes") {
  const CircuitSpec spec = CircuitSpec::calibrated_defaults();
  LambdaParams p;
  p.gamma_down = 1.0e5;
  p.gamma_up = 0.7e5;
  const std::vector<double> drives = {7.2887e9, 7.2888e9, 7.2889e9};
  const std::vector<double> fluxes = {6.45, 6.5};
  const SpectroscopyMap s = spectroscopy_sweep(spec, p, drives, fluxes, 0.02, Execution::serial);
  const SpectroscopyMap q = spectroscopy_sweep(spec, p, drives, fluxes, 0.02, Execution::parallel);
  CHECK(s.visibility == q.visibility);
  CHECK(s.transition == q.transition);
}
