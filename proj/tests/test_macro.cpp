#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"

#include "kinlim/config.hpp"
#include "kinlim/errors.hpp"
#include "kinlim/macro.hpp"
#include "kinlim/rng.hpp"

using namespace kinlim;

namespace {

MacroConfig base_config() {
  MacroConfig c;
  c.params = derive_params(1.5, 1);
  c.grid = SpatialGrid(1, 4.0, 64);
  c.dt = 1e-3;
  c.t_final = 0.1;
  c.diag_stride = 10;
  return c;
}

// Porous-medium self-similar solution of d rho/dt = (rho^{3/2})_xx in 1-D:
// rho = t^{-2/5} (C - x^2 t^{-4/5} / 15)_+^2.
double pme_exact(double C, double t, double x) {
  const double w = C - x * x * std::pow(t, -0.8) / 15.0;
  return w > 0.0 ? std::pow(t, -0.4) * w * w : 0.0;
}

}  // namespace

TEST_CASE("oracle solves the porous medium equation") {
  const double C = 0.1, t = 1.0, h = 1e-3;
  for (double x : {0.0, 0.3, 0.8}) {
    const double dt = (pme_exact(C, t + h, x) - pme_exact(C, t - h, x)) / (2.0 * h);
    auto u = [&](double y) { return std::pow(pme_exact(C, t, y), 1.5); };
    const double lap = (u(x + h) - 2.0 * u(x) + u(x - h)) / (h * h);
    CHECK(dt == doctest::Approx(lap).epsilon(1e-4).scale(1e-6));
  }
  for (double x : {0.0, 0.5, 1.0, 1.3})
    CHECK(barenblatt(1.5, 1, C, 1.1, x * x) == doctest::Approx(pme_exact(C, 1.1, x)).epsilon(1e-13));
}

TEST_CASE("uniform state is stationary") {
  MacroConfig c = base_config();
  const DensityField rho0(c.grid, 0.4);
  const MacroRunReport r = run_macro(c, rho0);
  for (std::size_t i = 0; i < c.grid.size(); ++i) CHECK(r.final_density.values[i] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(r.steps == 100);
}

TEST_CASE("mass over 1000 steps and nonnegativity") {
  MacroConfig c = base_config();
  c.t_final = 1.0;
  c.V = PotentialSpec::quadratic(0.5);
  c.K = PotentialSpec::gaussian(0.5, 0.5, PotentialRole::interaction);
  c.diag_stride = 100;
  Xorshift64Star rng(8);
  const DensityField rho0 = random_density(rng, c.grid, 1.0);
  const MacroRunReport r = run_macro(c, rho0);
  CHECK(r.steps == 1000);
  const double m0 = rho0.total_mass();
  for (const MacroReport& e : r.series) {
    CHECK(std::abs(e.mass - m0) <= 1e-13 * m0 * 10.0);
    CHECK(e.min_rho >= 0.0);
  }
  CHECK(r.free_energy_increase <= 1e-12);
  for (std::size_t k = 1; k < r.series.size(); ++k) CHECK(r.series[k].free_energy <= r.series[k - 1].free_energy + 1e-12);
}

TEST_CASE("stability guard") {
  const ModelParams p = derive_params(1.5, 1);
  const SpatialGrid g(1, 1.0, 32);
  DensityField rho(g, 1.0);
  rho.values[3] = 4.0;
  const ForceField F(g);
  const double bound = stable_dt(p, rho, F);
  const double dx = g.spacing();
  CHECK(bound == doctest::Approx(0.9 * dx * dx / (2.0 * 1.5 * 2.0)).epsilon(1e-14));
  DensityField copy = rho;
  try {
    macro_step(p, copy, F, 1.01 * bound);
    FAIL("expected StabilityError");
  } catch (const StabilityError& e) {
    CHECK(e.bound() == doctest::Approx(bound));
  }
  CHECK_NOTHROW(macro_step(p, copy, F, bound));

  MacroConfig c = base_config();
  c.dt = 0.0;
  CHECK_THROWS_AS(validate(c), DomainError);
}

TEST_CASE("energy functional") {
  const ModelParams p = derive_params(1.5, 1);
  const SpatialGrid g(1, 2.0, 32);
  const PotentialSpec V = PotentialSpec::quadratic(0.5);
  const PotentialSpec K = PotentialSpec::gaussian(0.5, 1.0, PotentialRole::interaction);
  CHECK(energy_F(p, V, K, DensityField(g, 0.0)) == 0.0);

  // Uniform rho = c: (1 + d/2) c^gamma |Omega| + c int V + 1/2 c^2 iint K.
  const double cval = 0.3, dx = g.spacing();
  double intV = 0.0, intK = 0.0;
  for (int i = 0; i < 32; ++i) {
    const double x = g.center(i);
    intV += 0.5 * x * x * dx;
    for (int j = 0; j < 32; ++j) {
      int k = ((i - j) % 32 + 32) % 32;
      if (k > 16) k -= 32;
      const double y = k * dx;
      intK += 0.5 * std::exp(-y * y) * dx * dx;
    }
  }
  const double expected = 1.5 * std::pow(cval, 1.5) * 4.0 + cval * intV + 0.5 * cval * cval * intK;
  CHECK(energy_F(p, V, K, DensityField(g, cval)) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("Barenblatt profile converges at first order") {
  const double C = 0.1, t0 = 1.0, T = 0.1;
  std::vector<double> err;
  for (int nx : {64, 128, 256}) {
    MacroConfig c = base_config();
    c.grid = SpatialGrid(1, 2.0, nx);
    c.dt = 1e-4;
    c.t_final = T;
    c.diag_stride = 1000;
    DensityField rho0(c.grid, 0.0);
    for (int i = 0; i < nx; ++i) rho0.values[i] = pme_exact(C, t0, c.grid.center(i));
    const MacroRunReport r = run_macro(c, rho0);
    double e = 0.0;
    for (int i = 0; i < nx; ++i)
      e += std::abs(r.final_density.values[i] - pme_exact(C, t0 + T, c.grid.center(i))) * c.grid.spacing();
    err.push_back(e);
  }
  MESSAGE("L1 errors " << err[0] << " " << err[1] << " " << err[2]);
  CHECK(std::log2(err[0] / err[1]) >= 1.0);
  CHECK(std::log2(err[1] / err[2]) >= 1.0);
}

TEST_CASE("macro csv") {
  MacroConfig c = base_config();
  const MacroRunReport r = run_macro(c, DensityField(c.grid, 0.2));
  std::ostringstream os;
  write_macro_csv(os, r.series);
  CHECK(os.str().rfind("t,mass,F_energy,min_rho,max_rho\n", 0) == 0);
}
