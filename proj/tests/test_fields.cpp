#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "doctest.h"

#include "kinlim/errors.hpp"
#include "kinlim/field_io.hpp"
#include "kinlim/fields.hpp"
#include "kinlim/grid.hpp"
#include "kinlim/model.hpp"
#include "kinlim/rng.hpp"

using namespace kinlim;

TEST_CASE("grids") {
  const SpatialGrid g1(1, 2.0, 8);
  CHECK(g1.size() == 8);
  CHECK(g1.spacing() == doctest::Approx(0.5));
  CHECK(g1.center(0) == doctest::Approx(-1.75));
  CHECK(g1.domain_volume() == doctest::Approx(4.0));
  const SpatialGrid g2(2, 1.0, 8);
  CHECK(g2.size() == 64);
  CHECK(g2.cell_volume() == doctest::Approx(0.0625));
  for (std::size_t k = 0; k < g2.size(); ++k) {
    const auto ij = g2.unflatten(k);
    CHECK(g2.flatten(ij[0], ij[1]) == k);
  }
  CHECK(g2.radius_sq(g2.flatten(4, 4)) == doctest::Approx(0.03125));

  const VelocityGrid vg(1, 3.0, 6);
  CHECK(vg.center(2) == doctest::Approx(-0.5));
  CHECK(vg.center(3) == doctest::Approx(0.5));
  CHECK_THROWS_AS(VelocityGrid(1, 3.0, 5), DomainError);
  CHECK_THROWS_AS(SpatialGrid(3, 1.0, 8), DomainError);
  CHECK_THROWS_AS(SpatialGrid(1, 1.0, 4), DomainError);
  CHECK_THROWS_AS(SpatialGrid(1, -1.0, 8), DomainError);
}

TEST_CASE("moments of a hand-built field") {
  const SpatialGrid xg(1, 1.0, 8);   // dx = 0.25, centers of cells 3 and 4 at -+0.125
  const VelocityGrid vg(1, 1.0, 2);  // centers -0.5, 0.5; dv = 1
  DistributionField f(xg, vg);
  f.values[6] = 1.0;
  f.values[7] = 3.0;
  f.values[8] = 2.0;
  const DensityField rho = density_moment(f);
  CHECK(rho.values[3] == doctest::Approx(4.0));
  CHECK(rho.values[4] == doctest::Approx(2.0));
  CHECK(rho.values[0] == 0.0);
  const MomentumField m = momentum_moment(f);
  CHECK(m.component(3, 0) == doctest::Approx(1.0));
  CHECK(m.component(4, 0) == doctest::Approx(-1.0));
  CHECK(f.total_mass() == doctest::Approx(1.5));
  CHECK(rho.total_mass() == doctest::Approx(1.5));
  CHECK(second_v_moment(f) == doctest::Approx(0.25 * 6.0 * 0.25));
  CHECK(second_x_moment(f) == doctest::Approx(0.25 * 6.0 * 0.015625));
  CHECK(second_x_moment(rho) == doctest::Approx(0.25 * 6.0 * 0.015625));
  CHECK(momentum_l1(m) == doctest::Approx(0.5));
  CHECK_THROWS_AS(DistributionField(xg, vg, {1.0, 2.0}), ShapeError);
}

TEST_CASE("equilibrium field truncation") {
  const ModelParams p = derive_params(1.5, 1);
  const SpatialGrid xg(1, 1.0, 8);
  const VelocityGrid vg(1, 3.0, 64);
  const DensityField rho(xg, 4.0);  // support radius sqrt(12) = 3.4641
  try {
    equilibrium_field(p, rho, vg);
    FAIL("expected TruncationError");
  } catch (const TruncationError& e) {
    CHECK(e.required_v_max() == doctest::Approx(std::sqrt(12.0)).epsilon(1e-12));
  }
  const DensityField ok(xg, 1.0);
  const auto res = equilibrium_field(p, ok, VelocityGrid(1, 3.0, 512));
  CHECK(res.max_mass_defect < 1e-3);
  const auto exact = equilibrium_field(p, ok, VelocityGrid(1, 3.0, 64), EquilibriumSampling::discrete_minimizer);
  CHECK(exact.max_mass_defect < 1e-13);
  DensityField neg(xg, 0.5);
  neg.values[1] = -0.1;
  CHECK_THROWS_AS(equilibrium_field(p, neg, vg), DomainError);
}

TEST_CASE("discrete minimizer has the exact mass") {
  Xorshift64Star rng(3);
  for (double gamma : {1.2, 1.5, 5.0 / 3.0}) {
    const ModelParams p = derive_params(gamma, 1);
    const VelocityGrid vg(1, 6.0, 32);
    std::vector<double> out(vg.size());
    for (int k = 0; k < 20; ++k) {
      const double rho = rng.uniform(0.01, 3.0);
      const double w = discrete_equilibrium_profile(p, rho, vg, out);
      double m = 0.0;
      for (double v : out) {
        CHECK(v >= 0.0);
        m += v * vg.cell_volume();
      }
      CHECK(m == doctest::Approx(rho).epsilon(1e-13));
      CHECK(w > 0.0);
    }
  }
}

TEST_CASE("lp norms") {
  const SpatialGrid g(1, 1.0, 8);  // dx = 0.25
  const DensityField a(g, std::vector<double>{1.0, -2.0, 0.0, 3.0, 0.0, 0.0, 0.0, 0.0});
  const DensityField b(g, 0.0);
  CHECK(lp_norm(a, 1.0) == doctest::Approx(1.5));
  CHECK(lp_norm(a, 2.0) == doctest::Approx(std::sqrt(3.5)));
  CHECK(lp_norm(a, std::numeric_limits<double>::infinity()) == doctest::Approx(3.0));
  CHECK(lp_distance(a, b, 1.5) == doctest::Approx(lp_norm(a, 1.5)));
  CHECK_THROWS_AS(lp_norm(a, 0.5), DomainError);
  Xorshift64Star rng(9);
  for (int k = 0; k < 200; ++k) {
    const DensityField x = random_density(rng, g, 1.0);
    const DensityField y = random_density(rng, g, 1.0);
    const DensityField z = random_density(rng, g, 1.0);
    for (double p : {1.0, 1.7, 3.0}) CHECK(lp_distance(x, z, p) <= lp_distance(x, y, p) + lp_distance(y, z, p) + 1e-13);
  }
}

TEST_CASE("binary round trip and bad magic") {
  const SpatialGrid xg(2, 1.5, 8);
  const VelocityGrid vg(2, 2.0, 6);
  DistributionField f(xg, vg);
  Xorshift64Star rng(1);
  for (double& v : f.values) v = rng.uniform();
  std::stringstream ss;
  write_binary(ss, f);
  CHECK(ss.str().size() == 32 + 8 * f.values.size());
  const AnyField back = read_binary(ss);
  REQUIRE(std::holds_alternative<DistributionField>(back));
  const auto& g = std::get<DistributionField>(back);
  CHECK(g.xgrid == xg);
  CHECK(g.vgrid == vg);
  CHECK(g.values == f.values);

  const DensityField rho = density_moment(f);
  std::stringstream sr;
  write_binary(sr, rho);
  const AnyField rb = read_binary(sr);
  REQUIRE(std::holds_alternative<DensityField>(rb));
  CHECK(std::get<DensityField>(rb).values == rho.values);

  std::string bytes = ss.str();
  bytes[0] = 'X';
  std::stringstream bad(bytes);
  CHECK_THROWS_AS(read_binary(bad), ShapeError);
  std::stringstream cut(ss.str().substr(0, 100));
  CHECK_THROWS_AS(read_binary(cut), ShapeError);
}

TEST_CASE("csv output is deterministic") {
  const SpatialGrid g(1, 1.0, 8);
  const DensityField a(g, std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8});
  std::ostringstream o1, o2;
  write_csv(o1, a);
  write_csv(o2, a);
  CHECK(o1.str() == o2.str());
  CHECK(format_double(0.1) == "0.10000000000000001");
}
