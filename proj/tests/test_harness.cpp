#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"

#include "kinlim/errors.hpp"
#include "kinlim/harness.hpp"

using namespace kinlim;

namespace {

SweepConfig tiny_sweep(const DensityField& rho0, std::vector<double> eps) {
  SweepConfig s;
  s.epsilons = std::move(eps);
  s.kinetic.params = derive_params(1.5, 1);
  s.kinetic.xgrid = rho0.grid;
  s.kinetic.vgrid = VelocityGrid(1, 4.0, 32);
  s.kinetic.dt = 2e-3;
  s.kinetic.t_final = 0.02;
  s.kinetic.rho_cap = 0.75;
  s.kinetic.diag_stride = 5;
  s.macro.params = s.kinetic.params;
  s.macro.grid = rho0.grid;
  s.macro.dt = 2e-3;
  s.macro.t_final = 0.02;
  s.macro.diag_stride = 5;
  s.rho0 = rho0;
  s.threads = 2;
  return s;
}

DensityField gaussian_rho(const SpatialGrid& g) {
  DensityField r(g, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) r.values[i] = std::exp(-g.radius_sq(i) / 0.64);
  const double m = r.total_mass();
  for (double& v : r.values) v /= m;
  return r;
}

}  // namespace

TEST_CASE("log-log fit") {
  const std::vector<double> x{0.4, 0.2, 0.1, 0.05};
  std::vector<double> y;
  for (double e : x) y.push_back(3.0 * std::pow(e, 1.5));
  const SlopeFit f = fit_loglog(x, y);
  CHECK(f.slope == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.rms < 1e-12);
  CHECK_FALSE(f.excluded_largest);
  CHECK(f.points == 4);

  // A pre-asymptotic outlier at the largest x is dropped.
  std::vector<double> z{0.2, 0.2 * 0.5, 0.2 * 0.25, 0.2 * 0.125};
  std::vector<double> xs{0.8, 0.4, 0.2, 0.1};
  z[0] *= 0.3;
  const SlopeFit g = fit_loglog(xs, z);
  CHECK(g.excluded_largest);
  CHECK(g.points == 3);
  CHECK(g.slope == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(fit_loglog({1.0, 2.0}, {1.0}), ShapeError);
}

TEST_CASE("space-time distance") {
  const SpatialGrid g(1, 1.0, 8);
  std::vector<DensitySnapshot> a, b;
  for (double t : {0.0, 0.5, 1.0}) {
    a.push_back({t, DensityField(g, 1.0)});
    b.push_back({t, DensityField(g, 1.0 + t)});
  }
  // Right-endpoint rule: 0.5 * ||0.5||_1 + 0.5 * ||1||_1 on |Omega| = 2.
  CHECK(space_time_distance(a, b, {0.0, 0.5, 1.0}, 1.0) == doctest::Approx(0.5 * 1.0 + 0.5 * 2.0));
  CHECK(space_time_distance(a, b, {0.0, 0.5, 1.0}, 2.0) ==
        doctest::Approx(std::sqrt(0.5 * 0.25 * 2.0 + 0.5 * 1.0 * 2.0)));
  CHECK(space_time_distance(a, a, {0.0, 1.0}, 1.0) == 0.0);
  CHECK_THROWS_AS(space_time_distance(a, b, {0.0, 0.75}, 1.0), ConsistencyError);
}

TEST_CASE("entropy audit") {
  const ModelParams p = derive_params(1.5, 1);
  std::vector<EnergyReport> s(3);
  for (int k = 0; k < 3; ++k) {
    s[k].t = 0.1 * k;
    s[k].energy = 2.0 - 0.1 * k;
    s[k].cum_dissipation = 0.1 * k;
    s[k].rho_gamma = 0.5;
    s[k].entropy = 1.0;
    s[k].v2_moment = 0.5;
    s[k].m_lp = 0.0;
  }
  CHECK(entropy_audit(p, s, 0.0).passed);
  auto bad = s;
  bad[2].energy += 1.0;
  const AuditResult r = entropy_audit(p, bad, 1e-3);
  CHECK_FALSE(r.passed);
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].t == doctest::Approx(0.2));
  CHECK(r.failures[0].magnitude == doctest::Approx(1.0 - 1e-3));
  auto pressure = s;
  pressure[1].rho_gamma = 1.5;
  CHECK_FALSE(entropy_audit(p, pressure, 0.0).passed);
}

TEST_CASE("sweep validation") {
  const SpatialGrid g(1, 4.0, 32);
  const DensityField rho0 = gaussian_rho(g);
  CHECK_NOTHROW(validate(tiny_sweep(rho0, {0.4, 0.2})));
  CHECK_THROWS_AS(validate(tiny_sweep(rho0, {0.2, 0.4})), DomainError);
  CHECK_THROWS_AS(validate(tiny_sweep(rho0, {})), DomainError);
  CHECK_THROWS_AS(validate(tiny_sweep(rho0, {0.4, -0.1})), DomainError);
  SweepConfig s = tiny_sweep(rho0, {0.4});
  s.p_list = {1.5};
  CHECK_THROWS_AS(validate(s), DomainError);
  s = tiny_sweep(rho0, {0.4});
  s.macro.t_final = 0.04;
  CHECK_THROWS_AS(validate(s), DomainError);
  s = tiny_sweep(rho0, {0.4});
  s.macro.V = PotentialSpec::quadratic(0.5);
  CHECK_THROWS_AS(validate(s), DomainError);
}

TEST_CASE("uniform data gives zero distances") {
  const SpatialGrid g(1, 2.0, 16);
  SweepConfig s = tiny_sweep(DensityField(g, 0.3), {0.1});
  const SweepReport r = run_sweep(s);
  REQUIRE(r.members.size() == 1);
  CHECK(r.members[0].ok);
  CHECK(r.macro_ok);
  CHECK(r.members[0].l1_dist < 1e-12);
  CHECK(r.members[0].diss_norm < 1e-12);
  CHECK(r.members[0].audit.passed);
}

TEST_CASE("sweep output is deterministic") {
  const SpatialGrid g(1, 4.0, 32);
  SweepConfig s = tiny_sweep(gaussian_rho(g), {0.4, 0.2, 0.1});
  s.kinetic.V = s.macro.V = PotentialSpec::quadratic(0.5);
  s.p_list = {1.0, 1.25};
  const SweepReport r1 = run_sweep(s);
  s.threads = 1;
  const SweepReport r2 = run_sweep(s);
  std::ostringstream o1, o2;
  write_sweep_csv(o1, s, r1);
  write_sweep_csv(o2, s, r2);
  CHECK(o1.str() == o2.str());
  CHECK(o1.str().rfind("epsilon,l1_dist,lp_dist_1,lp_dist_1.25,diss_norm,slope_global\n", 0) == 0);
  CHECK(sweep_summary_json(s, r1) == sweep_summary_json(s, r2));
  for (const SweepMember& m : r1.members) {
    INFO(m.error);
    CHECK(m.ok);
    CHECK(m.mass_drift < 1e-11);
    CHECK(m.audit.passed);
    CHECK(m.lp_dist.size() == 2);
  }
  CHECK_FALSE(r1.caveats.empty());
}
