#include <cmath>
#include <vector>

#include "doctest.h"

#include "kinlim/errors.hpp"
#include "kinlim/forces.hpp"
#include "kinlim/rng.hpp"

using namespace kinlim;

namespace {

// Direct periodic convolution of the Gaussian kernel gradient, written out
// independently of the library tables (1-D).
std::vector<double> direct_gaussian_force_1d(double A, double w, const DensityField& rho) {
  const SpatialGrid& g = rho.grid;
  const int n = g.cells_per_axis();
  const double dx = g.spacing();
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int k = ((i - j) % n + n) % n;
      if (k > n / 2) k -= n;
      if (k == n / 2) continue;  // odd kernel at the half-period offset
      const double x = k * dx;
      out[i] += -2.0 * x / (w * w) * A * std::exp(-x * x / (w * w)) * rho.values[j] * dx;
    }
  return out;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("minimal image") {
  CHECK(minimal_image(0, 8) == 0);
  CHECK(minimal_image(3, 8) == 3);
  CHECK(minimal_image(4, 8) == 4);
  CHECK(minimal_image(5, 8) == -3);
  CHECK(minimal_image(-1, 8) == -1);
  CHECK(minimal_image(-4, 8) == 4);
}

TEST_CASE("external force") {
  const SpatialGrid g(1, 3.0, 128);
  const ForceField z = grad_V(PotentialSpec::zero(PotentialRole::external), g);
  CHECK(z.max_magnitude() == 0.0);

  const ForceField q = grad_V(PotentialSpec::quadratic(0.5), g);
  for (int i = 0; i < 128; ++i) CHECK(q.component(i, 0) == doctest::Approx(g.center(i)).epsilon(1e-14));

  const PotentialSpec gauss = PotentialSpec::gaussian(1.0, 1.0, PotentialRole::external);
  const ForceField gf = grad_V(gauss, g);
  const double h = 1e-5;
  for (int i = 0; i < 128; ++i) {
    const double x = g.center(i);
    const double fd = (gauss.value(std::abs(x + h)) - gauss.value(std::abs(x - h))) / (2.0 * h);
    CHECK(std::abs(gf.component(i, 0) - fd) < 1e-8);
  }

  const SpatialGrid g2(2, 2.0, 16);
  const ForceField q2 = grad_V(PotentialSpec::quadratic(0.5), g2);
  for (std::size_t k = 0; k < g2.size(); ++k) {
    const auto ij = g2.unflatten(k);
    CHECK(q2.component(k, 0) == doctest::Approx(g2.center(ij[0])));
    CHECK(q2.component(k, 1) == doctest::Approx(g2.center(ij[1])));
  }

  CHECK_THROWS_AS(grad_V(PotentialSpec::tabulated(std::vector<double>(10, 0.0), PotentialRole::external), g),
                  ShapeError);
  std::vector<double> lin(128);
  for (int i = 0; i < 128; ++i) lin[i] = 2.0 * g.center(i);
  const ForceField tf = grad_V(PotentialSpec::tabulated(lin, PotentialRole::external), g);
  for (int i = 1; i < 127; ++i) CHECK(tf.component(i, 0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("interaction force") {
  const SpatialGrid g(1, 4.0, 64);
  const PotentialSpec K = PotentialSpec::gaussian(0.5, 1.0, PotentialRole::interaction);
  CHECK(conv_grad_K(K, DensityField(g, 0.0)).max_magnitude() == 0.0);

  // Single occupied cell.
  DensityField one(g, 0.0);
  one.values[20] = 1.0 / g.spacing();
  const ForceField f1 = conv_grad_K(K, one);
  const auto ref1 = direct_gaussian_force_1d(0.5, 1.0, one);
  for (int i = 0; i < 64; ++i) CHECK(f1.component(i, 0) == doctest::Approx(ref1[i]).epsilon(1e-13).scale(1e-16));

  // Random densities against the independent sum, and accelerated paths against direct.
  Xorshift64Star rng(5);
  for (int k = 0; k < 20; ++k) {
    const DensityField rho = random_density(rng, g, 1.0);
    const auto ref = direct_gaussian_force_1d(0.5, 1.0, rho);
    const ForceField d = conv_grad_K(K, rho, ConvolutionMethod::direct);
    const ForceField t = conv_grad_K(K, rho, ConvolutionMethod::table);
    const ForceField f = conv_grad_K(K, rho, ConvolutionMethod::fft);
    const double scale = max_abs(ref);
    for (int i = 0; i < 64; ++i) {
      CHECK(std::abs(d.values[i] - ref[i]) <= 1e-12 * scale);
      CHECK(std::abs(t.values[i] - d.values[i]) <= 1e-12 * scale);
      CHECK(std::abs(f.values[i] - d.values[i]) <= 1e-12 * scale);
    }
  }

  // Parity: symmetric density about the center gives an antisymmetric force.
  DensityField sym(g, 0.0);
  for (int i = 0; i < 64; ++i) sym.values[i] = std::exp(-g.center(i) * g.center(i));
  const ForceField fs = conv_grad_K(K, sym);
  for (int i = 0; i < 32; ++i) CHECK(fs.component(i, 0) == doctest::Approx(-fs.component(63 - i, 0)).scale(1e-15));
}

TEST_CASE("interaction force in two dimensions") {
  const SpatialGrid g(2, 3.0, 16);
  Xorshift64Star rng(17);
  for (PotentialSpec K : {PotentialSpec::gaussian(1.0, 0.8, PotentialRole::interaction),
                          PotentialSpec::morse(0.7, 1.5, PotentialRole::interaction),
                          PotentialSpec::power(0.3, 0.5, 0.0, PotentialRole::interaction)}) {
    for (int k = 0; k < 5; ++k) {
      const DensityField rho = random_density(rng, g, 1.0);
      const ForceField d = conv_grad_K(K, rho, ConvolutionMethod::direct);
      const ForceField f = conv_grad_K(K, rho, ConvolutionMethod::fft);
      const ForceField t = conv_grad_K(K, rho, ConvolutionMethod::table);
      const double scale = d.max_magnitude();
      for (std::size_t i = 0; i < d.values.size(); ++i) {
        CHECK(std::abs(f.values[i] - d.values[i]) <= 1e-12 * scale);
        CHECK(std::abs(t.values[i] - d.values[i]) <= 1e-12 * scale);
      }
      // Action-reaction: the total interaction force vanishes.
      double sx = 0.0, sy = 0.0, ref = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        sx += rho.values[i] * d.component(i, 0);
        sy += rho.values[i] * d.component(i, 1);
        ref += rho.values[i] * (std::abs(d.component(i, 0)) + std::abs(d.component(i, 1)));
      }
      CHECK(std::abs(sx) <= 1e-13 * ref);
      CHECK(std::abs(sy) <= 1e-13 * ref);
    }
  }
}

TEST_CASE("total force") {
  const SpatialGrid g(1, 4.0, 64);
  const PotentialSpec V0 = PotentialSpec::zero(PotentialRole::external);
  const PotentialSpec K0 = PotentialSpec::zero(PotentialRole::interaction);
  const PotentialSpec V = PotentialSpec::quadratic(0.5);
  const PotentialSpec K = PotentialSpec::gaussian(0.5, 1.0, PotentialRole::interaction);
  Xorshift64Star rng(23);
  const DensityField rho = random_density(rng, g, 1.0);
  CHECK(force_field(V0, K0, rho).max_magnitude() == 0.0);
  CHECK(force_field(V, K0, rho).values == grad_V(V, g).values);

  for (int k = 0; k < 50; ++k) {
    const DensityField a = random_density(rng, g, 1.0);
    const DensityField b = random_density(rng, g, 2.0);
    const double s = rng.uniform(-2.0, 2.0);
    DensityField c(g, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) c.values[i] = a.values[i] + s * b.values[i];
    const ForceField fa = force_field(V0, K, a), fb = force_field(V0, K, b), fc = force_field(V0, K, c);
    const double scale = fa.max_magnitude() + std::abs(s) * fb.max_magnitude();
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK(std::abs(fc.values[i] - fa.values[i] - s * fb.values[i]) <= 1e-13 * scale);
  }
}

TEST_CASE("energies") {
  const SpatialGrid g(1, 4.0, 128);
  const PotentialSpec V = PotentialSpec::quadratic(0.5);
  const PotentialSpec K = PotentialSpec::gaussian(0.5, 1.0, PotentialRole::interaction);
  const Energies z = energies(V, K, DensityField(g, 0.0));
  CHECK(z.potential == 0.0);
  CHECK(z.interaction == 0.0);

  DensityField bump(g, 0.0);
  for (int i = 0; i < 128; ++i) bump.values[i] = std::exp(-4.0 * g.center(i) * g.center(i));
  const double m = bump.total_mass();
  for (double& v : bump.values) v /= m;
  const Energies e = energies(V, K, bump);
  CHECK(e.potential == doctest::Approx(0.5 * second_x_moment(bump)).epsilon(1e-14));
  CHECK(e.interaction > 0.0);

  Xorshift64Star rng(2);
  for (int k = 0; k < 50; ++k) {
    const DensityField rho = random_density(rng, g, 1.0);
    const double a = rng.uniform(0.1, 3.0);
    DensityField scaled = rho;
    for (double& v : scaled.values) v *= a;
    CHECK(energies(V, K, scaled).interaction == doctest::Approx(a * a * energies(V, K, rho).interaction).epsilon(1e-12));
    CHECK(energies(V, K, rho).interaction >= 0.0);
  }
}

TEST_CASE("assumption validation") {
  const ModelParams p1 = derive_params(1.5, 1);
  const PotentialSpec K0 = PotentialSpec::zero(PotentialRole::interaction);
  const ValidationReport q = validate_assumptions(PotentialSpec::quadratic(0.5), K0, p1, 0.0, 0.0, 0.0, 200);
  CHECK(q.passed());
  CHECK(q.C_V <= 2.0 + 1e-12);
  CHECK(q.C_V > 1.0);

  const ModelParams p3 = derive_params(7.0 / 5.0, 3);
  const PotentialSpec Kg = PotentialSpec::gaussian(1.0, 1.0, PotentialRole::interaction);
  const PotentialSpec V0 = PotentialSpec::zero(PotentialRole::external);
  CHECK(validate_assumptions(V0, Kg, p3, 0.45, 0.69, 0.46, 100).passed());
  const ValidationReport bad = validate_assumptions(V0, Kg, p3, 0.45, 0.69, 0.6, 100);
  CHECK_FALSE(bad.passed());
  bool r_failed = false;
  for (const auto& c : bad.checks)
    if (c.name.find("1/r <") != std::string::npos) {
      r_failed = !c.pass;
      CHECK(c.detail.find("0.5") != std::string::npos);
    }
  CHECK(r_failed);

  CHECK_THROWS_AS(validate_assumptions(PotentialSpec::tabulated({1.0, 2.0}, PotentialRole::external), K0, p1, 0, 0, 0, 10),
                  UnsupportedSpec);
}

TEST_CASE("decay margin") {
  const SpatialGrid g(1, 4.0, 64);
  const PotentialSpec V0 = PotentialSpec::zero(PotentialRole::external);
  CHECK(check_decay_margin(V0, PotentialSpec::gaussian(1.0, 0.5, PotentialRole::interaction), g).ok);
  CHECK_FALSE(check_decay_margin(V0, PotentialSpec::gaussian(1.0, 1.0, PotentialRole::interaction), g).ok);
  const DecayCheck unb = check_decay_margin(PotentialSpec::quadratic(0.5), PotentialSpec::zero(PotentialRole::interaction), g);
  CHECK_FALSE(unb.ok);
  CHECK_FALSE(unb.warnings.empty());
}
