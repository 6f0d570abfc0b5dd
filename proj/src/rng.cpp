#include "kinlim/rng.hpp"

#include <cmath>

#include "kinlim/errors.hpp"

namespace kinlim {

namespace {

struct Bump {
  double weight;
  double center[2];
  double width;
};

std::vector<Bump> draw_bumps(Xorshift64Star& rng, int d, double extent, double wmin, double wmax) {
  std::vector<Bump> bumps(std::size_t(rng.integer(1, 3)));
  for (auto& b : bumps) {
    b.weight = rng.uniform(0.2, 1.0);
    b.center[0] = rng.uniform(-extent, extent);
    b.center[1] = d == 2 ? rng.uniform(-extent, extent) : 0.0;
    b.width = rng.uniform(wmin, wmax);
  }
  return bumps;
}

double evaluate(const std::vector<Bump>& bumps, double x0, double x1) {
  double s = 0.0;
  for (const auto& b : bumps) {
    const double r2 = (x0 - b.center[0]) * (x0 - b.center[0]) + (x1 - b.center[1]) * (x1 - b.center[1]);
    s += b.weight * std::exp(-0.5 * r2 / (b.width * b.width));
  }
  return s;
}

}  // namespace

void random_velocity_profile(Xorshift64Star& rng, const VelocityGrid& vg, double mass,
                             std::span<double> out) {
  if (out.size() != vg.size()) throw ShapeError("random_velocity_profile: output size mismatch");
  if (!(mass >= 0.0)) throw DomainError("random_velocity_profile: mass must be nonnegative");
  const double vm = vg.v_max();
  const auto bumps = draw_bumps(rng, vg.dim(), 0.6 * vm, 0.05 * vm, 0.5 * vm);
  double total = 0.0;
  for (std::size_t j = 0; j < vg.size(); ++j) {
    const auto idx = vg.unflatten(j);
    const double v1 = vg.dim() == 2 ? vg.center(idx[1]) : 0.0;
    out[j] = evaluate(bumps, vg.center(idx[0]), v1);
    total += out[j];
  }
  total *= vg.cell_volume();
  const double s = total > 0.0 ? mass / total : 0.0;
  for (double& v : out) v *= s;
}

DensityField random_density(Xorshift64Star& rng, const SpatialGrid& grid, double mass) {
  if (!(mass >= 0.0)) throw DomainError("random_density: mass must be nonnegative");
  const double L = grid.half_length();
  const auto bumps = draw_bumps(rng, grid.dim(), 0.5 * L, 0.1 * L, 0.4 * L);
  DensityField rho(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto idx = grid.unflatten(i);
    const double x1 = grid.dim() == 2 ? grid.center(idx[1]) : 0.0;
    rho.values[i] = evaluate(bumps, grid.center(idx[0]), x1);
  }
  const double total = rho.total_mass();
  const double s = total > 0.0 ? mass / total : 0.0;
  for (double& v : rho.values) v *= s;
  return rho;
}

}  // namespace kinlim
