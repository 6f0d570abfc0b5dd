#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kinlim/grid.hpp"
#include "kinlim/model.hpp"

namespace kinlim {

/// Nonnegative phase-space density, dense row-major over (x-cells, v-cells):
/// the velocity profile of x-cell i occupies values[i*Nv^d, (i+1)*Nv^d).
struct DistributionField {
  SpatialGrid xgrid;
  VelocityGrid vgrid;
  std::vector<double> values;

  DistributionField() = default;
  DistributionField(const SpatialGrid& xg, const VelocityGrid& vg);
  DistributionField(const SpatialGrid& xg, const VelocityGrid& vg, std::vector<double> vals);

  std::size_t velocity_size() const noexcept { return vgrid.size(); }
  std::span<double> slice(std::size_t x) { return {values.data() + x * vgrid.size(), vgrid.size()}; }
  std::span<const double> slice(std::size_t x) const {
    return {values.data() + x * vgrid.size(), vgrid.size()};
  }
  double cell_volume() const noexcept { return xgrid.cell_volume() * vgrid.cell_volume(); }
  double total_mass() const;
};

/// Scalar field on the spatial grid (mass density).
struct DensityField {
  SpatialGrid grid;
  std::vector<double> values;

  DensityField() = default;
  explicit DensityField(const SpatialGrid& g, double fill = 0.0);
  DensityField(const SpatialGrid& g, std::vector<double> vals);

  double total_mass() const;
  double max() const;
  double min() const;
};

/// Vector field on the spatial grid, d components per cell, interleaved.
struct MomentumField {
  SpatialGrid grid;
  std::vector<double> values;

  MomentumField() = default;
  explicit MomentumField(const SpatialGrid& g);

  double component(std::size_t cell, int axis) const { return values[cell * grid.dim() + axis]; }
};

DensityField density_moment(const DistributionField& f);
MomentumField momentum_moment(const DistributionField& f);
/// iint |v|^2 f.
double second_v_moment(const DistributionField& f);
/// iint |x|^2 f.
double second_x_moment(const DistributionField& f);
double second_x_moment(const DensityField& rho);
/// int |m| dx with the Euclidean norm per cell.
double momentum_l1(const MomentumField& m);

enum class EquilibriumSampling {
  /// Equilibrium evaluated at the velocity cell centers.
  pointwise,
  /// Discrete entropy minimizer c (w - |v_j|^2)_+^{n/2}, with w chosen per
  /// cell so that its midpoint mass equals rho exactly.
  discrete_minimizer,
};

struct EquilibriumFieldResult {
  DistributionField field;
  /// max over x-cells of |density_moment - rho| / max(rho, tiny).
  double max_mass_defect = 0.0;
};

/// Cellwise equilibrium M[rho]. Throws TruncationError when the support
/// radius of max(rho) exceeds v_max / margin.
EquilibriumFieldResult equilibrium_field(const ModelParams& p, const DensityField& rho,
                                         const VelocityGrid& vg,
                                         EquilibriumSampling sampling = EquilibriumSampling::pointwise,
                                         double margin = 1.0);

/// Writes the discrete entropy minimizer of mass rho into `out`. Returns the
/// squared effective support radius w.
double discrete_equilibrium_profile(const ModelParams& p, double rho, const VelocityGrid& vg,
                                    std::span<double> out);

/// Midpoint L^p norms; p = infinity gives the max norm.
double lp_norm(const DensityField& a, double p);
double lp_norm(const DistributionField& a, double p);
double lp_distance(const DensityField& a, const DensityField& b, double p);
double lp_distance(const DistributionField& a, const DistributionField& b, double p);

/// Kinetic entropy iint H[f].
double total_entropy(const ModelParams& p, const DistributionField& f);

}  // namespace kinlim
