#pragma once

// Explicit finite-volume scheme for the aggregation-diffusion equation
//
//   d rho/dt = Lap(rho^gamma) + div(rho F[rho]),  F[rho] = grad V + grad K * rho
//
// on the periodic box.

#include <iosfwd>
#include <vector>

#include "kinlim/fields.hpp"
#include "kinlim/forces.hpp"
#include "kinlim/kinetic.hpp"
#include "kinlim/model.hpp"

namespace kinlim {

struct MacroConfig {
  ModelParams params;
  SpatialGrid grid;
  double dt = 1e-3;
  double t_final = 0.5;
  PotentialSpec V = PotentialSpec::zero(PotentialRole::external);
  PotentialSpec K = PotentialSpec::zero(PotentialRole::interaction);
  int diag_stride = 10;
  ConvolutionMethod convolution = ConvolutionMethod::automatic;
  bool keep_snapshots = true;
};

void validate(const MacroConfig& cfg);

/// 0.9 min(dx^2 / (2 d gamma max rho^{gamma-1}), dx / (2 max |F|)).
double stable_dt(const ModelParams& p, const DensityField& rho, const ForceField& F);

/// One explicit step with a given force field. Throws StabilityError when dt
/// exceeds stable_dt.
void macro_step(const ModelParams& p, DensityField& rho, const ForceField& F, double dt);

struct MacroReport {
  double t = 0.0;
  double mass = 0.0;
  /// (1 + d/2) int rho^gamma + int V rho + 1/2 int rho K*rho
  double F_energy = 0.0;
  /// int rho^gamma / (gamma - 1) + int V rho + 1/2 int rho K*rho, the
  /// functional dissipated by the limit equation.
  double free_energy = 0.0;
  double min_rho = 0.0;
  double max_rho = 0.0;
  double rho_gamma = 0.0;
  double x2_moment = 0.0;
};

struct MacroRunReport {
  std::vector<MacroReport> series;
  std::vector<DensitySnapshot> snapshots;
  DensityField final_density;
  long steps = 0;
  /// max over diagnostic pairs t1 < t2 of (F(t2) - F(t1))_+.
  double energy_increase = 0.0;
  /// Same for free_energy.
  double free_energy_increase = 0.0;
};

class MacroSolver {
 public:
  MacroSolver(const MacroConfig& cfg, DensityField rho0);

  void step();
  MacroReport diagnostics() const;
  double time() const noexcept { return t_; }
  long steps() const noexcept { return steps_; }
  const DensityField& state() const noexcept { return rho_; }

 private:
  MacroConfig cfg_;
  DensityField rho_;
  InteractionKernel kernel_;
  ForceField grad_v_;
  std::vector<double> v_samples_;
  double t_ = 0.0;
  long steps_ = 0;
};

/// (1 + d/2) int rho^gamma + int V rho + 1/2 int rho K*rho.
double energy_F(const ModelParams& p, const PotentialSpec& V, const PotentialSpec& K,
                const DensityField& rho);

MacroRunReport run_macro(const MacroConfig& cfg, const DensityField& rho0);

/// Columns t,mass,F_energy,min_rho,max_rho.
void write_macro_csv(std::ostream& os, const std::vector<MacroReport>& series);

}  // namespace kinlim
