#pragma once

// Splitting integrator for the scaled BGK equation
//
//   df/dt + (v . grad_x f - F[rho] . grad_v f) / eps = (M[rho_f] - f) / eps^2
//
// with semi-Lagrangian free transport, a semi-Lagrangian velocity kick and
// the exact exponential relaxation.

#include <iosfwd>
#include <vector>

#include "kinlim/fields.hpp"
#include "kinlim/forces.hpp"
#include "kinlim/model.hpp"

namespace kinlim {

enum class Splitting { lie, strang };
enum class Interpolation { linear, cubic };

const char* to_string(Splitting s);
const char* to_string(Interpolation i);

struct KineticConfig {
  ModelParams params;
  SpatialGrid xgrid;
  VelocityGrid vgrid;
  double epsilon = 0.1;
  double dt = 1e-3;
  double t_final = 0.5;
  Splitting splitting = Splitting::lie;
  Interpolation interpolation = Interpolation::linear;
  PotentialSpec V = PotentialSpec::zero(PotentialRole::external);
  PotentialSpec K = PotentialSpec::zero(PotentialRole::interaction);
  /// A-priori density ceiling; v_max must cover margin * support_radius(rho_cap).
  double rho_cap = 1.0;
  double velocity_margin = 1.25;
  int diag_stride = 10;
  ConvolutionMethod convolution = ConvolutionMethod::automatic;
  /// Keep a density snapshot at every diagnostic time.
  bool keep_snapshots = true;
};

/// Throws DomainError / TruncationError when the configuration is unusable.
void validate(const KineticConfig& cfg);

/// f(x, v) <- f(x - v dt / eps, v) on the periodic box. Linear interpolation
/// is positive and conserves mass exactly; cubic Lagrange interpolation is
/// clipped at zero and renormalized per velocity cell to the same effect.
void transport_step(DistributionField& f, double dt, double eps,
                    Interpolation interp = Interpolation::linear);

/// f(x, v) <- f(x, v + F(x) dt / eps), linear interpolation, nothing flows in
/// past +-v_max. Returns the mass that left the velocity box. Throws
/// StabilityError when |F| dt / eps exceeds a quarter of the velocity box.
double kick_step(DistributionField& f, const ForceField& F, double dt, double eps);

struct RelaxResult {
  /// eps^-2 times the time integral of the entropy gap along the substep.
  double dissipation = 0.0;
  /// Time integral of ||f - M||^2 in L^{1+2/n}(x, v) along the substep.
  double deviation_sq = 0.0;
  double max_density = 0.0;
};

/// f <- e^{-dt/eps^2} f + (1 - e^{-dt/eps^2}) M[rho_f] with the discrete
/// entropy minimizer as M, so rho_f is unchanged. Throws TruncationError
/// when margin * support_radius(max rho) exceeds v_max.
RelaxResult relax_step(DistributionField& f, double dt, double eps, const ModelParams& p,
                       double margin = 1.0);

struct EnergyReport {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;       // iint H[f] + int V rho + 1/2 int rho K*rho
  double entropy_gap = 0.0;  // iint H[f] - H[M[rho_f]]
  double cum_dissipation = 0.0;
  double x2_moment = 0.0;
  double m_l1 = 0.0;
  double v2_moment = 0.0;    // iint |v|^2 f
  double entropy = 0.0;      // iint H[f]
  double potential = 0.0;
  double interaction = 0.0;
  double rho_gamma = 0.0;    // int rho^gamma
  double m_lp = 0.0;         // ||m||_{L^{2 gamma/(gamma+1)}}
  double max_rho = 0.0;
  double leak = 0.0;         // cumulative kick leak
};

struct DensitySnapshot {
  double t = 0.0;
  DensityField rho;
};

struct KineticRunReport {
  std::vector<EnergyReport> series;
  std::vector<DensitySnapshot> snapshots;
  DistributionField final_field;
  long steps = 0;
  double leak = 0.0;
  /// int_0^T ||f - M[rho_f]||^2_{L^{1+2/n}} dt.
  double deviation_sq = 0.0;
  /// max_t (E(t) + cum_dissipation(t) - E(0))_+ over the diagnostic times.
  double energy_violation = 0.0;

  double dissipation_norm() const;
};

class KineticSolver {
 public:
  /// Throws DomainError if f0 is inconsistent with the configured grids or
  /// its density exceeds rho_cap.
  KineticSolver(const KineticConfig& cfg, DistributionField f0);

  void step();
  EnergyReport diagnostics() const;

  double time() const noexcept { return t_; }
  long steps() const noexcept { return steps_; }
  const DistributionField& state() const noexcept { return f_; }
  double cumulative_dissipation() const noexcept { return dissipation_; }
  double deviation_sq() const noexcept { return deviation_sq_; }
  double leak() const noexcept { return leak_; }
  const KineticConfig& config() const noexcept { return cfg_; }

 private:
  void kick(double dt);
  void check_state(const char* stage);

  KineticConfig cfg_;
  DistributionField f_;
  InteractionKernel kernel_;
  ForceField grad_v_;
  std::vector<double> v_samples_;
  double t_ = 0.0;
  long steps_ = 0;
  double dissipation_ = 0.0;
  double deviation_sq_ = 0.0;
  double leak_ = 0.0;
};

/// Well-prepared data: the discrete equilibrium of rho0 in every cell.
DistributionField well_prepared(const KineticConfig& cfg, const DensityField& rho0);

/// Integrates to t_final, emitting diagnostics every diag_stride steps and
/// at the final time. Throws NumericalFailure on NaN or negativity beyond
/// -1e-13.
KineticRunReport run_kinetic(const KineticConfig& cfg, const DistributionField& f0);

/// Columns t,mass,E,entropy_gap,cum_dissipation,x2_moment,m_l1.
void write_energy_csv(std::ostream& os, const std::vector<EnergyReport>& series);

}  // namespace kinlim
