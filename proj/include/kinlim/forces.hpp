#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "kinlim/fields.hpp"
#include "kinlim/grid.hpp"
#include "kinlim/model.hpp"

namespace kinlim {

enum class PotentialKind { zero, quadratic, gaussian, morse, power, tabulated };
enum class PotentialRole { external, interaction };

const char* to_string(PotentialKind k);
const char* to_string(PotentialRole r);

/// Radial potential U(|x|) or a tabulated one.
///
///   quadratic  U = strength |x|^2
///   gaussian   U = strength exp(-|x|^2 / scale^2)
///   morse      U = strength exp(-scale |x|)
///   power      U = strength |x|^scale + offset
///   tabulated  external: one sample per cell; interaction: one sample per
///              minimal-image offset, indexed like the grid cells
struct PotentialSpec {
  PotentialKind kind = PotentialKind::zero;
  PotentialRole role = PotentialRole::external;
  double strength = 0.0;
  double scale = 1.0;
  double offset = 0.0;
  std::vector<double> samples;

  static PotentialSpec zero(PotentialRole role);
  static PotentialSpec quadratic(double a, PotentialRole role = PotentialRole::external);
  static PotentialSpec gaussian(double amplitude, double width, PotentialRole role);
  static PotentialSpec morse(double amplitude, double rate, PotentialRole role);
  static PotentialSpec power(double c_a, double exponent, double c_b, PotentialRole role);
  static PotentialSpec tabulated(std::vector<double> samples, PotentialRole role);

  bool builtin() const noexcept { return kind != PotentialKind::tabulated; }
  /// Grows without bound as |x| -> infinity.
  bool unbounded() const noexcept;
  double value(double r) const;
  /// dU/dr, with the value 0 at r = 0.
  double radial_derivative(double r) const;

  bool operator==(const PotentialSpec&) const = default;
};

/// d force components per cell, interleaved.
struct ForceField {
  SpatialGrid grid;
  std::vector<double> values;

  ForceField() = default;
  explicit ForceField(const SpatialGrid& g) : grid(g), values(g.size() * g.dim(), 0.0) {}
  double component(std::size_t cell, int axis) const { return values[cell * grid.dim() + axis]; }
  double max_magnitude() const;
};

/// Signed minimal-image displacement of `k` cells on a periodic axis of `n`
/// cells; the half-period offset maps to +n/2.
int minimal_image(int k, int n) noexcept;

ForceField grad_V(const PotentialSpec& spec, const SpatialGrid& grid);

enum class ConvolutionMethod { direct, table, fft, automatic };

/// Gradient and value tables of K on the torus, indexed by the offset cell.
/// The gradient component along an axis is zeroed at the half-period offset
/// so the table stays odd; that makes the discrete force exactly
/// action-reaction symmetric.
class InteractionKernel {
 public:
  InteractionKernel(const PotentialSpec& spec, const SpatialGrid& grid);

  const SpatialGrid& grid() const noexcept { return grid_; }
  const PotentialSpec& spec() const noexcept { return spec_; }
  bool is_zero() const noexcept { return zero_; }

  /// dx^d sum_j grad K(x_i - x_j) rho_j.
  ForceField force(const DensityField& rho, ConvolutionMethod method = ConvolutionMethod::automatic) const;
  /// dx^d sum_j K(x_i - x_j) rho_j.
  DensityField potential(const DensityField& rho,
                         ConvolutionMethod method = ConvolutionMethod::automatic) const;

  /// grad K at a minimal-image offset (per-axis cell offsets).
  std::array<double, 2> gradient_at(int k0, int k1) const;
  double value_at(int k0, int k1) const;

 private:
  void circulant(const std::vector<double>& table, const std::vector<std::complex<double>>& spectrum,
                 const std::vector<double>& rho, std::vector<double>& out,
                 ConvolutionMethod method) const;

  PotentialSpec spec_;
  SpatialGrid grid_;
  bool zero_ = false;
  std::vector<double> value_table_;
  std::vector<std::vector<double>> grad_tables_;
  std::vector<std::complex<double>> value_spectrum_;
  std::vector<std::vector<std::complex<double>>> grad_spectra_;
};

ForceField conv_grad_K(const PotentialSpec& spec, const DensityField& rho,
                       ConvolutionMethod method = ConvolutionMethod::direct);

ForceField force_field(const PotentialSpec& V, const PotentialSpec& K, const DensityField& rho);
/// Same, reusing a precomputed kernel and external gradient.
ForceField force_field(const ForceField& gradV, const InteractionKernel& kernel, const DensityField& rho);

struct Energies {
  double potential = 0.0;    // int V rho
  double interaction = 0.0;  // 1/2 int rho K*rho
};

Energies energies(const PotentialSpec& V, const PotentialSpec& K, const DensityField& rho);
/// V sampled at the cell centers (or the tabulated samples).
std::vector<double> sample_potential(const PotentialSpec& V, const SpatialGrid& grid);
Energies energies(const std::vector<double>& V_samples, const InteractionKernel& kernel,
                  const DensityField& rho);

struct AssumptionCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;
  double C_V = 0.0;  // empirical growth constant of V
  double C_K = 0.0;  // empirical growth constant of K
  bool passed() const;
};

/// Checks the exponent inequalities on (1/p, 1/q, 1/r), the integrability of
/// the built-in K with those exponents, and samples the growth conditions
/// |grad U . x| <= C (1 + |U|) at `sample_count` radii. Throws
/// UnsupportedSpec for tabulated potentials.
ValidationReport validate_assumptions(const PotentialSpec& V, const PotentialSpec& K,
                                      const ModelParams& params, double inv_p, double inv_q,
                                      double inv_r, int sample_count);

struct DecayCheck {
  bool ok = true;
  std::vector<std::string> warnings;
};

/// Torus-truncation check: unbounded potentials are flagged, decaying ones
/// must fall below 1e-8 of their peak at distance L.
DecayCheck check_decay_margin(const PotentialSpec& V, const PotentialSpec& K, const SpatialGrid& grid);

}  // namespace kinlim
