#pragma once

// Seeded property batteries for every module and the identity checks shared
// by the acceptance suite, the CLI and the Python bindings.

#include <cstdint>
#include <string>
#include <vector>

#include "kinlim/model.hpp"

namespace kinlim {

struct PropertyCheck {
  std::string module;
  std::string name;
  bool pass = true;
  /// Informational checks are reported but never fail the battery.
  bool informational = false;
  long cases = 0;
  long violations = 0;
  /// Largest observed value of the checked quantity (error, ratio, ...).
  double worst = 0.0;
  /// Threshold `worst` is compared against.
  double bound = 0.0;
  std::string detail;
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;
  bool passed() const;
  /// Deterministic one-line-per-check rendering.
  std::string text() const;
  /// JSON array of the failing checks.
  std::string failures_json() const;
};

/// Equilibrium moments from a midpoint rule on [-1.25 R, 1.25 R]^d with
/// `cells` cells per axis, R the support radius.
struct MomentRow {
  double rho = 0.0;
  double mass = 0.0;
  double momentum = 0.0;  // largest |component|
  double pressure_diag_min = 0.0;
  double pressure_diag_max = 0.0;
  double pressure_offdiag = 0.0;  // largest |off-diagonal entry|
  double v2 = 0.0;                // int |v|^2 M
  double psi_integral = 0.0;      // int Psi_n(M)
  double entropy = 0.0;           // int H[M]
};

MomentRow equilibrium_moments(const ModelParams& p, double rho, int cells);

/// Default cells per axis for the moment oracle.
int default_moment_cells(int d);

/// Largest relative error of a row against mass = rho, momentum = 0,
/// pressure = rho^gamma I, int |v|^2 M = d rho^gamma, int Psi_n(M) = rho^gamma
/// (momentum and off-diagonal entries relative to rho and rho^gamma).
/// `psi_factor` multiplies the expected int Psi_n(M).
double moment_row_error(const ModelParams& p, const MomentRow& row, double psi_factor = 1.0);

/// Normalization constant from the Beta-function form of the radial integral.
double normalization_oracle(double gamma, int d);

/// Constant identities over 20 admissible (gamma, d) pairs, d = 1..4.
PropertyCheck check_constant_identities();
/// Moment table for gamma in {1.2, 1.5, 5/3} at d = 1 and {1.25, 1.5} at d = 2,
/// rho in {0.1, 0.5, 1, 2, 5}. With `psi_half_n` the expected int Psi_n(M)
/// is (n/2) rho^gamma, which is what the definition of Psi_n yields.
PropertyCheck check_moment_table(double tol = 1e-6, bool psi_half_n = false);
/// Random mass-matched velocity profiles against the discrete equilibrium.
PropertyCheck check_minimization(std::uint64_t seed, long cases);
/// Lipschitz bounds of the equilibrium map on random density pairs: the L^1
/// bound, the |v|^2-weighted bound and the L^{1+2/n} bound in norm and in
/// power form.
std::vector<PropertyCheck> check_lipschitz(std::uint64_t seed, long cases);
/// Bregman divergence against the entropy gap, and the L^{1+2/n} control by
/// the Bregman divergence with constant 16 c^{2/n}/n; the same control with
/// 4 n c^{2/n} is added as an informational check.
std::vector<PropertyCheck> check_bregman_chain(std::uint64_t seed, long cases);

/// Every module's battery. `cases` scales the random sample sizes.
PropertyReport run_property_suite(std::uint64_t seed, long cases);

}  // namespace kinlim
