#pragma once

// Closed-form quantities of the polytropic BGK model: constants, the local
// equilibrium, the internal entropy Psi_n, the Bregman divergence and the
// (v, I) extension used for the dissipation estimates.

#include <span>

#include "kinlim/grid.hpp"

namespace kinlim {

struct ModelParams {
  double gamma = 1.5;
  int d = 1;
  double n = 3.0;          // internal-variable exponent, 2/(gamma-1) - d
  double c_gamma_d = 0.0;  // equilibrium normalization
  double b0 = 6.0;         // 2 gamma / (gamma - 1)
  double b1 = 0.0;         // sigma(dI) = b1 I^{n-1} dI
  double b2 = 0.0;         // height of the extension, b1 * b2 = n * c_gamma_d

  bool operator==(const ModelParams&) const = default;
};

/// Largest admissible adiabatic exponent in dimension d, 1 + 2/(d+2).
double max_gamma(int d);

/// Derives every constant from (gamma, d). Throws DomainError naming the
/// violated bound when d < 1 or gamma is outside (1, 1 + 2/(d+2)].
ModelParams derive_params(double gamma, int d);

/// c (b0 rho^{gamma-1} - |v|^2)_+^{n/2}.
double equilibrium_value(const ModelParams& p, double rho, std::span<const double> v);
/// Same, parameterized by |v|^2.
double equilibrium_value_sq(const ModelParams& p, double rho, double speed_sq);

/// sqrt(b0 rho^{gamma-1}); the equilibrium vanishes for |v| at or beyond it.
double support_radius(const ModelParams& p, double rho);

double psi_n(const ModelParams& p, double s);
double psi_n_prime(const ModelParams& p, double s);

/// Kinetic entropy density |v|^2/2 f + Psi_n(f).
double entropy_density(const ModelParams& p, double f_val, std::span<const double> v);
double entropy_density_sq(const ModelParams& p, double f_val, double speed_sq);

/// Psi_n(f) - Psi_n(g) - Psi_n'(g) (f - g); nonnegative by convexity.
double bregman(const ModelParams& p, double f_val, double g_val);

struct EntropyPair {
  double kinetic = 0.0;   // int |v|^2/2 f dv
  double internal = 0.0;  // int Psi_n(f) dv
  double total() const noexcept { return kinetic + internal; }
};

/// Midpoint-rule entropy of a velocity profile sampled on `vg`.
EntropyPair velocity_entropy(const ModelParams& p, const VelocityGrid& vg,
                             std::span<const double> f_slice);

struct QuadratureConfig {
  /// Allowed relative mismatch between the profile mass and rho.
  double mass_rel_tol = 1e-6;
  /// 0 integrates the internal variable exactly after u = I^n; a positive
  /// value uses that many midpoint nodes in u instead.
  int u_nodes = 0;
};

struct ExtendedMoments {
  double F_hat = 0.0;  // iint (|v|^2 + I^2) |f^ - M^| sigma(dI) dv
  double D_hat = 0.0;  // iint (|v|^2 + I^2) (f^ - M^) sigma(dI) dv
};

/// Moments of the lifted profile f^(v, I) = b2 1[I^n <= f(v)/c] against the
/// lifted equilibrium of density rho. D_hat equals twice the entropy gap.
ExtendedMoments extended_moments(const ModelParams& p, const VelocityGrid& vg,
                                 std::span<const double> f_slice, double rho,
                                 const QuadratureConfig& quad = {});

/// F_hat / (D_hat + sqrt(rho^gamma D_hat)); 0 when both sides vanish.
double dissipation_ratio(const ModelParams& p, const ExtendedMoments& m, double rho);

/// Lipschitz constants of the equilibrium map: a = 2n, b = 2n b0.
struct LipschitzConstants {
  double a_gamma;
  double b_gamma;
};
LipschitzConstants lipschitz_constants(const ModelParams& p);

/// Constant 16 c^{2/n} / n of the Bregman control of the L^{1+2/n} distance.
double bregman_norm_constant(const ModelParams& p);

}  // namespace kinlim
