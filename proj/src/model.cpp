#include "kinlim/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "kinlim/errors.hpp"

namespace kinlim {

namespace {

constexpr double kPi = std::numbers::pi;

void require_nonnegative(double x, const char* what) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    std::ostringstream os;
    os << what << " must be finite and nonnegative, got " << x;
    throw DomainError(os.str());
  }
}

// (w)_+^{e} with an explicit zero branch at and below the support edge.
double positive_power(double w, double e) {
  if (w <= 0.0) return 0.0;
  return std::exp(e * std::log(w));
}

}  // namespace

double max_gamma(int d) { return 1.0 + 2.0 / (d + 2.0); }

ModelParams derive_params(double gamma, int d) {
  if (d < 1) throw DomainError("derive_params: d must be >= 1, got " + std::to_string(d));
  const double upper = max_gamma(d);
  if (!std::isfinite(gamma) || !(gamma > 1.0)) {
    std::ostringstream os;
    os << "derive_params: gamma must exceed 1, got " << gamma;
    throw DomainError(os.str());
  }
  if (gamma > upper * (1.0 + 1e-14)) {
    std::ostringstream os;
    os.precision(17);
    os << "derive_params: gamma = " << gamma << " exceeds 1 + 2/(d+2) = " << upper << " for d = " << d;
    throw DomainError(os.str());
  }

  ModelParams p;
  p.gamma = gamma;
  p.d = d;
  const double inv = 1.0 / (gamma - 1.0);
  p.n = 2.0 * inv - d;
  p.b0 = 2.0 * gamma * inv;
  // Gamma functions through lgamma: b0/2 = gamma/(gamma-1) grows without
  // bound as gamma -> 1.
  p.c_gamma_d = std::exp(-inv * std::log(p.b0) + std::lgamma(gamma * inv) -
                         0.5 * d * std::log(kPi) - std::lgamma(1.0 + 0.5 * p.n));
  p.b1 = std::exp(std::log(2.0) + 0.5 * p.n * std::log(kPi) - std::lgamma(0.5 * p.n));
  p.b2 = std::exp(-inv * std::log(kPi * p.b0) + std::lgamma(0.5 * p.b0));
  return p;
}

double equilibrium_value_sq(const ModelParams& p, double rho, double speed_sq) {
  require_nonnegative(rho, "equilibrium_value: rho");
  if (rho == 0.0) return 0.0;
  const double w = p.b0 * std::pow(rho, p.gamma - 1.0) - speed_sq;
  return p.c_gamma_d * positive_power(w, 0.5 * p.n);
}

double equilibrium_value(const ModelParams& p, double rho, std::span<const double> v) {
  double s = 0.0;
  for (double vi : v) s += vi * vi;
  return equilibrium_value_sq(p, rho, s);
}

double support_radius(const ModelParams& p, double rho) {
  require_nonnegative(rho, "support_radius: rho");
  if (rho == 0.0) return 0.0;
  return std::sqrt(p.b0 * std::pow(rho, p.gamma - 1.0));
}

double psi_n(const ModelParams& p, double s) {
  require_nonnegative(s, "psi_n: s");
  const double q = 1.0 + 2.0 / p.n;
  return std::pow(s, q) / (q * 2.0 * std::pow(p.c_gamma_d, 2.0 / p.n));
}

double psi_n_prime(const ModelParams& p, double s) {
  require_nonnegative(s, "psi_n_prime: s");
  return std::pow(s, 2.0 / p.n) / (2.0 * std::pow(p.c_gamma_d, 2.0 / p.n));
}

double entropy_density_sq(const ModelParams& p, double f_val, double speed_sq) {
  require_nonnegative(f_val, "entropy_density: f");
  return 0.5 * speed_sq * f_val + psi_n(p, f_val);
}

double entropy_density(const ModelParams& p, double f_val, std::span<const double> v) {
  double s = 0.0;
  for (double vi : v) s += vi * vi;
  return entropy_density_sq(p, f_val, s);
}

double bregman(const ModelParams& p, double f_val, double g_val) {
  require_nonnegative(f_val, "bregman: f");
  require_nonnegative(g_val, "bregman: g");
  const double q = 1.0 + 2.0 / p.n;
  const double fq = std::pow(f_val, q) / q;
  const double gq = std::pow(g_val, q) / q;
  const double raw = fq - gq - std::pow(g_val, q - 1.0) * (f_val - g_val);
  // Cancellation can leave a tiny negative residue; the exact value is >= 0.
  return std::max(raw, 0.0) / (2.0 * std::pow(p.c_gamma_d, 2.0 / p.n));
}

EntropyPair velocity_entropy(const ModelParams& p, const VelocityGrid& vg,
                             std::span<const double> f_slice) {
  if (f_slice.size() != vg.size()) throw ShapeError("velocity_entropy: profile size mismatch");
  EntropyPair e;
  const double dv = vg.cell_volume();
  for (std::size_t j = 0; j < f_slice.size(); ++j) {
    require_nonnegative(f_slice[j], "velocity_entropy: f");
    e.kinetic += 0.5 * vg.speed_sq(j) * f_slice[j];
    e.internal += psi_n(p, f_slice[j]);
  }
  e.kinetic *= dv;
  e.internal *= dv;
  return e;
}

ExtendedMoments extended_moments(const ModelParams& p, const VelocityGrid& vg,
                                 std::span<const double> f_slice, double rho,
                                 const QuadratureConfig& quad) {
  if (f_slice.size() != vg.size()) throw ShapeError("extended_moments: profile size mismatch");
  require_nonnegative(rho, "extended_moments: rho");
  const double dv = vg.cell_volume();
  double mass = 0.0;
  for (double f : f_slice) {
    if (!std::isfinite(f) || f < 0.0)
      throw DomainError("extended_moments: profile is not a nonnegative integrable function");
    mass += f;
  }
  mass *= dv;
  const double scale = std::max(rho, 1e-300);
  if (std::abs(mass - rho) > quad.mass_rel_tol * scale && std::abs(mass - rho) > 1e-300) {
    std::ostringstream os;
    os.precision(17);
    os << "extended_moments: profile mass " << mass << " does not match rho = " << rho;
    throw ConsistencyError(os.str());
  }

  // In u = I^n the lifted functions are b2 times indicators of [0, f/c] and
  // [0, (R^2 - |v|^2)_+^{n/2}], and sigma(dI) = (b1/n) du.
  const double inv_c = 1.0 / p.c_gamma_d;
  const double R2 = rho > 0.0 ? p.b0 * std::pow(rho, p.gamma - 1.0) : 0.0;
  const double q = 1.0 + 2.0 / p.n;
  const double two_over_n = 2.0 / p.n;
  const double weight = p.b2 * p.b1 / p.n;

  ExtendedMoments out;
  if (quad.u_nodes <= 0) {
    // int_lo^hi (|v|^2 + u^{2/n}) du in closed form.
    auto band = [&](double s, double lo, double hi) {
      return s * (hi - lo) + (std::pow(hi, q) - std::pow(lo, q)) / q;
    };
    for (std::size_t j = 0; j < f_slice.size(); ++j) {
      const double s = vg.speed_sq(j);
      const double a = f_slice[j] * inv_c;
      const double b = positive_power(R2 - s, 0.5 * p.n);
      const double lo = std::min(a, b), hi = std::max(a, b);
      const double w = band(s, lo, hi);
      out.F_hat += w;
      out.D_hat += a >= b ? w : -w;
    }
  } else {
    double u_top = 0.0;
    for (std::size_t j = 0; j < f_slice.size(); ++j) {
      u_top = std::max(u_top, f_slice[j] * inv_c);
      u_top = std::max(u_top, positive_power(R2 - vg.speed_sq(j), 0.5 * p.n));
    }
    const double du = u_top / quad.u_nodes;
    for (std::size_t j = 0; j < f_slice.size(); ++j) {
      const double s = vg.speed_sq(j);
      const double a = f_slice[j] * inv_c;
      const double b = positive_power(R2 - s, 0.5 * p.n);
      for (int k = 0; k < quad.u_nodes; ++k) {
        const double u = (k + 0.5) * du;
        const double diff = double(u <= a) - double(u <= b);
        if (diff == 0.0) continue;
        const double w = (s + std::pow(u, two_over_n)) * du;
        out.F_hat += w;
        out.D_hat += diff * w;
      }
    }
  }
  out.F_hat *= weight * dv;
  out.D_hat *= weight * dv;
  return out;
}

double dissipation_ratio(const ModelParams& p, const ExtendedMoments& m, double rho) {
  const double D = std::max(m.D_hat, 0.0);
  const double denom = D + std::sqrt(std::pow(rho, p.gamma) * D);
  if (denom <= 0.0) return m.F_hat <= 0.0 ? 0.0 : INFINITY;
  return m.F_hat / denom;
}

LipschitzConstants lipschitz_constants(const ModelParams& p) {
  return {2.0 * p.n, 2.0 * p.n * p.b0};
}

double bregman_norm_constant(const ModelParams& p) {
  return 16.0 * std::pow(p.c_gamma_d, 2.0 / p.n) / p.n;
}

}  // namespace kinlim
