#pragma once

// Epsilon sweep comparing the kinetic solver against the macroscopic solver.

#include <iosfwd>
#include <string>
#include <vector>

#include "kinlim/kinetic.hpp"
#include "kinlim/macro.hpp"

namespace kinlim {

struct AuditFailure {
  double t = 0.0;
  std::string check;
  double magnitude = 0.0;
};

struct AuditResult {
  bool passed = true;
  double budget = 0.0;
  std::vector<AuditFailure> failures;
};

/// Per diagnostic time:
///   E(t) + cum_dissipation(t) <= E(0) + budget
///   int rho^gamma <= iint H[f] + tol
///   ||m||_p^p <= (iint |v|^2 f)^{p/2} (int rho^gamma)^{1-p/2} + tol,
///   p = 2 gamma/(gamma+1)
AuditResult entropy_audit(const ModelParams& p, const std::vector<EnergyReport>& series,
                          double budget, double tol = 1e-10);

struct SweepConfig {
  std::vector<double> epsilons;  // descending, positive
  KineticConfig kinetic;         // epsilon is overridden per member
  MacroConfig macro;
  DensityField rho0;
  std::vector<double> p_list{1.0};  // within [1, gamma)
  /// Empty: the coarser of the two diagnostic time sets.
  std::vector<double> comparison_times;
  int threads = 0;  // 0 = hardware concurrency
  /// Audit budget = factor * dt * t_final.
  double audit_budget_factor = 2.0;
};

void validate(const SweepConfig& cfg);

struct SweepMember {
  double epsilon = 0.0;
  bool ok = false;
  std::string error;
  std::vector<double> lp_dist;  // space-time distance per p in p_list
  double l1_dist = 0.0;
  double diss_norm = 0.0;
  double leak = 0.0;
  double mass_drift = 0.0;  // max_t |mass(t) - mass(0)| / mass(0)
  double energy_violation = 0.0;
  double min_entropy_gap = 0.0;
  double initial_entropy = 0.0;  // iint H[f0]
  double sup_rho_gamma = 0.0;
  double x2_initial = 0.0;
  double sup_x2 = 0.0;
  double sup_m_lp = 0.0;
  AuditResult audit;
  KineticRunReport run;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
  bool excluded_largest = false;
  int points = 0;
};

/// Least-squares fit of log y against log x. With four or more points the
/// largest x is dropped and the fit redone when its deleted residual
/// r / (1 - leverage) exceeds twice the RMS residual of the full fit.
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct SweepReport {
  std::vector<SweepMember> members;  // ordered as cfg.epsilons
  MacroRunReport macro;
  bool macro_ok = false;
  std::string macro_error;
  SlopeFit slope;
  bool l1_strictly_decreasing = false;
  bool uniform_bounds_ok = false;
  std::vector<std::string> caveats;

  bool ok() const;
};

/// Runs the macro solver once and the kinetic solver for every epsilon,
/// concurrently. Member failures are recorded, not thrown.
SweepReport run_sweep(const SweepConfig& cfg);

/// Space-time L^p distance on the given snapshot times with piecewise-constant
/// (right endpoint) time quadrature. Throws ConsistencyError if a time is
/// missing from either series.
double space_time_distance(const std::vector<DensitySnapshot>& a, const std::vector<DensitySnapshot>& b,
                           const std::vector<double>& times, double p);

/// Columns epsilon,l1_dist,lp_dist_<p>...,diss_norm,slope_global.
void write_sweep_csv(std::ostream& os, const SweepConfig& cfg, const SweepReport& rep);
/// JSON summary with per-member audit verdicts, the fit and the caveats.
std::string sweep_summary_json(const SweepConfig& cfg, const SweepReport& rep);

}  // namespace kinlim
