#include "kinlim/macro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "kinlim/errors.hpp"
#include "kinlim/field_io.hpp"

namespace kinlim {

void validate(const MacroConfig& cfg) {
  auto bad = [](const std::string& what) { throw DomainError("macro config: " + what); };
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) bad("dt must be positive");
  if (!(cfg.t_final >= 0.0) || !std::isfinite(cfg.t_final)) bad("t_final must be nonnegative");
  const double steps = cfg.t_final / cfg.dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
    bad("t_final must be an integer multiple of dt");
  if (cfg.diag_stride < 1) bad("diag_stride must be >= 1");
  if (cfg.grid.dim() != cfg.params.d) bad("grid dimension must equal d");
}

double stable_dt(const ModelParams& p, const DensityField& rho, const ForceField& F) {
  const double dx = rho.grid.spacing();
  const double rmax = std::max(rho.max(), 0.0);
  const double diff = rmax > 0.0 ? 2.0 * p.d * p.gamma * std::pow(rmax, p.gamma - 1.0) : 0.0;
  const double fmax = F.max_magnitude();
  double bound = std::numeric_limits<double>::infinity();
  if (diff > 0.0) bound = std::min(bound, dx * dx / diff);
  if (fmax > 0.0) bound = std::min(bound, dx / (2.0 * fmax));
  return 0.9 * bound;
}

void macro_step(const ModelParams& p, DensityField& rho, const ForceField& F, double dt) {
  const double bound = stable_dt(p, rho, F);
  if (dt > bound) {
    std::ostringstream os;
    os.precision(6);
    os << "macro_step: dt = " << dt << " exceeds the explicit stability bound " << bound;
    throw StabilityError(os.str(), bound);
  }
  const SpatialGrid& g = rho.grid;
  const int d = g.dim();
  const int n = g.cells_per_axis();
  const std::size_t N = g.size();
  const double dx = g.spacing();
  std::vector<double> P(N);
  for (std::size_t i = 0; i < N; ++i) P[i] = rho.values[i] > 0.0 ? std::pow(rho.values[i], p.gamma) : 0.0;

  std::vector<double> next = rho.values;
  for (int a = 0; a < d; ++a) {
    for (std::size_t i = 0; i < N; ++i) {
      // Flux through the upper face of cell i along axis a.
      auto idx = g.unflatten(i);
      idx[a] = (idx[a] + 1) % n;
      const std::size_t r = g.flatten(idx[0], idx[1]);
      const double u = -0.5 * (F.component(i, a) + F.component(r, a));
      const double upwind = u > 0.0 ? rho.values[i] : rho.values[r];
      const double J = -(P[r] - P[i]) / dx + u * upwind;
      next[i] -= dt / dx * J;
      next[r] += dt / dx * J;
    }
  }
  rho.values.swap(next);
}

MacroSolver::MacroSolver(const MacroConfig& cfg, DensityField rho0)
    : cfg_(cfg),
      rho_(std::move(rho0)),
      kernel_(cfg.K, cfg.grid),
      grad_v_(grad_V(cfg.V, cfg.grid)),
      v_samples_(sample_potential(cfg.V, cfg.grid)) {
  validate(cfg_);
  if (!(rho_.grid == cfg_.grid)) throw ShapeError("MacroSolver: initial density grid differs from the configuration");
  for (double v : rho_.values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("MacroSolver: initial density must be finite and nonnegative");
}

void MacroSolver::step() {
  ForceField F = kernel_.force(rho_, cfg_.convolution);
  for (std::size_t k = 0; k < F.values.size(); ++k) F.values[k] += grad_v_.values[k];
  macro_step(cfg_.params, rho_, F, cfg_.dt);
  ++steps_;
  t_ = double(steps_) * cfg_.dt;
  const double scale = std::max(rho_.max(), 1e-300);
  for (double& v : rho_.values) {
    if (!std::isfinite(v))
      throw NumericalFailure("macro solver: non-finite density at step " + std::to_string(steps_), steps_);
    if (v < 0.0) {
      if (v < -1e-13 * scale)
        throw NumericalFailure("macro solver: negative density at step " + std::to_string(steps_), steps_);
      v = 0.0;
    }
  }
}

MacroReport MacroSolver::diagnostics() const {
  MacroReport r;
  r.t = t_;
  r.mass = rho_.total_mass();
  r.min_rho = rho_.min();
  r.max_rho = rho_.max();
  double rg = 0.0;
  for (double v : rho_.values)
    if (v > 0.0) rg += std::pow(v, cfg_.params.gamma);
  r.rho_gamma = rg * rho_.grid.cell_volume();
  const Energies e = energies(v_samples_, kernel_, rho_);
  r.F_energy = (1.0 + 0.5 * cfg_.params.d) * r.rho_gamma + e.potential + e.interaction;
  r.free_energy = r.rho_gamma / (cfg_.params.gamma - 1.0) + e.potential + e.interaction;
  r.x2_moment = second_x_moment(rho_);
  return r;
}

double energy_F(const ModelParams& p, const PotentialSpec& V, const PotentialSpec& K,
                const DensityField& rho) {
  double rg = 0.0;
  for (double v : rho.values) {
    if (v < 0.0) throw DomainError("energy_F: negative density");
    if (v > 0.0) rg += std::pow(v, p.gamma);
  }
  const Energies e = energies(V, K, rho);
  return (1.0 + 0.5 * p.d) * rg * rho.grid.cell_volume() + e.potential + e.interaction;
}

MacroRunReport run_macro(const MacroConfig& cfg, const DensityField& rho0) {
  MacroSolver solver(cfg, rho0);
  MacroRunReport rep;
  const long n = std::lround(cfg.t_final / cfg.dt);
  auto record = [&] {
    rep.series.push_back(solver.diagnostics());
    if (cfg.keep_snapshots) rep.snapshots.push_back({solver.time(), solver.state()});
  };
  record();
  for (long k = 1; k <= n; ++k) {
    solver.step();
    if (k % cfg.diag_stride == 0 || k == n) record();
  }
  rep.steps = solver.steps();
  rep.final_density = solver.state();
  double running_min = rep.series.front().F_energy;
  double free_min = rep.series.front().free_energy;
  for (const auto& r : rep.series) {
    rep.energy_increase = std::max(rep.energy_increase, r.F_energy - running_min);
    running_min = std::min(running_min, r.F_energy);
    rep.free_energy_increase = std::max(rep.free_energy_increase, r.free_energy - free_min);
    free_min = std::min(free_min, r.free_energy);
  }
  return rep;
}

void write_macro_csv(std::ostream& os, const std::vector<MacroReport>& series) {
  os << "t,mass,F_energy,min_rho,max_rho\n";
  for (const auto& r : series) {
    os << format_double(r.t) << ',' << format_double(r.mass) << ',' << format_double(r.F_energy) << ','
       << format_double(r.min_rho) << ',' << format_double(r.max_rho) << '\n';
  }
}

}  // namespace kinlim
