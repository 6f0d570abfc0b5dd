#include "kinlim/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "kinlim/errors.hpp"
#include "kinlim/field_io.hpp"

namespace kinlim {

namespace {

int wrap(int k, int n) { return ((k % n) + n) % n; }

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
Rule gauss_legendre(int n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

const Rule& relaxation_rule() {
  static const Rule rule = gauss_legendre(12);
  return rule;
}

// Stride of one step along `axis` in a row-major, last-axis-fastest layout.
std::size_t axis_stride(int d, int axis, int n) { return (d == 2 && axis == 0) ? std::size_t(n) : 1; }

void shift_x_axis(DistributionField& f, int axis, double dt, double eps, Interpolation interp,
                  std::vector<double>& buf) {
  const SpatialGrid& xg = f.xgrid;
  const VelocityGrid& vg = f.vgrid;
  const int d = xg.dim();
  const int n = xg.cells_per_axis();
  const std::size_t nx = xg.size();
  const std::size_t nv = vg.size();
  const std::size_t stride = axis_stride(d, axis, n);
  const double dx = xg.spacing();

  // Per velocity cell: source offset m and interpolation weights.
  const int taps = interp == Interpolation::linear ? 2 : 4;
  const int first = interp == Interpolation::linear ? 0 : -1;
  std::vector<int> offset(nv);
  std::vector<double> w(nv * taps);
  for (std::size_t j = 0; j < nv; ++j) {
    const double s = vg.center(vg.unflatten(j)[axis]) * dt / (eps * dx);
    const double src = -s;
    const double fl = std::floor(src);
    const double th = src - fl;
    offset[j] = int(fl);
    double* wj = &w[j * taps];
    if (interp == Interpolation::linear) {
      wj[0] = 1.0 - th;
      wj[1] = th;
    } else {
      wj[0] = -th * (th - 1.0) * (th - 2.0) / 6.0;
      wj[1] = (th + 1.0) * (th - 1.0) * (th - 2.0) / 2.0;
      wj[2] = -(th + 1.0) * th * (th - 2.0) / 2.0;
      wj[3] = (th + 1.0) * th * (th - 1.0) / 6.0;
    }
  }

  buf.assign(f.values.begin(), f.values.end());
  for (std::size_t i = 0; i < nx; ++i) {
    const int ia = xg.unflatten(i)[axis];
    const std::size_t base = i - std::size_t(ia) * stride;
    double* out = &f.values[i * nv];
    for (std::size_t j = 0; j < nv; ++j) {
      const double* wj = &w[j * taps];
      double s = 0.0;
      for (int k = 0; k < taps; ++k) {
        const std::size_t src = base + std::size_t(wrap(ia + offset[j] + first + k, n)) * stride;
        s += wj[k] * buf[src * nv + j];
      }
      out[j] = s;
    }
  }

  if (interp == Interpolation::cubic) {
    // Clip the overshoot and restore the (exactly conserved) mass of every
    // velocity cell.
    for (std::size_t j = 0; j < nv; ++j) {
      double before = 0.0, after = 0.0;
      for (std::size_t i = 0; i < nx; ++i) {
        before += buf[i * nv + j];
        double& v = f.values[i * nv + j];
        if (v < 0.0) v = 0.0;
        after += v;
      }
      if (after > 0.0 && after != before) {
        const double fix = before / after;
        for (std::size_t i = 0; i < nx; ++i) f.values[i * nv + j] *= fix;
      }
    }
  }
}

void shift_v_axis(DistributionField& f, const ForceField& F, int axis, double dt, double eps,
                  double& leak) {
  const VelocityGrid& vg = f.vgrid;
  const int d = vg.dim();
  const int n = vg.cells_per_axis();
  const std::size_t nv = vg.size();
  const std::size_t stride = axis_stride(d, axis, n);
  const double dv = vg.spacing();
  std::vector<double> old(nv);
  for (std::size_t i = 0; i < f.xgrid.size(); ++i) {
    const double sigma = F.component(i, axis) * dt / (eps * dv);
    if (sigma == 0.0) continue;
    auto sl = f.slice(i);
    std::copy(sl.begin(), sl.end(), old.begin());
    const double fl = std::floor(sigma);
    const double th = sigma - fl;
    const int m = int(fl);
    double before = 0.0, after = 0.0;
    for (std::size_t j = 0; j < nv; ++j) {
      before += old[j];
      const int ja = vg.unflatten(j)[axis];
      const std::size_t base = j - std::size_t(ja) * stride;
      const int s0 = ja + m, s1 = ja + m + 1;
      double v = 0.0;
      if (s0 >= 0 && s0 < n) v += (1.0 - th) * old[base + std::size_t(s0) * stride];
      if (s1 >= 0 && s1 < n) v += th * old[base + std::size_t(s1) * stride];
      sl[j] = v;
      after += v;
    }
    leak += before - after;
  }
}

double entropy_profile(const std::vector<double>& half_s2,
                       std::span<const double> f, double inv_norm, double q) {
  double kin = 0.0, internal = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (f[j] <= 0.0) continue;
    kin += half_s2[j] * f[j];
    internal += std::exp(q * std::log(f[j]));
  }
  return kin + internal * inv_norm;
}

std::string describe_truncation(const ModelParams& p, double rho, double margin, double vmax,
                                double& needed) {
  needed = margin * support_radius(p, rho);
  std::ostringstream os;
  os.precision(6);
  os << "density " << rho << " has equilibrium support radius " << support_radius(p, rho)
     << "; margin " << margin << " needs v_max >= " << needed << " (have " << vmax << ")";
  return os.str();
}

}  // namespace

const char* to_string(Splitting s) { return s == Splitting::lie ? "lie" : "strang"; }
const char* to_string(Interpolation i) { return i == Interpolation::linear ? "linear" : "cubic"; }

void validate(const KineticConfig& cfg) {
  auto bad = [](const std::string& what) { throw DomainError("kinetic config: " + what); };
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) bad("epsilon must be positive");
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) bad("dt must be positive");
  if (!(cfg.t_final >= 0.0) || !std::isfinite(cfg.t_final)) bad("t_final must be nonnegative");
  const double steps = cfg.t_final / cfg.dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
    bad("t_final must be an integer multiple of dt");
  if (cfg.diag_stride < 1) bad("diag_stride must be >= 1");
  if (!(cfg.rho_cap > 0.0)) bad("rho_cap must be positive");
  if (!(cfg.velocity_margin >= 1.0)) bad("velocity_margin must be >= 1");
  if (cfg.xgrid.dim() != cfg.params.d || cfg.vgrid.dim() != cfg.params.d)
    bad("grid dimensions must equal d");
  double needed = 0.0;
  const std::string msg =
      describe_truncation(cfg.params, cfg.rho_cap, cfg.velocity_margin, cfg.vgrid.v_max(), needed);
  if (needed > cfg.vgrid.v_max()) throw TruncationError("kinetic config: rho_cap " + msg, needed);
}

void transport_step(DistributionField& f, double dt, double eps, Interpolation interp) {
  if (!(eps > 0.0)) throw DomainError("transport_step: eps must be positive");
  if (dt == 0.0) return;
  std::vector<double> buf;
  for (int a = 0; a < f.xgrid.dim(); ++a) shift_x_axis(f, a, dt, eps, interp, buf);
}

double kick_step(DistributionField& f, const ForceField& F, double dt, double eps) {
  if (!(eps > 0.0)) throw DomainError("kick_step: eps must be positive");
  if (!(F.grid == f.xgrid)) throw ShapeError("kick_step: force grid differs from the field grid");
  const double limit = 0.25 * f.vgrid.cells_per_axis() * f.vgrid.spacing();
  const double fmax = F.max_magnitude();
  if (!std::isfinite(fmax)) throw NumericalFailure("kick_step: non-finite force", -1);
  if (fmax * std::abs(dt) / eps > limit) {
    const double dt_max = limit * eps / fmax;
    std::ostringstream os;
    os.precision(6);
    os << "kick_step: velocity displacement " << fmax * std::abs(dt) / eps
       << " exceeds a quarter of the velocity box (" << limit << "); use dt <= " << dt_max
       << " or a larger epsilon";
    throw StabilityError(os.str(), dt_max);
  }
  double leak = 0.0;
  if (dt == 0.0 || fmax == 0.0) return 0.0;
  for (int a = 0; a < f.xgrid.dim(); ++a) shift_v_axis(f, F, a, dt, eps, leak);
  return leak * f.cell_volume();
}

RelaxResult relax_step(DistributionField& f, double dt, double eps, const ModelParams& p,
                       double margin) {
  if (!(eps > 0.0)) throw DomainError("relax_step: eps must be positive");
  if (!(dt >= 0.0)) throw DomainError("relax_step: dt must be nonnegative");
  const DensityField rho = density_moment(f);
  RelaxResult res;
  res.max_density = rho.max();
  double needed = 0.0;
  const std::string msg = describe_truncation(p, std::max(res.max_density, 0.0), margin,
                                              f.vgrid.v_max(), needed);
  if (needed > f.vgrid.v_max()) throw TruncationError("relax_step: " + msg, needed);

  const std::size_t nv = f.vgrid.size();
  const double x = dt / (eps * eps);
  const double a1 = std::exp(-x);
  const double q = 1.0 + 2.0 / p.n;
  const double inv_norm = 1.0 / (q * 2.0 * std::pow(p.c_gamma_d, 2.0 / p.n));
  std::vector<double> half_s2(nv);
  for (std::size_t j = 0; j < nv; ++j) half_s2[j] = 0.5 * f.vgrid.speed_sq(j);

  const Rule& rule = relaxation_rule();
  const std::size_t nodes = rule.nodes.size();
  std::vector<double> a_nodes(nodes), a_weights(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    a_nodes[k] = 0.5 * (1.0 + a1) + 0.5 * (1.0 - a1) * rule.nodes[k];
    a_weights[k] = 0.5 * (1.0 - a1) * rule.weights[k];
  }

  std::vector<double> M(nv);
  double kinetic_gap = 0.0;   // sum |v|^2/2 (f - M)
  double internal_diss = 0.0;  // int_{a1}^1 (Psi part of gap(a)) / a da
  double dev = 0.0;            // sum |f - M|^q
  for (std::size_t i = 0; i < f.xgrid.size(); ++i) {
    auto sl = f.slice(i);
    discrete_equilibrium_profile(p, rho.values[i], f.vgrid, M);
    double psi_M = 0.0;
    for (std::size_t j = 0; j < nv; ++j) {
      kinetic_gap += half_s2[j] * (sl[j] - M[j]);
      if (M[j] > 0.0) psi_M += std::exp(q * std::log(M[j]));
      const double diff = std::abs(sl[j] - M[j]);
      if (diff > 0.0) dev += std::exp(q * std::log(diff));
    }
    if (x > 0.0) {
      for (std::size_t k = 0; k < nodes; ++k) {
        const double a = a_nodes[k];
        double psi = 0.0;
        for (std::size_t j = 0; j < nv; ++j) {
          const double v = a * sl[j] + (1.0 - a) * M[j];
          if (v > 0.0) psi += std::exp(q * std::log(v));
        }
        internal_diss += a_weights[k] * (psi - psi_M) / a;
      }
    }
    for (std::size_t j = 0; j < nv; ++j) sl[j] = a1 * sl[j] + (1.0 - a1) * M[j];
  }
  const double vol = f.cell_volume();
  // The kinetic part of gap(a) is linear in a, so its integral against da/a
  // is exact.
  res.dissipation = (kinetic_gap * (1.0 - a1) + internal_diss * inv_norm) * vol;
  const double norm = std::pow(dev * vol, 1.0 / q);
  res.deviation_sq = norm * norm * eps * eps * 0.5 * (-std::expm1(-2.0 * x));
  return res;
}

double KineticRunReport::dissipation_norm() const { return std::sqrt(deviation_sq); }

KineticSolver::KineticSolver(const KineticConfig& cfg, DistributionField f0)
    : cfg_(cfg),
      f_(std::move(f0)),
      kernel_(cfg.K, cfg.xgrid),
      grad_v_(grad_V(cfg.V, cfg.xgrid)),
      v_samples_(sample_potential(cfg.V, cfg.xgrid)) {
  validate(cfg_);
  if (!(f_.xgrid == cfg_.xgrid) || !(f_.vgrid == cfg_.vgrid))
    throw ShapeError("KineticSolver: initial field grids differ from the configuration");
  for (double v : f_.values)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw DomainError("KineticSolver: initial field must be finite and nonnegative");
  const double rmax = density_moment(f_).max();
  if (rmax > cfg_.rho_cap) {
    std::ostringstream os;
    os << "KineticSolver: initial max density " << rmax << " exceeds rho_cap " << cfg_.rho_cap;
    throw DomainError(os.str());
  }
}

void KineticSolver::kick(double dt) {
  const DensityField rho = density_moment(f_);
  const ForceField F = [&] {
    ForceField out = kernel_.force(rho, cfg_.convolution);
    for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] += grad_v_.values[k];
    return out;
  }();
  leak_ += kick_step(f_, F, dt, cfg_.epsilon);
}

void KineticSolver::check_state(const char* stage) {
  const std::size_t nv = f_.vgrid.size();
  for (std::size_t i = 0; i < f_.xgrid.size(); ++i) {
    auto sl = f_.slice(i);
    bool clipped = false;
    double before = 0.0;
    for (double v : sl) {
      if (!std::isfinite(v))
        throw NumericalFailure(std::string("non-finite value after ") + stage + " at step " +
                                   std::to_string(steps_),
                               steps_);
      if (v < -1e-13)
        throw NumericalFailure(std::string("negative value after ") + stage + " at step " +
                                   std::to_string(steps_),
                               steps_);
      before += v;
      clipped |= v < 0.0;
    }
    if (!clipped) continue;
    double after = 0.0;
    for (double& v : sl) after += (v = std::max(v, 0.0));
    if (after > 0.0)
      for (std::size_t j = 0; j < nv; ++j) sl[j] *= before / after;
  }
}

void KineticSolver::step() {
  const double dt = cfg_.dt, eps = cfg_.epsilon;
  RelaxResult r;
  if (cfg_.splitting == Splitting::lie) {
    transport_step(f_, dt, eps, cfg_.interpolation);
    kick(dt);
    r = relax_step(f_, dt, eps, cfg_.params, cfg_.velocity_margin);
  } else {
    transport_step(f_, 0.5 * dt, eps, cfg_.interpolation);
    kick(0.5 * dt);
    r = relax_step(f_, dt, eps, cfg_.params, cfg_.velocity_margin);
    kick(0.5 * dt);
    transport_step(f_, 0.5 * dt, eps, cfg_.interpolation);
  }
  ++steps_;
  check_state("step");
  dissipation_ += r.dissipation;
  deviation_sq_ += r.deviation_sq;
  t_ = double(steps_) * dt;
}

EnergyReport KineticSolver::diagnostics() const {
  const ModelParams& p = cfg_.params;
  EnergyReport e;
  e.t = t_;
  e.mass = f_.total_mass();
  const DensityField rho = density_moment(f_);
  const MomentumField m = momentum_moment(f_);

  const std::size_t nv = f_.vgrid.size();
  const double q = 1.0 + 2.0 / p.n;
  const double inv_norm = 1.0 / (q * 2.0 * std::pow(p.c_gamma_d, 2.0 / p.n));
  std::vector<double> half_s2(nv), M(nv);
  for (std::size_t j = 0; j < nv; ++j) half_s2[j] = 0.5 * f_.vgrid.speed_sq(j);
  double H = 0.0, gap = 0.0;
  for (std::size_t i = 0; i < f_.xgrid.size(); ++i) {
    const double hf = entropy_profile(half_s2, f_.slice(i), inv_norm, q);
    discrete_equilibrium_profile(p, rho.values[i], f_.vgrid, M);
    const double hm = entropy_profile(half_s2, M, inv_norm, q);
    H += hf;
    gap += hf - hm;
  }
  const double vol = f_.cell_volume();
  e.entropy = H * vol;
  e.entropy_gap = gap * vol;

  const Energies en = energies(v_samples_, kernel_, rho);
  e.potential = en.potential;
  e.interaction = en.interaction;
  e.energy = e.entropy + e.potential + e.interaction;
  e.cum_dissipation = dissipation_;
  e.x2_moment = second_x_moment(rho);
  e.m_l1 = momentum_l1(m);
  e.v2_moment = second_v_moment(f_);

  const double dx = rho.grid.cell_volume();
  const double pm = 2.0 * p.gamma / (p.gamma + 1.0);
  const int d = rho.grid.dim();
  double rg = 0.0, ml = 0.0;
  for (std::size_t i = 0; i < rho.grid.size(); ++i) {
    if (rho.values[i] > 0.0) rg += std::pow(rho.values[i], p.gamma);
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += m.values[i * d + a] * m.values[i * d + a];
    if (s > 0.0) ml += std::pow(std::sqrt(s), pm);
  }
  e.rho_gamma = rg * dx;
  e.m_lp = std::pow(ml * dx, 1.0 / pm);
  e.max_rho = rho.max();
  e.leak = leak_;
  return e;
}

DistributionField well_prepared(const KineticConfig& cfg, const DensityField& rho0) {
  if (!(rho0.grid == cfg.xgrid)) throw ShapeError("well_prepared: density grid differs from the configuration");
  return equilibrium_field(cfg.params, rho0, cfg.vgrid, EquilibriumSampling::discrete_minimizer,
                           cfg.velocity_margin)
      .field;
}

KineticRunReport run_kinetic(const KineticConfig& cfg, const DistributionField& f0) {
  KineticSolver solver(cfg, f0);
  KineticRunReport rep;
  const long n = std::lround(cfg.t_final / cfg.dt);
  auto record = [&] {
    rep.series.push_back(solver.diagnostics());
    if (cfg.keep_snapshots) rep.snapshots.push_back({solver.time(), density_moment(solver.state())});
  };
  record();
  for (long k = 1; k <= n; ++k) {
    solver.step();
    if (k % cfg.diag_stride == 0 || k == n) record();
  }
  rep.steps = solver.steps();
  rep.leak = solver.leak();
  rep.deviation_sq = solver.deviation_sq();
  rep.final_field = solver.state();
  const double E0 = rep.series.front().energy;
  for (const auto& e : rep.series)
    rep.energy_violation = std::max(rep.energy_violation, e.energy + e.cum_dissipation - E0);
  return rep;
}

void write_energy_csv(std::ostream& os, const std::vector<EnergyReport>& series) {
  os << "t,mass,E,entropy_gap,cum_dissipation,x2_moment,m_l1\n";
  for (const auto& e : series) {
    os << format_double(e.t) << ',' << format_double(e.mass) << ',' << format_double(e.energy) << ','
       << format_double(e.entropy_gap) << ',' << format_double(e.cum_dissipation) << ','
       << format_double(e.x2_moment) << ',' << format_double(e.m_l1) << '\n';
  }
}

}  // namespace kinlim
