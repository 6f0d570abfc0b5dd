#include "kinlim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "kinlim/errors.hpp"
#include "kinlim/field_io.hpp"

namespace kinlim {

namespace {

const DensitySnapshot* find_snapshot(const std::vector<DensitySnapshot>& s, double t, double tol) {
  for (const auto& x : s)
    if (std::abs(x.t - t) <= tol) return &x;
  return nullptr;
}

std::vector<double> snapshot_times(const std::vector<DensitySnapshot>& s) {
  std::vector<double> t;
  t.reserve(s.size());
  for (const auto& x : s) t.push_back(x.t);
  return t;
}

}  // namespace

AuditResult entropy_audit(const ModelParams& p, const std::vector<EnergyReport>& series, double budget,
                          double tol) {
  AuditResult res;
  res.budget = budget;
  if (series.empty()) return res;
  const double E0 = series.front().energy;
  const double pm = 2.0 * p.gamma / (p.gamma + 1.0);
  for (const auto& e : series) {
    const double energy_excess = e.energy + e.cum_dissipation - E0 - budget;
    if (!(energy_excess <= 0.0)) res.failures.push_back({e.t, "energy inequality", energy_excess});
    const double pressure_excess = e.rho_gamma - e.entropy - tol;
    if (!(pressure_excess <= 0.0)) res.failures.push_back({e.t, "int rho^gamma <= iint H[f]", pressure_excess});
    const double m_bound = std::pow(e.v2_moment, 0.5 * pm) * std::pow(e.rho_gamma, 1.0 - 0.5 * pm);
    const double m_excess = std::pow(e.m_lp, pm) - m_bound * (1.0 + 1e-12) - tol;
    if (!(m_excess <= 0.0)) res.failures.push_back({e.t, "momentum L^p bound", m_excess});
  }
  res.passed = res.failures.empty();
  return res;
}

void validate(const SweepConfig& cfg) {
  auto bad = [](const std::string& what) { throw DomainError("sweep config: " + what); };
  if (cfg.epsilons.empty()) bad("epsilons must not be empty");
  for (std::size_t k = 0; k < cfg.epsilons.size(); ++k) {
    if (!(cfg.epsilons[k] > 0.0)) bad("epsilons must be positive");
    if (k > 0 && !(cfg.epsilons[k] < cfg.epsilons[k - 1])) bad("epsilons must be strictly descending");
  }
  if (cfg.p_list.empty()) bad("p_list must not be empty");
  for (double p : cfg.p_list)
    if (!(p >= 1.0 && p < cfg.kinetic.params.gamma)) bad("every p must lie in [1, gamma)");
  if (!(cfg.kinetic.xgrid == cfg.macro.grid)) bad("kinetic and macro grids differ");
  if (!(cfg.rho0.grid == cfg.macro.grid)) bad("rho0 grid differs from the solver grid");
  if (!(cfg.kinetic.V == cfg.macro.V) || !(cfg.kinetic.K == cfg.macro.K)) bad("kinetic and macro potentials differ");
  if (!(cfg.kinetic.params == cfg.macro.params)) bad("kinetic and macro model parameters differ");
  if (std::abs(cfg.kinetic.t_final - cfg.macro.t_final) > 1e-12 * std::max(1.0, cfg.macro.t_final))
    bad("kinetic and macro t_final differ");
  if (!(cfg.audit_budget_factor >= 0.0)) bad("audit_budget_factor must be nonnegative");
  if (cfg.threads < 0) bad("threads must be >= 0");
}

double space_time_distance(const std::vector<DensitySnapshot>& a, const std::vector<DensitySnapshot>& b,
                           const std::vector<double>& times, double p) {
  const double tol = 1e-9 * std::max(1.0, times.empty() ? 1.0 : std::abs(times.back()));
  double acc = 0.0, prev = 0.0;
  bool first = true;
  for (double t : times) {
    const DensitySnapshot* x = find_snapshot(a, t, tol);
    const DensitySnapshot* y = find_snapshot(b, t, tol);
    if (!x || !y) {
      std::ostringstream os;
      os << "space_time_distance: no snapshot at t = " << t << " in " << (!x ? "first" : "second") << " series";
      throw ConsistencyError(os.str());
    }
    if (!first) {
      const double d = lp_distance(x->rho, y->rho, p);
      acc += (std::isinf(p) ? d : std::pow(d, p)) * (t - prev);
    }
    first = false;
    prev = t;
  }
  return std::isinf(p) ? acc : std::pow(acc, 1.0 / p);
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ShapeError("fit_loglog: size mismatch");
  auto fit = [](const std::vector<double>& lx, const std::vector<double>& ly) {
    SlopeFit f;
    const double n = double(lx.size());
    f.points = int(lx.size());
    if (lx.size() < 2) return f;
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      mx += lx[k];
      my += ly[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      sxx += (lx[k] - mx) * (lx[k] - mx);
      sxy += (lx[k] - mx) * (ly[k] - my);
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      const double r = ly[k] - (f.intercept + f.slope * lx[k]);
      ss += r * r;
    }
    f.rms = std::sqrt(ss / n);
    return f;
  };
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw DomainError("fit_loglog: values must be positive");
    lx.push_back(std::log(x[k]));
    ly.push_back(std::log(y[k]));
  }
  SlopeFit f = fit(lx, ly);
  if (lx.size() < 4) return f;
  const std::size_t top = std::size_t(std::max_element(lx.begin(), lx.end()) - lx.begin());
  // Deleted residual r / (1 - h) of the largest point, h its leverage.
  double mx = 0.0, sxx = 0.0;
  for (double v : lx) mx += v;
  mx /= double(lx.size());
  for (double v : lx) sxx += (v - mx) * (v - mx);
  const double h = 1.0 / double(lx.size()) + (lx[top] - mx) * (lx[top] - mx) / sxx;
  const double r = (ly[top] - (f.intercept + f.slope * lx[top])) / (1.0 - h);
  if (std::abs(r) > 2.0 * f.rms && std::abs(r) > 1e-9) {
    lx.erase(lx.begin() + std::ptrdiff_t(top));
    ly.erase(ly.begin() + std::ptrdiff_t(top));
    f = fit(lx, ly);
    f.excluded_largest = true;
  }
  return f;
}

bool SweepReport::ok() const {
  if (!macro_ok) return false;
  for (const auto& m : members)
    if (!m.ok || !m.audit.passed) return false;
  return true;
}

SweepReport run_sweep(const SweepConfig& cfg) {
  validate(cfg);
  SweepReport rep;
  rep.members.resize(cfg.epsilons.size());
  rep.caveats.push_back(
      "The limit theorem gives convergence along a subsequence extracted by compactness; this sweep "
      "follows one scheme family and cannot detect subsequence phenomena.");
  rep.caveats.push_back(
      "Distances compare two discretizations (kinetic splitting scheme vs explicit finite volumes); they "
      "measure scheme-vs-scheme convergence, not convergence to a unique limit solution.");

  // Index 0 is the macro run; 1..n are the kinetic members.
  const std::size_t jobs = cfg.epsilons.size() + 1;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs; k = next++) {
      if (k == 0) {
        try {
          rep.macro = run_macro(cfg.macro, cfg.rho0);
          rep.macro_ok = true;
        } catch (const std::exception& e) {
          rep.macro_error = e.what();
        }
        continue;
      }
      SweepMember& m = rep.members[k - 1];
      m.epsilon = cfg.epsilons[k - 1];
      try {
        KineticConfig kc = cfg.kinetic;
        kc.epsilon = m.epsilon;
        kc.keep_snapshots = true;
        m.run = run_kinetic(kc, well_prepared(kc, cfg.rho0));
        m.ok = true;
      } catch (const std::exception& e) {
        m.error = e.what();
      }
    }
  };
  unsigned n_threads = cfg.threads > 0 ? unsigned(cfg.threads) : std::max(1u, std::thread::hardware_concurrency());
  n_threads = unsigned(std::min<std::size_t>(n_threads, jobs));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const double budget = cfg.audit_budget_factor * cfg.kinetic.dt * cfg.kinetic.t_final;
  std::vector<double> eps_ok, diss_ok;
  for (auto& m : rep.members) {
    if (!m.ok) continue;
    const auto& s = m.run.series;
    m.diss_norm = m.run.dissipation_norm();
    m.leak = m.run.leak;
    m.energy_violation = m.run.energy_violation;
    m.initial_entropy = s.front().entropy;
    m.x2_initial = s.front().x2_moment;
    m.min_entropy_gap = s.front().entropy_gap;
    for (const auto& e : s) {
      m.mass_drift = std::max(m.mass_drift, std::abs(e.mass - s.front().mass) / s.front().mass);
      m.min_entropy_gap = std::min(m.min_entropy_gap, e.entropy_gap);
      m.sup_rho_gamma = std::max(m.sup_rho_gamma, e.rho_gamma);
      m.sup_x2 = std::max(m.sup_x2, e.x2_moment);
      m.sup_m_lp = std::max(m.sup_m_lp, e.m_lp);
    }
    m.audit = entropy_audit(cfg.kinetic.params, s, budget);
    if (rep.macro_ok) {
      try {
        std::vector<double> times = cfg.comparison_times;
        if (times.empty()) {
          times = m.run.snapshots.size() <= rep.macro.snapshots.size() ? snapshot_times(m.run.snapshots)
                                                                        : snapshot_times(rep.macro.snapshots);
        }
        m.l1_dist = space_time_distance(m.run.snapshots, rep.macro.snapshots, times, 1.0);
        for (double p : cfg.p_list) m.lp_dist.push_back(space_time_distance(m.run.snapshots, rep.macro.snapshots, times, p));
      } catch (const std::exception& e) {
        m.ok = false;
        m.error = e.what();
        continue;
      }
    }
    eps_ok.push_back(m.epsilon);
    diss_ok.push_back(m.diss_norm);
  }
  if (eps_ok.size() >= 2) rep.slope = fit_loglog(eps_ok, diss_ok);

  rep.l1_strictly_decreasing = rep.macro_ok;
  rep.uniform_bounds_ok = true;
  for (std::size_t k = 0; k < rep.members.size(); ++k) {
    const auto& m = rep.members[k];
    if (!m.ok) {
      rep.l1_strictly_decreasing = false;
      rep.uniform_bounds_ok = false;
      continue;
    }
    if (k > 0 && !(m.l1_dist < rep.members[k - 1].l1_dist)) rep.l1_strictly_decreasing = false;
    if (m.sup_rho_gamma > 1.1 * m.initial_entropy || m.sup_x2 > 3.0 * m.x2_initial) rep.uniform_bounds_ok = false;
  }
  return rep;
}

void write_sweep_csv(std::ostream& os, const SweepConfig& cfg, const SweepReport& rep) {
  os << "epsilon,l1_dist";
  for (double p : cfg.p_list) os << ",lp_dist_" << format_double(p);
  os << ",diss_norm,slope_global\n";
  for (const auto& m : rep.members) {
    os << format_double(m.epsilon) << ',' << (m.ok ? format_double(m.l1_dist) : "nan");
    for (std::size_t k = 0; k < cfg.p_list.size(); ++k)
      os << ',' << (m.ok && k < m.lp_dist.size() ? format_double(m.lp_dist[k]) : "nan");
    os << ',' << (m.ok ? format_double(m.diss_norm) : "nan") << ',' << format_double(rep.slope.slope) << '\n';
  }
}

std::string sweep_summary_json(const SweepConfig& cfg, const SweepReport& rep) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["ok"] = rep.ok();
  j["macro"] = {{"ok", rep.macro_ok}, {"error", rep.macro_error}, {"energy_increase", rep.macro.energy_increase}};
  ordered_json members = ordered_json::array();
  for (const auto& m : rep.members) {
    ordered_json a;
    a["epsilon"] = m.epsilon;
    a["ok"] = m.ok;
    if (!m.ok) a["error"] = m.error;
    a["l1_dist"] = m.l1_dist;
    a["lp_dist"] = m.lp_dist;
    a["diss_norm"] = m.diss_norm;
    a["leak"] = m.leak;
    a["mass_drift"] = m.mass_drift;
    a["energy_violation"] = m.energy_violation;
    a["min_entropy_gap"] = m.min_entropy_gap;
    a["sup_rho_gamma"] = m.sup_rho_gamma;
    a["initial_entropy"] = m.initial_entropy;
    a["sup_x2"] = m.sup_x2;
    a["x2_initial"] = m.x2_initial;
    a["sup_m_lp"] = m.sup_m_lp;
    ordered_json fails = ordered_json::array();
    for (const auto& f : m.audit.failures) fails.push_back({{"t", f.t}, {"check", f.check}, {"magnitude", f.magnitude}});
    a["audit"] = {{"passed", m.audit.passed}, {"budget", m.audit.budget}, {"failures", fails}};
    members.push_back(a);
  }
  j["members"] = members;
  j["p_list"] = cfg.p_list;
  j["dissipation_fit"] = {{"slope", rep.slope.slope},
                          {"intercept", rep.slope.intercept},
                          {"rms", rep.slope.rms},
                          {"points", rep.slope.points},
                          {"excluded_largest_epsilon", rep.slope.excluded_largest}};
  j["l1_strictly_decreasing"] = rep.l1_strictly_decreasing;
  j["uniform_bounds_ok"] = rep.uniform_bounds_ok;
  j["caveats"] = rep.caveats;
  return j.dump(2) + "\n";
}

}  // namespace kinlim
