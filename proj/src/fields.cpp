#include "kinlim/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kinlim/errors.hpp"

namespace kinlim {

DistributionField::DistributionField(const SpatialGrid& xg, const VelocityGrid& vg)
    : xgrid(xg), vgrid(vg), values(xg.size() * vg.size(), 0.0) {
  if (xg.dim() != vg.dim()) throw ShapeError("DistributionField: x and v dimensions differ");
}

DistributionField::DistributionField(const SpatialGrid& xg, const VelocityGrid& vg,
                                     std::vector<double> vals)
    : xgrid(xg), vgrid(vg), values(std::move(vals)) {
  if (xg.dim() != vg.dim()) throw ShapeError("DistributionField: x and v dimensions differ");
  if (values.size() != xg.size() * vg.size())
    throw ShapeError("DistributionField: value count does not match the grids");
}

double DistributionField::total_mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * cell_volume();
}

DensityField::DensityField(const SpatialGrid& g, double fill) : grid(g), values(g.size(), fill) {}

DensityField::DensityField(const SpatialGrid& g, std::vector<double> vals)
    : grid(g), values(std::move(vals)) {
  if (values.size() != g.size()) throw ShapeError("DensityField: value count does not match the grid");
}

double DensityField::total_mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.cell_volume();
}

double DensityField::max() const { return *std::max_element(values.begin(), values.end()); }
double DensityField::min() const { return *std::min_element(values.begin(), values.end()); }

MomentumField::MomentumField(const SpatialGrid& g) : grid(g), values(g.size() * g.dim(), 0.0) {}

DensityField density_moment(const DistributionField& f) {
  DensityField rho(f.xgrid);
  const double dv = f.vgrid.cell_volume();
  for (std::size_t i = 0; i < f.xgrid.size(); ++i) {
    double s = 0.0;
    for (double v : f.slice(i)) s += v;
    rho.values[i] = s * dv;
  }
  return rho;
}

MomentumField momentum_moment(const DistributionField& f) {
  MomentumField m(f.xgrid);
  const int d = f.xgrid.dim();
  const double dv = f.vgrid.cell_volume();
  const std::size_t nv = f.vgrid.size();
  for (std::size_t i = 0; i < f.xgrid.size(); ++i) {
    auto sl = f.slice(i);
    for (int a = 0; a < d; ++a) {
      double s = 0.0;
      for (std::size_t j = 0; j < nv; ++j) s += f.vgrid.center(f.vgrid.unflatten(j)[a]) * sl[j];
      m.values[i * d + a] = s * dv;
    }
  }
  return m;
}

double second_v_moment(const DistributionField& f) {
  const std::size_t nv = f.vgrid.size();
  std::vector<double> s2(nv);
  for (std::size_t j = 0; j < nv; ++j) s2[j] = f.vgrid.speed_sq(j);
  double total = 0.0;
  for (std::size_t i = 0; i < f.xgrid.size(); ++i) {
    auto sl = f.slice(i);
    for (std::size_t j = 0; j < nv; ++j) total += s2[j] * sl[j];
  }
  return total * f.cell_volume();
}

double second_x_moment(const DensityField& rho) {
  double total = 0.0;
  for (std::size_t i = 0; i < rho.grid.size(); ++i) total += rho.grid.radius_sq(i) * rho.values[i];
  return total * rho.grid.cell_volume();
}

double second_x_moment(const DistributionField& f) { return second_x_moment(density_moment(f)); }

double momentum_l1(const MomentumField& m) {
  const int d = m.grid.dim();
  double total = 0.0;
  for (std::size_t i = 0; i < m.grid.size(); ++i) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += m.values[i * d + a] * m.values[i * d + a];
    total += std::sqrt(s);
  }
  return total * m.grid.cell_volume();
}

double discrete_equilibrium_profile(const ModelParams& p, double rho, const VelocityGrid& vg,
                                    std::span<double> out) {
  if (out.size() != vg.size()) throw ShapeError("discrete_equilibrium_profile: output size mismatch");
  if (!(rho >= 0.0) || !std::isfinite(rho))
    throw DomainError("discrete_equilibrium_profile: rho must be finite and nonnegative");
  std::fill(out.begin(), out.end(), 0.0);
  if (rho == 0.0) return 0.0;

  const double dv = vg.cell_volume();
  const double half_n = 0.5 * p.n;
  const std::size_t nv = vg.size();
  std::vector<double> s2(nv);
  for (std::size_t j = 0; j < nv; ++j) s2[j] = vg.speed_sq(j);

  // mass(w) = c dv sum (w - s_j)_+^{n/2} is continuous and increasing.
  auto mass_and_slope = [&](double w, double& slope) {
    double m = 0.0, dm = 0.0;
    for (std::size_t j = 0; j < nv; ++j) {
      const double gap = w - s2[j];
      if (gap <= 0.0) continue;
      const double pw = std::exp((half_n - 1.0) * std::log(gap));
      m += pw * gap;
      dm += pw;
    }
    slope = p.c_gamma_d * dv * half_n * dm;
    return p.c_gamma_d * dv * m;
  };

  double slope = 0.0;
  double lo = 0.0;
  double hi = p.b0 * std::pow(rho, p.gamma - 1.0);
  while (mass_and_slope(hi, slope) < rho) {
    lo = hi;
    hi *= 2.0;
  }
  double w = hi;
  for (int it = 0; it < 200; ++it) {
    const double m = mass_and_slope(w, slope);
    const double err = m - rho;
    if (std::abs(err) <= 1e-15 * rho) break;
    if (err > 0.0) hi = w; else lo = w;
    double next = slope > 0.0 ? w - err / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-16 * hi) break;
    w = next;
  }

  double m = 0.0;
  for (std::size_t j = 0; j < nv; ++j) {
    const double gap = w - s2[j];
    out[j] = gap > 0.0 ? p.c_gamma_d * std::exp(half_n * std::log(gap)) : 0.0;
    m += out[j];
  }
  m *= dv;
  // Remove the last ulp-level mismatch so that relaxation preserves rho.
  if (m > 0.0) {
    const double fix = rho / m;
    for (double& v : out) v *= fix;
  }
  return w;
}

EquilibriumFieldResult equilibrium_field(const ModelParams& p, const DensityField& rho,
                                         const VelocityGrid& vg, EquilibriumSampling sampling,
                                         double margin) {
  if (rho.grid.dim() != vg.dim()) throw ShapeError("equilibrium_field: x and v dimensions differ");
  const double rmax = rho.max();
  if (rho.min() < 0.0) throw DomainError("equilibrium_field: negative density");
  const double needed = margin * support_radius(p, rmax);
  if (needed > vg.v_max()) {
    std::ostringstream os;
    os.precision(6);
    os << "equilibrium_field: support radius " << support_radius(p, rmax) << " of max density "
       << rmax << " needs v_max >= " << needed << " (have " << vg.v_max() << ")";
    throw TruncationError(os.str(), needed);
  }

  EquilibriumFieldResult res{DistributionField(rho.grid, vg), 0.0};
  const std::size_t nv = vg.size();
  std::vector<double> s2(nv);
  for (std::size_t j = 0; j < nv; ++j) s2[j] = vg.speed_sq(j);
  const double dv = vg.cell_volume();

  for (std::size_t i = 0; i < rho.grid.size(); ++i) {
    auto sl = res.field.slice(i);
    if (sampling == EquilibriumSampling::discrete_minimizer) {
      discrete_equilibrium_profile(p, rho.values[i], vg, sl);
    } else {
      for (std::size_t j = 0; j < nv; ++j) sl[j] = equilibrium_value_sq(p, rho.values[i], s2[j]);
    }
    double m = 0.0;
    for (double v : sl) m += v;
    m *= dv;
    const double defect = std::abs(m - rho.values[i]) / std::max(rho.values[i], 1e-300);
    if (rho.values[i] > 0.0) res.max_mass_defect = std::max(res.max_mass_defect, defect);
  }
  return res;
}

namespace {

double lp_of(std::span<const double> a, std::span<const double> b, double p, double vol) {
  const bool diff = !b.empty();
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - (diff ? b[i] : 0.0)));
    return m;
  }
  if (!(p >= 1.0)) throw DomainError("lp_norm: p must lie in [1, inf]");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = std::abs(a[i] - (diff ? b[i] : 0.0));
    s += p == 1.0 ? x : std::pow(x, p);
  }
  s *= vol;
  return p == 1.0 ? s : std::pow(s, 1.0 / p);
}

}  // namespace

double lp_norm(const DensityField& a, double p) {
  return lp_of(a.values, {}, p, a.grid.cell_volume());
}

double lp_norm(const DistributionField& a, double p) {
  return lp_of(a.values, {}, p, a.cell_volume());
}

double lp_distance(const DensityField& a, const DensityField& b, double p) {
  if (!(a.grid == b.grid)) throw ShapeError("lp_distance: density grids differ");
  return lp_of(a.values, b.values, p, a.grid.cell_volume());
}

double lp_distance(const DistributionField& a, const DistributionField& b, double p) {
  if (!(a.xgrid == b.xgrid) || !(a.vgrid == b.vgrid))
    throw ShapeError("lp_distance: distribution grids differ");
  return lp_of(a.values, b.values, p, a.cell_volume());
}

double total_entropy(const ModelParams& p, const DistributionField& f) {
  const std::size_t nv = f.vgrid.size();
  std::vector<double> half_s2(nv);
  for (std::size_t j = 0; j < nv; ++j) half_s2[j] = 0.5 * f.vgrid.speed_sq(j);
  const double q = 1.0 + 2.0 / p.n;
  const double inv = 1.0 / (q * 2.0 * std::pow(p.c_gamma_d, 2.0 / p.n));
  double kin = 0.0, internal = 0.0;
  for (std::size_t i = 0; i < f.xgrid.size(); ++i) {
    auto sl = f.slice(i);
    for (std::size_t j = 0; j < nv; ++j) {
      const double v = sl[j];
      if (v <= 0.0) continue;
      kin += half_s2[j] * v;
      internal += std::exp(q * std::log(v));
    }
  }
  return (kin + internal * inv) * f.cell_volume();
}

}  // namespace kinlim
