#include "kinlim/forces.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "kinlim/errors.hpp"

namespace kinlim {

namespace {

// FFTW planning is not thread-safe; execution on distinct arrays is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffers {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  FftwBuffers(std::size_t nreal, std::size_t nspec)
      : real(fftw_alloc_real(nreal)), spec(fftw_alloc_complex(nspec)) {}
  ~FftwBuffers() {
    fftw_free(real);
    fftw_free(spec);
  }
  FftwBuffers(const FftwBuffers&) = delete;
  FftwBuffers& operator=(const FftwBuffers&) = delete;
};

std::size_t spectrum_size(const SpatialGrid& g) {
  const std::size_t n = g.cells_per_axis();
  return g.dim() == 1 ? n / 2 + 1 : n * (n / 2 + 1);
}

void forward_fft(const SpatialGrid& g, const std::vector<double>& in,
                 std::vector<std::complex<double>>& out) {
  const int n = g.cells_per_axis();
  FftwBuffers buf(g.size(), spectrum_size(g));
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = g.dim() == 1 ? fftw_plan_dft_r2c_1d(n, buf.real, buf.spec, FFTW_ESTIMATE)
                        : fftw_plan_dft_r2c_2d(n, n, buf.real, buf.spec, FFTW_ESTIMATE);
  }
  std::copy(in.begin(), in.end(), buf.real);
  fftw_execute(plan);
  out.resize(spectrum_size(g));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = {buf.spec[k][0], buf.spec[k][1]};
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

void inverse_fft(const SpatialGrid& g, const std::vector<std::complex<double>>& in,
                 std::vector<double>& out) {
  const int n = g.cells_per_axis();
  FftwBuffers buf(g.size(), spectrum_size(g));
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = g.dim() == 1 ? fftw_plan_dft_c2r_1d(n, buf.spec, buf.real, FFTW_ESTIMATE)
                        : fftw_plan_dft_c2r_2d(n, n, buf.spec, buf.real, FFTW_ESTIMATE);
  }
  for (std::size_t k = 0; k < in.size(); ++k) {
    buf.spec[k][0] = in[k].real();
    buf.spec[k][1] = in[k].imag();
  }
  fftw_execute(plan);
  out.assign(buf.real, buf.real + g.size());
  const double norm = 1.0 / double(g.size());
  for (double& v : out) v *= norm;
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

std::size_t offset_index(const SpatialGrid& g, std::size_t i, std::size_t j) {
  const int n = g.cells_per_axis();
  auto a = g.unflatten(i), b = g.unflatten(j);
  const int k0 = ((a[0] - b[0]) % n + n) % n;
  const int k1 = g.dim() == 1 ? 0 : ((a[1] - b[1]) % n + n) % n;
  return g.flatten(k0, k1);
}

}  // namespace

const char* to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::zero: return "zero";
    case PotentialKind::quadratic: return "quadratic";
    case PotentialKind::gaussian: return "gaussian";
    case PotentialKind::morse: return "morse";
    case PotentialKind::power: return "power";
    case PotentialKind::tabulated: return "tabulated";
  }
  return "?";
}

const char* to_string(PotentialRole r) {
  return r == PotentialRole::external ? "external" : "interaction";
}

PotentialSpec PotentialSpec::zero(PotentialRole role) {
  PotentialSpec s;
  s.role = role;
  return s;
}

PotentialSpec PotentialSpec::quadratic(double a, PotentialRole role) {
  PotentialSpec s;
  s.kind = PotentialKind::quadratic;
  s.role = role;
  s.strength = a;
  return s;
}

PotentialSpec PotentialSpec::gaussian(double amplitude, double width, PotentialRole role) {
  if (!(width > 0.0)) throw DomainError("gaussian potential: width must be positive");
  PotentialSpec s;
  s.kind = PotentialKind::gaussian;
  s.role = role;
  s.strength = amplitude;
  s.scale = width;
  return s;
}

PotentialSpec PotentialSpec::morse(double amplitude, double rate, PotentialRole role) {
  if (!(rate > 0.0)) throw DomainError("morse potential: rate must be positive");
  PotentialSpec s;
  s.kind = PotentialKind::morse;
  s.role = role;
  s.strength = amplitude;
  s.scale = rate;
  return s;
}

PotentialSpec PotentialSpec::power(double c_a, double exponent, double c_b, PotentialRole role) {
  if (!(exponent > 0.0)) throw DomainError("power potential: exponent must be positive");
  PotentialSpec s;
  s.kind = PotentialKind::power;
  s.role = role;
  s.strength = c_a;
  s.scale = exponent;
  s.offset = c_b;
  return s;
}

PotentialSpec PotentialSpec::tabulated(std::vector<double> samples, PotentialRole role) {
  PotentialSpec s;
  s.kind = PotentialKind::tabulated;
  s.role = role;
  s.samples = std::move(samples);
  for (double v : s.samples)
    if (!std::isfinite(v)) throw DomainError("tabulated potential: non-finite sample");
  return s;
}

bool PotentialSpec::unbounded() const noexcept {
  return (kind == PotentialKind::quadratic && strength != 0.0) ||
         (kind == PotentialKind::power && strength != 0.0);
}

double PotentialSpec::value(double r) const {
  switch (kind) {
    case PotentialKind::zero: return 0.0;
    case PotentialKind::quadratic: return strength * r * r;
    case PotentialKind::gaussian: return strength * std::exp(-(r * r) / (scale * scale));
    case PotentialKind::morse: return strength * std::exp(-scale * r);
    case PotentialKind::power: return strength * std::pow(r, scale) + offset;
    case PotentialKind::tabulated: break;
  }
  throw UnsupportedSpec("PotentialSpec::value: tabulated potentials have no radial form");
}

double PotentialSpec::radial_derivative(double r) const {
  if (r <= 0.0) return 0.0;
  switch (kind) {
    case PotentialKind::zero: return 0.0;
    case PotentialKind::quadratic: return 2.0 * strength * r;
    case PotentialKind::gaussian:
      return -2.0 * strength * r / (scale * scale) * std::exp(-(r * r) / (scale * scale));
    case PotentialKind::morse: return -strength * scale * std::exp(-scale * r);
    case PotentialKind::power: return strength * scale * std::pow(r, scale - 1.0);
    case PotentialKind::tabulated: break;
  }
  throw UnsupportedSpec("PotentialSpec::radial_derivative: tabulated potentials have no radial form");
}

double ForceField::max_magnitude() const {
  const int d = grid.dim();
  double m = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += values[i * d + a] * values[i * d + a];
    m = std::max(m, std::sqrt(s));
  }
  return m;
}

int minimal_image(int k, int n) noexcept {
  k = ((k % n) + n) % n;
  return k <= n / 2 ? k : k - n;
}

ForceField grad_V(const PotentialSpec& spec, const SpatialGrid& grid) {
  if (spec.role != PotentialRole::external)
    throw DomainError("grad_V: potential must have the external role");
  ForceField F(grid);
  const int d = grid.dim();
  if (spec.kind == PotentialKind::zero) return F;
  if (spec.kind == PotentialKind::tabulated) {
    if (spec.samples.size() != grid.size())
      throw ShapeError("grad_V: tabulated sample count " + std::to_string(spec.samples.size()) +
                       " does not match grid size " + std::to_string(grid.size()));
    const int n = grid.cells_per_axis();
    const double inv2dx = 0.5 / grid.spacing();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      auto idx = grid.unflatten(i);
      for (int a = 0; a < d; ++a) {
        auto up = idx, dn = idx;
        up[a] = (up[a] + 1) % n;
        dn[a] = (dn[a] - 1 + n) % n;
        F.values[i * d + a] =
            (spec.samples[grid.flatten(up[0], up[1])] - spec.samples[grid.flatten(dn[0], dn[1])]) * inv2dx;
      }
    }
    return F;
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto idx = grid.unflatten(i);
    const double r = std::sqrt(grid.radius_sq(i));
    const double dr = spec.radial_derivative(r);
    for (int a = 0; a < d; ++a) F.values[i * d + a] = r > 0.0 ? dr * grid.center(idx[a]) / r : 0.0;
  }
  return F;
}

InteractionKernel::InteractionKernel(const PotentialSpec& spec, const SpatialGrid& grid)
    : spec_(spec), grid_(grid) {
  if (spec.role != PotentialRole::interaction)
    throw DomainError("InteractionKernel: potential must have the interaction role");
  if (spec.kind == PotentialKind::tabulated && spec.samples.size() != grid.size())
    throw ShapeError("InteractionKernel: tabulated sample count does not match grid size");
  zero_ = spec.kind == PotentialKind::zero;
  const int d = grid.dim();
  const std::size_t N = grid.size();
  value_table_.assign(N, 0.0);
  grad_tables_.assign(d, std::vector<double>(N, 0.0));
  if (zero_) return;
  for (std::size_t k = 0; k < N; ++k) {
    auto idx = grid.unflatten(k);
    value_table_[k] = value_at(idx[0], idx[1]);
    auto g = gradient_at(idx[0], idx[1]);
    for (int a = 0; a < d; ++a) grad_tables_[a][k] = g[a];
  }
  forward_fft(grid, value_table_, value_spectrum_);
  grad_spectra_.resize(d);
  for (int a = 0; a < d; ++a) forward_fft(grid, grad_tables_[a], grad_spectra_[a]);
}

double InteractionKernel::value_at(int k0, int k1) const {
  const int n = grid_.cells_per_axis();
  if (spec_.kind == PotentialKind::tabulated) {
    k0 = ((k0 % n) + n) % n;
    k1 = grid_.dim() == 1 ? 0 : ((k1 % n) + n) % n;
    return spec_.samples[grid_.flatten(k0, k1)];
  }
  const double dx = grid_.spacing();
  double r2 = 0.0;
  const int ks[2] = {k0, k1};
  for (int a = 0; a < grid_.dim(); ++a) {
    const double x = minimal_image(ks[a], n) * dx;
    r2 += x * x;
  }
  return spec_.value(std::sqrt(r2));
}

std::array<double, 2> InteractionKernel::gradient_at(int k0, int k1) const {
  const int n = grid_.cells_per_axis();
  const int d = grid_.dim();
  const double dx = grid_.spacing();
  std::array<double, 2> g{0.0, 0.0};
  const int ks[2] = {k0, k1};
  if (spec_.kind == PotentialKind::tabulated) {
    for (int a = 0; a < d; ++a) {
      if (minimal_image(ks[a], n) == n / 2) continue;
      int up[2] = {k0, k1}, dn[2] = {k0, k1};
      up[a] += 1;
      dn[a] -= 1;
      g[a] = (value_at(up[0], up[1]) - value_at(dn[0], dn[1])) / (2.0 * dx);
    }
    return g;
  }
  double off[2] = {0.0, 0.0};
  double r2 = 0.0;
  for (int a = 0; a < d; ++a) {
    off[a] = minimal_image(ks[a], n) * dx;
    r2 += off[a] * off[a];
  }
  const double r = std::sqrt(r2);
  if (r == 0.0) return g;
  const double dr = spec_.radial_derivative(r);
  for (int a = 0; a < d; ++a) {
    if (minimal_image(ks[a], n) == n / 2) continue;
    g[a] = dr * off[a] / r;
  }
  return g;
}

void InteractionKernel::circulant(const std::vector<double>& table,
                                  const std::vector<std::complex<double>>& spectrum,
                                  const std::vector<double>& rho, std::vector<double>& out,
                                  ConvolutionMethod method) const {
  const std::size_t N = grid_.size();
  const double vol = grid_.cell_volume();
  out.assign(N, 0.0);
  if (method == ConvolutionMethod::automatic)
    method = N > 512 ? ConvolutionMethod::fft : ConvolutionMethod::table;
  if (method == ConvolutionMethod::fft) {
    std::vector<std::complex<double>> rs;
    forward_fft(grid_, rho, rs);
    for (std::size_t k = 0; k < rs.size(); ++k) rs[k] *= spectrum[k];
    inverse_fft(grid_, rs, out);
    for (double& v : out) v *= vol;
    return;
  }
  for (std::size_t i = 0; i < N; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < N; ++j) s += table[offset_index(grid_, i, j)] * rho[j];
    out[i] = s * vol;
  }
}

ForceField InteractionKernel::force(const DensityField& rho, ConvolutionMethod method) const {
  if (!(rho.grid == grid_)) throw ShapeError("InteractionKernel::force: grid mismatch");
  ForceField F(grid_);
  if (zero_) return F;
  const int d = grid_.dim();
  const std::size_t N = grid_.size();
  if (method == ConvolutionMethod::direct) {
    // Reference path: kernel re-evaluated for every pair.
    const double vol = grid_.cell_volume();
    const int n = grid_.cells_per_axis();
    for (std::size_t i = 0; i < N; ++i) {
      auto a = grid_.unflatten(i);
      double s[2] = {0.0, 0.0};
      for (std::size_t j = 0; j < N; ++j) {
        if (rho.values[j] == 0.0) continue;
        auto b = grid_.unflatten(j);
        auto g = gradient_at(((a[0] - b[0]) % n + n) % n, d == 1 ? 0 : ((a[1] - b[1]) % n + n) % n);
        for (int c = 0; c < d; ++c) s[c] += g[c] * rho.values[j];
      }
      for (int c = 0; c < d; ++c) F.values[i * d + c] = s[c] * vol;
    }
    return F;
  }
  std::vector<double> comp;
  for (int c = 0; c < d; ++c) {
    circulant(grad_tables_[c], grad_spectra_[c], rho.values, comp, method);
    for (std::size_t i = 0; i < N; ++i) F.values[i * d + c] = comp[i];
  }
  return F;
}

DensityField InteractionKernel::potential(const DensityField& rho, ConvolutionMethod method) const {
  if (!(rho.grid == grid_)) throw ShapeError("InteractionKernel::potential: grid mismatch");
  DensityField out(grid_);
  if (zero_) return out;
  if (method == ConvolutionMethod::direct) method = ConvolutionMethod::table;
  circulant(value_table_, value_spectrum_, rho.values, out.values, method);
  return out;
}

ForceField conv_grad_K(const PotentialSpec& spec, const DensityField& rho, ConvolutionMethod method) {
  return InteractionKernel(spec, rho.grid).force(rho, method);
}

ForceField force_field(const ForceField& gradV, const InteractionKernel& kernel, const DensityField& rho) {
  ForceField F = kernel.force(rho);
  if (!(gradV.grid == F.grid)) throw ShapeError("force_field: grid mismatch");
  for (std::size_t k = 0; k < F.values.size(); ++k) F.values[k] += gradV.values[k];
  return F;
}

ForceField force_field(const PotentialSpec& V, const PotentialSpec& K, const DensityField& rho) {
  return force_field(grad_V(V, rho.grid), InteractionKernel(K, rho.grid), rho);
}

std::vector<double> sample_potential(const PotentialSpec& V, const SpatialGrid& grid) {
  if (V.kind == PotentialKind::tabulated) {
    if (V.samples.size() != grid.size()) throw ShapeError("sample_potential: tabulated size mismatch");
    return V.samples;
  }
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = V.value(std::sqrt(grid.radius_sq(i)));
  return out;
}

Energies energies(const std::vector<double>& V_samples, const InteractionKernel& kernel,
                  const DensityField& rho) {
  Energies e;
  const double vol = rho.grid.cell_volume();
  for (std::size_t i = 0; i < rho.grid.size(); ++i) e.potential += V_samples[i] * rho.values[i];
  e.potential *= vol;
  if (!kernel.is_zero()) {
    DensityField Kr = kernel.potential(rho);
    for (std::size_t i = 0; i < rho.grid.size(); ++i) e.interaction += rho.values[i] * Kr.values[i];
    e.interaction *= 0.5 * vol;
  }
  return e;
}

Energies energies(const PotentialSpec& V, const PotentialSpec& K, const DensityField& rho) {
  return energies(sample_potential(V, rho.grid), InteractionKernel(K, rho.grid), rho);
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.pass; });
}

namespace {

struct Growth {
  double lower = 0.0;   // max(0, -min U)
  double ratio = 0.0;   // max |U'(r) r| / (1 + |U(r)|)
};

Growth sample_growth(const PotentialSpec& U, int count) {
  Growth g;
  for (int k = 0; k < count; ++k) {
    // Log-spaced radii from 1e-3 to 1e3.
    const double t = count > 1 ? double(k) / (count - 1) : 0.0;
    const double r = std::pow(10.0, -3.0 + 6.0 * t);
    const double u = U.value(r);
    g.lower = std::max(g.lower, -u);
    g.ratio = std::max(g.ratio, std::abs(U.radial_derivative(r) * r) / (1.0 + std::abs(u)));
  }
  return g;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

ValidationReport validate_assumptions(const PotentialSpec& V, const PotentialSpec& K,
                                      const ModelParams& params, double inv_p, double inv_q,
                                      double inv_r, int sample_count) {
  if (!V.builtin() || !K.builtin())
    throw UnsupportedSpec("validate_assumptions: tabulated potentials are not supported");
  if (sample_count < 2) throw DomainError("validate_assumptions: sample_count must be >= 2");
  ValidationReport rep;
  auto add = [&](std::string name, bool pass, double value, std::string detail) {
    rep.checks.push_back({std::move(name), pass, value, std::move(detail)});
  };

  const Growth gv = sample_growth(V, sample_count);
  const Growth gk = sample_growth(K, sample_count);
  rep.C_V = std::max(gv.ratio, gv.lower);
  rep.C_K = std::max(gk.ratio, gk.lower);
  add("HV growth |grad V . x| <= C_V (1 + |V|)", std::isfinite(gv.ratio), gv.ratio,
      "sampled C_V = " + fmt(gv.ratio));
  add("HV lower bound V >= -C_V", std::isfinite(gv.lower), gv.lower, "min V = " + fmt(-gv.lower));
  add("HK growth |grad K . x| <= C_K (1 + |K|)", std::isfinite(gk.ratio), gk.ratio,
      "sampled C_K = " + fmt(gk.ratio));
  add("HK lower bound K >= -C_K", std::isfinite(gk.lower), gk.lower, "min K = " + fmt(-gk.lower));

  const double g = params.gamma;
  const double p_bound = 2.0 - 2.0 / g;
  const double r_bound = std::min(1.0 - 1.0 / (1.0 + 2.0 / params.n), 2.0 - 2.0 / g);
  const bool in_unit = inv_p >= 0 && inv_p <= 1 && inv_q >= 0 && inv_q <= 1 && inv_r >= 0 && inv_r <= 1;
  add("exponents are reciprocals of p, q, r in [1, inf]", in_unit, 0.0,
      "(1/p, 1/q, 1/r) = (" + fmt(inv_p) + ", " + fmt(inv_q) + ", " + fmt(inv_r) + ")");
  add("0 <= 1/p < 2 - 2/gamma", inv_p >= 0.0 && inv_p < p_bound, inv_p, "bound " + fmt(p_bound));
  add("0 <= 1/r < min(1 - 1/(1 + 2/n), 2 - 2/gamma)", inv_r >= 0.0 && inv_r < r_bound, inv_r,
      "bound " + fmt(r_bound));
  const double diff = inv_r - inv_q;
  add("1/gamma - 1 <= 1/r - 1/q <= 0", diff >= 1.0 / g - 1.0 && diff <= 0.0, diff,
      "lower " + fmt(1.0 / g - 1.0));

  // Integrability of K against the chosen exponents.
  const int d = params.d;
  bool near_p = true, near_q = true, far_r = true;
  std::string note = "smooth and decaying";
  if (K.kind == PotentialKind::quadratic && K.strength != 0.0) {
    far_r = false;
    note = "gradient grows linearly";
  } else if (K.kind == PotentialKind::power && K.strength != 0.0) {
    const double a = K.scale;
    near_q = a >= 1.0 || inv_q > (1.0 - a) / d;
    far_r = a < 1.0 ? inv_r < (1.0 - a) / d : (a == 1.0 && inv_r == 0.0);
    note = "|grad K| ~ |x|^" + fmt(a - 1.0);
    const double a_low = 1.0 - d * (g - 1.0) / g;
    add("power exponent a in (1 - d(gamma-1)/gamma, 1]", a > a_low && a <= 1.0, a,
        "lower " + fmt(a_low));
  }
  add("K in L^p(B_2R)", near_p, inv_p, note);
  add("grad K in L^q(B_R)", near_q, inv_q, note);
  add("grad K in L^r(R^d \\ B_R)", far_r, inv_r, note);
  return rep;
}

DecayCheck check_decay_margin(const PotentialSpec& V, const PotentialSpec& K, const SpatialGrid& grid) {
  DecayCheck out;
  const double L = grid.half_length();
  for (const PotentialSpec* U : {&V, &K}) {
    const std::string who = U->role == PotentialRole::external ? "V" : "K";
    if (U->unbounded()) {
      out.ok = false;
      out.warnings.push_back(who + " (" + to_string(U->kind) +
                             ") is unbounded; the periodic box distorts it near |x| = L");
    } else if (U->kind == PotentialKind::gaussian || U->kind == PotentialKind::morse) {
      const double peak = std::abs(U->value(0.0));
      const double edge = std::abs(U->value(L));
      if (peak > 0.0 && edge > 1e-8 * peak) {
        out.ok = false;
        out.warnings.push_back(who + " decays only to " + fmt(edge / peak) +
                               " of its peak at |x| = L; wrap-around error exceeds 1e-8");
      }
    }
  }
  return out;
}

}  // namespace kinlim
