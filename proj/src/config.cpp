#include "kinlim/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "kinlim/errors.hpp"
#include "kinlim/field_io.hpp"
#include "kinlim/model.hpp"

namespace kinlim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, std::size_t line, const std::string& key) {
  const std::string t = trim(v);
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(x))
    throw ConfigError(key + ": expected a finite real number, got '" + t + "'", line);
  return x;
}

int parse_int(const std::string& v, std::size_t line, const std::string& key) {
  const std::string t = trim(v);
  char* end = nullptr;
  errno = 0;
  const long x = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || x < INT32_MIN || x > INT32_MAX)
    throw ConfigError(key + ": expected an integer, got '" + t + "'", line);
  return int(x);
}

bool parse_bool(const std::string& v, std::size_t line, const std::string& key) {
  const std::string t = trim(v);
  if (t == "true") return true;
  if (t == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + t + "'", line);
}

std::vector<double> parse_list(const std::string& v, std::size_t line, const std::string& key) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, line, key));
  return out;
}

template <class E, std::size_t N>
E parse_enum(const std::string& v, const std::pair<const char*, E> (&table)[N], std::size_t line,
             const std::string& key) {
  const std::string t = trim(v);
  std::string options;
  for (const auto& [name, value] : table) {
    if (t == name) return value;
    options += options.empty() ? name : std::string(", ") + name;
  }
  throw ConfigError(key + ": '" + t + "' is not one of " + options, line);
}

template <class E, std::size_t N>
const char* enum_name(E v, const std::pair<const char*, E> (&table)[N]) {
  for (const auto& [name, value] : table)
    if (value == v) return name;
  return "?";
}

constexpr std::pair<const char*, PotentialKind> kPotentialKinds[] = {
    {"zero", PotentialKind::zero},   {"quadratic", PotentialKind::quadratic}, {"gaussian", PotentialKind::gaussian},
    {"morse", PotentialKind::morse}, {"power", PotentialKind::power},         {"tabulated", PotentialKind::tabulated}};
constexpr std::pair<const char*, Splitting> kSplittings[] = {{"lie", Splitting::lie}, {"strang", Splitting::strang}};
constexpr std::pair<const char*, Interpolation> kInterpolations[] = {{"linear", Interpolation::linear},
                                                                     {"cubic", Interpolation::cubic}};
constexpr std::pair<const char*, ConvolutionMethod> kConvolutions[] = {{"direct", ConvolutionMethod::direct},
                                                                       {"table", ConvolutionMethod::table},
                                                                       {"fft", ConvolutionMethod::fft},
                                                                       {"automatic", ConvolutionMethod::automatic}};
constexpr std::pair<const char*, InitialKind> kInitialKinds[] = {{"gaussian", InitialKind::gaussian},
                                                                 {"uniform", InitialKind::uniform},
                                                                 {"barenblatt", InitialKind::barenblatt}};

std::string list_string(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s;
}

struct Key {
  const char* section;
  const char* name;
  const char* doc;
  std::function<void(RunConfig&, const std::string&, std::size_t)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define KL_REAL(sec, key, field, doc)                                                                      \
  Key{sec, key, doc, [](RunConfig& c, const std::string& v, std::size_t l) { c.field = parse_double(v, l, key); }, \
      [](const RunConfig& c) { return format_double(c.field); }}
#define KL_INT(sec, key, field, doc)                                                                    \
  Key{sec, key, doc, [](RunConfig& c, const std::string& v, std::size_t l) { c.field = parse_int(v, l, key); }, \
      [](const RunConfig& c) { return std::to_string(c.field); }}
#define KL_BOOL(sec, key, field, doc)                                                                    \
  Key{sec, key, doc, [](RunConfig& c, const std::string& v, std::size_t l) { c.field = parse_bool(v, l, key); }, \
      [](const RunConfig& c) { return std::string(c.field ? "true" : "false"); }}
#define KL_LIST(sec, key, field, doc)                                                                    \
  Key{sec, key, doc, [](RunConfig& c, const std::string& v, std::size_t l) { c.field = parse_list(v, l, key); }, \
      [](const RunConfig& c) { return list_string(c.field); }}
#define KL_ENUM(sec, key, field, table, doc)                                                               \
  Key{sec, key, doc,                                                                                       \
      [](RunConfig& c, const std::string& v, std::size_t l) { c.field = parse_enum(v, table, l, key); }, \
      [](const RunConfig& c) { return std::string(enum_name(c.field, table)); }}
#define KL_STR(sec, key, field, doc)                                                                      \
  Key{sec, key, doc, [](RunConfig& c, const std::string& v, std::size_t) { c.field = trim(v); },          \
      [](const RunConfig& c) { return c.field; }}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      KL_REAL("model", "gamma", gamma, "adiabatic exponent, 1 < gamma <= 1 + 2/(d+2) (required)"),
      KL_INT("model", "d", d, "spatial dimension, 1 or 2 (required)"),
      KL_REAL("grids", "L", L, "half length of the periodic box [-L, L)^d"),
      KL_INT("grids", "Nx", Nx, "cells per spatial axis, even and >= 8"),
      KL_INT("grids", "Nv", Nv, "cells per velocity axis, even"),
      KL_REAL("grids", "v_max", v_max, "velocity box [-v_max, v_max)^d"),
      KL_ENUM("potentials", "V", V.kind, kPotentialKinds, "external potential kind"),
      KL_REAL("potentials", "V_strength", V.strength, "quadratic a, gaussian/morse amplitude, power c_a"),
      KL_REAL("potentials", "V_scale", V.scale, "gaussian width, morse rate, power exponent"),
      KL_REAL("potentials", "V_offset", V.offset, "power offset c_b"),
      KL_STR("potentials", "V_file", V.file, "tabulated samples, one per cell"),
      KL_ENUM("potentials", "K", K.kind, kPotentialKinds, "interaction potential kind"),
      KL_REAL("potentials", "K_strength", K.strength, "as V_strength"),
      KL_REAL("potentials", "K_scale", K.scale, "as V_scale"),
      KL_REAL("potentials", "K_offset", K.offset, "as V_offset"),
      KL_STR("potentials", "K_file", K.file, "tabulated samples, one per offset cell"),
      KL_REAL("potentials", "inv_p", inv_p, "1/p of the integrability exponents"),
      KL_REAL("potentials", "inv_q", inv_q, "1/q"),
      KL_REAL("potentials", "inv_r", inv_r, "1/r"),
      KL_BOOL("potentials", "decay_check", decay_check,
              "fail on potentials that do not decay below 1e-8 of their peak at |x| = L"),
      KL_REAL("kinetic", "epsilon", epsilon, "scaling parameter of kinetic-run"),
      KL_REAL("kinetic", "dt", dt, "time step"),
      KL_REAL("kinetic", "t_final", t_final, "final time, an integer multiple of dt"),
      KL_ENUM("kinetic", "splitting", splitting, kSplittings, "lie or strang"),
      KL_ENUM("kinetic", "interpolation", interpolation, kInterpolations, "transport interpolation"),
      KL_REAL("kinetic", "rho_cap", rho_cap, "a-priori density ceiling"),
      KL_REAL("kinetic", "velocity_margin", velocity_margin, "v_max >= margin * support radius of rho_cap"),
      KL_INT("kinetic", "diag_stride", diag_stride, "steps between diagnostics"),
      KL_ENUM("kinetic", "convolution", convolution, kConvolutions, "interaction convolution algorithm"),
      KL_REAL("macro", "dt", macro_dt, "time step, 0 inherits [kinetic] dt"),
      KL_REAL("macro", "t_final", macro_t_final, "final time, 0 inherits [kinetic] t_final"),
      KL_INT("macro", "diag_stride", macro_diag_stride, "0 inherits [kinetic] diag_stride"),
      KL_LIST("sweep", "epsilons", epsilons, "strictly descending, positive"),
      KL_LIST("sweep", "p_list", p_list, "space-time L^p exponents in [1, gamma)"),
      KL_LIST("sweep", "comparison_times", comparison_times, "empty: the common diagnostic times"),
      KL_INT("sweep", "threads", threads, "concurrent runs, 0 = hardware concurrency"),
      KL_REAL("sweep", "audit_budget_factor", audit_budget_factor, "entropy audit budget = factor * dt * t_final"),
      KL_ENUM("initial", "kind", initial, kInitialKinds, "gaussian, uniform or barenblatt"),
      KL_REAL("initial", "mass", initial_mass, "total mass (gaussian, uniform)"),
      KL_REAL("initial", "width", initial_width, "gaussian standard deviation"),
      KL_REAL("initial", "center", initial_center, "gaussian center on every axis"),
      KL_REAL("initial", "C", barenblatt_C, "barenblatt constant"),
      KL_REAL("initial", "t0", barenblatt_t0, "barenblatt time"),
      KL_STR("output", "dir", out_dir, "output directory"),
      KL_BOOL("output", "write_fields", write_fields, "write final field dumps"),
  };
  return table;
}

const std::set<std::string> kSections = {"model", "grids", "potentials", "kinetic", "macro", "sweep", "initial", "output"};

std::vector<double> load_samples(const std::string& path, std::size_t line) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read potential table '" + path + "'", line);
  std::vector<double> out;
  std::string s;
  std::size_t k = 0;
  while (std::getline(in, s)) {
    ++k;
    s = trim(s);
    if (s.empty() || s[0] == '#') continue;
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(x))
      throw ConfigError("potential table '" + path + "' line " + std::to_string(k) + ": not a number", line);
    out.push_back(x);
  }
  return out;
}

std::string join_path(const std::string& base, const std::string& file) {
  if (file.empty() || file[0] == '/' || base.empty() || base == ".") return file;
  return base + "/" + file;
}

PotentialSpec build_potential(const PotentialSettings& s, PotentialRole role, const std::string& base_dir,
                              std::size_t line) {
  switch (s.kind) {
    case PotentialKind::zero: return PotentialSpec::zero(role);
    case PotentialKind::quadratic: return PotentialSpec::quadratic(s.strength, role);
    case PotentialKind::gaussian: return PotentialSpec::gaussian(s.strength, s.scale, role);
    case PotentialKind::morse: return PotentialSpec::morse(s.strength, s.scale, role);
    case PotentialKind::power: return PotentialSpec::power(s.strength, s.scale, s.offset, role);
    case PotentialKind::tabulated:
      if (s.file.empty()) throw ConfigError("tabulated potential needs a file", line);
      return PotentialSpec::tabulated(load_samples(join_path(base_dir, s.file), line), role);
  }
  return PotentialSpec::zero(role);
}

void validate_config(ParsedRun& pr, bool strict, const std::string& base_dir) {
  const RunConfig& c = pr.config;
  auto line = [&](const char* k) { return pr.line_of(k); };
  auto fail = [&](const char* k, const std::string& what) { throw ConfigError(std::string(k) + ": " + what, line(k)); };

  ModelParams p;
  try {
    p = derive_params(c.gamma, c.d);
  } catch (const DomainError& e) {
    throw ConfigError(e.what(), c.d < 1 ? line("model.d") : line("model.gamma"));
  }
  if (c.d != 1 && c.d != 2) fail("model.d", "simulations support d = 1 or 2");
  if (!(c.L > 0.0)) fail("grids.L", "must be positive");
  if (c.Nx < 8 || c.Nx % 2) fail("grids.Nx", "must be even and >= 8");
  if (c.Nv < 2 || c.Nv % 2) fail("grids.Nv", "must be even and >= 2");
  if (!(c.v_max > 0.0)) fail("grids.v_max", "must be positive");

  PotentialSpec V, K;
  try {
    V = build_potential(c.V, PotentialRole::external, base_dir, line("potentials.V"));
  } catch (const DomainError& e) {
    throw ConfigError(e.what(), line("potentials.V"));
  }
  try {
    K = build_potential(c.K, PotentialRole::interaction, base_dir, line("potentials.K"));
  } catch (const DomainError& e) {
    throw ConfigError(e.what(), line("potentials.K"));
  }
  const SpatialGrid grid = spatial_grid(c);
  if (!V.builtin() && V.samples.size() != grid.size())
    fail("potentials.V_file", "expected " + std::to_string(grid.size()) + " samples, got " + std::to_string(V.samples.size()));
  if (!K.builtin() && K.samples.size() != grid.size())
    fail("potentials.K_file", "expected " + std::to_string(grid.size()) + " samples, got " + std::to_string(K.samples.size()));

  if (V.builtin() && K.builtin()) {
    const ValidationReport rep = validate_assumptions(V, K, p, c.inv_p, c.inv_q, c.inv_r, 64);
    for (const auto& chk : rep.checks) {
      if (chk.pass) continue;
      const std::string& n = chk.name;
      const char* key = n.rfind("HV", 0) == 0 ? "potentials.V"
                        : n.rfind("HK", 0) == 0 || n.find("K in") != std::string::npos || n.rfind("power", 0) == 0
                            ? "potentials.K"
                        : n.rfind("0 <= 1/p", 0) == 0 ? "potentials.inv_p"
                        : n.rfind("0 <= 1/r", 0) == 0 ? "potentials.inv_r"
                                                      : "potentials.inv_q";
      fail(key, "assumption '" + n + "' fails (" + chk.detail + ")");
    }
    const DecayCheck decay = check_decay_margin(V, K, grid);
    if (!decay.ok) {
      if (c.decay_check || strict) {
        std::string msg = decay.warnings.empty() ? "decay margin check failed" : decay.warnings.front();
        if (!c.decay_check) msg += " (--strict)";
        fail("potentials.decay_check", msg);
      }
      for (const auto& w : decay.warnings) pr.warnings.push_back(w);
    }
  }

  if (!(c.epsilon > 0.0)) fail("kinetic.epsilon", "must be positive");
  if (!(c.dt > 0.0)) fail("kinetic.dt", "must be positive");
  if (!(c.t_final >= 0.0)) fail("kinetic.t_final", "must be nonnegative");
  auto multiple = [](double T, double dt) {
    const double s = T / dt;
    return std::abs(s - std::round(s)) <= 1e-9 * std::max(1.0, s);
  };
  if (!multiple(c.t_final, c.dt)) fail("kinetic.t_final", "must be an integer multiple of dt");
  if (!(c.rho_cap > 0.0)) fail("kinetic.rho_cap", "must be positive");
  if (!(c.velocity_margin >= 1.0)) fail("kinetic.velocity_margin", "must be >= 1");
  if (c.diag_stride < 1) fail("kinetic.diag_stride", "must be >= 1");
  const double need = c.velocity_margin * support_radius(p, c.rho_cap);
  if (need > c.v_max)
    fail("kinetic.rho_cap", "needs v_max >= " + format_double(need) + " (margin times the support radius of rho_cap)");

  if (!(c.macro_dt >= 0.0)) fail("macro.dt", "must be nonnegative");
  if (!(c.macro_t_final >= 0.0)) fail("macro.t_final", "must be nonnegative");
  if (c.macro_diag_stride < 0) fail("macro.diag_stride", "must be nonnegative");
  const double mdt = c.macro_dt > 0.0 ? c.macro_dt : c.dt;
  const double mT = c.macro_t_final > 0.0 ? c.macro_t_final : c.t_final;
  if (!multiple(mT, mdt)) fail("macro.t_final", "must be an integer multiple of the macro dt");

  if (c.epsilons.empty()) fail("sweep.epsilons", "needs at least one value");
  for (std::size_t i = 0; i < c.epsilons.size(); ++i) {
    if (!(c.epsilons[i] > 0.0)) fail("sweep.epsilons", "values must be positive");
    if (i && !(c.epsilons[i] < c.epsilons[i - 1])) fail("sweep.epsilons", "values must be strictly descending");
  }
  for (double q : c.p_list)
    if (!(q >= 1.0 && q < c.gamma)) fail("sweep.p_list", "values must lie in [1, gamma)");
  for (double t : c.comparison_times)
    if (!(t >= 0.0 && t <= std::min(c.t_final, mT) + 1e-12)) fail("sweep.comparison_times", "values must lie in [0, t_final]");
  if (c.threads < 0) fail("sweep.threads", "must be >= 0");
  if (!(c.audit_budget_factor >= 0.0)) fail("sweep.audit_budget_factor", "must be nonnegative");

  if (!(c.initial_mass > 0.0)) fail("initial.mass", "must be positive");
  if (!(c.initial_width > 0.0)) fail("initial.width", "must be positive");
  if (!(c.barenblatt_C > 0.0)) fail("initial.C", "must be positive");
  if (!(c.barenblatt_t0 > 0.0)) fail("initial.t0", "must be positive");
  const double rmax = initial_density(c).max();
  if (rmax > c.rho_cap)
    fail("kinetic.rho_cap", "initial maximum density " + format_double(rmax) + " exceeds rho_cap");
  if (c.out_dir.empty()) fail("output.dir", "must not be empty");
}

}  // namespace

const char* to_string(InitialKind k) { return enum_name(k, kInitialKinds); }

std::size_t ParsedRun::line_of(const std::string& section_key) const {
  const auto it = lines.find(section_key);
  if (it != lines.end()) return it->second;
  const auto sec = lines.find("[" + section_key.substr(0, section_key.find('.')) + "]");
  return sec != lines.end() ? sec->second : 0;
}

ParsedRun parse_run_text(const std::string& text, bool strict, const std::string& base_dir) {
  ParsedRun pr;
  std::istringstream in(text);
  std::string raw, section;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("malformed section header '" + s + "'", lineno);
      section = trim(s.substr(1, s.size() - 2));
      if (!kSections.count(section)) throw ConfigError("unknown section [" + section + "]", lineno);
      if (pr.lines.count("[" + section + "]")) throw ConfigError("duplicate section [" + section + "]", lineno);
      pr.lines["[" + section + "]"] = lineno;
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + s + "'", lineno);
    if (section.empty()) throw ConfigError("key outside of any section", lineno);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    const std::string full = section + "." + key;
    const auto& table = keys();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const Key& k) { return section == k.section && key == k.name; });
    if (it == table.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]", lineno);
    if (pr.lines.count(full))
      throw ConfigError("duplicate key '" + key + "' in [" + section + "] (first at line " +
                            std::to_string(pr.lines[full]) + ")",
                        lineno);
    pr.lines[full] = lineno;
    it->set(pr.config, value, lineno);
  }
  if (!pr.lines.count("model.gamma")) throw ConfigError("missing required key [model] gamma");
  if (!pr.lines.count("model.d")) throw ConfigError("missing required key [model] d");
  validate_config(pr, strict, base_dir);
  return pr;
}

ParsedRun parse_run_file(const std::string& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read run file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto slash = path.find_last_of('/');
  return parse_run_text(ss.str(), strict, slash == std::string::npos ? "." : path.substr(0, slash));
}

std::string serialize(const RunConfig& c) {
  std::ostringstream os;
  std::string section;
  for (const auto& k : keys()) {
    if (section != k.section) {
      if (!section.empty()) os << '\n';
      section = k.section;
      os << '[' << section << "]\n";
    }
    os << k.name << " = " << k.get(c) << '\n';
  }
  return os.str();
}

std::string config_reference() {
  const RunConfig defaults;
  std::ostringstream os;
  std::string section;
  for (const auto& k : keys()) {
    if (section != k.section) {
      section = k.section;
      os << '[' << section << "]\n";
    }
    os << "  " << k.name << " = " << k.get(defaults) << "\n      " << k.doc << '\n';
  }
  return os.str();
}

ModelParams model_params(const RunConfig& c) { return derive_params(c.gamma, c.d); }
SpatialGrid spatial_grid(const RunConfig& c) { return SpatialGrid(c.d, c.L, c.Nx); }
VelocityGrid velocity_grid(const RunConfig& c) { return VelocityGrid(c.d, c.v_max, c.Nv); }

PotentialSpec external_potential(const RunConfig& c, const std::string& base_dir) {
  return build_potential(c.V, PotentialRole::external, base_dir, 0);
}

PotentialSpec interaction_potential(const RunConfig& c, const std::string& base_dir) {
  return build_potential(c.K, PotentialRole::interaction, base_dir, 0);
}

KineticConfig kinetic_config(const RunConfig& c, const std::string& base_dir) {
  KineticConfig k;
  k.params = model_params(c);
  k.xgrid = spatial_grid(c);
  k.vgrid = velocity_grid(c);
  k.epsilon = c.epsilon;
  k.dt = c.dt;
  k.t_final = c.t_final;
  k.splitting = c.splitting;
  k.interpolation = c.interpolation;
  k.V = external_potential(c, base_dir);
  k.K = interaction_potential(c, base_dir);
  k.rho_cap = c.rho_cap;
  k.velocity_margin = c.velocity_margin;
  k.diag_stride = c.diag_stride;
  k.convolution = c.convolution;
  return k;
}

MacroConfig macro_config(const RunConfig& c, const std::string& base_dir) {
  MacroConfig m;
  m.params = model_params(c);
  m.grid = spatial_grid(c);
  m.dt = c.macro_dt > 0.0 ? c.macro_dt : c.dt;
  m.t_final = c.macro_t_final > 0.0 ? c.macro_t_final : c.t_final;
  m.V = external_potential(c, base_dir);
  m.K = interaction_potential(c, base_dir);
  m.diag_stride = c.macro_diag_stride > 0 ? c.macro_diag_stride : c.diag_stride;
  m.convolution = c.convolution;
  return m;
}

double barenblatt(double m, int d, double C, double t, double r2) {
  const double alpha = d / (d * (m - 1.0) + 2.0);
  const double beta = alpha / d;
  const double k = alpha * (m - 1.0) / (2.0 * m * d);
  const double w = C - k * r2 * std::pow(t, -2.0 * beta);
  return w > 0.0 ? std::pow(t, -alpha) * std::pow(w, 1.0 / (m - 1.0)) : 0.0;
}

DensityField initial_density(const RunConfig& c) {
  const SpatialGrid g = spatial_grid(c);
  DensityField rho(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.unflatten(i);
    double r2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const double x = g.center(idx[a]) - (c.initial == InitialKind::gaussian ? c.initial_center : 0.0);
      r2 += x * x;
    }
    switch (c.initial) {
      case InitialKind::gaussian: rho.values[i] = std::exp(-0.5 * r2 / (c.initial_width * c.initial_width)); break;
      case InitialKind::uniform: rho.values[i] = 1.0; break;
      case InitialKind::barenblatt: rho.values[i] = barenblatt(c.gamma, c.d, c.barenblatt_C, c.barenblatt_t0, r2); break;
    }
  }
  if (c.initial != InitialKind::barenblatt) {
    const double m = rho.total_mass();
    for (double& v : rho.values) v *= c.initial_mass / m;
  }
  return rho;
}

SweepConfig sweep_config(const RunConfig& c, const std::string& base_dir) {
  SweepConfig s;
  s.epsilons = c.epsilons;
  s.kinetic = kinetic_config(c, base_dir);
  s.macro = macro_config(c, base_dir);
  s.rho0 = initial_density(c);
  s.p_list = c.p_list;
  s.comparison_times = c.comparison_times;
  s.threads = c.threads;
  s.audit_budget_factor = c.audit_budget_factor;
  return s;
}

}  // namespace kinlim
