#pragma once

// Run files: line-oriented `key = value` text grouped in sections
//
//   [model] [grids] [potentials] [kinetic] [macro] [sweep] [initial] [output]
//
// `#` starts a comment. Only [model] gamma and d are required; every other
// key has the default shown by `kinlim --help-config`.

#include <map>
#include <string>
#include <vector>

#include "kinlim/fields.hpp"
#include "kinlim/forces.hpp"
#include "kinlim/harness.hpp"
#include "kinlim/kinetic.hpp"
#include "kinlim/macro.hpp"

namespace kinlim {

struct PotentialSettings {
  PotentialKind kind = PotentialKind::zero;
  double strength = 0.0;
  double scale = 1.0;
  double offset = 0.0;
  std::string file;  // tabulated samples, one value per line
  bool operator==(const PotentialSettings&) const = default;
};

enum class InitialKind { gaussian, uniform, barenblatt };
const char* to_string(InitialKind k);

struct RunConfig {
  // [model]
  double gamma = 1.5;
  int d = 1;
  // [grids]
  double L = 4.0;
  int Nx = 128;
  int Nv = 256;
  double v_max = 3.5;
  // [potentials]
  PotentialSettings V;
  PotentialSettings K;
  double inv_p = 0.0;
  double inv_q = 0.0;
  double inv_r = 0.0;
  bool decay_check = true;
  // [kinetic]
  double epsilon = 0.1;
  double dt = 1e-3;
  double t_final = 0.5;
  Splitting splitting = Splitting::lie;
  Interpolation interpolation = Interpolation::linear;
  double rho_cap = 1.0;
  double velocity_margin = 1.25;
  int diag_stride = 10;
  ConvolutionMethod convolution = ConvolutionMethod::automatic;
  // [macro]; 0 inherits the [kinetic] value
  double macro_dt = 0.0;
  double macro_t_final = 0.0;
  int macro_diag_stride = 0;
  // [sweep]
  std::vector<double> epsilons{0.4, 0.2, 0.1, 0.05};
  std::vector<double> p_list{1.0};
  std::vector<double> comparison_times;
  int threads = 0;
  double audit_budget_factor = 2.0;
  // [initial]
  InitialKind initial = InitialKind::gaussian;
  double initial_mass = 1.0;
  double initial_width = 0.6;
  double initial_center = 0.0;
  double barenblatt_C = 0.1;
  double barenblatt_t0 = 1.0;
  // [output]
  std::string out_dir = "out";
  bool write_fields = true;

  bool operator==(const RunConfig&) const = default;
};

struct ParsedRun {
  RunConfig config;
  /// "section.key" -> line of its occurrence.
  std::map<std::string, std::size_t> lines;
  std::vector<std::string> warnings;

  std::size_t line_of(const std::string& section_key) const;
};

/// Parses and validates. Throws ConfigError with the offending line on
/// syntax errors, unknown sections or keys, duplicates (at the second
/// occurrence), malformed values and failed validation. With `strict`,
/// warnings (decay margin) are errors too.
ParsedRun parse_run_text(const std::string& text, bool strict = false,
                         const std::string& base_dir = ".");
ParsedRun parse_run_file(const std::string& path, bool strict = false);

/// Every key with its value; parse_run_text(serialize(c)).config == c.
std::string serialize(const RunConfig& c);
/// Reference page of all keys with their defaults.
std::string config_reference();

ModelParams model_params(const RunConfig& c);
SpatialGrid spatial_grid(const RunConfig& c);
VelocityGrid velocity_grid(const RunConfig& c);
/// Built-in potentials from the settings; tabulated ones load their file
/// relative to `base_dir`.
PotentialSpec external_potential(const RunConfig& c, const std::string& base_dir = ".");
PotentialSpec interaction_potential(const RunConfig& c, const std::string& base_dir = ".");
KineticConfig kinetic_config(const RunConfig& c, const std::string& base_dir = ".");
MacroConfig macro_config(const RunConfig& c, const std::string& base_dir = ".");
DensityField initial_density(const RunConfig& c);
SweepConfig sweep_config(const RunConfig& c, const std::string& base_dir = ".");

/// Barenblatt profile of drho/dt = Lap rho^m at time t:
/// t^-alpha (C - k |x|^2 t^{-2 beta})_+^{1/(m-1)}, alpha = d/(d(m-1)+2),
/// beta = alpha/d, k = alpha (m-1)/(2 m d).
double barenblatt(double m, int d, double C, double t, double r2);

}  // namespace kinlim
