#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "kinlim/config.hpp"
#include "kinlim/errors.hpp"
#include "kinlim/field_io.hpp"
#include "kinlim/harness.hpp"
#include "kinlim/kinetic.hpp"
#include "kinlim/macro.hpp"
#include "kinlim/properties.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace kinlim;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kNumerical = 3 };

struct Common {
  std::string config;
  std::string out;
  int threads = -1;
  bool strict = false;
};

std::string base_dir_of(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? "." : path.substr(0, slash);
}

ParsedRun load(const Common& o) {
  if (o.config.empty()) throw ConfigError("a run file is required (--config PATH or positional)");
  ParsedRun pr = parse_run_file(o.config, o.strict);
  for (const auto& w : pr.warnings) std::cerr << "warning: " << w << '\n';
  return pr;
}

/// --out, else KINLIM_OUT, else the run file's [output] dir.
fs::path output_dir(const Common& o, const RunConfig& c) {
  fs::path dir = c.out_dir;
  if (const char* env = std::getenv("KINLIM_OUT"); env && *env) dir = env;
  if (!o.out.empty()) dir = o.out;
  fs::create_directories(dir);
  return dir;
}

template <class F>
void write_file(const fs::path& path, F&& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  body(os);
  if (!os) throw Error("write failed: " + path.string());
}

json failure(const std::string& check, const std::string& detail) {
  return json{{"check", check}, {"detail", detail}};
}

int report(const json& summary, const json& failures) {
  std::cout << summary.dump(2) << '\n';
  if (failures.empty()) return kOk;
  std::cerr << failures.dump(2) << '\n';
  return kCheckFailed;
}

int equilibrium_check(double gamma, int d, const std::vector<double>& rhos, int cells) {
  const ModelParams p = derive_params(gamma, d);
  json fails = json::array();
  std::ostringstream os;
  os.precision(10);
  os << "gamma = " << gamma << ", d = " << d << '\n';
  os << "n = " << p.n << "  (2/(gamma-1) - d = " << 2.0 / (gamma - 1.0) - d << ")\n";
  os << "c = " << p.c_gamma_d << "  b0 = " << p.b0 << "  b1 = " << p.b1 << "  b2 = " << p.b2 << '\n';
  const double ident = std::abs(p.b1 * p.b2 - p.n * p.c_gamma_d) / (p.n * p.c_gamma_d);
  os << "b1 b2 = " << p.b1 * p.b2 << "  n c = " << p.n * p.c_gamma_d << "  rel. error " << ident << '\n';
  if (!(ident <= 1e-12)) fails.push_back(failure("b1 b2 = n c", "relative error " + format_double(ident)));
  if (d <= 2) {
    os << "\n" << "rho,mass,momentum,pressure,int_v2_M,int_psi_M,rho^gamma,(n/2)rho^gamma,max_rel_error\n";
    for (double rho : rhos) {
      if (!(rho > 0.0)) throw ConfigError("--rho values must be positive");
      const MomentRow r = equilibrium_moments(p, rho, cells);
      const double err = moment_row_error(p, r);
      const double rg = std::pow(rho, gamma);
      os << format_double(rho) << ',' << format_double(r.mass) << ',' << format_double(r.momentum) << ','
         << format_double(r.pressure_diag_max) << ',' << format_double(r.v2) << ',' << format_double(r.psi_integral)
         << ',' << format_double(rg) << ',' << format_double(0.5 * p.n * rg) << ',' << format_double(err) << '\n';
      if (!(err <= 1e-6))
        fails.push_back(failure("moment identities at rho = " + format_double(rho),
                                "max relative error " + format_double(err) +
                                    " against mass = rho, momentum = 0, pressure = rho^gamma, int |v|^2 M = d rho^gamma,"
                                    " int Psi_n(M) = rho^gamma"));
    }
  } else {
    os << "(moment table needs d <= 2)\n";
  }
  std::cout << os.str();
  if (fails.empty()) return kOk;
  std::cerr << fails.dump(2) << '\n';
  return kCheckFailed;
}

int kinetic_run(const Common& o) {
  const ParsedRun pr = load(o);
  const RunConfig& c = pr.config;
  const std::string base = base_dir_of(o.config);
  const KineticConfig cfg = kinetic_config(c, base);
  const DensityField rho0 = initial_density(c);
  const KineticRunReport rep = run_kinetic(cfg, well_prepared(cfg, rho0));
  const fs::path dir = output_dir(o, c);
  write_file(dir / "energy.csv", [&](std::ostream& os) { write_energy_csv(os, rep.series); });
  const DensityField rho = density_moment(rep.final_field);
  write_file(dir / "density_final.csv", [&](std::ostream& os) { write_csv(os, rho); });
  if (c.write_fields) {
    save_binary((dir / "f_final.bin").string(), rep.final_field);
    save_binary((dir / "density_final.bin").string(), rho);
  }
  const double budget = c.audit_budget_factor * cfg.dt * cfg.t_final;
  const AuditResult audit = entropy_audit(cfg.params, rep.series, budget);
  double drift = 0.0, min_gap = INFINITY;
  for (const auto& r : rep.series) {
    drift = std::max(drift, std::abs(r.mass - rep.series.front().mass) / rep.series.front().mass);
    min_gap = std::min(min_gap, r.entropy_gap);
  }
  json summary{{"epsilon", cfg.epsilon},     {"steps", rep.steps},
               {"mass_drift", drift},        {"min_entropy_gap", min_gap},
               {"energy_violation", rep.energy_violation},
               {"leak", rep.leak},           {"dissipation_norm", rep.dissipation_norm()},
               {"audit_budget", budget},     {"audit_passed", audit.passed},
               {"output", dir.string()}};
  json fails = json::array();
  for (const auto& f : audit.failures)
    fails.push_back(json{{"check", f.check}, {"t", f.t}, {"magnitude", f.magnitude}});
  return report(summary, fails);
}

int macro_run(const Common& o) {
  const ParsedRun pr = load(o);
  const RunConfig& c = pr.config;
  const MacroConfig cfg = macro_config(c, base_dir_of(o.config));
  const MacroRunReport rep = run_macro(cfg, initial_density(c));
  const fs::path dir = output_dir(o, c);
  write_file(dir / "macro.csv", [&](std::ostream& os) { write_macro_csv(os, rep.series); });
  write_file(dir / "density_final.csv", [&](std::ostream& os) { write_csv(os, rep.final_density); });
  if (c.write_fields) save_binary((dir / "density_final.bin").string(), rep.final_density);
  const double m0 = rep.series.front().mass;
  json summary{{"steps", rep.steps},
               {"mass_drift", std::abs(rep.series.back().mass - m0) / m0},
               {"min_rho", rep.final_density.min()},
               {"F_increase", rep.energy_increase},
               {"free_energy_increase", rep.free_energy_increase},
               {"output", dir.string()}};
  return report(summary, json::array());
}

int limit_study(const Common& o) {
  const ParsedRun pr = load(o);
  const RunConfig& c = pr.config;
  SweepConfig cfg = sweep_config(c, base_dir_of(o.config));
  if (o.threads >= 0) cfg.threads = o.threads;
  const SweepReport rep = run_sweep(cfg);
  const fs::path dir = output_dir(o, c);
  write_file(dir / "sweep_report.csv", [&](std::ostream& os) { write_sweep_csv(os, cfg, rep); });
  const std::string summary = sweep_summary_json(cfg, rep);
  write_file(dir / "sweep_summary.json", [&](std::ostream& os) { os << summary; });
  std::cout << summary;
  if (rep.ok()) return kOk;
  json fails = json::array();
  if (!rep.macro_ok) fails.push_back(failure("macro run", rep.macro_error));
  for (const auto& m : rep.members) {
    if (!m.ok) fails.push_back(failure("kinetic run eps = " + format_double(m.epsilon), m.error));
    for (const auto& f : m.audit.failures)
      fails.push_back(json{{"check", "audit eps = " + format_double(m.epsilon) + ": " + f.check},
                           {"t", f.t},
                           {"magnitude", f.magnitude}});
  }
  std::cerr << fails.dump(2) << '\n';
  return kCheckFailed;
}

int property_suite(std::uint64_t seed, long cases) {
  const PropertyReport rep = run_property_suite(seed, cases);
  std::cout << rep.text();
  if (rep.passed()) return kOk;
  std::cerr << rep.failures_json() << '\n';
  return kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinetic BGK solver, aggregation-diffusion limit and property checks"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  bool help_config = false;
  app.add_flag("--help-config", help_config, "Print every run-file key with its default and exit");

  Common o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config,config", o.config, "Run file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory (default: $KINLIM_OUT, else [output] dir)");
    sub->add_option("--threads", o.threads, "Concurrent runs, 0 = auto");
    sub->add_flag("--strict", o.strict, "Treat warnings as errors");
  };

  auto* eq = app.add_subcommand("equilibrium-check", "Equilibrium moment table and constant identities");
  double gamma = 1.5;
  int d = 1;
  std::vector<double> rhos{0.1, 0.5, 1.0, 2.0, 5.0};
  int cells = 0;
  eq->add_option("--gamma", gamma, "Adiabatic exponent (overrides the run file)");
  eq->add_option("--d", d, "Dimension (overrides the run file)");
  eq->add_option("--rho", rhos, "Densities of the table")->delimiter(',');
  eq->add_option("--cells", cells, "Quadrature cells per axis (default 20000 in 1d, 1200 in 2d)");
  add_common(eq);

  auto* kin = app.add_subcommand("kinetic-run", "One kinetic run at [kinetic] epsilon");
  add_common(kin);
  auto* mac = app.add_subcommand("macro-run", "One run of the limit equation");
  add_common(mac);
  auto* lim = app.add_subcommand("limit-study", "Epsilon sweep against the limit equation");
  add_common(lim);
  auto* prop = app.add_subcommand("property-suite", "Seeded property batteries of every module");
  std::uint64_t seed = 42;
  long cases = 100;
  prop->add_option("--seed", seed, "Generator seed");
  prop->add_option("--cases", cases, "Random cases per property")->check(CLI::PositiveNumber);
  add_common(prop);

  try {
    if (argc > 1 && std::string(argv[1]) == "--help-config") {
      std::cout << config_reference();
      return kOk;
    }
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*eq) {
      if (!o.config.empty()) {
        const ParsedRun pr = load(o);
        if (eq->count("--gamma") == 0) gamma = pr.config.gamma;
        if (eq->count("--d") == 0) d = pr.config.d;
      }
      return equilibrium_check(gamma, d, rhos, cells > 0 ? cells : default_moment_cells(d));
    }
    if (*kin) return kinetic_run(o);
    if (*mac) return macro_run(o);
    if (*lim) return limit_study(o);
    if (*prop) return property_suite(seed, cases);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const UnsupportedSpec& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
