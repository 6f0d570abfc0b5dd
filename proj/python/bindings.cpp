#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>
#include <optional>
#include <sstream>

#include "kinlim/config.hpp"
#include "kinlim/errors.hpp"
#include "kinlim/harness.hpp"
#include "kinlim/kinetic.hpp"
#include "kinlim/macro.hpp"
#include "kinlim/model.hpp"
#include "kinlim/properties.hpp"
#include "kinlim/rng.hpp"

namespace py = pybind11;
using namespace kinlim;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

template <class Row, class Get>
py::array_t<double> column(const std::vector<Row>& rows, Get get) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const Row& r : rows) out.push_back(get(r));
  return to_array(out);
}

py::array_t<double> cell_centers(const SpatialGrid& g) {
  std::vector<double> x(g.cells_per_axis());
  for (int i = 0; i < g.cells_per_axis(); ++i) x[i] = g.center(i);
  return to_array(x);
}

py::array_t<double> density_array(const DensityField& rho) {
  const int n = rho.grid.cells_per_axis();
  if (rho.grid.dim() == 1) return to_array(rho.values);
  py::array_t<double> a(std::vector<py::ssize_t>{n, n});
  std::copy(rho.values.begin(), rho.values.end(), a.mutable_data());
  return a;
}

py::dict check_dict(const PropertyCheck& c) {
  py::dict d;
  d["module"] = c.module;
  d["name"] = c.name;
  d["pass"] = c.pass;
  d["informational"] = c.informational;
  d["cases"] = c.cases;
  d["violations"] = c.violations;
  d["worst"] = c.worst;
  d["bound"] = c.bound;
  d["detail"] = c.detail;
  return d;
}

// Parsed run file bound to the directory tabulated potentials are read from.
struct Run {
  ParsedRun parsed;
  std::string base_dir = ".";

  const RunConfig& config() const { return parsed.config; }

  py::dict kinetic(std::optional<double> epsilon) const {
    KineticConfig kc = kinetic_config(config(), base_dir);
    if (epsilon) kc.epsilon = *epsilon;
    const DensityField rho0 = initial_density(config());
    KineticRunReport r;
    {
      py::gil_scoped_release release;
      r = run_kinetic(kc, well_prepared(kc, rho0));
    }
    const auto& s = r.series;
    py::dict d;
    d["t"] = column(s, [](const EnergyReport& e) { return e.t; });
    d["mass"] = column(s, [](const EnergyReport& e) { return e.mass; });
    d["E"] = column(s, [](const EnergyReport& e) { return e.energy; });
    d["entropy_gap"] = column(s, [](const EnergyReport& e) { return e.entropy_gap; });
    d["cum_dissipation"] = column(s, [](const EnergyReport& e) { return e.cum_dissipation; });
    d["x2_moment"] = column(s, [](const EnergyReport& e) { return e.x2_moment; });
    d["m_l1"] = column(s, [](const EnergyReport& e) { return e.m_l1; });
    d["x"] = cell_centers(kc.xgrid);
    d["density_final"] = density_array(density_moment(r.final_field));
    d["steps"] = r.steps;
    d["leak"] = r.leak;
    d["dissipation_norm"] = r.dissipation_norm();
    d["energy_violation"] = r.energy_violation;
    return d;
  }

  py::dict macro() const {
    const MacroConfig mc = macro_config(config(), base_dir);
    const DensityField rho0 = initial_density(config());
    MacroRunReport r;
    {
      py::gil_scoped_release release;
      r = run_macro(mc, rho0);
    }
    const auto& s = r.series;
    py::dict d;
    d["t"] = column(s, [](const MacroReport& e) { return e.t; });
    d["mass"] = column(s, [](const MacroReport& e) { return e.mass; });
    d["F_energy"] = column(s, [](const MacroReport& e) { return e.F_energy; });
    d["free_energy"] = column(s, [](const MacroReport& e) { return e.free_energy; });
    d["min_rho"] = column(s, [](const MacroReport& e) { return e.min_rho; });
    d["max_rho"] = column(s, [](const MacroReport& e) { return e.max_rho; });
    d["x"] = cell_centers(mc.grid);
    d["density_final"] = density_array(r.final_density);
    d["steps"] = r.steps;
    return d;
  }

  py::dict sweep(std::optional<int> threads) const {
    SweepConfig sc = sweep_config(config(), base_dir);
    if (threads) sc.threads = *threads;
    SweepReport r;
    {
      py::gil_scoped_release release;
      r = run_sweep(sc);
    }
    std::ostringstream csv;
    write_sweep_csv(csv, sc, r);
    py::dict d;
    d["epsilon"] = column(r.members, [](const SweepMember& m) { return m.epsilon; });
    d["l1_dist"] = column(r.members, [](const SweepMember& m) { return m.l1_dist; });
    d["diss_norm"] = column(r.members, [](const SweepMember& m) { return m.diss_norm; });
    d["slope"] = r.slope.slope;
    d["l1_strictly_decreasing"] = r.l1_strictly_decreasing;
    d["uniform_bounds_ok"] = r.uniform_bounds_ok;
    d["ok"] = r.ok();
    d["csv"] = csv.str();
    d["summary_json"] = sweep_summary_json(sc, r);
    return d;
  }
};

Run make_run(ParsedRun pr, std::string base) { return Run{std::move(pr), std::move(base)}; }

}  // namespace

PYBIND11_MODULE(_kinlim, m) {
  m.doc() = "Kinetic BGK solver with polytropic equilibria and its aggregation-diffusion limit";

  auto base = py::register_exception<Error>(m, "KinlimError", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ConsistencyError>(m, "ConsistencyError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<TruncationError>(m, "TruncationError", base.ptr());
  py::register_exception<StabilityError>(m, "StabilityError", base.ptr());
  py::register_exception<NumericalFailure>(m, "NumericalFailure", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<UnsupportedSpec>(m, "UnsupportedSpec", base.ptr());

  py::class_<ModelParams>(m, "ModelParams")
      .def_readonly("gamma", &ModelParams::gamma)
      .def_readonly("d", &ModelParams::d)
      .def_readonly("n", &ModelParams::n)
      .def_readonly("c", &ModelParams::c_gamma_d)
      .def_readonly("b0", &ModelParams::b0)
      .def_readonly("b1", &ModelParams::b1)
      .def_readonly("b2", &ModelParams::b2)
      .def("__repr__", [](const ModelParams& p) {
        std::ostringstream os;
        os.precision(17);
        os << "ModelParams(gamma=" << p.gamma << ", d=" << p.d << ", n=" << p.n << ", c=" << p.c_gamma_d << ")";
        return os.str();
      });

  m.def("max_gamma", &max_gamma, py::arg("d"), "Largest admissible gamma, 1 + 2/(d+2).");
  m.def("derive_params", &derive_params, py::arg("gamma"), py::arg("d"));
  m.def("support_radius", &support_radius, py::arg("params"), py::arg("rho"));
  m.def(
      "equilibrium_profile",
      [](const ModelParams& p, double rho, const std::vector<double>& speed) {
        std::vector<double> out(speed.size());
        for (std::size_t j = 0; j < speed.size(); ++j) out[j] = equilibrium_value_sq(p, rho, speed[j] * speed[j]);
        return to_array(out);
      },
      py::arg("params"), py::arg("rho"), py::arg("speed"),
      "Equilibrium evaluated at the given speeds |v|.");
  m.def(
      "equilibrium_moments",
      [](const ModelParams& p, double rho, std::optional<int> cells) {
        const MomentRow r = equilibrium_moments(p, rho, cells.value_or(default_moment_cells(p.d)));
        py::dict d;
        d["rho"] = r.rho;
        d["mass"] = r.mass;
        d["momentum"] = r.momentum;
        d["pressure_diag_min"] = r.pressure_diag_min;
        d["pressure_diag_max"] = r.pressure_diag_max;
        d["pressure_offdiag"] = r.pressure_offdiag;
        d["v2"] = r.v2;
        d["psi_integral"] = r.psi_integral;
        d["entropy"] = r.entropy;
        return d;
      },
      py::arg("params"), py::arg("rho"), py::arg("cells") = py::none());
  m.def(
      "property_suite",
      [](std::uint64_t seed, long cases) {
        PropertyReport r;
        {
          py::gil_scoped_release release;
          r = run_property_suite(seed, cases);
        }
        py::list checks;
        for (const auto& c : r.checks) checks.append(check_dict(c));
        py::dict d;
        d["passed"] = r.passed();
        d["text"] = r.text();
        d["checks"] = checks;
        return d;
      },
      py::arg("seed") = 42, py::arg("cases") = 100);

  py::class_<Xorshift64Star>(m, "Xorshift64Star")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("next", &Xorshift64Star::next)
      .def("uniform", py::overload_cast<>(&Xorshift64Star::uniform));

  py::class_<Run>(m, "Run")
      .def_property_readonly("warnings", [](const Run& r) { return r.parsed.warnings; })
      .def_property_readonly("gamma", [](const Run& r) { return r.config().gamma; })
      .def_property_readonly("d", [](const Run& r) { return r.config().d; })
      .def_property_readonly("epsilon", [](const Run& r) { return r.config().epsilon; })
      .def_property_readonly("epsilons", [](const Run& r) { return r.config().epsilons; })
      .def("serialize", [](const Run& r) { return serialize(r.config()); })
      .def("initial_density", [](const Run& r) { return density_array(initial_density(r.config())); })
      .def("run_kinetic", &Run::kinetic, py::arg("epsilon") = py::none())
      .def("run_macro", &Run::macro)
      .def("run_sweep", &Run::sweep, py::arg("threads") = py::none());

  m.def(
      "parse_run_text",
      [](const std::string& text, bool strict, const std::string& base_dir) {
        return make_run(parse_run_text(text, strict, base_dir), base_dir);
      },
      py::arg("text"), py::arg("strict") = false, py::arg("base_dir") = ".");
  m.def(
      "parse_run_file",
      [](const std::string& path, bool strict) {
        const std::string dir = std::filesystem::path(path).parent_path().string();
        return make_run(parse_run_file(path, strict), dir.empty() ? "." : dir);
      },
      py::arg("path"), py::arg("strict") = false);
  m.def("config_reference", &config_reference);
}
