#include <cmath>
#include <string>

#include "doctest.h"

#include "kinlim/config.hpp"
#include "kinlim/errors.hpp"

using namespace kinlim;

namespace {

const std::string kMinimal = "[model]\ngamma = 1.5\nd = 1\n";

std::size_t error_line(const std::string& text, bool strict = false) {
  try {
    parse_run_text(text, strict);
  } catch (const ConfigError& e) {
    return e.line() ? e.line() : std::size_t(-1);
  }
  return 0;
}

std::string source_path(const char* rel) { return std::string(KINLIM_SOURCE_DIR) + "/" + rel; }

}  // namespace

TEST_CASE("minimal file applies every default") {
  const ParsedRun pr = parse_run_text(kMinimal);
  CHECK(pr.config == RunConfig{});
  CHECK(pr.warnings.empty());
  CHECK(pr.line_of("model.gamma") == 2);
  CHECK(pr.line_of("model.d") == 3);
}

TEST_CASE("gamma above the admissible range is rejected at its line") {
  try {
    parse_run_text("# comment\n[model]\ngamma = 2.0\nd = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("line 3") == 0);
  }
  CHECK(error_line("[model]\nd = 2\ngamma = 1.5\n") == 0);
  CHECK(error_line("[model]\nd = 3\ngamma = 1.4\n") == 2);
}

TEST_CASE("syntax errors carry line numbers") {
  CHECK(error_line(kMinimal + "[grids]\nNx = 64\nNx = 32\n") == 6);
  CHECK(error_line(kMinimal + "[grids]\nnx = 64\n") == 5);
  CHECK(error_line(kMinimal + "[gridz]\n") == 4);
  CHECK(error_line(kMinimal + "[model]\n") == 4);
  CHECK(error_line(kMinimal + "[grids]\nNx 64\n") == 5);
  CHECK(error_line(kMinimal + "[grids]\nNx = 6.5\n") == 5);
  CHECK(error_line(kMinimal + "[grids]\nL = abc\n") == 5);
  CHECK(error_line(kMinimal + "[kinetic]\nsplitting = yoshida\n") == 5);
  CHECK(error_line("gamma = 1.5\n") == 1);
  CHECK(error_line("[model]\ngamma = 1.5\n") == std::size_t(-1));
}

TEST_CASE("validation names the key and its line") {
  CHECK(error_line(kMinimal + "[grids]\nNx = 10\nNv = 7\n") == 6);
  CHECK(error_line(kMinimal + "[kinetic]\nt_final = 0.0105\n") == 5);
  CHECK(error_line(kMinimal + "[sweep]\nepsilons = 0.1, 0.2\n") == 5);
  CHECK(error_line(kMinimal + "[sweep]\np_list = 1, 1.5\n") == 5);
  CHECK(error_line(kMinimal + "[kinetic]\nrho_cap = 3\n") == 5);
  CHECK(error_line(kMinimal + "[kinetic]\nrho_cap = 0.3\n") == 5);  // below the initial maximum
  CHECK(error_line(kMinimal + "[potentials]\ninv_p = 0.1\ninv_q = 0.2\ninv_r = 0.6\n") == 7);
  CHECK(error_line(kMinimal + "[potentials]\nV = gaussian\nV_scale = -1\n") == 5);
}

TEST_CASE("decay margin: error, warning and strict") {
  const std::string wide = kMinimal + "[potentials]\nK = gaussian\nK_strength = 0.5\nK_scale = 1\n";
  CHECK(error_line(wide) == 4);
  try {
    parse_run_text(wide);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("decay") != std::string::npos);
  }
  const ParsedRun pr = parse_run_text(wide + "decay_check = false\n");
  CHECK_FALSE(pr.warnings.empty());
  CHECK(error_line(wide + "decay_check = false\n", true) == 8);
  CHECK(parse_run_text(kMinimal + "[potentials]\nK = gaussian\nK_scale = 0.5\n", true).warnings.empty());
}

TEST_CASE("serialize round trip") {
  const ParsedRun ref = parse_run_file(source_path("configs/reference.run"));
  CHECK(parse_run_text(serialize(ref.config)).config == ref.config);
  CHECK(parse_run_text(serialize(RunConfig{})).config == RunConfig{});

  RunConfig c;
  c.d = 2;
  c.gamma = 1.25;
  c.Nx = 32;
  c.Nv = 16;
  c.v_max = 4.0;
  c.V = {PotentialKind::morse, 0.3, 2.0, 0.0, ""};
  c.K = {PotentialKind::power, 0.2, 0.7, 0.1, ""};
  c.inv_q = 0.25;
  c.inv_r = 0.1;
  c.decay_check = false;
  c.epsilon = 0.123456789012345678;
  c.splitting = Splitting::strang;
  c.interpolation = Interpolation::cubic;
  c.macro_dt = 5e-4;
  c.comparison_times = {0.1, 0.25};
  c.initial = InitialKind::uniform;
  c.out_dir = "some dir/x";
  c.write_fields = false;
  const std::string text = serialize(c);
  const ParsedRun back = parse_run_text(text);
  CHECK(back.config == c);
  CHECK(serialize(back.config) == text);
}

TEST_CASE("reference page lists every key") {
  const std::string ref = config_reference();
  for (const char* k : {"gamma", "Nx", "v_max", "V_strength", "K_scale", "inv_r", "decay_check", "epsilon",
                        "splitting", "rho_cap", "epsilons", "p_list", "audit_budget_factor", "kind", "t0", "dir"})
    CHECK(ref.find(k) != std::string::npos);
  CHECK(ref.find("[model]") != std::string::npos);
}

TEST_CASE("derived configurations") {
  const ParsedRun pr = parse_run_file(source_path("configs/reference.run"));
  const RunConfig& c = pr.config;
  const KineticConfig kc = kinetic_config(c);
  CHECK(kc.epsilon == 0.05);
  CHECK(kc.splitting == Splitting::strang);
  CHECK(kc.vgrid.cells_per_axis() == 256);
  const MacroConfig mc = macro_config(c);
  CHECK(mc.dt == kc.dt);
  CHECK(mc.t_final == kc.t_final);
  const SweepConfig sc = sweep_config(c);
  CHECK(sc.epsilons.size() == 4);
  CHECK_NOTHROW(validate(sc));
  const DensityField rho0 = initial_density(c);
  CHECK(rho0.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rho0.max() <= c.rho_cap);

  const ParsedRun b = parse_run_file(source_path("configs/barenblatt.run"));
  const DensityField rb = initial_density(b.config);
  for (std::size_t i = 0; i < rb.grid.size(); ++i) {
    const double x = rb.grid.center(int(i));
    const double w = 0.1 - x * x / 15.0;  // C - k x^2 at t0 = 1
    CHECK(rb.values[i] == doctest::Approx(w > 0.0 ? w * w : 0.0).epsilon(1e-13));
  }

  RunConfig u;
  u.initial = InitialKind::uniform;
  u.initial_mass = 2.0;
  const DensityField ru = initial_density(u);
  CHECK(ru.max() == doctest::Approx(0.25));
  CHECK(ru.min() == doctest::Approx(0.25));
}

TEST_CASE("tabulated potentials load relative to the run file") {
  const std::string text = kMinimal + "[grids]\nNx = 8\n[potentials]\nV = tabulated\nV_file = missing.txt\n";
  CHECK(error_line(text) == 7);
}
