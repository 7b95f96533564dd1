// Command-line driver: mass sweeps, cylinder flux reports, footprint sweeps,
// and the acceptance self-test.  Exit codes: 0 success, 1 self-test failure,
// 2 configuration error, 3 evaluator domain error.

#include "horomass/pipeline.hpp"
#include "horomass/selftest.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

namespace {

using KV = std::vector<std::pair<std::string, std::string>>;

struct CommandState {
  std::string config_path;
  KV overrides;
};

// Flags map one-to-one onto config keys; a flag given on the command line
// overrides the same key from --config.
void add_kv_option(CLI::App* cmd, CommandState& st, const std::string& flag,
                   const std::string& key, const std::string& desc) {
  cmd->add_option_function<std::string>(
      flag, [&st, key](const std::string& v) { st.overrides.emplace_back(key, v); }, desc);
}

void add_model_options(CLI::App* cmd, CommandState& st) {
  add_kv_option(cmd, st, "--model", "model.name",
                "model: ads_schwarzschild (ads), hyperbolic, euclidean, schwarzschild_af, "
                "angular_bump, ads_tail");
  add_kv_option(cmd, st, "--m", "model.m", "mass parameter");
  add_kv_option(cmd, st, "--n", "model.n", "dimension (default 3)");
  add_kv_option(cmd, st, "--q", "model.q", "perturbation decay rate (angular_bump)");
  add_kv_option(cmd, st, "--amplitude", "model.amplitude", "bump amplitude");
  add_kv_option(cmd, st, "--axis", "model.axis", "bump axis, comma separated");
  add_kv_option(cmd, st, "--mu0", "model.mu0", "bump support cutoff cos(theta) > mu0");
  add_kv_option(cmd, st, "--r-min", "model.r_min", "model domain boundary");
  add_kv_option(cmd, st, "--lambda", "model.lambda", "ads_tail scaling");
}

void add_orders_options(CLI::App* cmd, CommandState& st) {
  add_kv_option(cmd, st, "--orders-polar", "orders.polar", "Gauss-Legendre order per polar angle");
  add_kv_option(cmd, st, "--orders-azimuth", "orders.azimuth", "trapezoid node count");
  add_kv_option(cmd, st, "--orders-radial", "orders.radial", "radial order per graded panel");
  add_kv_option(cmd, st, "--orders-axial", "orders.axial", "order along x1 on lateral walls");
}

horomass::Config build_config(const CommandState& st) {
  horomass::Config cfg;
  if (!st.config_path.empty()) cfg = horomass::Config::load(st.config_path);
  for (const auto& [key, value] : st.overrides) cfg.set(key, value);
  return cfg;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw horomass::ConfigError("cannot open output file: " + path);
  out << content;
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const horomass::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const horomass::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const horomass::Error& e) {
    std::cerr << "evaluator error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "horomass: mass evaluators for asymptotically hyperbolic and asymptotically "
      "flat metrics (HOROMASS_THREADS overrides the worker count)"};
  app.require_subcommand(1);

  CommandState mass_st, cyl_st, theta_st;
  bool tamper = false;

  CLI::App* mass = app.add_subcommand(
      "mass", "evaluator sweep: CSV convergence table plus optional SVG chart");
  mass->add_option("--config", mass_st.config_path, "key = value config file");
  add_kv_option(mass, mass_st, "--evaluator", "evaluator",
                "horosphere, face, sphere, ah_geometric, adm_flux, adm_geometric");
  add_model_options(mass, mass_st);
  add_kv_option(mass, mass_st, "--L", "sweep.L", "leaf parameter list, e.g. 3,4,5,6");
  add_kv_option(mass, mass_st, "--r", "sweep.r", "radius list, e.g. 50,100,200");
  add_kv_option(mass, mass_st, "--sigma-k", "sweep.sigma_k",
                "face truncation exponent: sigma = e^{kL}");
  add_kv_option(mass, mass_st, "--rho-max", "sweep.rho_max",
                "horosphere truncation radius (0 = automatic)");
  add_kv_option(mass, mass_st, "--direction", "direction", "horosphere direction vector");
  add_orders_options(mass, mass_st);
  add_kv_option(mass, mass_st, "--out", "output.csv", "CSV output path (also printed)");
  add_kv_option(mass, mass_st, "--svg", "output.svg", "SVG chart output path");
  mass->add_flag_function(
      "--normalize",
      [&mass_st](std::int64_t) { mass_st.overrides.emplace_back("normalize", "true"); },
      "rescale by 1/(2(n-1)omega_{n-1}) for ADM-style conventions");

  CLI::App* cyl = app.add_subcommand(
      "cylinder-report", "face-by-face cylinder flux accounting with decay exponents");
  cyl->add_option("--config", cyl_st.config_path, "key = value config file");
  add_model_options(cyl, cyl_st);
  add_kv_option(cyl, cyl_st, "--L", "sweep.L", "leaf parameter list");
  add_kv_option(cyl, cyl_st, "--sigma-k", "sweep.sigma_k", "cylinder radius exponent");
  add_orders_options(cyl, cyl_st);
  add_kv_option(cyl, cyl_st, "--out", "output.csv", "CSV output path (also printed)");

  CLI::App* theta = app.add_subcommand(
      "theta", "footprint size sweep and excluded-region mass");
  theta->add_option("--config", theta_st.config_path, "key = value config file");
  add_model_options(theta, theta_st);
  add_kv_option(theta, theta_st, "--L", "sweep.L", "leaf parameter list");
  add_kv_option(theta, theta_st, "--sigma", "sweep.sigma", "footprint truncation radius");
  add_kv_option(theta, theta_st, "--region", "region.kind",
                "everything, nothing, half_space, cone, slab");
  add_kv_option(theta, theta_st, "--region-axis", "region.axis", "cone axis (y1, yhat)");
  add_kv_option(theta, theta_st, "--half-angle", "region.half_angle", "cone half-angle");
  add_kv_option(theta, theta_st, "--hat-axis", "region.hat_axis",
                "hat coordinate index for half_space/slab");
  add_kv_option(theta, theta_st, "--lo", "region.lo", "slab lower bound");
  add_kv_option(theta, theta_st, "--hi", "region.hi", "slab upper bound");
  add_orders_options(theta, theta_st);
  add_kv_option(theta, theta_st, "--out", "output.csv", "CSV output path (also printed)");

  CLI::App* selftest = app.add_subcommand("selftest", "run the acceptance suite");
  selftest->add_flag("--tamper-tolerance", tamper, "collapse every tolerance to zero (test hook)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  if (mass->parsed()) {
    return run_guarded([&]() {
      const horomass::Config cfg = build_config(mass_st);
      const horomass::SweepResult sweep = horomass::run_mass_sweep(cfg);
      if (!sweep.warning.empty()) std::cerr << "warning: " << sweep.warning << "\n";
      std::cout << sweep.csv;
      if (cfg.has("output.csv")) write_file(cfg.get("output.csv"), sweep.csv);
      if (cfg.has("output.svg")) write_file(cfg.get("output.svg"), horomass::sweep_svg(sweep));
      return 0;
    });
  }
  if (cyl->parsed()) {
    return run_guarded([&]() {
      const horomass::Config cfg = build_config(cyl_st);
      const std::string csv = horomass::run_cylinder_report(cfg);
      std::cout << csv;
      if (cfg.has("output.csv")) write_file(cfg.get("output.csv"), csv);
      return 0;
    });
  }
  if (theta->parsed()) {
    return run_guarded([&]() {
      const horomass::Config cfg = build_config(theta_st);
      const std::string csv = horomass::run_theta(cfg);
      std::cout << csv;
      if (cfg.has("output.csv")) write_file(cfg.get("output.csv"), csv);
      return 0;
    });
  }

  // selftest
  return run_guarded([&]() {
    horomass::AcceptanceOptions opt;
    if (tamper) opt.tol_scale = 0.0;
    const std::vector<horomass::CheckResult> results = horomass::run_acceptance(opt);
    std::cout << horomass::format_acceptance_table(results);
    return horomass::all_passed(results) ? 0 : 1;
  });
}
