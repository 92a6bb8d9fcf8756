// sumtails: density tables, tail probabilities, crossover points, Monte
// Carlo checks, figure presets and the acceptance matrix from the command
// line. Exit codes: 0 success, 1 computation failure, 2 usage error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sumtails/reporting.hpp"

namespace {

using sumtails::Command;
using sumtails::RunConfig;

struct Flags {
  std::string dist = "uniform";
  std::string spacing = "linear";
  std::string format = "csv";
  std::string config_path;
};

void add_spec_options(CLI::App* cmd, RunConfig& c, Flags& f) {
  cmd->add_option("--dist", f.dist, "term law: uniform, power, sech, gauss")->capture_default_str();
  cmd->add_option("--l", c.l, "power family index")->capture_default_str();
  cmd->add_option("--sigma", c.sigma, "gauss standard deviation")->capture_default_str();
  cmd->add_option("--n", c.n_terms, "number of terms N")->capture_default_str();
}

void add_grid_options(CLI::App* cmd, RunConfig& c, Flags& f) {
  cmd->add_option("--zmin", c.zmin, "first grid point")->capture_default_str();
  cmd->add_option("--zmax", c.zmax, "last grid point")->capture_default_str();
  cmd->add_option("--points", c.points, "grid points")->capture_default_str();
  cmd->add_option("--spacing", f.spacing, "linear or log")->capture_default_str();
  cmd->add_option("--log-floor", c.log_floor, "first positive node of a log grid from 0")
      ->capture_default_str();
}

void add_quadrature_options(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--rel-tol", c.quadrature.rel_tol, "relative tolerance")->capture_default_str();
  cmd->add_option("--abs-tol", c.quadrature.abs_tol, "absolute tolerance")->capture_default_str();
  cmd->add_option("--log-cutoff", c.quadrature.log_cutoff, "truncate where N ln|g| < cutoff")
      ->capture_default_str();
  cmd->add_option("--max-panels", c.quadrature.max_panels, "panel budget")->capture_default_str();
}

void add_output_options(CLI::App* cmd, RunConfig& c, Flags& f) {
  cmd->add_option("-o,--output", c.output, "output file (default: $SUMTAILS_OUTPUT_DIR/<name>)");
  cmd->add_option("--format", f.format, "csv or json")->capture_default_str();
  cmd->add_option("--threads", c.threads, "worker threads")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact densities of normalized sums of i.i.d. terms"};
  app.set_version_flag("--version", sumtails::kVersion);
  app.require_subcommand(1);

  RunConfig c;
  Flags f;

  auto* density = app.add_subcommand("density", "density table p_N(z) with Gaussian and tail columns");
  add_spec_options(density, c, f);
  add_grid_options(density, c, f);
  add_quadrature_options(density, c);
  add_output_options(density, c, f);

  auto* tail = app.add_subcommand("tail", "tail probability P(Z > z) table");
  add_spec_options(tail, c, f);
  add_grid_options(tail, c, f);
  add_quadrature_options(tail, c);
  add_output_options(tail, c, f);

  auto* crossover = app.add_subcommand("crossover", "crossover point z_G of the Gaussian core");
  crossover->add_option("--m", c.m, "tail exponent m of f ~ |xi|^-m")->capture_default_str();
  crossover->add_option("--n", c.n_terms, "number of terms N")->capture_default_str();
  add_output_options(crossover, c, f);

  auto* mc = app.add_subcommand("mc", "Monte Carlo exceedance table");
  add_spec_options(mc, c, f);
  add_grid_options(mc, c, f);
  add_quadrature_options(mc, c);
  mc->add_option("--samples", c.samples, "number of simulated sums")->capture_default_str();
  mc->add_option("--seed", c.seed, "master seed")->capture_default_str();
  add_output_options(mc, c, f);

  auto* figure = app.add_subcommand("figure", "figure preset tables (F2, F3, F4)");
  figure->add_option("--name", c.figure, "preset name")->required();
  add_quadrature_options(figure, c);
  add_output_options(figure, c, f);

  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  verify->add_option("criteria", c.criteria, "criterion ids 1-9 (default: all)");
  verify->add_option("--seed", c.seed, "Monte Carlo seed")->capture_default_str();
  add_output_options(verify, c, f);

  auto* run = app.add_subcommand("run", "re-run a config file or metadata sidecar");
  run->add_option("config", f.config_path, "config JSON or <table>.meta.json")->required();
  run->add_option("-o,--output", c.output, "override the recorded output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) {
      const std::string override_output = c.output;
      c = sumtails::load_config(f.config_path);
      if (!override_output.empty()) c.output = override_output;
    } else {
      c.kind = sumtails::parse_kind(f.dist);
      c.spacing = sumtails::parse_spacing(f.spacing);
      c.format = sumtails::parse_format(f.format);
      for (auto* sub : app.get_subcommands()) c.command = sumtails::parse_command(sub->get_name());
    }
  } catch (const sumtails::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  return sumtails::run_command(c, std::cout, std::cerr).exit_code;
}
