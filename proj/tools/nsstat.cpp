// Command-line front end: simulate, average, verify, recurrence, estimate-constants, report.

#include "nsstat/commands.hpp"
#include "nsstat/dynamics.hpp"
#include "nsstat/errors.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace nsstat;

int main(int argc, char** argv) {
  CLI::App app{"Galerkin Navier-Stokes statistics toolkit"};
  app.require_subcommand(1);
  std::string out_dir = "nsstat-out";
  app.add_option("-o,--output-dir", out_dir, "Output directory (NSSTAT_OUTPUT_DIR overrides the default)");

  auto* simulate = app.add_subcommand("simulate", "Integrate a configured run and audit its energy budget");
  std::string config_path;
  simulate->add_option("config", config_path, "Run configuration file")->required();

  auto* average = app.add_subcommand("average", "Time-average measures and stationarity diagnostics");
  AverageOptions avg;
  average->add_option("trajectory", avg.trajectory, "Trajectory container")->required();
  average->add_option("-w,--windows", avg.windows, "Increasing window lengths");
  average->add_option("--t0", avg.t0, "Averaging start time");
  average->add_option("--tolerance", avg.tolerance, "Relative oscillation band for convergence");
  average->add_option("-p,--probe", avg.probes, "Probe observables");
  average->add_option("--shift", avg.shifts, "Stationarity shifts");
  average->add_option("--threshold", avg.stationarity_threshold, "Relative stationarity threshold");

  auto* verify = app.add_subcommand("verify", "Run the bound suite on measures and trajectories");
  VerifyOptions ver;
  verify->add_option("--parameters", ver.parameters, "Trajectory container supplying nu and f")->required();
  verify->add_option("-m,--measure", ver.measures, "Measure files");
  verify->add_option("-t,--trajectory", ver.trajectories, "Trajectory containers");
  verify->add_option("--c1", ver.c1, "Agmon constant");
  verify->add_option("--c2", ver.c2, "Trilinear constant (>= 1)");
  verify->add_option("--samples", ver.constant_samples, "Random fields for constant estimation");
  verify->add_option("--seed", ver.seed, "Seed for constants and test batteries");
  verify->add_option("--rel", ver.tolerance.rel, "Relative tolerance of bound verdicts");
  verify->add_option("--abs", ver.tolerance.abs, "Absolute tolerance of bound verdicts");
  verify->add_option("--statistical", ver.statistical_tolerance, "Relative tolerance of Liouville and energy checks");
  verify->add_option("--battery", ver.battery_size, "Cylindrical test count");

  auto* recurrence = app.add_subcommand("recurrence", "Return-time statistics for a box set");
  RecurrenceOptions rec;
  recurrence->add_option("trajectory", rec.trajectory, "Trajectory container")->required();
  recurrence->add_option("-E,--set", rec.set, "Set spec obs=[lo,hi];...")->required();
  recurrence->add_option("--horizon", rec.horizon, "Return horizon");
  recurrence->add_option("--min-gap", rec.min_gap, "Minimum separation of a return");
  recurrence->add_option("--period-probe", rec.period_probe, "Observable used to estimate the period");

  auto* constants = app.add_subcommand("estimate-constants", "Empirical lower bounds for c1 and c2");
  ConstantsOptions con;
  constants->add_option("-n,--resolution", con.resolution, "Grid points per axis");
  constants->add_option("--samples", con.samples, "Random fields");
  constants->add_option("--seed", con.seed, "Seed");

  auto* report = app.add_subcommand("report", "Per-sample norms of a trajectory as CSV");
  std::string report_path;
  report->add_option("trajectory", report_path, "Trajectory container")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_ok : exit_config;
  }

  try {
    const std::string dir = app.get_option("--output-dir")->count() ? out_dir : resolve_output_dir(out_dir);
    resolve_threads();
    if (*simulate) {
      RunConfig cfg = load_config(config_path);
      return cmd_simulate(cfg, app.get_option("--output-dir")->count() ? out_dir : resolve_output_dir(cfg.output_dir),
                          std::cerr);
    }
    if (*average) {
      avg.output_dir = dir;
      return cmd_average(avg, std::cerr);
    }
    if (*verify) {
      ver.output_dir = dir;
      return cmd_verify(ver, std::cerr);
    }
    if (*recurrence) {
      rec.output_dir = dir;
      return cmd_recurrence(rec, std::cerr);
    }
    if (*constants) {
      con.output_dir = dir;
      return cmd_estimate_constants(con, std::cerr);
    }
    if (*report) return cmd_report(report_path, dir, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_config;
  }
  return exit_config;
}
