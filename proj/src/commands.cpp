#include "nsstat/commands.hpp"

#include "nsstat/errors.hpp"
#include "nsstat/measures.hpp"
#include "nsstat/snapshot_io.hpp"
#include "nsstat/trajectory_io.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>

namespace nsstat {

namespace fs = std::filesystem;

namespace {

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

nlohmann::json norms_json(const SpectralField& u) {
  const FieldNorms n = norms(u);
  return {{"l2", n.l2}, {"h1", n.h1}, {"stokes", n.stokes}, {"linf", n.linf}};
}

nlohmann::json parameters_json(const FlowParameters& p) {
  return {{"nu", p.viscosity()},
          {"n", p.lattice().resolution()},
          {"lambda1", p.lambda1()},
          {"forcing_norm", p.forcing_norm()},
          {"grashof", p.grashof()},
          {"R0", p.absorbing_radius()}};
}

std::vector<Observable> parse_probes(const std::vector<std::string>& specs, const FlowParameters& p) {
  std::vector<Observable> out;
  for (const auto& s : specs) {
    try {
      out.push_back(parse_observable(s, p.forcing()));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("probe", e.what());
    }
  }
  return out;
}

std::vector<double> default_windows(double span) {
  return {span / 8.0, span / 4.0, span / 2.0, span};
}

}  // namespace

std::string resolve_output_dir(const std::string& fallback) {
  if (const char* env = std::getenv("NSSTAT_OUTPUT_DIR"); env && *env) return env;
  return fallback;
}

unsigned resolve_threads() {
  if (const char* env = std::getenv("NSSTAT_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError("NSSTAT_THREADS", "expected a positive integer");
    return static_cast<unsigned>(v);
  }
  return 1;
}

int cmd_simulate(const RunConfig& cfg, const std::string& output_dir, std::ostream& log) {
  const FlowParameters p = build_parameters(cfg);
  const SpectralField u0 = build_initial(cfg, p);
  log << "simulate: n=" << cfg.resolution << " nu=" << p.viscosity() << " G=" << p.grashof() << " R0="
      << p.absorbing_radius() << " t_end=" << cfg.t_end << "\n";

  nlohmann::json summary;
  summary["parameters"] = parameters_json(p);
  try {
    const Trajectory traj = integrate(u0, p, cfg.integrator, {0.0, cfg.t_end});
    write_trajectory(join(output_dir, "trajectory.sntc"), traj, p);

    AuditOptions audit_options;
    audit_options.tolerance = cfg.audit_tolerance;
    const AuditReport audit = energy_budget_audit(traj, p, audit_options);
    io::write_file_atomic(join(output_dir, "audit.csv"), audit_csv(audit));

    summary["samples"] = traj.size();
    summary["provenance"] = traj.provenance();
    summary["final"] = norms_json(traj.state(traj.size() - 1));
    summary["audit"] = {{"pass", audit.pass},
                        {"tolerance", audit.tolerance},
                        {"max_defect", audit.max_defect},
                        {"max_abs_defect", audit.max_abs_defect},
                        {"pairs", audit.pairs_checked},
                        {"used_ledger", audit.used_ledger},
                        {"enstrophy_form_pass", audit.enstrophy_form_pass}};
    io::write_file_atomic(join(output_dir, "simulate.json"), summary.dump(2) + "\n");
    log << "simulate: " << traj.size() << " samples, audit " << (audit.pass ? "PASS" : "FAIL") << " (max defect "
        << audit.max_defect << ")\n";
    return audit.pass ? exit_ok : exit_numerical;
  } catch (const BlowUpError& e) {
    if (e.partial() && e.partial()->size() > 0) {
      write_trajectory(join(output_dir, "trajectory.partial.sntc"), *e.partial(), p);
    }
    summary["failure"] = {{"step", e.step_index()}, {"message", e.what()}};
    io::write_file_atomic(join(output_dir, "simulate.json"), summary.dump(2) + "\n");
    log << "simulate: numerical failure at step " << e.step_index() << ": " << e.what() << "\n";
    return exit_numerical;
  }
}

int cmd_average(const AverageOptions& options, std::ostream& log) {
  const StoredTrajectory stored = read_trajectory(options.trajectory);
  const Trajectory& traj = stored.trajectory;
  const FlowParameters& p = stored.parameters;
  const double t0 = options.t0.value_or(traj.time(0));
  const double span = traj.time(traj.size() - 1) - t0;
  if (!(span > 0.0)) throw InsufficientCoverageError("no samples after t0");
  const std::vector<double> windows = options.windows.empty() ? default_windows(span) : options.windows;
  const auto probes = parse_probes(options.probes, p);

  const TimeAverageResult result = time_average_measure(traj, windows, t0, probes, options.tolerance);
  nlohmann::json out;
  out["trajectory"] = options.trajectory;
  out["t0"] = t0;
  out["converged"] = result.converged;
  out["windows"] = nlohmann::json::array();
  for (std::size_t i = 0; i < result.measures.size(); ++i) {
    const std::string name = "measure_" + std::to_string(i) + ".snsm";
    write_measure(join(options.output_dir, name), result.measures[i], p.viscosity());
    out["windows"].push_back({{"T", windows[i]}, {"file", name}, {"atoms", result.measures[i].size()}});
  }
  out["probes"] = nlohmann::json::array();
  for (const auto& d : result.diagnostics) {
    out["probes"].push_back({{"name", d.name},
                             {"values", d.window_values},
                             {"band", {d.band_min, d.band_max}},
                             {"converged", d.converged}});
  }

  const Trajectory tail = restrict(traj, t0, traj.time(traj.size() - 1));
  std::vector<double> shifts = options.shifts;
  if (shifts.empty()) shifts = {0.25 * span};
  const StationarityReport st = stationarity_diagnostic(tail, probes, shifts, 0.0, options.stationarity_threshold);
  nlohmann::json gaps = nlohmann::json::array();
  for (const auto& g : st.gaps) {
    gaps.push_back({{"probe", g.probe}, {"shift", g.shift}, {"gap", g.gap}, {"relative_gap", g.relative_gap}});
  }
  out["stationarity"] = {{"window", st.window},
                         {"max_gap", st.max_gap},
                         {"max_relative_gap", st.max_relative_gap},
                         {"stationary", st.stationary},
                         {"gaps", gaps}};
  io::write_file_atomic(join(options.output_dir, "average.json"), out.dump(2) + "\n");
  log << "average: " << windows.size() << " windows, " << (result.converged ? "converged" : "not converged")
      << ", stationarity gap " << st.max_relative_gap << (st.stationary ? "" : " (non-stationary)") << "\n";
  return exit_ok;
}

int cmd_verify(const VerifyOptions& options, std::ostream& log) {
  if (options.parameters.empty()) throw ConfigError("parameters", "a trajectory file supplying nu and f is required");
  const StoredTrajectory source = read_trajectory(options.parameters);
  const FlowParameters& p = source.parameters;

  std::vector<EmpiricalMeasure> measures;
  for (const auto& path : options.measures) measures.push_back(read_measure(path));
  std::vector<StoredTrajectory> trajectories;
  for (const auto& path : options.trajectories) trajectories.push_back(read_trajectory(path));

  ShapeConstants c;
  if (options.c1 && options.c2) {
    c = ShapeConstants::from(*options.c1, *options.c2, ConstantsProvenance::user_supplied);
  } else {
    log << "verify: estimating shape constants from " << options.constant_samples << " random fields\n";
    c = estimate_shape_constants(p.lattice_ptr(), options.constant_samples, options.seed);
    std::vector<SpectralField> data;
    for (const auto& m : measures) data.insert(data.end(), m.atoms().begin(), m.atoms().end());
    bool any = false;
    for (const auto& u : data) any = any || h1_norm(u) > 0.0;
    if (any) {
      const ShapeConstants on_data = estimate_shape_constants(data);
      c = ShapeConstants::from(std::max(c.c1, on_data.c1), std::max(c.c2, on_data.c2),
                               ConstantsProvenance::empirical_lower_bound);
    }
  }

  std::vector<BoundReport> reports;
  auto add = [&](BoundReport r, const std::string& prefix) {
    r.id = prefix + "/" + r.id;
    reports.push_back(std::move(r));
  };
  const Tolerance statistical{options.statistical_tolerance, options.tolerance.abs};

  for (std::size_t i = 0; i < measures.size(); ++i) {
    const auto& m = measures[i];
    const std::string prefix = "measure" + std::to_string(i);
    add(check_time_avg_enstrophy(m, p, options.tolerance), prefix);
    add(check_da_moment(m, p, c, options.tolerance), prefix);
    add(check_linf_moment(m, p, c, options.tolerance), prefix);
    add(attractor_ball_check(m, p, options.tolerance), prefix);

    const auto tests = make_test_battery(m.atoms(), p, options.battery_size, options.seed + i);
    const auto residuals = liouville_battery(m, tests, p);
    double worst = 0.0, worst_scale = 0.0, ratio = 0.0;
    for (const auto& r : residuals) {
      const double q = r.scale > 0.0 ? std::abs(r.residual) / r.scale : 0.0;
      if (q >= ratio) {
        ratio = q;
        worst = std::abs(r.residual);
        worst_scale = r.scale;
      }
    }
    BoundReport liouville = make_report("liouville_stationary", worst, statistical.rel * worst_scale,
                                        Tolerance{0.0, options.tolerance.abs});
    liouville.extras["tests"] = static_cast<double>(tests.size());
    liouville.extras["max_relative_residual"] = ratio;
    liouville.note = "worst battery residual against the statistical tolerance times its scale";
    add(std::move(liouville), prefix);

    const double r0sq = p.absorbing_radius() * p.absorbing_radius();
    for (double factor : options.psi_factors) {
      const PsiFunction psi(factor * (r0sq > 0.0 ? r0sq : 1.0));
      const double s = energy_inequality_residual(m, psi, p);
      const double scale = expect(m, [&](const SpectralField& u) {
        const double l2 = l2_norm(u), h1 = h1_norm(u);
        return psi.derivative(l2 * l2) * (p.viscosity() * h1 * h1 + std::abs(inner(p.forcing(), u)));
      });
      BoundReport e = make_report("energy_inequality_r" + std::to_string(factor), s, 0.0,
                                  Tolerance{0.0, statistical.rel * scale + options.tolerance.abs});
      e.extras["r"] = psi.r();
      add(std::move(e), prefix);
    }
  }

  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const auto& t = trajectories[i].trajectory;
    const auto& tp = trajectories[i].parameters;
    const std::string prefix = "trajectory" + std::to_string(i);
    add(check_time_avg_enstrophy(t, tp, options.tolerance), prefix);
    add(check_da_moment(t, tp, c, options.tolerance), prefix);

    const AuditReport audit = energy_budget_audit(t, tp);
    BoundReport a = make_report("energy_budget", audit.max_defect, 0.0, Tolerance{0.0, audit.tolerance});
    a.extras["pairs"] = static_cast<double>(audit.pairs_checked);
    a.extras["max_enstrophy_slack"] = audit.max_enstrophy_slack;
    a.note = audit.used_ledger ? "scheme ledger" : "trapezoid quadrature";
    add(std::move(a), prefix);

    const double tau_max = tau_condition(tp, c);
    const double first = t.time(0), last = t.time(t.size() - 1);
    const double tau = std::min(0.25 * tau_max, (last - first) / 3.0);
    if (tau > 0.0 && std::isfinite(tau)) {
      const Ensemble single = Ensemble::uniform({t});
      add(regular_fraction_bound(tau, tp, c, &single, first + 2.0 * tau, options.tolerance), prefix);
    }
  }

  nlohmann::json suite = nlohmann::json::parse(suite_json(reports));
  suite["constants"] = {{"c1", c.c1}, {"c2", c.c2}, {"c3", c.c3}, {"c4", c.c4}, {"provenance", to_string(c.provenance)}};
  suite["parameters"] = parameters_json(p);
  io::write_file_atomic(join(options.output_dir, "suite.json"), suite.dump(2) + "\n");

  bool ok = true;
  for (const auto& r : reports) {
    log << to_string(r.verdict) << "  " << r.id << "  left=" << r.left << " right=" << r.right << "\n";
    for (const auto& d : r.details) {
      log << "  " << to_string(d.verdict) << "  " << d.id << "  left=" << d.left << " right=" << d.right << "\n";
    }
    ok = ok && r.ok();
  }
  return ok ? exit_ok : exit_verification;
}

int cmd_recurrence(const RecurrenceOptions& options, std::ostream& log) {
  const StoredTrajectory stored = read_trajectory(options.trajectory);
  const Trajectory& traj = stored.trajectory;
  SetPredicate set;
  try {
    set = SetPredicate::parse(options.set, stored.parameters.forcing());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("set", e.what());
  }

  std::optional<double> period;
  if (!options.horizon || !options.min_gap) {
    const Observable probe = parse_probes({options.period_probe}, stored.parameters).front();
    std::vector<double> values;
    for (const auto& u : traj.states()) values.push_back(probe(u));
    const double h = (traj.time(traj.size() - 1) - traj.time(0)) / static_cast<double>(traj.size() - 1);
    period = estimate_period(values, h);
    if (!period) throw ConfigError("horizon", "no period detected; give --horizon and --min-gap");
  }
  const double horizon = options.horizon.value_or(3.0 * period.value_or(0.0));
  const double min_gap = options.min_gap.value_or(0.5 * period.value_or(0.0));

  const RecurrenceReport report = recurrence_scan(traj, set, horizon, min_gap);
  nlohmann::json out = nlohmann::json::parse(recurrence_json(report));
  out["set"] = set.describe();
  out["horizon"] = horizon;
  out["min_gap"] = min_gap;
  if (period) out["estimated_period"] = *period;
  io::write_file_atomic(join(options.output_dir, "recurrence.json"), out.dump(2) + "\n");
  io::write_file_atomic(join(options.output_dir, "recurrence.csv"), recurrence_csv(report));
  if (report.visits == 0) {
    log << "recurrence: warning: the set was never visited; report is empty\n";
  } else {
    log << "recurrence: " << report.visits << " visits, return fraction " << report.fraction << "\n";
  }
  return exit_ok;
}

int cmd_estimate_constants(const ConstantsOptions& options, std::ostream& log) {
  const auto lattice = WaveVectorLattice::create(options.resolution, options.periods);
  const ShapeConstants c = estimate_shape_constants(lattice, options.samples, options.seed);
  nlohmann::json out = {{"c1", c.c1},
                        {"c2", c.c2},
                        {"c3", c.c3},
                        {"c4", c.c4},
                        {"provenance", to_string(c.provenance)},
                        {"samples", options.samples},
                        {"seed", options.seed},
                        {"n", options.resolution}};
  io::write_file_atomic(join(options.output_dir, "constants.json"), out.dump(2) + "\n");
  log << "constants: c1=" << c.c1 << " c2=" << c.c2 << " (" << to_string(c.provenance) << ")\n";
  return exit_ok;
}

int cmd_report(const std::string& trajectory, const std::string& output_dir, std::ostream& log) {
  const StoredTrajectory stored = read_trajectory(trajectory);
  const Trajectory& traj = stored.trajectory;
  std::ostringstream csv;
  csv.precision(17);
  csv << "time,l2,h1,stokes,energy\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& n = traj.norms(i);
    csv << traj.time(i) << ',' << n.l2 << ',' << n.h1 << ',' << n.stokes << ',' << 0.5 * n.l2 * n.l2 << '\n';
  }
  io::write_file_atomic(join(output_dir, "norms.csv"), csv.str());
  nlohmann::json out;
  out["parameters"] = parameters_json(stored.parameters);
  out["samples"] = traj.size();
  out["interval"] = {traj.begin(), traj.end()};
  out["provenance"] = traj.provenance();
  out["has_ledger"] = traj.has_ledger();
  io::write_file_atomic(join(output_dir, "report.json"), out.dump(2) + "\n");
  log << "report: " << traj.size() << " samples written to norms.csv\n";
  return exit_ok;
}

}  // namespace nsstat
