#pragma once

#include "nsstat/config.hpp"
#include "nsstat/verify.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nsstat {

/// Process exit codes of the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_numerical = 2, exit_verification = 3 };

/// Output directory from NSSTAT_OUTPUT_DIR when set, otherwise the fallback.
std::string resolve_output_dir(const std::string& fallback);
/// Worker count from NSSTAT_THREADS (default 1).
unsigned resolve_threads();

/// Writes trajectory.sntc, audit.csv and simulate.json.
int cmd_simulate(const RunConfig& cfg, const std::string& output_dir, std::ostream& log);

struct AverageOptions {
  std::string trajectory;
  std::vector<double> windows;  // empty: four geometric windows ending at the full span
  std::optional<double> t0;
  double tolerance = 1e-3;
  std::vector<std::string> probes{"energy", "enstrophy"};
  std::vector<double> shifts;  // empty: a quarter of the span
  double stationarity_threshold = 1e-2;
  std::string output_dir;
};

/// Writes measure_<i>.snsm per window and average.json.
int cmd_average(const AverageOptions& options, std::ostream& log);

struct VerifyOptions {
  std::string parameters;  // trajectory file supplying nu and f
  std::vector<std::string> measures;
  std::vector<std::string> trajectories;
  std::optional<double> c1;
  std::optional<double> c2;
  int constant_samples = 64;
  std::uint64_t seed = 1;
  Tolerance tolerance{1e-10, 1e-12};
  double statistical_tolerance = 1e-2;
  std::size_t battery_size = 20;
  std::vector<double> psi_factors{0.1, 1.0, 10.0};
  std::string output_dir;
};

/// Writes suite.json; exit_verification when any check FAILs.
int cmd_verify(const VerifyOptions& options, std::ostream& log);

struct RecurrenceOptions {
  std::string trajectory;
  std::string set;
  std::optional<double> horizon;  // default 3 periods of the period probe
  std::optional<double> min_gap;  // default half a period
  std::string period_probe = "energy";
  std::string output_dir;
};

/// Writes recurrence.csv and recurrence.json; an unvisited set is reported, not an error.
int cmd_recurrence(const RecurrenceOptions& options, std::ostream& log);

struct ConstantsOptions {
  int resolution = 16;
  std::array<double, 3> periods{two_pi, two_pi, two_pi};
  int samples = 64;
  std::uint64_t seed = 1;
  std::string output_dir;
};

int cmd_estimate_constants(const ConstantsOptions& options, std::ostream& log);

/// Per-sample norms (norms.csv) and a parameter summary (report.json) of a trajectory.
int cmd_report(const std::string& trajectory, const std::string& output_dir, std::ostream& log);

}  // namespace nsstat
