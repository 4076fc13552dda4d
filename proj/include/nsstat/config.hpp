#pragma once

#include "nsstat/dynamics.hpp"
#include "nsstat/flow_parameters.hpp"
#include "nsstat/verify.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nsstat {

struct ForcingSpec {
  std::string type = "zero";  // zero | single_mode | taylor_green | abc | kolmogorov | random | manufactured
  double amplitude = 1.0;
  std::optional<double> grashof;  // rescales the forcing to this G (not for manufactured)
  int wavenumber = 1;             // kolmogorov wavenumber, random band limit
  double slope = 1.0;             // random spectrum slope
  std::uint64_t seed = 1;
};

struct InitialSpec {
  std::string type = "zero";  // zero | taylor_green | random | steady
  double amplitude = 1.0;     // taylor_green amplitude
  double radius = 0.5;        // random: |u0| = radius R0 (or radius itself when R0 = 0)
  int wavenumber = 0;         // random band limit, 0 for the whole active cube
  double slope = 1.0;
};

/// Flat "section.key = value" configuration; '#' starts a comment.
struct RunConfig {
  double viscosity = 0.1;
  int resolution = 16;
  std::array<double, 3> periods{two_pi, two_pi, two_pi};
  ForcingSpec forcing;
  InitialSpec initial;
  IntegratorConfig integrator;
  double t_end = 1.0;
  std::uint64_t seed = 1;
  std::string output_dir = "nsstat-out";
  std::vector<double> windows;
  double average_t0 = 0.0;
  double average_tolerance = 1e-3;
  std::size_t battery_size = 20;
  Tolerance tolerance{1e-10, 1e-12};
  std::optional<double> audit_tolerance;
  std::optional<double> c1;
  std::optional<double> c2;

  void validate() const;
};

/// Parses and validates; ConfigError names the offending key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

FlowParameters build_parameters(const RunConfig& cfg);
SpectralField build_initial(const RunConfig& cfg, const FlowParameters& p);

}  // namespace nsstat
