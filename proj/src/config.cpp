#include "nsstat/config.hpp"

#include "nsstat/errors.hpp"
#include "nsstat/random_fields.hpp"
#include "nsstat/snapshot_io.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace nsstat {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "expected a number, got '" + v + "'");
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  long out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "expected an integer, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "expected a nonnegative integer, got '" + v + "'");
  return out;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (!(viscosity > 0.0) || !std::isfinite(viscosity)) throw ConfigError("flow.nu", "viscosity must be positive");
  if (resolution < 4 || resolution % 2) throw ConfigError("flow.n", "resolution must be even and >= 4");
  for (int i = 0; i < 3; ++i) {
    if (!(periods[static_cast<std::size_t>(i)] > 0.0)) {
      throw ConfigError("flow.L" + std::to_string(i + 1), "period must be positive");
    }
  }
  static const std::set<std::string> forcing_types{"zero", "single_mode", "taylor_green", "abc",
                                                   "kolmogorov", "random", "manufactured"};
  if (!forcing_types.count(forcing.type)) throw ConfigError("forcing.type", "unknown forcing '" + forcing.type + "'");
  static const std::set<std::string> initial_types{"zero", "taylor_green", "random", "steady"};
  if (!initial_types.count(initial.type)) throw ConfigError("initial.type", "unknown initial condition '" + initial.type + "'");
  if (forcing.grashof && !(*forcing.grashof >= 0.0)) throw ConfigError("forcing.grashof", "must be nonnegative");
  if (!(integrator.dt > 0.0)) throw ConfigError("integrator.dt", "time step must be positive");
  if (integrator.stride < 1) throw ConfigError("integrator.stride", "stride must be >= 1");
  if (!(t_end >= 0.0)) throw ConfigError("integrator.t_end", "must be nonnegative");
  if (std::llround(t_end / integrator.dt) > integrator.max_steps) {
    throw ConfigError("integrator.max_steps", "t_end / dt exceeds the step limit");
  }
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (!(windows[i] > 0.0) || (i && !(windows[i] > windows[i - 1]))) {
      throw ConfigError("average.windows", "windows must be positive and increasing");
    }
  }
  if (!(tolerance.rel >= 0.0)) throw ConfigError("tolerance.rel", "must be nonnegative");
  if (!(tolerance.abs >= 0.0)) throw ConfigError("tolerance.abs", "must be nonnegative");
  if (c2 && *c2 < 1.0) throw ConfigError("constants.c2", "c2 must be >= 1");
  if (c1 && !(*c1 > 0.0)) throw ConfigError("constants.c1", "c1 must be positive");
  if (c1.has_value() != c2.has_value()) throw ConfigError("constants.c1", "give both c1 and c2 or neither");
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"flow.nu", [&](auto& k, auto& v) { cfg.viscosity = to_double(k, v); }},
      {"flow.n", [&](auto& k, auto& v) { cfg.resolution = static_cast<int>(to_long(k, v)); }},
      {"flow.L1", [&](auto& k, auto& v) { cfg.periods[0] = to_double(k, v); }},
      {"flow.L2", [&](auto& k, auto& v) { cfg.periods[1] = to_double(k, v); }},
      {"flow.L3", [&](auto& k, auto& v) { cfg.periods[2] = to_double(k, v); }},
      {"forcing.type", [&](auto&, auto& v) { cfg.forcing.type = v; }},
      {"forcing.amplitude", [&](auto& k, auto& v) { cfg.forcing.amplitude = to_double(k, v); }},
      {"forcing.grashof", [&](auto& k, auto& v) { cfg.forcing.grashof = to_double(k, v); }},
      {"forcing.wavenumber", [&](auto& k, auto& v) { cfg.forcing.wavenumber = static_cast<int>(to_long(k, v)); }},
      {"forcing.slope", [&](auto& k, auto& v) { cfg.forcing.slope = to_double(k, v); }},
      {"forcing.seed", [&](auto& k, auto& v) { cfg.forcing.seed = to_u64(k, v); }},
      {"initial.type", [&](auto&, auto& v) { cfg.initial.type = v; }},
      {"initial.amplitude", [&](auto& k, auto& v) { cfg.initial.amplitude = to_double(k, v); }},
      {"initial.radius", [&](auto& k, auto& v) { cfg.initial.radius = to_double(k, v); }},
      {"initial.wavenumber", [&](auto& k, auto& v) { cfg.initial.wavenumber = static_cast<int>(to_long(k, v)); }},
      {"initial.slope", [&](auto& k, auto& v) { cfg.initial.slope = to_double(k, v); }},
      {"integrator.dt", [&](auto& k, auto& v) { cfg.integrator.dt = to_double(k, v); }},
      {"integrator.scheme",
       [&](auto& k, auto& v) {
         if (v == "imex-cn") {
           cfg.integrator.scheme = Scheme::imex_cn;
         } else if (v == "rk4") {
           cfg.integrator.scheme = Scheme::rk4;
         } else {
           throw ConfigError(k, "unknown scheme '" + v + "' (imex-cn, rk4)");
         }
       }},
      {"integrator.stride", [&](auto& k, auto& v) { cfg.integrator.stride = to_long(k, v); }},
      {"integrator.max_steps", [&](auto& k, auto& v) { cfg.integrator.max_steps = to_long(k, v); }},
      {"integrator.t_end", [&](auto& k, auto& v) { cfg.t_end = to_double(k, v); }},
      {"run.seed", [&](auto& k, auto& v) { cfg.seed = to_u64(k, v); }},
      {"run.output_dir", [&](auto&, auto& v) { cfg.output_dir = v; }},
      {"average.windows", [&](auto& k, auto& v) { cfg.windows = to_list(k, v); }},
      {"average.t0", [&](auto& k, auto& v) { cfg.average_t0 = to_double(k, v); }},
      {"average.tolerance", [&](auto& k, auto& v) { cfg.average_tolerance = to_double(k, v); }},
      {"battery.size", [&](auto& k, auto& v) { cfg.battery_size = to_u64(k, v); }},
      {"tolerance.rel", [&](auto& k, auto& v) { cfg.tolerance.rel = to_double(k, v); }},
      {"tolerance.abs", [&](auto& k, auto& v) { cfg.tolerance.abs = to_double(k, v); }},
      {"tolerance.audit", [&](auto& k, auto& v) { cfg.audit_tolerance = to_double(k, v); }},
      {"constants.c1", [&](auto& k, auto& v) { cfg.c1 = to_double(k, v); }},
      {"constants.c2", [&](auto& k, auto& v) { cfg.c2 = to_double(k, v); }},
  };

  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number), "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(key, "unknown key");
    if (value.empty()) throw ConfigError(key, "missing value");
    it->second(key, value);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("config", e.what());
  }
  return parse_config(text);
}

FlowParameters build_parameters(const RunConfig& cfg) {
  auto lattice = WaveVectorLattice::create(cfg.resolution, cfg.periods);
  const auto& fs = cfg.forcing;
  SpectralField f(lattice);
  try {
    if (fs.type == "zero") {
    } else if (fs.type == "single_mode") {
      // e_1 sin(2 pi x_2 / L_2), an eigenfunction with eigenvalue lambda_1 on the cube
      f = single_mode(lattice, 0, 1, 0, Eigen::Vector3cd(Complex(0.0, -0.5 * fs.amplitude), 0.0, 0.0));
    } else if (fs.type == "taylor_green") {
      f = taylor_green_field(lattice, fs.amplitude);
    } else if (fs.type == "abc") {
      f = abc_field(lattice, fs.amplitude, fs.amplitude, fs.amplitude);
    } else if (fs.type == "kolmogorov") {
      f = single_mode(lattice, 0, fs.wavenumber, 0, Eigen::Vector3cd(Complex(0.0, -0.5 * fs.amplitude), 0.0, 0.0));
    } else if (fs.type == "random") {
      Rng rng(fs.seed);
      f = random_field_with_norm(lattice, rng, fs.amplitude, fs.slope, fs.wavenumber);
    } else if (fs.type == "manufactured") {
      Rng rng(fs.seed);
      f = manufacture_forcing(random_field_with_norm(lattice, rng, fs.amplitude, fs.slope, fs.wavenumber),
                              cfg.viscosity);
    } else {
      throw ConfigError("forcing.type", "unknown forcing '" + fs.type + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("forcing.type", e.what());
  }
  if (fs.grashof) {
    if (fs.type == "manufactured") throw ConfigError("forcing.grashof", "not available for manufactured forcing");
    const double norm = l2_norm(f);
    if (norm == 0.0 && *fs.grashof > 0.0) throw ConfigError("forcing.grashof", "forcing is zero");
    if (norm > 0.0) {
      const double target = *fs.grashof * cfg.viscosity * cfg.viscosity * std::pow(lattice->lambda1(), 0.75);
      f *= target / norm;
    }
  }
  return FlowParameters(cfg.viscosity, std::move(f));
}

SpectralField build_initial(const RunConfig& cfg, const FlowParameters& p) {
  const auto& is = cfg.initial;
  const auto& lattice = p.lattice_ptr();
  try {
    if (is.type == "zero") return SpectralField(lattice);
    if (is.type == "taylor_green") return taylor_green_field(lattice, is.amplitude);
    if (is.type == "random") {
      Rng rng(cfg.seed);
      const double r0 = p.absorbing_radius();
      return random_field_with_norm(lattice, rng, r0 > 0.0 ? is.radius * r0 : is.radius, is.slope, is.wavenumber);
    }
    if (is.type == "steady") {
      if (cfg.forcing.type == "manufactured") {
        Rng rng(cfg.forcing.seed);
        return random_field_with_norm(lattice, rng, cfg.forcing.amplitude, cfg.forcing.slope, cfg.forcing.wavenumber);
      }
      if (cfg.forcing.type == "single_mode" || cfg.forcing.type == "zero") {
        return p.forcing() * (1.0 / (p.viscosity() * p.lambda1()));
      }
      throw ConfigError("initial.type", "steady start needs single_mode, manufactured or zero forcing");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("initial.type", e.what());
  }
  throw ConfigError("initial.type", "unknown initial condition '" + is.type + "'");
}

}  // namespace nsstat
