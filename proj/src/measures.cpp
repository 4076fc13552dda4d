#include "nsstat/measures.hpp"

#include "nsstat/errors.hpp"
#include "nsstat/nonlinear.hpp"
#include "nsstat/random_fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace nsstat {

EmpiricalMeasure::EmpiricalMeasure(std::vector<double> weights, std::vector<SpectralField> atoms,
                                   MeasureProvenance provenance)
    : weights_(std::move(weights)), atoms_(std::move(atoms)), provenance_(std::move(provenance)) {
  if (atoms_.empty()) throw std::invalid_argument("measure needs at least one atom");
  if (weights_.size() != atoms_.size()) throw std::invalid_argument("one weight per atom required");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i])) {
      throw std::invalid_argument("measure weights must be finite and nonnegative");
    }
    require_same_lattice(atoms_[i], atoms_.front());
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("measure weights must sum to one");
}

EmpiricalMeasure EmpiricalMeasure::dirac(SpectralField atom, std::string source) {
  std::vector<SpectralField> atoms;
  atoms.push_back(std::move(atom));
  return EmpiricalMeasure({1.0}, std::move(atoms), {"dirac", std::move(source), std::nullopt, std::nullopt});
}

EmpiricalMeasure EmpiricalMeasure::uniform(std::vector<SpectralField> atoms, std::string source) {
  std::vector<double> w(atoms.size(), atoms.empty() ? 0.0 : 1.0 / static_cast<double>(atoms.size()));
  return EmpiricalMeasure(std::move(w), std::move(atoms), {"uniform", std::move(source), std::nullopt, std::nullopt});
}

double expect(const EmpiricalMeasure& m, const ObservableFn& observable) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double v = observable(m.atom(i));
    if (!std::isfinite(v)) throw NumericalError("observable is not finite on atom " + std::to_string(i));
    acc += m.weight(i) * v;
  }
  return acc;
}

PsiFunction::PsiFunction(double r) : r_(r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("psi parameter r must be positive");
}

double PsiFunction::value(double s) const { return -r_ * std::expm1(-s / r_); }

double PsiFunction::derivative(double s) const { return std::exp(-s / r_); }

// ---------------------------------------------------------------------------
// Cylindrical tests

namespace {

double bump(double s) { return s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0; }

}  // namespace

CylindricalTest::CylindricalTest(std::vector<SpectralField> directions, double constant, Eigen::VectorXd slope,
                                 double support_radius)
    : directions_(std::move(directions)), constant_(constant), slope_(std::move(slope)), radius_(support_radius) {
  if (directions_.empty()) throw std::invalid_argument("cylindrical test needs at least one direction");
  if (static_cast<std::size_t>(slope_.size()) != directions_.size()) {
    throw std::invalid_argument("profile slope must have one entry per direction");
  }
  if (!(radius_ > 0.0) || !std::isfinite(radius_)) throw std::invalid_argument("support radius must be positive");
  for (const auto& v : directions_) {
    require_same_lattice(v, directions_.front());
    if (l2_norm(v) == 0.0) throw std::invalid_argument("cylindrical test directions must be nonzero");
  }
}

Eigen::VectorXd CylindricalTest::coordinates(const SpectralField& u) const {
  Eigen::VectorXd y(static_cast<Eigen::Index>(rank()));
  for (std::size_t j = 0; j < rank(); ++j) y(static_cast<Eigen::Index>(j)) = inner(u, directions_[j]);
  return y;
}

double CylindricalTest::profile(const Eigen::VectorXd& y) const {
  const double s = y.norm() / radius_;
  if (s >= 1.0) return 0.0;
  return (constant_ + slope_.dot(y) / radius_) * bump(s);
}

Eigen::VectorXd CylindricalTest::profile_gradient(const Eigen::VectorXd& y) const {
  const double s = y.norm() / radius_;
  if (s >= 1.0) return Eigen::VectorXd::Zero(y.size());
  const double b = bump(s);
  const double poly = constant_ + slope_.dot(y) / radius_;
  // beta'(s) / s = -2 beta / (1 - s^2)^2, smooth through y = 0
  const double q = 1.0 - s * s;
  const double radial = -2.0 * b / (q * q) / (radius_ * radius_);
  return slope_ * (b / radius_) + y * (poly * radial);
}

double CylindricalTest::value(const SpectralField& u) const { return profile(coordinates(u)); }

SpectralField CylindricalTest::derivative(const SpectralField& u) const {
  const Eigen::VectorXd g = profile_gradient(coordinates(u));
  SpectralField out(u.lattice_ptr());
  for (std::size_t j = 0; j < rank(); ++j) out += g(static_cast<Eigen::Index>(j)) * directions_[j];
  return out;
}

std::vector<CylindricalTest> make_test_battery(const std::vector<SpectralField>& data, const FlowParameters& p,
                                               std::size_t count, std::uint64_t seed) {
  const auto& lattice = p.lattice_ptr();
  Rng rng(seed);
  std::normal_distribution<double> normal;

  std::vector<SpectralField> pool;
  if (p.forcing_norm() > 0.0) pool.push_back(p.forcing() * (1.0 / p.forcing_norm()));
  std::vector<std::size_t> low;
  const auto& modes = lattice->modes();
  for (Eigen::Index i = 0; i < modes.rows(); ++i) {
    if (modes.row(i).cwiseAbs().maxCoeff() <= 2) low.push_back(static_cast<std::size_t>(i));
  }
  std::uniform_int_distribution<std::size_t> pick_low(0, low.size() - 1);
  auto random_low_mode = [&]() {
    for (;;) {
      const auto row = modes.row(static_cast<Eigen::Index>(low[pick_low(rng)]));
      Eigen::Vector3cd a;
      for (int c = 0; c < 3; ++c) a(c) = Complex(normal(rng), normal(rng));
      SpectralField v = single_mode(lattice, row(0), row(1), row(2), a);
      const double n = l2_norm(v);
      if (n > 1e-8) return v * (1.0 / n);
    }
  };

  std::vector<CylindricalTest> tests;
  tests.reserve(count);
  std::uniform_int_distribution<int> rank_dist(1, 3);
  std::uniform_real_distribution<double> constant_dist(0.5, 1.5);
  std::bernoulli_distribution use_forcing(0.5);
  for (std::size_t t = 0; t < count; ++t) {
    const int k = rank_dist(rng);
    std::vector<SpectralField> dirs;
    for (int j = 0; j < k; ++j) {
      if (j == 0 && !pool.empty() && use_forcing(rng)) {
        dirs.push_back(pool.front());
      } else {
        dirs.push_back(random_low_mode());
      }
    }
    Eigen::VectorXd slope(k);
    for (int j = 0; j < k; ++j) slope(j) = normal(rng);
    double range = 0.0;
    for (const auto& u : data) {
      double r2 = 0.0;
      for (const auto& v : dirs) r2 += std::pow(inner(u, v), 2);
      range = std::max(range, std::sqrt(r2));
    }
    const double radius = range > 0.0 ? 4.0 * range : 1.0;
    tests.emplace_back(std::move(dirs), constant_dist(rng), std::move(slope), radius);
  }
  return tests;
}

// ---------------------------------------------------------------------------
// Liouville residuals

namespace {

// Per-atom data reused across tests: B(u, u) and f.
struct AtomState {
  const SpectralField* u;
  SpectralField b;
};

struct Terms {
  double forcing = 0.0;
  double viscous = 0.0;
  double inertial = 0.0;
  double total() const { return forcing - viscous - inertial; }
  double magnitude() const { return std::abs(forcing) + std::abs(viscous) + std::abs(inertial); }
};

Terms integrand_terms(const SpectralField& u, const SpectralField& buu, const CylindricalTest& test,
                      const FlowParameters& p) {
  const SpectralField d = test.derivative(u);
  Terms t;
  t.forcing = inner(p.forcing(), d);
  t.viscous = p.viscosity() * inner_h1(u, d);
  t.inertial = inner(buu, d);
  return t;
}

}  // namespace

double liouville_integrand(const SpectralField& u, const CylindricalTest& test, const FlowParameters& p) {
  return integrand_terms(u, advection(u), test, p).total();
}

LiouvilleResidual liouville_residual_stationary(const EmpiricalMeasure& m, const CylindricalTest& test,
                                                const FlowParameters& p) {
  return liouville_battery(m, {test}, p).front();
}

std::vector<LiouvilleResidual> liouville_battery(const EmpiricalMeasure& m, const std::vector<CylindricalTest>& tests,
                                                 const FlowParameters& p) {
  std::vector<LiouvilleResidual> out(tests.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    require_same_lattice(m.atom(i), p.forcing());
    const SpectralField buu = advection(m.atom(i));
    for (std::size_t t = 0; t < tests.size(); ++t) {
      const Terms terms = integrand_terms(m.atom(i), buu, tests[t], p);
      out[t].residual += m.weight(i) * terms.total();
      out[t].scale += m.weight(i) * terms.magnitude();
    }
  }
  return out;
}

MeasureFamily measure_family(const Ensemble& ensemble) {
  const auto& first = ensemble.members().front().trajectory;
  MeasureFamily family;
  for (std::size_t s = 0; s < first.size(); ++s) {
    const double t = first.time(s);
    std::vector<double> w;
    std::vector<SpectralField> atoms;
    bool complete = true;
    for (const auto& member : ensemble.members()) {
      auto node = member.trajectory.node_at(t);
      if (!node) {
        complete = false;
        break;
      }
      w.push_back(member.weight);
      atoms.push_back(member.trajectory.state(*node));
    }
    if (!complete) continue;
    family.times.push_back(t);
    family.measures.emplace_back(std::move(w), std::move(atoms),
                                 MeasureProvenance{"ensemble", first.provenance(), std::nullopt, std::nullopt});
  }
  if (family.times.empty()) throw InsufficientCoverageError("ensemble members share no sample times");
  return family;
}

namespace {

std::pair<std::size_t, std::size_t> family_span(const MeasureFamily& family, double t_from, double t_to) {
  if (t_to < t_from) throw std::invalid_argument("need t_from <= t_to");
  const double tol = 1e-9 * std::max({1.0, std::abs(t_from), std::abs(t_to)});
  auto locate = [&](double t) -> std::size_t {
    for (std::size_t i = 0; i < family.times.size(); ++i) {
      if (std::abs(family.times[i] - t) <= tol) return i;
    }
    throw InsufficientCoverageError("time " + std::to_string(t) + " is not a node of the measure family");
  };
  return {locate(t_from), locate(t_to)};
}

}  // namespace

LiouvilleResidual liouville_residual_timedep(const MeasureFamily& family, const CylindricalTest& test, double t_from,
                                             double t_to, const FlowParameters& p) {
  const auto [a, b] = family_span(family, t_from, t_to);
  LiouvilleResidual out;
  if (a == b) return out;

  std::vector<double> integrand(b - a + 1, 0.0);
  std::vector<double> magnitude(b - a + 1, 0.0);
  for (std::size_t s = a; s <= b; ++s) {
    const auto& m = family.measures[s];
    for (std::size_t i = 0; i < m.size(); ++i) {
      const Terms t = integrand_terms(m.atom(i), advection(m.atom(i)), test, p);
      integrand[s - a] += m.weight(i) * t.total();
      magnitude[s - a] += m.weight(i) * t.magnitude();
    }
  }
  double flux = 0.0;
  double flux_scale = 0.0;
  for (std::size_t s = a; s < b; ++s) {
    const double h = family.times[s + 1] - family.times[s];
    flux += 0.5 * h * (integrand[s - a] + integrand[s + 1 - a]);
    flux_scale += 0.5 * h * (magnitude[s - a] + magnitude[s + 1 - a]);
  }
  auto phi = [&](const EmpiricalMeasure& m) { return expect(m, [&](const SpectralField& u) { return test.value(u); }); };
  const double end = phi(family.measures[b]);
  const double start = phi(family.measures[a]);
  out.residual = end - start - flux;
  out.scale = std::abs(end) + std::abs(start) + flux_scale;
  return out;
}

double energy_inequality_residual(const EmpiricalMeasure& m, const PsiFunction& psi, const FlowParameters& p) {
  const double nu = p.viscosity();
  return expect(m, [&](const SpectralField& u) {
    require_same_lattice(u, p.forcing());
    const double l2 = l2_norm(u);
    const double h1 = h1_norm(u);
    return psi.derivative(l2 * l2) * (nu * h1 * h1 - inner(p.forcing(), u));
  });
}

double energy_inequality_residual(const MeasureFamily& family, const PsiFunction& psi, const FlowParameters& p,
                                  double t_from, double t_to) {
  const auto [a, b] = family_span(family, t_from, t_to);
  const double nu = p.viscosity();
  auto psi_mean = [&](const EmpiricalMeasure& m) {
    return expect(m, [&](const SpectralField& u) {
      const double l2 = l2_norm(u);
      return psi.value(l2 * l2);
    });
  };
  auto rate = [&](const EmpiricalMeasure& m) {
    return expect(m, [&](const SpectralField& u) {
      const double l2 = l2_norm(u);
      const double h1 = h1_norm(u);
      return psi.derivative(l2 * l2) * (nu * h1 * h1 - inner(p.forcing(), u));
    });
  };
  double integral = 0.0;
  double prev = rate(family.measures[a]);
  for (std::size_t s = a; s < b; ++s) {
    const double next = rate(family.measures[s + 1]);
    integral += 0.5 * (family.times[s + 1] - family.times[s]) * (prev + next);
    prev = next;
  }
  return 0.5 * psi_mean(family.measures[b]) - 0.5 * psi_mean(family.measures[a]) + integral;
}

// ---------------------------------------------------------------------------
// Time averages

namespace {

// Trapezoid nodes of [a, b]: stored samples strictly inside plus the endpoints.
struct WindowNode {
  double time;
  double weight;
  std::optional<std::size_t> index;  // stored sample, otherwise interpolated
};

std::vector<WindowNode> window_nodes(const Trajectory& traj, double a, double b) {
  const double eps = traj.time_tolerance();
  if (a < traj.begin() - eps || b > traj.end() + eps || a < traj.time(0) - eps ||
      b > traj.time(traj.size() - 1) + eps) {
    throw InsufficientCoverageError("trajectory samples do not cover [" + std::to_string(a) + ", " +
                                    std::to_string(b) + "]");
  }
  std::vector<WindowNode> nodes;
  nodes.push_back({a, 0.0, traj.node_at(a)});
  if (b - a <= eps) {
    nodes.front().weight = 1.0;
    return nodes;
  }
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.time(i);
    if (t > a + eps && t < b - eps) nodes.push_back({t, 0.0, i});
  }
  nodes.push_back({b, 0.0, traj.node_at(b)});
  const double len = b - a;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double left = i > 0 ? nodes[i].time - nodes[i - 1].time : 0.0;
    const double right = i + 1 < nodes.size() ? nodes[i + 1].time - nodes[i].time : 0.0;
    nodes[i].weight = 0.5 * (left + right) / len;
  }
  double total = 0.0;
  for (const auto& n : nodes) total += n.weight;
  for (auto& n : nodes) n.weight /= total;
  return nodes;
}

SpectralField node_state(const Trajectory& traj, const WindowNode& node) {
  return node.index ? traj.state(*node.index) : sample_at(traj, node.time).field;
}

}  // namespace

double window_average(const Trajectory& traj, const ObservableFn& obs, double a, double b) {
  double acc = 0.0;
  for (const auto& n : window_nodes(traj, a, b)) acc += n.weight * obs(node_state(traj, n));
  return acc;
}

TimeAverageResult time_average_measure(const Trajectory& traj, const std::vector<double>& windows, double t0,
                                       const std::vector<Observable>& probes, double tolerance) {
  if (windows.empty()) throw std::invalid_argument("window schedule is empty");
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (!(windows[i] > 0.0) || (i > 0 && !(windows[i] > windows[i - 1]))) {
      throw std::invalid_argument("window schedule must be positive and increasing");
    }
  }
  TimeAverageResult out;
  out.windows = windows;
  for (const auto& probe : probes) out.diagnostics.push_back({probe.name, {}, 0.0, 0.0, false});

  for (double T : windows) {
    auto nodes = window_nodes(traj, t0, t0 + T);
    std::vector<double> w;
    std::vector<SpectralField> atoms;
    w.reserve(nodes.size());
    atoms.reserve(nodes.size());
    for (const auto& n : nodes) {
      w.push_back(n.weight);
      atoms.push_back(node_state(traj, n));
    }
    out.measures.emplace_back(std::move(w), std::move(atoms),
                              MeasureProvenance{"time-average", traj.provenance(), t0, T});
    for (std::size_t k = 0; k < probes.size(); ++k) {
      out.diagnostics[k].window_values.push_back(expect(out.measures.back(), probes[k].evaluate));
    }
  }
  // probe scale: largest |value| on the atoms of the longest window
  std::vector<double> scale(probes.size(), 0.0);
  for (const auto& u : out.measures.back().atoms()) {
    for (std::size_t k = 0; k < probes.size(); ++k) scale[k] = std::max(scale[k], std::abs(probes[k](u)));
  }

  out.converged = windows.size() >= 2;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    auto& d = out.diagnostics[k];
    const std::size_t from = d.window_values.size() > 3 ? d.window_values.size() - 3 : 0;
    const auto [lo, hi] = std::minmax_element(d.window_values.begin() + static_cast<std::ptrdiff_t>(from),
                                              d.window_values.end());
    d.band_min = *lo;
    d.band_max = *hi;
    d.converged = windows.size() >= 2 && (d.band_max - d.band_min) <= tolerance * std::max(scale[k], 1e-300);
    out.converged = out.converged && d.converged;
  }
  return out;
}

StationarityReport stationarity_diagnostic(const Trajectory& traj, const std::vector<Observable>& probes,
                                           const std::vector<double>& shifts, double window, double threshold) {
  if (shifts.empty()) throw std::invalid_argument("no shifts given");
  const double max_shift = *std::max_element(shifts.begin(), shifts.end());
  if (max_shift < 0.0) throw std::invalid_argument("shifts must be nonnegative");
  const double t0 = traj.time(0);
  if (window <= 0.0) window = traj.time(traj.size() - 1) - t0 - max_shift;
  if (!(window > 0.0)) throw InsufficientCoverageError("trajectory too short for the requested shifts");

  StationarityReport report;
  report.window = window;
  report.stationary = true;
  // probe values at stored samples, evaluated once
  std::vector<std::vector<double>> cached(probes.size(), std::vector<double>(traj.size()));
  for (std::size_t k = 0; k < probes.size(); ++k) {
    for (std::size_t i = 0; i < traj.size(); ++i) cached[k][i] = probes[k](traj.state(i));
  }
  auto average = [&](std::size_t k, double a, double b) {
    double acc = 0.0;
    for (const auto& n : window_nodes(traj, a, b)) {
      acc += n.weight * (n.index ? cached[k][*n.index] : probes[k](sample_at(traj, n.time).field));
    }
    return acc;
  };
  for (std::size_t k = 0; k < probes.size(); ++k) {
    double scale = 0.0;
    for (double v : cached[k]) scale = std::max(scale, std::abs(v));
    const double base = average(k, t0, t0 + window);
    for (double tau : shifts) {
      const double shifted = average(k, t0 + tau, t0 + tau + window);
      const double gap = std::abs(shifted - base);
      const double rel = gap / std::max(scale, 1e-300);
      report.gaps.push_back({probes[k].name, tau, gap, gap == 0.0 ? 0.0 : rel});
      report.max_gap = std::max(report.max_gap, gap);
      report.max_relative_gap = std::max(report.max_relative_gap, report.gaps.back().relative_gap);
    }
  }
  report.stationary = report.max_relative_gap <= threshold;
  return report;
}

MomentReport moment_report(const EmpiricalMeasure& m) {
  MomentReport r;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const FieldNorms n = norms(m.atom(i));
    const double w = m.weight(i);
    r.energy += w * n.l2 * n.l2;
    r.enstrophy += w * n.h1 * n.h1;
    r.stokes23 += w * std::cbrt(n.stokes * n.stokes);
    r.linf += w * n.linf;
  }
  return r;
}

}  // namespace nsstat
