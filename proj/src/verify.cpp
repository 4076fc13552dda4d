#include "nsstat/verify.hpp"

#include "nsstat/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace nsstat {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double trapezoid(const std::vector<double>& t, const std::vector<double>& v) {
  double acc = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) acc += 0.5 * (t[i] - t[i - 1]) * (v[i] + v[i - 1]);
  return acc;
}

double span(const Trajectory& traj) {
  const double T = traj.time(traj.size() - 1) - traj.time(0);
  if (!(T > 0.0)) throw InsufficientCoverageError("trajectory averages need at least two sample times");
  return T;
}

std::vector<double> sampled(const Trajectory& traj, double (*f)(const SampleNorms&)) {
  std::vector<double> v(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) v[i] = f(traj.norms(i));
  return v;
}

double enstrophy_of(const SampleNorms& n) { return n.h1 * n.h1; }
double stokes23_of(const SampleNorms& n) { return std::cbrt(n.stokes * n.stokes); }

nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["left"] = number(r.left);
  j["right"] = number(r.right);
  j["tolerance"] = {{"rel", r.tolerance.rel}, {"abs", r.tolerance.abs}};
  j["finite_time_factor"] = number(r.finite_time_factor);
  j["verdict"] = to_string(r.verdict);
  if (r.constants) {
    j["constants"] = {{"c1", r.constants->c1},
                      {"c2", r.constants->c2},
                      {"c3", r.constants->c3},
                      {"c4", r.constants->c4},
                      {"provenance", to_string(r.constants->provenance)}};
  }
  if (!r.extras.empty()) {
    nlohmann::json e = nlohmann::json::object();
    for (const auto& [k, v] : r.extras) e[k] = number(v);
    j["extras"] = e;
  }
  if (!r.note.empty()) j["note"] = r.note;
  if (!r.details.empty()) {
    j["details"] = nlohmann::json::array();
    for (const auto& d : r.details) j["details"].push_back(to_json(d));
  }
  return j;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "PASS";
    case Verdict::fail:
      return "FAIL";
    default:
      return "INCONCLUSIVE";
  }
}

Verdict decide(double left, double right, const Tolerance& tol) {
  if (std::isnan(left) || std::isnan(right) || right == inf) return Verdict::inconclusive;
  return left <= right * (1.0 + tol.rel) + tol.abs ? Verdict::pass : Verdict::fail;
}

bool BoundReport::ok() const {
  if (verdict == Verdict::fail) return false;
  return std::all_of(details.begin(), details.end(), [](const BoundReport& d) { return d.ok(); });
}

BoundReport make_report(std::string id, double left, double right, const Tolerance& tol) {
  BoundReport r;
  r.id = std::move(id);
  r.left = left;
  r.right = right;
  r.tolerance = tol;
  r.verdict = decide(left, right, tol);
  return r;
}

// ---------------------------------------------------------------------------
// Moment bounds

BoundReport check_time_avg_enstrophy(const Trajectory& traj, const FlowParameters& p, const Tolerance& tol) {
  const double T = span(traj);
  double integral;
  if (traj.has_ledger()) {
    integral = traj.ledger().back().enstrophy - traj.ledger().front().enstrophy;
  } else {
    integral = trapezoid(traj.times(), sampled(traj, enstrophy_of));
  }
  const double nu = p.viscosity(), l1 = p.lambda1(), G = p.grashof();
  const double factor = 1.0 + 1.0 / (nu * l1 * T);
  auto r = make_report("time_avg_enstrophy", integral / T, std::sqrt(l1) * nu * nu * G * G * factor, tol);
  r.finite_time_factor = factor;
  r.extras["T"] = T;
  r.extras["integral"] = integral;
  r.note = traj.has_ledger() ? "integral from the scheme ledger" : "integral by trapezoid quadrature";
  return r;
}

BoundReport check_time_avg_enstrophy(const EmpiricalMeasure& m, const FlowParameters& p, const Tolerance& tol) {
  const double left = expect(m, [](const SpectralField& u) { return std::pow(h1_norm(u), 2); });
  const double nu = p.viscosity(), G = p.grashof();
  return make_report("stationary_enstrophy", left, std::sqrt(p.lambda1()) * nu * nu * G * G, tol);
}

BoundReport check_da_moment(const Trajectory& traj, const FlowParameters& p, const ShapeConstants& c,
                            const Tolerance& tol) {
  const double T = span(traj);
  const double nu = p.viscosity(), l1 = p.lambda1(), G = p.grashof(), f = p.forcing_norm();
  const double integral = trapezoid(traj.times(), sampled(traj, stokes23_of));
  const double enstrophy_integral = trapezoid(traj.times(), sampled(traj, enstrophy_of));

  const double main = c.c3 * std::sqrt(l1) * std::cbrt(nu * nu) * G * G * (1.0 + 1.0 / (2.0 * nu * l1 * T));
  const double singular = f > 0.0 ? 1.0 / (3.0 * std::cbrt(nu) * std::sqrt(l1) * std::cbrt(G * G) * T) : inf;
  auto r = make_report("time_avg_da_moment", integral / T, f > 0.0 ? singular + main : main, tol);
  r.constants = c;
  r.finite_time_factor = 1.0 + 1.0 / (2.0 * nu * l1 * T);
  r.extras["T"] = T;
  if (f == 0.0) r.note = "f = 0: singular term dropped from the averaged bound";

  const double raw_right =
      f > 0.0 ? nu / (3.0 * std::cbrt(f * f)) + c.c3 / std::pow(nu, 4.0 / 3.0) *
                                                   (std::cbrt(nu * nu) * std::cbrt(f * f) * T + enstrophy_integral)
              : inf;
  auto raw = make_report("trajectory_da_integral", integral, raw_right, tol);
  raw.constants = c;
  raw.extras["enstrophy_integral"] = enstrophy_integral;
  if (f == 0.0) raw.note = "f = 0: the nu / (3 |f|^{2/3}) term is infinite, bound vacuous";
  r.details.push_back(std::move(raw));
  return r;
}

namespace {

void note_constants(BoundReport& r) {
  if (r.constants && r.constants->provenance == ConstantsProvenance::empirical_lower_bound &&
      r.verdict == Verdict::pass) {
    r.note = "holds with the estimated constants and for all larger ones";
  }
}

}  // namespace

BoundReport check_da_moment(const EmpiricalMeasure& m, const FlowParameters& p, const ShapeConstants& c,
                            const Tolerance& tol) {
  const double left = expect(m, [](const SpectralField& u) { return std::cbrt(std::pow(stokes_norm(u), 2)); });
  const double nu = p.viscosity(), G = p.grashof();
  auto r = make_report("stationary_da_moment", left, c.c3 * std::sqrt(p.lambda1()) * std::cbrt(nu * nu) * G * G, tol);
  r.constants = c;
  note_constants(r);
  return r;
}

BoundReport check_linf_moment(const EmpiricalMeasure& m, const FlowParameters& p, const ShapeConstants& c,
                              const Tolerance& tol) {
  double linf = 0.0, enstrophy = 0.0, da = 0.0, agmon = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const FieldNorms n = norms(m.atom(i));
    const double w = m.weight(i);
    linf += w * n.linf;
    enstrophy += w * n.h1 * n.h1;
    da += w * std::cbrt(n.stokes * n.stokes);
    if (n.h1 > 0.0) agmon = std::max(agmon, n.linf / std::sqrt(n.h1 * n.stokes));
  }
  const double nu = p.viscosity(), G = p.grashof();
  auto r = make_report("stationary_linf_moment", linf, c.c1 * std::pow(c.c3, 0.75) * std::sqrt(p.lambda1()) * nu * G * G,
                       tol);
  r.constants = c;
  r.extras["atom_agmon_ratio"] = agmon;
  note_constants(r);

  auto chain = make_report("agmon_hoelder_chain", linf, c.c1 * std::pow(enstrophy, 0.25) * std::pow(da, 0.75), tol);
  chain.constants = c;
  chain.extras["c1_refined"] = std::max(c.c1, agmon);
  chain.extras["right_with_c1_refined"] = std::max(c.c1, agmon) * std::pow(enstrophy, 0.25) * std::pow(da, 0.75);
  if (agmon > c.c1) chain.note = "atoms exceed the supplied c1; c1_refined is the empirical lower bound";
  r.details.push_back(std::move(chain));
  return r;
}

// ---------------------------------------------------------------------------
// Blow-up rate and regular fraction

double gamma(double t, double viscosity, double forcing_norm, double c4) {
  if (!(t < 0.0)) throw OutOfIntervalError("gamma needs t < 0");
  return std::pow(viscosity, 1.5) / (2.0 * c4 * std::sqrt(-t)) - std::cbrt(viscosity * viscosity) *
                                                                    std::cbrt(forcing_norm * forcing_norm);
}

double gamma(double t, const FlowParameters& p, const ShapeConstants& c) {
  return gamma(t, p.viscosity(), p.forcing_norm(), c.c4);
}

double tau_condition(double viscosity, double lambda1, double grashof, double c4) {
  if (grashof == 0.0) return inf;
  return 1.0 / (4.0 * c4 * c4 * lambda1 * viscosity * std::pow(grashof, 4.0 / 3.0));
}

double tau_condition(const FlowParameters& p, const ShapeConstants& c) {
  return tau_condition(p.viscosity(), p.lambda1(), p.grashof(), c.c4);
}

double regular_fraction_rhs(double tau, double viscosity, double lambda1, double grashof, double c4) {
  const double tau_max = tau_condition(viscosity, lambda1, grashof, c4);
  if (!(tau > 0.0) || !(tau < tau_max)) {
    throw OutOfIntervalError("tau must lie in (0, " + std::to_string(tau_max) + ")");
  }
  // extended precision: the denominator cancels as tau approaches tau_max
  const long double x = 2.0L * c4 * std::sqrt(static_cast<long double>(lambda1) * viscosity * tau);
  const long double g = grashof;
  return static_cast<double>(2.0L * x * g / (1.0L - x * std::cbrt(g * g)));
}

double regular_fraction_chained(double tau, double viscosity, double lambda1, double grashof, double c4) {
  const double tau_max = tau_condition(viscosity, lambda1, grashof, c4);
  if (!(tau > 0.0) || !(tau < tau_max)) {
    throw OutOfIntervalError("tau must lie in (0, " + std::to_string(tau_max) + ")");
  }
  const double f = grashof * viscosity * viscosity * std::pow(lambda1, 0.75);
  return 2.0 * std::sqrt(lambda1) * viscosity * viscosity * grashof * grashof / gamma(-tau, viscosity, f, c4);
}

bool gamma_screen(const Trajectory& traj, double tau, double center, const FlowParameters& p,
                  const ShapeConstants& c) {
  const double eps = traj.time_tolerance();
  for (std::size_t b = 0; b < traj.size(); ++b) {
    const double beta = traj.time(b);
    if (beta <= center - tau + eps || beta >= center + tau - eps) continue;
    bool any = false;
    bool all = true;
    for (std::size_t i = 0; i < b; ++i) {
      const double t = traj.time(i);
      if (t < beta - tau - eps) continue;
      any = true;
      const double h1 = traj.norms(i).h1;
      if (h1 * h1 < gamma(t - beta, p, c)) {
        all = false;
        break;
      }
    }
    if (any && all) return true;
  }
  return false;
}

BoundReport regular_fraction_bound(double tau, const FlowParameters& p, const ShapeConstants& c,
                                   const Ensemble* ensemble, double center, const Tolerance& tol) {
  const double nu = p.viscosity(), l1 = p.lambda1(), G = p.grashof();
  const double rhs = regular_fraction_rhs(tau, nu, l1, G, c.c4);
  double irregular = 0.0;
  std::size_t flagged = 0;
  if (ensemble) {
    for (const auto& m : ensemble->members()) {
      const auto& traj = m.trajectory;
      if (traj.time(0) > center - 2.0 * tau + traj.time_tolerance() ||
          traj.time(traj.size() - 1) < center + tau - traj.time_tolerance()) {
        throw InsufficientCoverageError("ensemble member does not cover [center - 2 tau, center + tau]");
      }
      if (gamma_screen(traj, tau, center, p, c)) {
        irregular += m.weight;
        ++flagged;
      }
    }
  }
  auto r = make_report("regular_fraction", irregular, rhs, tol);
  r.constants = c;
  r.extras["tau"] = tau;
  r.extras["tau_max"] = tau_condition(nu, l1, G, c.c4);
  r.extras["gamma_minus_tau"] = gamma(-tau, p, c);
  r.extras["chained_bound"] = regular_fraction_chained(tau, nu, l1, G, c.c4);
  r.extras["flagged_members"] = static_cast<double>(flagged);
  if (!ensemble) {
    r.verdict = Verdict::inconclusive;
    r.note = "no ensemble supplied; bound value only";
  }
  return r;
}

BoundReport attractor_ball_check(const EmpiricalMeasure& m, const FlowParameters& p, const Tolerance& tol) {
  const double radius = p.absorbing_radius() * (1.0 + tol.rel) + tol.abs;
  double outside = 0.0, max_norm = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double n = l2_norm(m.atom(i));
    max_norm = std::max(max_norm, n);
    if (n > radius) outside += m.weight(i);
  }
  BoundReport r;
  r.id = "attractor_ball";
  r.left = outside;
  r.right = 0.0;
  r.tolerance = tol;
  r.verdict = outside == 0.0 ? Verdict::pass : Verdict::fail;
  r.extras["mass_inside"] = 1.0 - outside;
  r.extras["max_norm"] = max_norm;
  r.extras["R0"] = p.absorbing_radius();
  return r;
}

// ---------------------------------------------------------------------------
// Sets, accretion, recurrence

SetPredicate::SetPredicate(std::vector<Constraint> constraints) : constraints_(std::move(constraints)) {
  for (const auto& c : constraints_) {
    if (!(c.lo <= c.hi)) throw std::invalid_argument("set constraint " + c.observable.name + " has lo > hi");
  }
}

SetPredicate SetPredicate::parse(const std::string& spec, const std::optional<SpectralField>& forcing) {
  std::vector<Constraint> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    const auto eq = item.rfind('=');
    if (eq == std::string::npos) throw std::invalid_argument("set constraint '" + item + "' lacks '='");
    std::string name = item.substr(0, eq);
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t") + 1);
    double lo = 0.0, hi = 0.0;
    char close = 0;
    if (std::sscanf(item.c_str() + eq + 1, " [ %lf , %lf %c", &lo, &hi, &close) != 3 || close != ']') {
      throw std::invalid_argument("set constraint '" + item + "' needs the form obs=[lo,hi]");
    }
    out.push_back({parse_observable(name, forcing), lo, hi});
  }
  if (out.empty()) throw std::invalid_argument("empty set specification");
  return SetPredicate(std::move(out));
}

bool SetPredicate::contains(const SpectralField& u) const {
  for (const auto& c : constraints_) {
    const double v = c.observable(u);
    if (!(v >= c.lo && v <= c.hi)) return false;
  }
  return true;
}

std::string SetPredicate::describe() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    if (i) os << ';';
    os << constraints_[i].observable.name << "=[" << constraints_[i].lo << ',' << constraints_[i].hi << ']';
  }
  return os.str();
}

double wilson_halfwidth(double p, std::size_t n) {
  if (n == 0) return 1.0;
  const double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  return z / (1.0 + z * z / nn) * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn));
}

AccretionReport accretion_estimate(const EmpiricalMeasure& m, const SetPredicate& set, const std::vector<double>& times,
                                   const FlowMap& flow, double match_tol) {
  AccretionReport report;
  report.set = set.describe();
  std::vector<std::size_t> in_set;
  double mass = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    scale = std::max(scale, l2_norm(m.atom(i)));
    if (set.contains(m.atom(i))) {
      in_set.push_back(i);
      mass += m.weight(i);
    }
  }
  const double radius = match_tol * std::max(scale, 1e-300);
  for (double t : times) {
    AccretionRow row;
    row.time = t;
    row.mass_in_set = mass;
    std::vector<char> hit(m.size(), 0);
    for (std::size_t i : in_set) {
      const SpectralField image = flow(m.atom(i), t);
      double best = inf;
      std::size_t arg = 0;
      for (std::size_t j = 0; j < m.size(); ++j) {
        const double d = l2_norm(image - m.atom(j));
        if (d < best) {
          best = d;
          arg = j;
        }
      }
      if (best <= radius) {
        hit[arg] = 1;
      } else {
        ++row.unmatched;
      }
    }
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (hit[j]) row.mass_of_image += m.weight(j);
    }
    row.statistical_tolerance = wilson_halfwidth(mass, m.size());
    row.exact_holds = row.mass_of_image >= mass - 1e-12;
    row.pass = row.mass_of_image >= mass - row.statistical_tolerance;
    report.pass = report.pass && row.pass;
    report.rows.push_back(row);
  }
  return report;
}

namespace {

void scan_into(const Trajectory& traj, const SetPredicate& set, double horizon, double min_gap, RecurrenceReport& r) {
  const double eps = traj.time_tolerance();
  const double last = traj.time(traj.size() - 1);
  std::vector<char> inside(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) inside[i] = set.contains(traj.state(i)) ? 1 : 0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (!inside[i] || traj.time(i) + horizon > last + eps) continue;
    ++r.visits;
    for (std::size_t j = i + 1; j < traj.size(); ++j) {
      const double gap = traj.time(j) - traj.time(i);
      if (gap > horizon + eps) break;
      if (inside[j] && gap >= min_gap - eps) {
        ++r.returning;
        r.return_times.push_back(gap);
        break;
      }
    }
  }
}

double median_interval(const Trajectory& traj) {
  std::vector<double> h;
  for (std::size_t i = 1; i < traj.size(); ++i) h.push_back(traj.time(i) - traj.time(i - 1));
  if (h.empty()) return 0.0;
  std::nth_element(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(h.size() / 2), h.end());
  return h[h.size() / 2];
}

void finish(RecurrenceReport& r) {
  r.fraction = r.visits ? static_cast<double>(r.returning) / static_cast<double>(r.visits) : 0.0;
  if (r.return_times.empty() || !(r.bin_width > 0.0)) return;
  std::map<long long, std::size_t> bins;
  for (double t : r.return_times) ++bins[std::llround(t / r.bin_width)];
  std::size_t best = 0;
  for (const auto& [k, count] : bins) {
    r.histogram.emplace_back(static_cast<double>(k) * r.bin_width, count);
    if (count > best) {
      best = count;
      r.mode = static_cast<double>(k) * r.bin_width;
    }
  }
}

}  // namespace

RecurrenceReport recurrence_scan(const Trajectory& traj, const SetPredicate& set, double horizon, double min_gap) {
  RecurrenceReport r;
  r.bin_width = median_interval(traj);
  scan_into(traj, set, horizon, min_gap, r);
  finish(r);
  return r;
}

RecurrenceReport recurrence_scan(const Ensemble& ensemble, const SetPredicate& set, double horizon, double min_gap) {
  RecurrenceReport r;
  r.bin_width = inf;
  for (const auto& m : ensemble.members()) {
    r.bin_width = std::min(r.bin_width, median_interval(m.trajectory));
    scan_into(m.trajectory, set, horizon, min_gap, r);
  }
  finish(r);
  return r;
}

// ---------------------------------------------------------------------------
// Serialization

std::string suite_json(const std::vector<BoundReport>& reports) {
  nlohmann::json j;
  j["reports"] = nlohmann::json::object();
  bool ok = true;
  for (const auto& r : reports) {
    j["reports"][r.id] = to_json(r);
    ok = ok && r.ok();
  }
  j["pass"] = ok;
  return j.dump(2);
}

std::string accretion_json(const AccretionReport& report) {
  nlohmann::json j;
  j["set"] = report.set;
  j["flow"] = "single-valued Galerkin flow map";
  j["pass"] = report.pass;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : report.rows) {
    j["rows"].push_back({{"time", row.time},
                         {"mass_in_set", row.mass_in_set},
                         {"mass_of_image", row.mass_of_image},
                         {"unmatched", row.unmatched},
                         {"statistical_tolerance", row.statistical_tolerance},
                         {"exact_holds", row.exact_holds},
                         {"pass", row.pass}});
  }
  return j.dump(2);
}

std::string recurrence_json(const RecurrenceReport& report) {
  nlohmann::json j;
  j["visits"] = report.visits;
  j["returning"] = report.returning;
  j["fraction"] = report.fraction;
  j["bin_width"] = number(report.bin_width);
  j["mode"] = report.mode ? nlohmann::json(*report.mode) : nlohmann::json(nullptr);
  j["empty"] = report.visits == 0;
  return j.dump(2);
}

std::string recurrence_csv(const RecurrenceReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "return_time,count\n";
  for (const auto& [t, count] : report.histogram) os << t << ',' << count << '\n';
  return os.str();
}

}  // namespace nsstat
