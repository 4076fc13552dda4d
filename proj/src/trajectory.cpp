#include "nsstat/trajectory.hpp"

#include "nsstat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace nsstat {

Trajectory::Trajectory(double begin, double end, std::vector<double> times, std::vector<SpectralField> states,
                       std::optional<std::vector<EnergyLedger>> ledger, std::string provenance)
    : begin_(begin),
      end_(end),
      times_(std::move(times)),
      states_(std::move(states)),
      ledger_(std::move(ledger)),
      provenance_(std::move(provenance)) {
  if (times_.empty() || times_.size() != states_.size()) {
    throw std::invalid_argument("trajectory needs matching, nonempty times and states");
  }
  if (ledger_ && ledger_->size() != times_.size()) throw std::invalid_argument("ledger size mismatch");
  if (!(begin_ <= end_)) throw std::invalid_argument("trajectory interval is reversed");
  const double eps = time_tolerance();
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (times_[i] < begin_ - eps || times_[i] > end_ + eps) {
      throw std::invalid_argument("trajectory sample outside its interval");
    }
    if (i > 0 && !(times_[i] > times_[i - 1])) throw std::invalid_argument("sample times must increase strictly");
    if (i > 0) require_same_lattice(states_[i], states_[0]);
  }
  norms_.reserve(states_.size());
  for (const auto& u : states_) norms_.push_back({l2_norm(u), h1_norm(u), stokes_norm(u)});
}

double Trajectory::time_tolerance() const {
  return 1e-9 * std::max({1.0, std::abs(begin_), std::abs(end_)});
}

std::optional<std::size_t> Trajectory::node_at(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t - time_tolerance());
  if (it != times_.end() && std::abs(*it - t) <= time_tolerance()) {
    return static_cast<std::size_t>(it - times_.begin());
  }
  return std::nullopt;
}

Ensemble::Ensemble(std::vector<Member> members) : members_(std::move(members)) {
  if (members_.empty()) throw std::invalid_argument("ensemble needs at least one member");
  double total = 0.0;
  for (const auto& m : members_) {
    if (!(m.weight >= 0.0)) throw std::invalid_argument("ensemble weights must be nonnegative");
    total += m.weight;
    require_same_lattice(m.trajectory.state(0), members_.front().trajectory.state(0));
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("ensemble weights must sum to one");
}

Ensemble Ensemble::uniform(std::vector<Trajectory> trajectories) {
  std::vector<Member> members;
  const double w = 1.0 / static_cast<double>(trajectories.size());
  for (auto& t : trajectories) members.push_back({w, std::move(t)});
  return Ensemble(std::move(members));
}

namespace {

Trajectory select(const Trajectory& traj, double begin, double end, double shift, double keep_lo, double keep_hi) {
  std::vector<double> times;
  std::vector<SpectralField> states;
  std::optional<std::vector<EnergyLedger>> ledger;
  if (traj.has_ledger()) ledger.emplace();
  const double eps = traj.time_tolerance();
  std::optional<EnergyLedger> base;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.time(i);
    if (t < keep_lo - eps || t > keep_hi + eps) continue;
    times.push_back(t - shift);
    states.push_back(traj.state(i));
    if (ledger) {
      if (!base) base = traj.ledger()[i];
      ledger->push_back({traj.ledger()[i].enstrophy - base->enstrophy,
                         traj.ledger()[i].forcing_work - base->forcing_work});
    }
  }
  if (times.empty()) throw OutOfIntervalError("no stored samples in the requested interval");
  return Trajectory(begin, end, std::move(times), std::move(states), std::move(ledger), traj.provenance());
}

}  // namespace

Trajectory translate(const Trajectory& traj, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("translation must be nonnegative");
  if (traj.end() - tau < traj.begin() - traj.time_tolerance()) {
    throw OutOfIntervalError("translation exceeds the trajectory span");
  }
  if (tau == 0.0) return traj;
  return select(traj, traj.begin(), std::max(traj.begin(), traj.end() - tau), tau, traj.begin() + tau, traj.end());
}

Trajectory restrict(const Trajectory& traj, double lo, double hi) {
  const double eps = traj.time_tolerance();
  if (lo > hi || lo < traj.begin() - eps || hi > traj.end() + eps) {
    throw OutOfIntervalError("restriction interval is not inside the trajectory interval");
  }
  if (lo <= traj.begin() && hi >= traj.end()) return traj;
  return select(traj, lo, hi, 0.0, lo, hi);
}

SampledState sample_at(const Trajectory& traj, double t) {
  const double eps = traj.time_tolerance();
  if (t < traj.begin() - eps || t > traj.end() + eps) throw OutOfIntervalError("time outside the trajectory interval");
  if (auto node = traj.node_at(t)) return {traj.state(*node), false};
  const auto& ts = traj.times();
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  if (it == ts.begin() || it == ts.end()) throw OutOfIntervalError("time is not bracketed by stored samples");
  const auto hi = static_cast<std::size_t>(it - ts.begin());
  const auto lo = hi - 1;
  const double theta = (t - ts[lo]) / (ts[hi] - ts[lo]);
  return {(1.0 - theta) * traj.state(lo) + theta * traj.state(hi), true};
}

Trajectory paste(const Trajectory& first, const Trajectory& second, double tol) {
  const double t2 = first.time(first.size() - 1);
  if (std::abs(second.time(0) - t2) > std::max(first.time_tolerance(), second.time_tolerance())) {
    throw PastingMismatchError(std::numeric_limits<double>::infinity());
  }
  const double gap = l2_norm(first.state(first.size() - 1) - second.state(0));
  if (gap > tol) throw PastingMismatchError(gap);

  std::vector<double> times = first.times();
  std::vector<SpectralField> states = first.states();
  std::optional<std::vector<EnergyLedger>> ledger;
  if (first.has_ledger() && second.has_ledger()) ledger = first.ledger();
  for (std::size_t i = 1; i < second.size(); ++i) {
    times.push_back(second.time(i));
    states.push_back(second.state(i));
    if (ledger) {
      const auto& seam = first.ledger().back();
      const auto& base = second.ledger().front();
      const auto& cur = second.ledger()[i];
      ledger->push_back({seam.enstrophy + (cur.enstrophy - base.enstrophy),
                         seam.forcing_work + (cur.forcing_work - base.forcing_work)});
    }
  }
  return Trajectory(first.begin(), second.end(), std::move(times), std::move(states), std::move(ledger),
                    first.provenance());
}

namespace {

std::vector<EnergyLedger> trapezoid_ledger(const Trajectory& traj, const FlowParameters& p) {
  std::vector<EnergyLedger> out(traj.size());
  double prev_h1 = traj.norms(0).h1 * traj.norms(0).h1;
  double prev_work = inner(p.forcing(), traj.state(0));
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double h = traj.time(i) - traj.time(i - 1);
    const double h1 = traj.norms(i).h1 * traj.norms(i).h1;
    const double work = inner(p.forcing(), traj.state(i));
    out[i].enstrophy = out[i - 1].enstrophy + 0.5 * h * (prev_h1 + h1);
    out[i].forcing_work = out[i - 1].forcing_work + 0.5 * h * (prev_work + work);
    prev_h1 = h1;
    prev_work = work;
  }
  return out;
}

}  // namespace

AuditReport energy_budget_audit(const Trajectory& traj, const FlowParameters& p, const AuditOptions& options) {
  AuditReport report;
  report.mode = options.mode;
  report.used_ledger = traj.has_ledger() && !options.force_quadrature;
  const std::vector<EnergyLedger> ledger = report.used_ledger ? traj.ledger() : trapezoid_ledger(traj, p);

  const std::size_t n = traj.size();
  std::vector<double> energy(n);
  double max_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double l2 = traj.norms(i).l2;
    energy[i] = l2 * l2;
    max_sq = std::max(max_sq, energy[i]);
  }
  report.tolerance = options.tolerance.value_or(1e-8 * std::max(1.0, max_sq));
  const double nu = p.viscosity();
  const double f2 = p.forcing_norm() * p.forcing_norm();
  const double growth = f2 / (nu * p.lambda1());

  report.max_defect = -std::numeric_limits<double>::infinity();
  report.max_enstrophy_slack = -std::numeric_limits<double>::infinity();
  if (n < 2) {
    report.max_defect = 0.0;
    report.max_enstrophy_slack = 0.0;
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double ens = ledger[b].enstrophy - ledger[a].enstrophy;
      const double work = ledger[b].forcing_work - ledger[a].forcing_work;
      const double d = 0.5 * energy[b] + nu * ens - 0.5 * energy[a] - work;
      const double slack = energy[b] + nu * ens - energy[a] - growth * (traj.time(b) - traj.time(a));
      ++report.pairs_checked;
      const bool ok_budget =
          options.mode == AuditMode::inequality ? d <= report.tolerance : std::abs(d) <= report.tolerance;
      const bool ok_slack = slack <= report.tolerance;
      if (d > report.max_defect) {
        report.max_defect = d;
        report.worst_from = a;
        report.worst_to = b;
      }
      report.max_abs_defect = std::max(report.max_abs_defect, std::abs(d));
      report.max_enstrophy_slack = std::max(report.max_enstrophy_slack, slack);
      AuditRow row{a, b, traj.time(a), traj.time(b), d, slack, ok_budget && ok_slack};
      if (!ok_budget) report.pass = false;
      if (!ok_slack) report.enstrophy_form_pass = false;
      if (!row.pass && report.failures.size() < options.max_failures) report.failures.push_back(row);
      if (b == a + 1) report.rows.push_back(row);
    }
  }
  return report;
}

PointwiseEnergyReport pointwise_energy_check(const Trajectory& traj, const FlowParameters& p, double rel_tol) {
  PointwiseEnergyReport report;
  const double rate = p.viscosity() * p.lambda1();
  const double r0sq = p.absorbing_radius() * p.absorbing_radius();
  report.max_relative_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < traj.size(); ++a) {
    const double ea = traj.norms(a).l2 * traj.norms(a).l2;
    for (std::size_t b = a + 1; b < traj.size(); ++b) {
      const double decay = std::exp(-rate * (traj.time(b) - traj.time(a)));
      const double rhs = ea * decay - r0sq * std::expm1(-rate * (traj.time(b) - traj.time(a)));
      const double lhs = traj.norms(b).l2 * traj.norms(b).l2;
      ++report.pairs;
      if (rhs > 0.0) report.max_relative_excess = std::max(report.max_relative_excess, (lhs - rhs) / rhs);
      if (lhs > rhs * (1.0 + rel_tol)) ++report.violations;
    }
  }
  if (report.pairs == 0) report.max_relative_excess = 0.0;
  report.pass = report.violations == 0;
  return report;
}

std::size_t ball_exits(const Trajectory& traj, double radius) {
  std::size_t exits = 0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.norms(i).l2 > radius) ++exits;
  }
  return exits;
}

std::string audit_csv(const AuditReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "t_from,t_to,defect,verdict\n";
  auto emit = [&](const AuditRow& r) {
    out << r.t_from << ',' << r.t_to << ',' << r.defect << ',' << (r.pass ? "PASS" : "FAIL") << '\n';
  };
  for (const auto& r : report.rows) emit(r);
  for (const auto& r : report.failures) {
    if (r.to != r.from + 1) emit(r);
  }
  return out.str();
}

namespace {

std::vector<Eigen::Index> low_mode_block(const WaveVectorLattice& lattice, std::size_t block_size) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(lattice.mode_count()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto& lam = lattice.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return lam(a) < lam(b); });
  order.resize(std::min(block_size, order.size()));
  return order;
}

double block_distance(const SpectralField& a, const SpectralField& b, const std::vector<Eigen::Index>& block) {
  double s = 0.0;
  for (Eigen::Index i : block) s += (a.coefficients().row(i) - b.coefficients().row(i)).squaredNorm();
  return std::sqrt(2.0 * a.lattice().volume() * s);
}

}  // namespace

double low_mode_distance(const SpectralField& a, const SpectralField& b, std::size_t block_size) {
  require_same_lattice(a, b);
  return block_distance(a, b, low_mode_block(a.lattice(), block_size));
}

std::vector<OmegaCluster> omega_limit_estimate(const Trajectory& traj, double tail_fraction, double radius,
                                               std::size_t block_size) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw std::invalid_argument("tail fraction must be in (0, 1]");
  const double cut = traj.end() - tail_fraction * (traj.end() - traj.begin());
  std::vector<std::size_t> tail;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.time(i) >= cut - traj.time_tolerance()) tail.push_back(i);
  }
  if (tail.size() < 10) throw InsufficientCoverageError("trajectory tail holds fewer than 10 samples");

  const auto block = low_mode_block(traj.state(0).lattice(), block_size);
  const std::size_t m = tail.size();
  // single linkage = connected components of the radius graph
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      if (block_distance(traj.state(tail[a]), traj.state(tail[b]), block) <= radius) parent[root(a)] = root(b);
    }
  }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::ptrdiff_t> slot(m, -1);
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t r = root(a);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::ptrdiff_t>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[r])].push_back(tail[a]);
  }

  std::vector<OmegaCluster> out;
  for (const auto& g : groups) {
    SpectralField mean = traj.state(g.front()) * 0.0;
    for (std::size_t i : g) mean += traj.state(i);
    mean *= 1.0 / static_cast<double>(g.size());
    std::size_t best = g.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i : g) {
      const double d = l2_norm(traj.state(i) - mean);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    out.push_back({traj.state(best), static_cast<double>(g.size()) / static_cast<double>(m), g.size()});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.frequency > b.frequency; });
  return out;
}

std::optional<double> estimate_period(const std::vector<double>& values, double sample_interval) {
  const std::size_t n = values.size();
  if (n < 8) return std::nullopt;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = values[i] - mean;
  const double var = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
  if (!(var > 0.0)) return std::nullopt;

  const std::size_t max_lag = n / 2;
  std::vector<double> r(max_lag + 1);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += x[i] * x[i + lag];
    r[lag] = s / var * static_cast<double>(n) / static_cast<double>(n - lag);
  }
  std::size_t start = 1;
  while (start <= max_lag && r[start] >= 0.0) ++start;
  if (start > max_lag) return std::nullopt;
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t lag = start; lag < max_lag; ++lag) peak = std::max(peak, r[lag]);
  if (!(peak > 0.0)) return std::nullopt;
  for (std::size_t lag = start; lag < max_lag; ++lag) {
    if (r[lag] >= 0.8 * peak && r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1]) {
      const double denom = r[lag - 1] - 2.0 * r[lag] + r[lag + 1];
      const double offset = denom != 0.0 ? 0.5 * (r[lag - 1] - r[lag + 1]) / denom : 0.0;
      return (static_cast<double>(lag) + offset) * sample_interval;
    }
  }
  return std::nullopt;
}

}  // namespace nsstat
