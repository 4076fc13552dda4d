#pragma once

#include "nsstat/flow_parameters.hpp"
#include "nsstat/spectral_field.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nsstat {

/// Running integrals from the trajectory start: int ||u||^2 ds and int (f, u) ds.
struct EnergyLedger {
  double enstrophy = 0.0;
  double forcing_work = 0.0;
};

struct SampleNorms {
  double l2 = 0.0;
  double h1 = 0.0;
  double stokes = 0.0;
};

/*
 * Time-stamped samples t_0 < t_1 < ... of a solution on [begin, end], all on
 * one lattice, with cached L2/H1/D(A) norms. Integrator output also carries
 * the exact per-step energy ledger of the scheme, used by the budget audit in
 * place of quadrature.
 */
class Trajectory {
 public:
  Trajectory(double begin, double end, std::vector<double> times, std::vector<SpectralField> states,
             std::optional<std::vector<EnergyLedger>> ledger = std::nullopt, std::string provenance = {});

  double begin() const { return begin_; }
  double end() const { return end_; }
  std::size_t size() const { return times_.size(); }

  double time(std::size_t i) const { return times_[i]; }
  const SpectralField& state(std::size_t i) const { return states_[i]; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<SpectralField>& states() const { return states_; }
  const SampleNorms& norms(std::size_t i) const { return norms_[i]; }

  bool has_ledger() const { return ledger_.has_value(); }
  const std::vector<EnergyLedger>& ledger() const { return *ledger_; }

  const std::string& provenance() const { return provenance_; }
  const LatticePtr& lattice_ptr() const { return states_.front().lattice_ptr(); }

  /// Index of the sample within node tolerance of t, if any.
  std::optional<std::size_t> node_at(double t) const;
  /// Tolerance used to identify sample times.
  double time_tolerance() const;

 private:
  double begin_;
  double end_;
  std::vector<double> times_;
  std::vector<SpectralField> states_;
  std::vector<SampleNorms> norms_;
  std::optional<std::vector<EnergyLedger>> ledger_;
  std::string provenance_;
};

/// Weighted family of trajectories on a common lattice, weights summing to one.
class Ensemble {
 public:
  struct Member {
    double weight;
    Trajectory trajectory;
  };

  explicit Ensemble(std::vector<Member> members);
  static Ensemble uniform(std::vector<Trajectory> trajectories);

  const std::vector<Member>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }

 private:
  std::vector<Member> members_;
};

/// (sigma_tau u)(t) = u(t + tau) on [begin, end - tau].
Trajectory translate(const Trajectory& traj, double tau);

/// Samples with time in [lo, hi]; the interval becomes [lo, hi].
Trajectory restrict(const Trajectory& traj, double lo, double hi);

struct SampledState {
  SpectralField field;
  bool interpolated = false;
};

/// Stored sample at a node, otherwise linear interpolation between neighbours (flagged).
SampledState sample_at(const Trajectory& traj, double t);

/*
 * Concatenates first (ending at t2) and second (starting at t2). The terminal
 * state of first and the initial state of second must agree in L2 within tol,
 * otherwise PastingMismatchError reports the gap.
 */
Trajectory paste(const Trajectory& first, const Trajectory& second, double tol = 1e-10);

enum class AuditMode { inequality, equality };

struct AuditRow {
  std::size_t from = 0;
  std::size_t to = 0;
  double t_from = 0.0;
  double t_to = 0.0;
  double defect = 0.0;          // D(t', t)
  double enstrophy_slack = 0.0;  // lhs - rhs of the L2 + enstrophy form
  bool pass = true;
};

struct AuditReport {
  AuditMode mode = AuditMode::inequality;
  double tolerance = 0.0;
  bool used_ledger = false;
  std::size_t pairs_checked = 0;
  double max_defect = 0.0;      // max over pairs of D
  double max_abs_defect = 0.0;  // max over pairs of |D|
  double max_enstrophy_slack = 0.0;
  std::size_t worst_from = 0;
  std::size_t worst_to = 0;
  std::vector<AuditRow> rows;   // consecutive pairs
  std::vector<AuditRow> failures;  // failing pairs (capped)
  bool pass = true;
  bool enstrophy_form_pass = true;
};

struct AuditOptions {
  AuditMode mode = AuditMode::inequality;
  /// Absolute tolerance; default 1e-8 max(1, max |u|^2).
  std::optional<double> tolerance;
  /// Use trapezoid quadrature on the samples even when the scheme ledger exists.
  bool force_quadrature = false;
  std::size_t max_failures = 64;
};

/*
 * Energy budget over every sampled pair t' < t:
 *   D(t', t) = |u(t)|^2/2 + nu int ||u||^2 - |u(t')|^2/2 - int (f, u),
 * plus the L2 + enstrophy form |u(t)|^2 + nu int ||u||^2 <= |u(t')|^2 + |f|^2 (t - t') / (nu lambda_1).
 */
AuditReport energy_budget_audit(const Trajectory& traj, const FlowParameters& p, const AuditOptions& options = {});

std::string audit_csv(const AuditReport& report);

struct PointwiseEnergyReport {
  std::size_t pairs = 0;
  std::size_t violations = 0;
  double max_relative_excess = 0.0;  // max over pairs of (lhs - rhs) / rhs
  bool pass = true;
};

/*
 * Checks |u(t)|^2 <= |u(t')|^2 e^{-nu lambda_1 (t - t')} + R0^2 (1 - e^{-nu lambda_1 (t - t')})
 * on every sampled pair t' < t, with lhs <= rhs (1 + rel_tol).
 */
PointwiseEnergyReport pointwise_energy_check(const Trajectory& traj, const FlowParameters& p, double rel_tol = 1e-6);

/// Number of samples with |u| > radius.
std::size_t ball_exits(const Trajectory& traj, double radius);

struct OmegaCluster {
  SpectralField representative;
  double frequency = 0.0;
  std::size_t members = 0;
};

/*
 * Single-linkage clusters of the trajectory tail under the L2 distance of the
 * first block_size modes (ordered by eigenvalue). Representatives are the
 * members closest to each cluster mean; frequencies are visit fractions.
 */
std::vector<OmegaCluster> omega_limit_estimate(const Trajectory& traj, double tail_fraction, double radius,
                                               std::size_t block_size = 33);

/// Distance between two fields restricted to the first block_size modes by eigenvalue.
double low_mode_distance(const SpectralField& a, const SpectralField& b, std::size_t block_size = 33);

/*
 * Period of a uniformly sampled scalar series from its autocorrelation: the
 * first local maximum after the first negative lobe that reaches 80% of the
 * largest later peak, refined by a parabola through its neighbours. nullopt
 * when the series does not oscillate.
 */
std::optional<double> estimate_period(const std::vector<double>& values, double sample_interval);

}  // namespace nsstat
