#pragma once

#include "nsstat/flow_parameters.hpp"
#include "nsstat/measures.hpp"
#include "nsstat/observables.hpp"
#include "nsstat/trajectory.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nsstat {

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

/// Relative and absolute slack of a bound comparison.
struct Tolerance {
  double rel = 1e-10;
  double abs = 0.0;
};

/// PASS iff left <= right (1 + rel) + abs; INCONCLUSIVE when either side is NaN or right is +inf.
Verdict decide(double left, double right, const Tolerance& tol);

struct BoundReport {
  std::string id;
  double left = 0.0;
  double right = 0.0;
  Tolerance tolerance;
  double finite_time_factor = 1.0;
  std::optional<ShapeConstants> constants;
  std::map<std::string, double> extras;
  std::string note;
  Verdict verdict = Verdict::inconclusive;
  std::vector<BoundReport> details;

  /// False when this report or any detail FAILs.
  bool ok() const;
};

BoundReport make_report(std::string id, double left, double right, const Tolerance& tol);

/// Averages of ||u||^2 over the sampled span; uses the scheme ledger when present.
BoundReport check_time_avg_enstrophy(const Trajectory& traj, const FlowParameters& p, const Tolerance& tol = {});
BoundReport check_time_avg_enstrophy(const EmpiricalMeasure& m, const FlowParameters& p, const Tolerance& tol = {});

/*
 * Trajectory form: average of |Au|^{2/3} against
 *   1 / (3 nu^{1/3} lambda_1^{1/2} G^{2/3} T) + c3 lambda_1^{1/2} nu^{2/3} G^2 (1 + 1 / (2 nu lambda_1 T)),
 * with the raw integral bound as a detail. For f = 0 the singular term is
 * dropped from the averaged form and the raw bound is INCONCLUSIVE.
 */
BoundReport check_da_moment(const Trajectory& traj, const FlowParameters& p, const ShapeConstants& c,
                            const Tolerance& tol = {});
BoundReport check_da_moment(const EmpiricalMeasure& m, const FlowParameters& p, const ShapeConstants& c,
                            const Tolerance& tol = {});

/// int |u|_inf against c1 c3^{3/4} lambda_1^{1/2} nu G^2, with the Agmon/Hoelder chain as a detail.
BoundReport check_linf_moment(const EmpiricalMeasure& m, const FlowParameters& p, const ShapeConstants& c,
                              const Tolerance& tol = {});

/// Gamma(t) = nu^{3/2} / (2 c4 |t|^{1/2}) - nu^{2/3} |f|^{2/3}; throws OutOfIntervalError unless t < 0.
double gamma(double t, const FlowParameters& p, const ShapeConstants& c);
double gamma(double t, double viscosity, double forcing_norm, double c4);

/// 1 / (4 c4^2 lambda_1 nu G^{4/3}); +inf for G = 0.
double tau_condition(const FlowParameters& p, const ShapeConstants& c);
double tau_condition(double viscosity, double lambda1, double grashof, double c4);

/*
 * 4 c4 lambda_1^{1/2} nu^{1/2} tau^{1/2} G / (1 - 2 c4 lambda_1^{1/2} nu^{1/2} tau^{1/2} G^{2/3});
 * throws OutOfIntervalError unless 0 < tau < tau_max.
 */
double regular_fraction_rhs(double tau, double viscosity, double lambda1, double grashof, double c4);

/// 2 lambda_1^{1/2} nu^2 G^2 / Gamma(-tau), the form the estimate is derived from.
double regular_fraction_chained(double tau, double viscosity, double lambda1, double grashof, double c4);

/*
 * A member is flagged irregular when some sample time beta in (center - tau, center + tau)
 * has ||u(t)||^2 >= Gamma(t - beta) at every sample t in [beta - tau, beta).
 */
bool gamma_screen(const Trajectory& traj, double tau, double center, const FlowParameters& p,
                  const ShapeConstants& c);

/// Bound value with, when an ensemble is given, the Gamma-screened irregular weight as left side.
BoundReport regular_fraction_bound(double tau, const FlowParameters& p, const ShapeConstants& c,
                                   const Ensemble* ensemble = nullptr, double center = 0.0,
                                   const Tolerance& tol = {});

/// Mass of the measure outside B_H(R0 (1 + rel)); PASS iff zero.
BoundReport attractor_ball_check(const EmpiricalMeasure& m, const FlowParameters& p, const Tolerance& tol = {});

/// Box constraint lo <= obs(u) <= hi on finitely many observables.
class SetPredicate {
 public:
  struct Constraint {
    Observable observable;
    double lo;
    double hi;
  };
  SetPredicate() = default;
  explicit SetPredicate(std::vector<Constraint> constraints);

  /// "obs=[lo,hi];obs=[lo,hi]..." with observable specs as in parse_observable.
  static SetPredicate parse(const std::string& spec, const std::optional<SpectralField>& forcing = std::nullopt);

  bool contains(const SpectralField& u) const;
  const std::vector<Constraint>& constraints() const { return constraints_; }
  std::string describe() const;

 private:
  std::vector<Constraint> constraints_;
};

using FlowMap = std::function<SpectralField(const SpectralField&, double)>;

struct AccretionRow {
  double time = 0.0;
  double mass_in_set = 0.0;     // mu(E)
  double mass_of_image = 0.0;   // mu(Sigma_t E)
  std::size_t unmatched = 0;    // images of E-atoms not matching any atom
  double statistical_tolerance = 0.0;
  bool exact_holds = false;
  bool pass = false;
};

struct AccretionReport {
  std::string set;
  std::vector<AccretionRow> rows;
  bool pass = true;
};

/// Wilson 95% half-width for a proportion p over n samples.
double wilson_halfwidth(double p, std::size_t n);

/*
 * Flows every atom in E forward by each t and counts the weight of atoms that
 * some image matches in L2 within match_tol (relative to max atom norm).
 */
AccretionReport accretion_estimate(const EmpiricalMeasure& m, const SetPredicate& set, const std::vector<double>& times,
                                   const FlowMap& flow, double match_tol = 1e-6);

struct RecurrenceReport {
  std::size_t visits = 0;        // samples in E with a full horizon ahead
  std::size_t returning = 0;     // visits with a later sample in E within the horizon
  double fraction = 0.0;
  std::vector<double> return_times;  // first return per returning visit
  double bin_width = 0.0;
  std::vector<std::pair<double, std::size_t>> histogram;  // bin centre, count
  std::optional<double> mode;
};

/*
 * Every sample in E whose time is at least `horizon` before the last sample is
 * a visit; its first return is the next sample in E at least min_gap later.
 */
RecurrenceReport recurrence_scan(const Trajectory& traj, const SetPredicate& set, double horizon, double min_gap);
RecurrenceReport recurrence_scan(const Ensemble& ensemble, const SetPredicate& set, double horizon, double min_gap);

std::string suite_json(const std::vector<BoundReport>& reports);
std::string accretion_json(const AccretionReport& report);
std::string recurrence_json(const RecurrenceReport& report);
std::string recurrence_csv(const RecurrenceReport& report);

}  // namespace nsstat
