#pragma once

#include "nsstat/flow_parameters.hpp"
#include "nsstat/observables.hpp"
#include "nsstat/trajectory.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nsstat {

struct MeasureProvenance {
  std::string kind;                     // "time-average", "dirac", "ensemble", ...
  std::string source;                   // source trajectory id or description
  std::optional<double> window_start;   // t0 of a time average
  std::optional<double> window_length;  // T of a time average
};

/// Finite weighted set of states; weights nonnegative, summing to one.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(std::vector<double> weights, std::vector<SpectralField> atoms, MeasureProvenance provenance = {});

  static EmpiricalMeasure dirac(SpectralField atom, std::string source = {});
  static EmpiricalMeasure uniform(std::vector<SpectralField> atoms, std::string source = {});

  std::size_t size() const { return atoms_.size(); }
  double weight(std::size_t i) const { return weights_[i]; }
  const SpectralField& atom(std::size_t i) const { return atoms_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<SpectralField>& atoms() const { return atoms_; }
  const MeasureProvenance& provenance() const { return provenance_; }
  const LatticePtr& lattice_ptr() const { return atoms_.front().lattice_ptr(); }

 private:
  std::vector<double> weights_;
  std::vector<SpectralField> atoms_;
  MeasureProvenance provenance_;
};

/// sum_i w_i obs(u_i); throws on a non-finite observable value.
double expect(const EmpiricalMeasure& m, const ObservableFn& observable);

/// psi_r(s) = r (1 - exp(-s / r)), psi_r'(s) = exp(-s / r).
class PsiFunction {
 public:
  explicit PsiFunction(double r);
  double r() const { return r_; }
  double value(double s) const;
  double derivative(double s) const;

 private:
  double r_;
};

/*
 * Cylindrical test functional Phi(u) = phi((u, v_1), ..., (u, v_k)) with
 * phi(y) = (c + a . y / rho) beta(|y| / rho), beta(s) = exp(1 - 1 / (1 - s^2))
 * on s < 1 and zero beyond; rho is the support radius.
 */
class CylindricalTest {
 public:
  CylindricalTest(std::vector<SpectralField> directions, double constant, Eigen::VectorXd slope, double support_radius);

  std::size_t rank() const { return directions_.size(); }
  const std::vector<SpectralField>& directions() const { return directions_; }
  double support_radius() const { return radius_; }

  Eigen::VectorXd coordinates(const SpectralField& u) const;
  double profile(const Eigen::VectorXd& y) const;
  Eigen::VectorXd profile_gradient(const Eigen::VectorXd& y) const;

  double value(const SpectralField& u) const;
  /// Frechet derivative Phi'(u) = sum_j d_j phi(y) v_j.
  SpectralField derivative(const SpectralField& u) const;

 private:
  std::vector<SpectralField> directions_;
  double constant_;
  Eigen::VectorXd slope_;
  double radius_;
};

/*
 * Randomized battery of cylindrical tests with 1 to 3 directions drawn from
 * low modes (max |k_i| <= 2) and the forcing; support radius 4x the largest
 * coordinate norm observed on the atoms.
 */
std::vector<CylindricalTest> make_test_battery(const std::vector<SpectralField>& data, const FlowParameters& p,
                                               std::size_t count, std::uint64_t seed);

/// <F(u), Phi'(u)> = (f, Phi') - nu ((u, Phi')) - b(u, u, Phi').
double liouville_integrand(const SpectralField& u, const CylindricalTest& test, const FlowParameters& p);

struct LiouvilleResidual {
  double residual = 0.0;
  double scale = 0.0;  // sum of the absolute term magnitudes
};

/// int <F(u), Phi'(u)> dmu
LiouvilleResidual liouville_residual_stationary(const EmpiricalMeasure& m, const CylindricalTest& test,
                                                const FlowParameters& p);

/// Stationary residuals of a whole battery, sharing one evaluation of B(u, u) per atom.
std::vector<LiouvilleResidual> liouville_battery(const EmpiricalMeasure& m, const std::vector<CylindricalTest>& tests,
                                                 const FlowParameters& p);

/// Time-parametrized family mu_t on increasing sample times.
struct MeasureFamily {
  std::vector<double> times;
  std::vector<EmpiricalMeasure> measures;
};

/// Empirical family of an ensemble at the sample times shared by every member.
MeasureFamily measure_family(const Ensemble& ensemble);

/*
 * int Phi dmu_t - int Phi dmu_t' - int_{t'}^{t} int <F, Phi'> dmu_s ds with
 * trapezoid quadrature over the family's times in [t', t]. Both endpoints must
 * be family nodes.
 */
LiouvilleResidual liouville_residual_timedep(const MeasureFamily& family, const CylindricalTest& test, double t_from,
                                             double t_to, const FlowParameters& p);

/// S(psi) = int psi'(|u|^2) (nu ||u||^2 - (f, u)) dmu; admissible when S <= 0.
double energy_inequality_residual(const EmpiricalMeasure& m, const PsiFunction& psi, const FlowParameters& p);

/*
 * Signed defect of the time-dependent strengthened energy inequality:
 *   1/2 int psi dmu_t + nu int int psi' ||u||^2 - 1/2 int psi dmu_t' - int int psi' (f, u),
 * admissible when <= 0.
 */
double energy_inequality_residual(const MeasureFamily& family, const PsiFunction& psi, const FlowParameters& p,
                                  double t_from, double t_to);

struct ProbeDiagnostic {
  std::string name;
  std::vector<double> window_values;  // one per window
  double band_min = 0.0;              // over the last three windows
  double band_max = 0.0;
  bool converged = false;
};

struct TimeAverageResult {
  std::vector<double> windows;
  std::vector<EmpiricalMeasure> measures;
  std::vector<ProbeDiagnostic> diagnostics;
  bool converged = false;
};

/*
 * Cesaro time averages of one trajectory over [t0, t0 + T] for each window T
 * (increasing). Atom weights are trapezoid weights / T; window ends between
 * samples use interpolated states. Probe oscillation across the last three
 * windows stands in for the generalized-limit gap; converged when every band
 * is narrower than tolerance times the largest |probe| on the atoms.
 */
TimeAverageResult time_average_measure(const Trajectory& traj, const std::vector<double>& windows, double t0,
                                       const std::vector<Observable>& probes, double tolerance = 1e-3);

/// Trapezoid average of obs(u(t)) over [a, b].
double window_average(const Trajectory& traj, const ObservableFn& obs, double a, double b);

struct StationarityGap {
  std::string probe;
  double shift = 0.0;
  double gap = 0.0;
  double relative_gap = 0.0;
};

struct StationarityReport {
  double window = 0.0;
  double max_gap = 0.0;
  double max_relative_gap = 0.0;
  std::vector<StationarityGap> gaps;
  bool stationary = false;
};

/*
 * Compares window averages of each probe over [t0, t0 + window] and
 * [t0 + tau, t0 + tau + window]. window <= 0 selects the longest window the
 * largest shift allows. Relative gaps are taken against the largest |probe|
 * over the samples.
 */
StationarityReport stationarity_diagnostic(const Trajectory& traj, const std::vector<Observable>& probes,
                                           const std::vector<double>& shifts, double window = 0.0,
                                           double threshold = 1e-2);

struct MomentReport {
  double energy = 0.0;     // int |u|^2
  double enstrophy = 0.0;  // int ||u||^2
  double stokes23 = 0.0;   // int |Au|^{2/3}
  double linf = 0.0;       // int |u|_inf
};

MomentReport moment_report(const EmpiricalMeasure& m);

/*
 * Measure file, little-endian:
 *   "SNSM" | u32 version | u64 header length | JSON header | u64 atom count |
 *   snapshot records | f64 weights
 */
std::string encode_measure(const EmpiricalMeasure& m, double viscosity);
EmpiricalMeasure decode_measure(const std::string& bytes);
void write_measure(const std::string& path, const EmpiricalMeasure& m, double viscosity);
EmpiricalMeasure read_measure(const std::string& path);

}  // namespace nsstat
