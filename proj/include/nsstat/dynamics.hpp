#pragma once

#include "nsstat/errors.hpp"
#include "nsstat/flow_parameters.hpp"
#include "nsstat/trajectory.hpp"

#include <memory>

namespace nsstat {

enum class Scheme {
  imex_cn,  // Crank-Nicolson Stokes term, nonlinearity at the step midpoint by fixed-point iteration
  rk4,      // classical explicit Runge-Kutta, reference only
};

struct IntegratorConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::imex_cn;
  long stride = 1;
  long max_steps = 100'000'000;
  double iteration_tol = 1e-13;  // relative change of the midpoint iterate
  int max_iterations = 60;

  void validate() const;
};

/// F(u) = f - nu A u - B(u, u)
SpectralField rhs_F(const SpectralField& u, const FlowParameters& p);

struct StepResult {
  SpectralField next;
  double enstrophy_increment = 0.0;  // dt ||u_mid||^2
  double work_increment = 0.0;       // dt (f, u_mid)
  int iterations = 0;
};

/*
 * One step of the selected scheme. For imex_cn the update is
 *   (1 + nu lambda dt / 2) u_next = (1 - nu lambda dt / 2) u + dt (f - B(m, m)),  m = (u + u_next) / 2,
 * an exact diagonal solve per mode with B iterated to convergence, so
 * |u_next|^2/2 - |u|^2/2 = dt (f, m) - nu dt ||m||^2 up to rounding.
 * Throws NumericalError on non-finite values or a stalled iteration.
 */
/// previous (the state one step back) only seeds the iteration; the result does not depend on it beyond rounding.
StepResult advance(const SpectralField& u, const FlowParameters& p, const IntegratorConfig& cfg,
                   const SpectralField* previous = nullptr);

SpectralField step(const SpectralField& u, const FlowParameters& p, const IntegratorConfig& cfg);

/// Failure during integrate(); carries the step index and the samples produced so far.
class BlowUpError : public NumericalError {
 public:
  BlowUpError(long step_index, std::shared_ptr<const Trajectory> partial, const std::string& cause);
  long step_index() const { return step_; }
  const std::shared_ptr<const Trajectory>& partial() const { return partial_; }

 private:
  long step_;
  std::shared_ptr<const Trajectory> partial_;
};

struct TimeSpan {
  double begin = 0.0;
  double end = 0.0;
};

/*
 * Integrates from u0 at span.begin with round((end - begin) / dt) steps,
 * sampling every stride steps and at the final step. Times are begin + i dt.
 */
Trajectory integrate(const SpectralField& u0, const FlowParameters& p, const IntegratorConfig& cfg, TimeSpan span);

/// f = nu A u* + B(u*, u*), so that F(u*) = 0.
SpectralField manufacture_forcing(const SpectralField& u_star, double viscosity);

/// Exact decaying Taylor-Green solution exp(-2 nu t) (sin x1 cos x2, -cos x1 sin x2, 0).
SpectralField taylor_green_exact(double t, double viscosity, const LatticePtr& lattice);

}  // namespace nsstat
