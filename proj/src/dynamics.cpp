#include "nsstat/dynamics.hpp"

#include "nsstat/nonlinear.hpp"
#include "nsstat/random_fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nsstat {

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (stride < 1) throw std::invalid_argument("stride must be at least 1");
  if (max_steps < 0) throw std::invalid_argument("max_steps must be nonnegative");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
}

SpectralField rhs_F(const SpectralField& u, const FlowParameters& p) {
  require_same_lattice(u, p.forcing());
  SpectralField out = p.forcing();
  out -= p.viscosity() * stokes_apply(u);
  out -= advection(u);
  return out;
}

namespace {

bool all_finite(const SpectralField& u) { return u.coefficients().allFinite(); }

StepResult advance_midpoint(const SpectralField& u, const FlowParameters& p, const IntegratorConfig& cfg,
                            const SpectralField* previous) {
  const auto& lattice = p.lattice();
  const double dt = cfg.dt;
  const Eigen::ArrayXd half = 0.5 * p.viscosity() * dt * lattice.eigenvalues();
  const Eigen::VectorXd implicit = (1.0 / (1.0 + half)).matrix();
  const Eigen::VectorXd explicit_part = (1.0 - half).matrix();

  const ModeMatrix base = explicit_part.asDiagonal() * u.coefficients() + dt * p.forcing().coefficients();
  auto solve = [&](const SpectralField& nonlinear) {
    ModeMatrix c = implicit.asDiagonal() * (base - dt * nonlinear.coefficients());
    return SpectralField(u.lattice_ptr(), std::move(c));
  };

  // first guess: linear extrapolation when the previous state is known
  SpectralField next = previous ? 2.0 * u - *previous : solve(advection(u));
  int it = 0;
  double last_change = std::numeric_limits<double>::infinity();
  for (;;) {
    ++it;
    SpectralField mid = 0.5 * (u + next);
    SpectralField candidate = solve(advection(mid));
    if (!all_finite(candidate)) throw NumericalError("non-finite state");
    const double change = l2_norm(candidate - next);
    const double scale = std::max({l2_norm(u), l2_norm(candidate), 1e-300});
    next = std::move(candidate);
    if (change <= cfg.iteration_tol * scale) break;
    // rounding floor: the contraction has stopped
    if (change <= 1e3 * cfg.iteration_tol * scale && change >= 0.5 * last_change) break;
    if (it >= cfg.max_iterations) throw NumericalError("midpoint iteration did not converge");
    last_change = change;
  }
  const SpectralField mid = 0.5 * (u + next);
  const double h1 = h1_norm(mid);
  return {std::move(next), dt * h1 * h1, dt * inner(p.forcing(), mid), it};
}

StepResult advance_rk4(const SpectralField& u, const FlowParameters& p, const IntegratorConfig& cfg) {
  const double dt = cfg.dt;
  const SpectralField k1 = rhs_F(u, p);
  const SpectralField k2 = rhs_F(u + (0.5 * dt) * k1, p);
  const SpectralField k3 = rhs_F(u + (0.5 * dt) * k2, p);
  const SpectralField k4 = rhs_F(u + dt * k3, p);
  SpectralField next = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!all_finite(next)) throw NumericalError("non-finite state");
  const double a = h1_norm(u);
  const double b = h1_norm(next);
  const double work = 0.5 * dt * (inner(p.forcing(), u) + inner(p.forcing(), next));
  return {std::move(next), 0.5 * dt * (a * a + b * b), work, 4};
}

}  // namespace

StepResult advance(const SpectralField& u, const FlowParameters& p, const IntegratorConfig& cfg,
                   const SpectralField* previous) {
  require_same_lattice(u, p.forcing());
  if (!all_finite(u)) throw NumericalError("non-finite state");
  return cfg.scheme == Scheme::imex_cn ? advance_midpoint(u, p, cfg, previous) : advance_rk4(u, p, cfg);
}

SpectralField step(const SpectralField& u, const FlowParameters& p, const IntegratorConfig& cfg) {
  cfg.validate();
  return advance(u, p, cfg).next;
}

BlowUpError::BlowUpError(long step_index, std::shared_ptr<const Trajectory> partial, const std::string& cause)
    : NumericalError("integration failed at step " + std::to_string(step_index) + ": " + cause),
      step_(step_index),
      partial_(std::move(partial)) {}

Trajectory integrate(const SpectralField& u0, const FlowParameters& p, const IntegratorConfig& cfg, TimeSpan span) {
  cfg.validate();
  require_same_lattice(u0, p.forcing());
  if (!(span.end >= span.begin)) throw std::invalid_argument("time span is reversed");
  const long steps = std::lround((span.end - span.begin) / cfg.dt);
  if (steps > cfg.max_steps) throw std::invalid_argument("time span needs more than max_steps steps");

  const std::string provenance = std::string(cfg.scheme == Scheme::imex_cn ? "imex-cn" : "rk4") +
                                 " dt=" + std::to_string(cfg.dt) + " stride=" + std::to_string(cfg.stride);
  std::vector<double> times{span.begin};
  std::vector<SpectralField> states{u0};
  std::vector<EnergyLedger> ledger{EnergyLedger{}};
  EnergyLedger running;
  SpectralField u = u0;
  SpectralField previous;
  for (long s = 1; s <= steps; ++s) {
    try {
      StepResult r = advance(u, p, cfg, previous.empty() ? nullptr : &previous);
      previous = std::move(u);
      u = std::move(r.next);
      running.enstrophy += r.enstrophy_increment;
      running.forcing_work += r.work_increment;
    } catch (const NumericalError& e) {
      auto partial = std::make_shared<const Trajectory>(span.begin, times.back(), times, states, ledger, provenance);
      throw BlowUpError(s, std::move(partial), e.what());
    }
    if (s % cfg.stride == 0 || s == steps) {
      times.push_back(span.begin + static_cast<double>(s) * cfg.dt);
      states.push_back(u);
      ledger.push_back(running);
    }
  }
  const double end = times.back();
  return Trajectory(span.begin, end, std::move(times), std::move(states), std::move(ledger), provenance);
}

SpectralField manufacture_forcing(const SpectralField& u_star, double viscosity) {
  SpectralField f = viscosity * stokes_apply(u_star);
  f += advection(u_star);
  return f;
}

SpectralField taylor_green_exact(double t, double viscosity, const LatticePtr& lattice) {
  return taylor_green_field(lattice, std::exp(-2.0 * viscosity * t));
}

}  // namespace nsstat
