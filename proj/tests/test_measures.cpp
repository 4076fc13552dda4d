#include "doctest.h"

#include "nsstat/dynamics.hpp"
#include "nsstat/errors.hpp"
#include "nsstat/measures.hpp"
#include "nsstat/random_fields.hpp"

#include <cmath>
#include <cstring>

using namespace nsstat;

namespace {

// u* = A e_1 sin x_2, the lambda_1 eigenmode; with f = nu lambda_1 u* it is steady.
SpectralField sine_mode(const LatticePtr& lat, double amplitude) {
  return single_mode(lat, 0, 1, 0, Eigen::Vector3cd(Complex(0.0, -0.5 * amplitude), 0.0, 0.0));
}

FlowParameters manufactured(const LatticePtr& lat, std::uint64_t seed, double nu, SpectralField* u_star) {
  Rng rng(seed);
  *u_star = random_field_with_norm(lat, rng, 3.0, 1.0, 3);
  return FlowParameters(nu, manufacture_forcing(*u_star, nu));
}

Trajectory sampled(const std::vector<double>& times, const std::function<SpectralField(double)>& state) {
  std::vector<SpectralField> states;
  for (double t : times) states.push_back(state(t));
  return Trajectory(times.front(), times.back(), times, std::move(states));
}

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> t;
  for (int i = 0; i <= n; ++i) t.push_back(a + (b - a) * i / n);
  return t;
}

}  // namespace

TEST_CASE("expectation of simple observables") {
  auto lat = WaveVectorLattice::create(8);
  Rng rng(1);
  const auto u = random_field(lat, rng, 1.0, 2);
  const auto v = random_field(lat, rng, 1.0, 2);
  const auto m = EmpiricalMeasure::uniform({u, v});
  CHECK(expect(m, [](const SpectralField&) { return 3.5; }) == doctest::Approx(3.5));
  const auto d = EmpiricalMeasure::dirac(u);
  CHECK(expect(d, [](const SpectralField& w) { return l2_norm(w); }) == l2_norm(u));
  CHECK(expect(m, [&](const SpectralField& w) { return &w == &m.atom(0) ? 0.0 : 2.0; }) == doctest::Approx(1.0));
  CHECK_THROWS_AS(expect(m, [](const SpectralField&) { return std::nan(""); }), NumericalError);

  CHECK_THROWS_AS(EmpiricalMeasure({0.5, 0.4}, {u, v}), std::invalid_argument);
  CHECK_THROWS_AS(EmpiricalMeasure({1.5, -0.5}, {u, v}), std::invalid_argument);
  CHECK_THROWS_AS(EmpiricalMeasure({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(EmpiricalMeasure({0.5, 0.5}, {u, SpectralField(WaveVectorLattice::create(10))}),
                  LatticeMismatchError);
}

TEST_CASE("psi family: value, derivative and monotonicity") {
  for (double r : {0.1, 1.0, 10.0}) {
    const PsiFunction psi(r);
    CHECK(psi.value(0.0) == 0.0);
    CHECK(psi.derivative(0.0) == 1.0);
    double prev = 0.0;
    for (double s = 0.05 * r; s < 20.0 * r; s *= 1.7) {
      CHECK(psi.value(s) > prev);
      prev = psi.value(s);
      CHECK(psi.derivative(s) > 0.0);
      CHECK(psi.derivative(s) <= 1.0);
      const double h = 1e-6 * std::max(1.0, s);
      CHECK((psi.value(s + h) - psi.value(s - h)) / (2 * h) == doctest::Approx(psi.derivative(s)).epsilon(1e-6));
    }
  }
  CHECK_THROWS(PsiFunction(0.0));
}

TEST_CASE("cylindrical test: compact support and Frechet derivative by finite differences") {
  auto lat = WaveVectorLattice::create(8);
  Rng rng(5);
  std::vector<SpectralField> dirs{random_field(lat, rng, 0.0, 1), random_field(lat, rng, 0.0, 2)};
  Eigen::VectorXd slope(2);
  slope << 0.7, -1.3;
  const CylindricalTest test(dirs, 0.4, slope, 5.0);
  const auto u = random_field_with_norm(lat, rng, 1.0, 1.0, 2);
  const auto w = random_field_with_norm(lat, rng, 1.0, 1.0, 2);
  const double eps = 1e-5;
  const double fd = (test.value(u + eps * w) - test.value(u - eps * w)) / (2 * eps);
  CHECK(fd == doctest::Approx(inner(test.derivative(u), w)).epsilon(1e-7));

  Eigen::VectorXd y = test.coordinates(u);
  CHECK(y(0) == doctest::Approx(inner(u, dirs[0])));
  // outside the support radius both phi and its gradient vanish
  const SpectralField far = u * (40.0 / std::max(1e-12, test.coordinates(u).norm()));
  CHECK(test.value(far) == 0.0);
  CHECK(l2_norm(test.derivative(far)) == 0.0);
  Eigen::VectorXd edge(2);
  edge << 5.0 * (1 - 1e-9), 0.0;
  CHECK(std::abs(test.profile(edge)) < 1e-100);
}

TEST_CASE("Liouville integrand is the derivative of Phi along the vector field") {
  auto lat = WaveVectorLattice::create(8);
  SpectralField u_star;
  const FlowParameters p = manufactured(lat, 11, 0.5, &u_star);
  Rng rng(12);
  const auto u = random_field_with_norm(lat, rng, 2.0, 1.0, 3);
  const auto tests = make_test_battery({u}, p, 10, 3);
  const SpectralField F = rhs_F(u, p);
  for (const auto& t : tests) {
    const double eps = 1e-6;
    const double fd = (t.value(u + eps * F) - t.value(u - eps * F)) / (2 * eps);
    CHECK(liouville_integrand(u, t, p) == doctest::Approx(fd).epsilon(1e-5).scale(1e-12));
  }
}

TEST_CASE("stationary Liouville residual vanishes at steady states") {
  auto lat = WaveVectorLattice::create(10);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    SpectralField u_star;
    const FlowParameters p = manufactured(lat, seed, 0.3, &u_star);
    const auto m = EmpiricalMeasure::dirac(u_star);
    const auto tests = make_test_battery({u_star}, p, 20, seed);
    REQUIRE(tests.size() == 20);
    int active = 0;
    const auto battery = liouville_battery(m, tests, p);
    for (std::size_t i = 0; i < tests.size(); ++i) {
      const auto r = liouville_residual_stationary(m, tests[i], p);
      CHECK(std::abs(r.residual) <= 1e-10 * r.scale);
      CHECK(battery[i].residual == doctest::Approx(r.residual).epsilon(1e-12).scale(1e-14 * r.scale));
      if (r.scale > 0) ++active;
    }
    CHECK(active >= 15);  // the battery is not trivially zero on the data
  }
  // f = 0, Dirac at 0: every term is zero
  const FlowParameters p0(1.0, SpectralField(lat));
  const auto zero = SpectralField(lat);
  Rng rng(4);
  const auto probe_dirs = make_test_battery({random_field(lat, rng, 1.0, 2)}, p0, 5, 9);
  for (const auto& t : probe_dirs) CHECK(liouville_residual_stationary(EmpiricalMeasure::dirac(zero), t, p0).residual == 0.0);

  // two non-steady states: visibly nonzero for some test
  SpectralField u_star;
  const FlowParameters p = manufactured(lat, 7, 0.3, &u_star);
  const auto a = random_field_with_norm(lat, rng, 3.0, 1.0, 2), b = random_field_with_norm(lat, rng, 3.0, 1.0, 2);
  const auto m = EmpiricalMeasure::uniform({a, b});
  double worst = 0.0;
  for (const auto& r : liouville_battery(m, make_test_battery({a, b}, p, 20, 1), p))
    worst = std::max(worst, std::abs(r.residual) / std::max(r.scale, 1e-300));
  CHECK(worst > 1e-3);
}

TEST_CASE("time-dependent Liouville residual") {
  auto lat = WaveVectorLattice::create(8);
  SpectralField u_star;
  const FlowParameters p = manufactured(lat, 21, 0.5, &u_star);
  const auto tests = make_test_battery({u_star}, p, 6, 2);

  SUBCASE("stationary family") {
    std::vector<Trajectory> members;
    for (int i = 0; i < 3; ++i) members.push_back(sampled(grid(0, 1, 10), [&](double) { return u_star; }));
    const auto family = measure_family(Ensemble::uniform(std::move(members)));
    for (const auto& t : tests) {
      const auto r = liouville_residual_timedep(family, t, 0.0, 1.0, p);
      CHECK(std::abs(r.residual) <= 1e-10 * std::max(1.0, r.scale));
      CHECK(liouville_residual_timedep(family, t, 0.3, 0.3, p).residual == 0.0);
    }
    CHECK_THROWS_AS(liouville_residual_timedep(family, tests[0], 0.0, 0.55, p), InsufficientCoverageError);
  }

  SUBCASE("second order along integrated ensembles") {
    Rng rng(8);
    std::vector<SpectralField> starts;
    for (int i = 0; i < 4; ++i) starts.push_back(random_field_with_norm(lat, rng, 4.0, 1.0, 3));
    const auto battery = make_test_battery(starts, p, 4, 6);
    auto residual = [&](double dt) {
      IntegratorConfig cfg;
      cfg.dt = dt;
      std::vector<Trajectory> members;
      for (const auto& s : starts) members.push_back(integrate(s, p, cfg, {0.0, 0.5}));
      const auto family = measure_family(Ensemble::uniform(std::move(members)));
      double worst = 0.0;
      for (const auto& t : battery)
        worst = std::max(worst, std::abs(liouville_residual_timedep(family, t, 0.0, 0.5, p).residual));
      return worst;
    };
    const double r1 = residual(0.02), r2 = residual(0.01), r3 = residual(0.005);
    CHECK(std::log2(r1 / r2) > 1.8);
    CHECK(std::log2(r2 / r3) > 1.8);
  }
}

TEST_CASE("strengthened energy inequality residual") {
  auto lat = WaveVectorLattice::create(8);
  const FlowParameters p0(1.0, SpectralField(lat));
  CHECK(energy_inequality_residual(EmpiricalMeasure::dirac(SpectralField(lat)), PsiFunction(1.0), p0) == 0.0);

  const double nu = 0.7;
  const FlowParameters p(nu, sine_mode(lat, 2.0));
  const SpectralField u_star = p.forcing() * (1.0 / (nu * p.lambda1()));
  const double R0sq = std::pow(p.absorbing_radius(), 2);
  for (double r : {0.1, 1.0, 10.0}) {
    const double S = energy_inequality_residual(EmpiricalMeasure::dirac(u_star), PsiFunction(r * R0sq), p);
    CHECK(std::abs(S) <= 1e-10 * R0sq);
  }
  const SpectralField inflated = u_star * 2.0;
  const auto m = EmpiricalMeasure({0.5, 0.5}, {u_star, inflated});
  CHECK(energy_inequality_residual(m, PsiFunction(R0sq), p) > 0.0);
}

TEST_CASE("time averages of steady, periodic and decaying trajectories") {
  auto lat = WaveVectorLattice::create(8);
  const auto a = sine_mode(lat, 1.0);
  const auto b = single_mode(lat, 1, 0, 0, Eigen::Vector3cd(0.0, 0.5, 0.0));  // e_2 cos x_1
  const std::vector<Observable> probes{energy_observable(), projection_observable("a", a)};

  SUBCASE("steady") {
    const auto traj = sampled(grid(0, 8, 80), [&](double) { return a; });
    const auto res = time_average_measure(traj, {1.0, 2.0, 4.0, 8.0}, 0.0, probes);
    CHECK(res.converged);
    for (const auto& m : res.measures) {
      double total = 0.0;
      for (double w : m.weights()) total += w;
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(expect(m, energy_observable().evaluate) == doctest::Approx(0.5 * l2_norm(a) * l2_norm(a)).epsilon(1e-14));
    }
  }
  SUBCASE("periodic with whole-period windows") {
    const double P = 1.25;
    auto state = [&](double t) { return std::cos(two_pi * t / P) * a + std::sin(two_pi * t / P) * b; };
    const auto traj = sampled(grid(0, 10 * P, 2000), state);
    const auto res = time_average_measure(traj, {P, 2 * P, 4 * P, 8 * P}, 0.3, probes);
    const auto proj = projection_observable("a", a);
    for (const auto& m : res.measures) {
      CHECK(std::abs(expect(m, proj.evaluate)) < 1e-12);
      double max_e = 0.0;
      for (std::size_t i = 0; i < traj.size(); ++i) max_e = std::max(max_e, 0.5 * std::pow(l2_norm(traj.state(i)), 2));
      CHECK(expect(m, energy_observable().evaluate) <= max_e * (1 + 1e-12));
    }
    CHECK(res.converged);

    const auto st = stationarity_diagnostic(traj, probes, {P, 2 * P}, 4 * P);
    CHECK(st.max_gap < 1e-12);
    CHECK(st.stationary);
  }
  SUBCASE("decaying flow") {
    const double nu = 0.2;
    const auto traj = sampled(grid(0, 40, 800), [&](double t) { return taylor_green_exact(t, nu, lat); });
    const auto res = time_average_measure(traj, {5.0, 10.0, 20.0, 40.0}, 0.0, probes);
    double prev = INFINITY;
    for (const auto& m : res.measures) {
      const auto mr = moment_report(m);
      CHECK(mr.energy < prev);
      prev = mr.energy;
    }
    CHECK(prev < 0.2 * moment_report(res.measures.front()).energy);
    CHECK_FALSE(res.converged);
    const auto st = stationarity_diagnostic(traj, probes, {10.0});
    CHECK_FALSE(st.stationary);
    CHECK(st.max_relative_gap > 0.02);
  }
  SUBCASE("coverage") {
    const auto traj = sampled(grid(0, 2, 20), [&](double) { return a; });
    CHECK_THROWS_AS(time_average_measure(traj, {1.0, 3.0}, 0.0, probes), InsufficientCoverageError);
  }
}

TEST_CASE("moments of Dirac and two-atom measures") {
  auto lat = WaveVectorLattice::create(12);
  const auto zero = moment_report(EmpiricalMeasure::dirac(SpectralField(lat)));
  CHECK(zero.energy == 0.0);
  CHECK(zero.enstrophy == 0.0);
  CHECK(zero.stokes23 == 0.0);
  CHECK(zero.linf == 0.0);

  const double A = 1.7, vol = lat->volume();
  const auto m = moment_report(EmpiricalMeasure::dirac(sine_mode(lat, A)));
  const double e = A * A * vol / 2;  // |u|^2, lambda_1 = 1
  CHECK(m.energy == doctest::Approx(e).epsilon(1e-13));
  CHECK(m.enstrophy == doctest::Approx(e).epsilon(1e-13));
  CHECK(m.stokes23 == doctest::Approx(std::cbrt(e)).epsilon(1e-13));
  CHECK(m.linf == doctest::Approx(A).epsilon(1e-12));

  const auto two = moment_report(EmpiricalMeasure({0.25, 0.75}, {sine_mode(lat, 1.0), sine_mode(lat, 2.0)}));
  CHECK(two.energy == doctest::Approx(0.25 * vol / 2 + 0.75 * 4 * vol / 2).epsilon(1e-13));
  CHECK(two.linf == doctest::Approx(0.25 + 1.5).epsilon(1e-12));
}

TEST_CASE("measure file round-trips bit-exactly") {
  auto lat = WaveVectorLattice::create(8, {two_pi, 3.0, 5.0});
  Rng rng(77);
  std::vector<SpectralField> atoms;
  for (int i = 0; i < 3; ++i) atoms.push_back(random_field(lat, rng, 1.0));
  MeasureProvenance prov{"time-average", "run-7", 2.5, 10.0};
  const EmpiricalMeasure m({0.2, 0.3, 0.5}, atoms, prov);
  const std::string bytes = encode_measure(m, 0.01);
  const EmpiricalMeasure back = decode_measure(bytes);
  REQUIRE(back.size() == 3);
  CHECK(back.provenance().kind == "time-average");
  CHECK(back.provenance().source == "run-7");
  CHECK(back.provenance().window_start == 2.5);
  CHECK(back.provenance().window_length == 10.0);
  CHECK(*back.lattice_ptr() == *lat);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.weight(i) == m.weight(i));
    CHECK(std::memcmp(back.atom(i).coefficients().data(), m.atom(i).coefficients().data(),
                      sizeof(Complex) * m.atom(i).coefficients().size()) == 0);
  }
  CHECK(encode_measure(back, 0.01) == bytes);
  CHECK_THROWS_AS(decode_measure(bytes.substr(0, 40)), FormatError);
  std::string bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_measure(bad), FormatError);
}
