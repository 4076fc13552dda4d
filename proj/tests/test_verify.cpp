#include "doctest.h"

#include "json.hpp"
#include "nsstat/dynamics.hpp"
#include "nsstat/errors.hpp"
#include "nsstat/random_fields.hpp"
#include "nsstat/verify.hpp"

#include <cmath>

using namespace nsstat;

namespace {

SpectralField sine_mode(const LatticePtr& lat, double amplitude) {
  return single_mode(lat, 0, 1, 0, Eigen::Vector3cd(Complex(0.0, -0.5 * amplitude), 0.0, 0.0));
}

Trajectory sampled(const std::vector<double>& times, const std::function<SpectralField(double)>& state) {
  std::vector<SpectralField> states;
  for (double t : times) states.push_back(state(t));
  return Trajectory(times.front(), times.back(), times, std::move(states));
}

// Rotation in the plane of two orthogonal modes with period P.
struct Orbit {
  SpectralField a, b;
  double P;
  SpectralField at(double t) const { return std::cos(two_pi * t / P) * a + std::sin(two_pi * t / P) * b; }
};

Orbit make_orbit(const LatticePtr& lat, double P) {
  return {sine_mode(lat, 1.0), single_mode(lat, 1, 0, 0, Eigen::Vector3cd(0.0, 0.5, 0.0)), P};
}

}  // namespace

TEST_CASE("verdict is a function of left, right and tolerance") {
  const Tolerance tol{1e-10, 0.0};
  CHECK(decide(1.0, 1.0, tol) == Verdict::pass);
  CHECK(decide(1.0 + 5e-11, 1.0, tol) == Verdict::pass);
  CHECK(decide(1.0 + 2e-10, 1.0, tol) == Verdict::fail);
  CHECK(decide(0.0, 0.0, tol) == Verdict::pass);
  CHECK(decide(1e-13, 0.0, tol) == Verdict::fail);
  CHECK(decide(1e-13, 0.0, Tolerance{1e-10, 1e-12}) == Verdict::pass);
  CHECK(decide(std::nan(""), 1.0, tol) == Verdict::inconclusive);
  CHECK(decide(1.0, INFINITY, tol) == Verdict::inconclusive);
  CHECK(to_string(Verdict::inconclusive) == "INCONCLUSIVE");
  auto r = make_report("x", 2.0, 1.0, tol);
  CHECK_FALSE(r.ok());
  auto outer = make_report("y", 0.0, 1.0, tol);
  outer.details.push_back(r);
  CHECK_FALSE(outer.ok());
}

TEST_CASE("moment bounds at the lambda_1 steady mode") {
  auto lat = WaveVectorLattice::create(12);
  const double nu = 0.37;
  const FlowParameters p(nu, sine_mode(lat, 1.3));
  const SpectralField u_star = p.forcing() * (1.0 / (nu * p.lambda1()));
  const auto dirac = EmpiricalMeasure::dirac(u_star);
  const double f = p.forcing_norm(), l1 = p.lambda1();

  const auto ens = check_time_avg_enstrophy(dirac, p);
  CHECK(ens.left == doctest::Approx(f * f / (nu * nu * l1)).epsilon(1e-12));
  CHECK(std::abs(ens.left - ens.right) <= 1e-10 * ens.right);
  CHECK(ens.verdict == Verdict::pass);

  const auto c = ShapeConstants::from(0.3, 1.0, ConstantsProvenance::user_supplied);
  const auto da = check_da_moment(dirac, p, c);
  CHECK(da.left == doctest::Approx(std::cbrt(f * f / (nu * nu))).epsilon(1e-12));
  const double G = f / (nu * nu * std::pow(l1, 0.75));
  CHECK(da.right == doctest::Approx(c.c3 * std::sqrt(l1) * std::cbrt(nu * nu) * G * G).epsilon(1e-12));
  CHECK(da.verdict == decide(da.left, da.right, {}));

  // single mode: |u|_inf = A, ||u||^2 = lambda_1 |u|^2, |Au| = lambda_1 |u|
  const double A = 1.3 / (nu * l1), h = l2_norm(u_star);
  const auto linf = check_linf_moment(dirac, p, c);
  CHECK(linf.left == doctest::Approx(A).epsilon(1e-12));
  REQUIRE(linf.details.size() == 1);
  const auto& chain = linf.details.front();
  const double c1_mode = A / std::sqrt(std::sqrt(l1) * h * l1 * h);
  CHECK(chain.extras.at("c1_refined") == doctest::Approx(std::max(0.3, c1_mode)).epsilon(1e-12));
  CHECK(chain.extras.at("right_with_c1_refined") >= chain.left * (1 - 1e-12));
}

TEST_CASE("f = 0 bounds") {
  auto lat = WaveVectorLattice::create(8);
  const FlowParameters p(1.0, SpectralField(lat));
  const auto zero = EmpiricalMeasure::dirac(SpectralField(lat));
  const auto c = ShapeConstants::from(0.3, 1.0, ConstantsProvenance::user_supplied);
  for (const auto& r : {check_time_avg_enstrophy(zero, p), check_da_moment(zero, p, c), check_linf_moment(zero, p, c),
                        attractor_ball_check(zero, p)}) {
    CHECK(r.left == 0.0);
    CHECK(r.right == 0.0);
    CHECK(r.verdict == Verdict::pass);
  }
  const auto traj = sampled({0.0, 0.5, 1.0}, [&](double t) { return taylor_green_exact(t, 1.0, lat); });
  const auto da = check_da_moment(traj, p, c);
  CHECK(da.right == 0.0);
  REQUIRE(da.details.size() == 1);
  CHECK(da.details.front().verdict == Verdict::inconclusive);
  CHECK(da.details.front().right == INFINITY);
}

TEST_CASE("Gamma and the tau condition") {
  CHECK(gamma(-0.25, 1.0, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(gamma(0.0, 1.0, 0.0, 1.0), OutOfIntervalError);
  CHECK_THROWS_AS(gamma(0.1, 1.0, 0.0, 1.0), OutOfIntervalError);
  double prev = -INFINITY;
  for (double t = -1.0; t < -1e-12; t *= 0.1) {
    const double g = gamma(t, 0.8, 2.0, 1.5);
    CHECK(g > prev);
    prev = g;
  }
  CHECK(prev > 1e5);

  // sign change located by bisection against |t| = nu^{5/3} / (4 c4^2 |f|^{4/3})
  const double nu = 0.6, f = 3.0, c4 = 1.7;
  double lo = -100.0, hi = -1e-12;  // gamma(lo) < 0 < gamma(hi)
  REQUIRE(gamma(lo, nu, f, c4) < 0.0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gamma(mid, nu, f, c4) < 0.0 ? lo : hi) = mid;
  }
  CHECK(-lo == doctest::Approx(std::pow(nu, 5.0 / 3.0) / (4 * c4 * c4 * std::pow(f, 4.0 / 3.0))).epsilon(1e-12));

  CHECK(tau_condition(1.0, 1.0, 1.0, 1.0) == 0.25);
  CHECK(tau_condition(1.0, 1.0, 0.0, 1.0) == INFINITY);
  const double tmax = tau_condition(0.5, 2.0, 7.0, 1.2);
  CHECK_THROWS_AS(regular_fraction_rhs(tmax, 0.5, 2.0, 7.0, 1.2), OutOfIntervalError);
  CHECK_THROWS_AS(regular_fraction_rhs(0.0, 0.5, 2.0, 7.0, 1.2), OutOfIntervalError);
  CHECK_THROWS_AS(regular_fraction_rhs(-1.0, 0.5, 2.0, 7.0, 1.2), OutOfIntervalError);
  CHECK_THROWS_AS(regular_fraction_chained(tmax, 0.5, 2.0, 7.0, 1.2), OutOfIntervalError);
  CHECK_NOTHROW(regular_fraction_rhs(std::nextafter(tmax, 0.0), 0.5, 2.0, 7.0, 1.2));
}

TEST_CASE("regular-fraction bound values") {
  // tau = tau_max / 4 = 1/16 at G = nu = lambda_1 = c4 = 1: 4 (1/4) / (1 - 2 (1/4)) = 2
  CHECK(regular_fraction_rhs(1.0 / 16, 1.0, 1.0, 1.0, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(regular_fraction_rhs(1e-16, 1.0, 1.0, 1.0, 1.0) < 1e-7);
  // chained form at the same point: 2 / (1 / (2 * 1/4) - 1) = 2
  CHECK(regular_fraction_chained(1.0 / 16, 1.0, 1.0, 1.0, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
  // for G != 1 the two forms differ by the power of G in the numerator
  const double rhs = regular_fraction_rhs(1e-4, 1.0, 1.0, 3.0, 1.0);
  const double chained = regular_fraction_chained(1e-4, 1.0, 1.0, 3.0, 1.0);
  CHECK(chained / rhs == doctest::Approx(3.0).epsilon(1e-14));

  auto lat = WaveVectorLattice::create(8);
  Rng rng(3);
  SpectralField f = random_field(lat, rng, 1.0, 2);
  f *= 2.0 / l2_norm(f);
  const FlowParameters p(1.0, f);
  const auto c = ShapeConstants::from(0.3, 1.0, ConstantsProvenance::user_supplied);
  const double tau = tau_condition(p, c) / 4;
  const auto no_ensemble = regular_fraction_bound(tau, p, c);
  CHECK(no_ensemble.verdict == Verdict::inconclusive);

  IntegratorConfig cfg;
  cfg.dt = tau / 20;
  std::vector<Trajectory> members;
  for (int i = 0; i < 4; ++i) members.push_back(integrate(random_field_with_norm(lat, rng, 1.0), p, cfg, {0.0, 4 * tau}));
  const Ensemble smooth = Ensemble::uniform(members);
  const auto r = regular_fraction_bound(tau, p, c, &smooth, 2.5 * tau);
  CHECK(r.left == 0.0);
  CHECK(r.verdict == Verdict::pass);

  // an enstrophy spike above Gamma over a full tau window is flagged
  std::vector<double> times;
  for (int i = 0; i <= 80; ++i) times.push_back(4 * tau * i / 80);
  const auto spike = sampled(times, [&](double) { return random_field_with_norm(lat, rng, 1e6); });
  CHECK(gamma_screen(spike, tau, 2.5 * tau, p, c));
  members.push_back(spike);
  const Ensemble mixed = Ensemble::uniform(members);
  CHECK(regular_fraction_bound(tau, p, c, &mixed, 2.5 * tau).left == doctest::Approx(0.2));
  CHECK_THROWS_AS(regular_fraction_bound(tau, p, c, &mixed, 0.5 * tau), InsufficientCoverageError);
}

TEST_CASE("attractor ball check") {
  auto lat = WaveVectorLattice::create(8);
  const double nu = 0.5;
  const FlowParameters p(nu, sine_mode(lat, 1.0));
  const SpectralField u_star = p.forcing() * (1.0 / (nu * p.lambda1()));
  CHECK(l2_norm(u_star) == doctest::Approx(p.absorbing_radius()).epsilon(1e-14));
  CHECK(attractor_ball_check(EmpiricalMeasure::dirac(SpectralField(lat)), p).verdict == Verdict::pass);
  CHECK(attractor_ball_check(EmpiricalMeasure::dirac(u_star), p).verdict == Verdict::pass);
  const auto bad = attractor_ball_check(EmpiricalMeasure({0.75, 0.25}, {u_star, 2.0 * u_star}), p);
  CHECK(bad.verdict == Verdict::fail);
  CHECK(bad.left == 0.25);
  CHECK(bad.extras.at("mass_inside") == 0.75);
}

TEST_CASE("set predicates") {
  auto lat = WaveVectorLattice::create(8);
  const auto u = sine_mode(lat, 1.0);
  const auto set = SetPredicate::parse("energy=[0, 1e3]; mode:0,1,0:0:im=[-0.6,-0.4]", std::nullopt);
  REQUIRE(set.constraints().size() == 2);
  CHECK(set.contains(u));
  CHECK_FALSE(set.contains(2.0 * u));
  CHECK_FALSE(set.contains(SpectralField(lat)));
  const auto again = SetPredicate::parse(set.describe());
  CHECK(again.describe() == set.describe());
  CHECK_THROWS(SetPredicate::parse("energy=[2,1]"));
  CHECK_THROWS(SetPredicate::parse("energy=2"));
  CHECK_THROWS(SetPredicate::parse("bogus=[0,1]"));
  CHECK_THROWS(SetPredicate::parse("forcing=[0,1]"));
  CHECK_THROWS(SetPredicate::parse(""));
  CHECK(SetPredicate::parse("forcing=[0.9,1.1]", u).contains(u * (1.0 / l2_norm(u))));
}

TEST_CASE("accretion on finite invariant measures") {
  auto lat = WaveVectorLattice::create(8);
  const Orbit orbit = make_orbit(lat, 1.0);
  const int N = 24;
  std::vector<SpectralField> atoms;
  for (int j = 0; j < N; ++j) atoms.push_back(orbit.at(static_cast<double>(j) / N));
  const auto m = EmpiricalMeasure::uniform(atoms);
  const FlowMap rotate = [&](const SpectralField& u, double t) {
    // rotation of the (a, b) plane by 2 pi t / P
    const double x = inner(u, orbit.a) / inner(orbit.a, orbit.a), y = inner(u, orbit.b) / inner(orbit.b, orbit.b);
    const double th = two_pi * t / orbit.P;
    return (std::cos(th) * x - std::sin(th) * y) * orbit.a + (std::sin(th) * x + std::cos(th) * y) * orbit.b;
  };
  const std::vector<double> times{1.0 / N, 5.0 / N, 10.0 / N};

  const auto everything = accretion_estimate(m, SetPredicate::parse("energy=[0,1e9]"), times, rotate);
  for (const auto& row : everything.rows) {
    CHECK(row.mass_in_set == doctest::Approx(1.0));
    CHECK(row.mass_of_image == doctest::Approx(1.0));
    CHECK(row.exact_holds);
  }

  // half the orbit: cosine coordinate >= 0
  const auto half = SetPredicate::parse("mode:0,1,0:0:im=[-1,1e-12]");
  int hand = 0;
  for (int j = 0; j < N; ++j) hand += std::cos(two_pi * j / N) >= -1e-12 ? 1 : 0;
  const auto rep = accretion_estimate(m, half, times, rotate);
  CHECK(rep.pass);
  for (const auto& row : rep.rows) {
    CHECK(row.mass_in_set == doctest::Approx(static_cast<double>(hand) / N).epsilon(1e-14));
    CHECK(row.mass_of_image == doctest::Approx(row.mass_in_set).epsilon(1e-14));
    CHECK(row.unmatched == 0);
    CHECK(row.exact_holds);
  }
  CHECK(nlohmann::json::parse(accretion_json(rep))["rows"].size() == 3);

  // Dirac at a steady state under the true flow
  SpectralField f = sine_mode(lat, 1.0);
  const FlowParameters p(0.5, f);
  const SpectralField u_star = f * (1.0 / (0.5 * p.lambda1()));
  IntegratorConfig cfg;
  cfg.dt = 0.01;
  const FlowMap flow = [&](const SpectralField& u, double t) {
    return integrate(u, p, cfg, {0.0, t}).states().back();
  };
  const auto steady = accretion_estimate(EmpiricalMeasure::dirac(u_star), SetPredicate::parse("energy=[0,1e9]"),
                                         {0.1, 0.5}, flow);
  for (const auto& row : steady.rows) CHECK(row.mass_of_image == 1.0);

  CHECK(wilson_halfwidth(0.5, 100) == doctest::Approx(0.0962).epsilon(1e-3));
}

TEST_CASE("recurrence statistics") {
  auto lat = WaveVectorLattice::create(8);
  std::vector<double> times;
  for (int i = 0; i <= 400; ++i) times.push_back(0.05 * i);
  const auto u = sine_mode(lat, 1.0);
  const auto all = SetPredicate::parse("energy=[0,1e9]");

  const auto steady = sampled(times, [&](double) { return u; });
  const auto rs = recurrence_scan(steady, all, 1.0, 0.0);
  CHECK(rs.fraction == 1.0);
  REQUIRE(rs.mode);
  CHECK(*rs.mode == doctest::Approx(0.05));
  CHECK(rs.visits == 381);

  const auto none = recurrence_scan(steady, SetPredicate::parse("energy=[1e8,1e9]"), 1.0, 0.0);
  CHECK(none.visits == 0);
  CHECK_FALSE(none.mode);
  CHECK(recurrence_csv(none) == "return_time,count\n");
  CHECK(nlohmann::json::parse(recurrence_json(none))["empty"] == true);

  const double P = 1.37;
  const Orbit orbit = make_orbit(lat, P);
  const auto periodic = sampled(times, [&](double t) { return orbit.at(t); });
  // box around phase zero a little wider than one stride: one or two samples per passage
  const auto box = SetPredicate::parse("mode:0,1,0:0:im=[-0.5,-0.49603]");
  const auto rp = recurrence_scan(periodic, box, 3 * P, P / 2);
  CHECK(rp.visits > 5);
  CHECK(rp.fraction == 1.0);
  REQUIRE(rp.mode);
  CHECK(std::abs(*rp.mode - P) <= 0.05);
  for (double t : rp.return_times) CHECK(std::abs(t - P) < 0.05);

  const auto re = recurrence_scan(Ensemble::uniform({periodic, periodic}), box, 3 * P, P / 2);
  CHECK(re.visits == 2 * rp.visits);
}

TEST_CASE("suite json carries every report") {
  const auto j = nlohmann::json::parse(
      suite_json({make_report("a", 1.0, 2.0, {}), make_report("b", 3.0, 2.0, {}), make_report("c", 0.0, INFINITY, {})}));
  CHECK(j["reports"].size() == 3);
  CHECK(j["reports"]["b"]["verdict"] == "FAIL");
  CHECK(j["reports"]["c"]["verdict"] == "INCONCLUSIVE");
  CHECK(j["pass"] == false);
}
