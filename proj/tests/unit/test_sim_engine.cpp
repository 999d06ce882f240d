#include "doctest.h"

#include <cmath>

#include "darwinics/darwin_two_body.hpp"
#include "darwinics/errors.hpp"
#include "darwinics/sim_engine.hpp"
#include "support/oracles.hpp"

using namespace darwinics;
using namespace darwinics::sim;

namespace {

DynamicalSystem two_charges(const PointCharge& a, const PointCharge& b, double c) {
  DynamicalSystem s;
  s.bodies = {{"a", a}, {"b", b}};
  s.provider = Provider::Darwin;
  s.units = Units::make(c, 1.0);
  return s;
}

DynamicalSystem kepler(double c) {
  // Circular relative orbit of separation 1: k = 1, reduced mass 1/2, relative speed sqrt(2).
  const double h = std::sqrt(2.0) / 2.0;
  return two_charges({1.0, 1.0, {-0.5, 0, 0}, {0, -h, 0}}, {-1.0, 1.0, {0.5, 0, 0}, {0, h, 0}}, c);
}

DynamicalSystem mott_schwinger(Provider p, double c = 20.0) {
  DynamicalSystem s;
  s.bodies = {{"q", PointCharge{1.0, 1.0, {}, {}}}, {"mu", MagneticDipole{{0, 0, 0.5}, 1.0, {}, {}}, false}};
  s.provider = p;
  s.units = Units::make(c, 1.0);
  return s;
}

DynamicalSystem aharonov_bohm(Provider p, double c = 10.0) {
  DynamicalSystem s;
  s.bodies = {{"q", PointCharge{1.0, 1.0, {-3, 1, 0}, {1, 0, 0}}}, {"sol", LineSolenoid{0.5, {}, 1.0, {}}}};
  s.provider = p;
  s.units = Units::make(c, 1.0);
  return s;
}

DynamicalSystem aharonov_casher(Provider p, double c = 10.0) {
  DynamicalSystem s;
  s.bodies = {{"mu", MagneticDipole{{0, 0, 0.4}, 1.0, {-2, 1.5, 0}, {0.5, 0.1, 0}}},
              {"wire", LineCharge{0.8, {}, 1.0, {}}, false}};
  s.provider = p;
  s.units = Units::make(c, 1.0);
  return s;
}

double state_distance(const State& a, const State& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max({d, norm(a[i].r - b[i].r), norm(a[i].v - b[i].v)});
  return d;
}

}  // namespace

TEST_CASE("neutral bodies move on straight lines") {
  const auto sys = two_charges({0.0, 1.0, {0, 0, 0}, {1, 0.5, 0}}, {0.0, 2.0, {3, 0, 0}, {0, -1, 0.2}}, 5.0);
  const Trajectory tr = integrate(sys, 0.0, 4.0);
  const State& end = tr.states.back();
  CHECK(approx_equal(end[0].r, Vec3{4, 2, 0}, 1e-12, 1e-12));
  CHECK(approx_equal(end[1].r, Vec3{3, -4, 0.8}, 1e-12, 1e-12));
  CHECK(approx_equal(end[1].v, Vec3{0, -1, 0.2}, 1e-14, 1e-14));
}

TEST_CASE("weakly relativistic Kepler orbit closes after the Newtonian period") {
  const DynamicalSystem sys = kepler(1e6);
  const double period = oracle::kepler_period(1.0, 0.5, oracle::kepler_semi_major(1.0, 0.5, 1.0, std::sqrt(2.0)));
  CHECK(period == doctest::Approx(2.0 * kPi / std::sqrt(2.0)).epsilon(1e-12));
  IntegratorConfig cfg;
  cfg.tol = 1e-12;
  const Trajectory tr = integrate(sys, 0.0, period, cfg);
  CHECK(state_distance(tr.states.front(), tr.states.back()) < 1e-8);
  const LedgerReport rep = ledger_report(tr);
  CHECK(rep.energy_drift < 1e-10);
  CHECK(rep.canonical_drift < 1e-10);
}

TEST_CASE("Feynman pair: canonical momentum conserved while mechanical momentum changes") {
  const auto tb = darwin::feynman_configuration(1.0, 1.0, 1.0, 0.1);
  DynamicalSystem sys = two_charges(tb.body1, tb.body2, 10.0);
  IntegratorConfig cfg;
  cfg.samples = 100;
  const Trajectory tr = integrate(sys, 0.0, 20.0, cfg);
  REQUIRE(tr.states.size() == 101);
  const LedgerReport rep = ledger_report(tr);
  CHECK(rep.canonical_drift < 1e-8);
  CHECK(rep.energy_drift < 1e-8);
  CHECK(norm(rep.mechanical_change) > 1e4 * rep.canonical_drift * rep.momentum_scale);
  // Mechanical change is taken up by the field.
  const Vec3 dfield = tr.ledger.back().field - tr.ledger.front().field;
  CHECK(norm(rep.mechanical_change + dfield) < 1e-8 * rep.momentum_scale);
}

TEST_CASE("fixed-step RK4 converges at fourth order") {
  const DynamicalSystem sys = kepler(50.0);
  IntegratorConfig ref;
  ref.tol = 1e-13;
  const State exact = integrate(sys, 0.0, 3.0, ref).states.back();
  double previous = 0.0;
  for (double dt : {0.02, 0.01, 0.005}) {
    IntegratorConfig cfg;
    cfg.method = Method::Rk4Fixed;
    cfg.dt = dt;
    const double err = state_distance(integrate(sys, 0.0, 3.0, cfg).states.back(), exact);
    if (previous > 0.0) CHECK(previous / err > 10.0);
    previous = err;
  }
}

TEST_CASE("time reversal retraces the trajectory") {
  IntegratorConfig cfg;
  cfg.tol = 1e-12;
  for (const DynamicalSystem& sys : {kepler(20.0), aharonov_casher(Provider::Hamiltonian),
                                     aharonov_casher(Provider::ConstrainedLagrangian)}) {
    const Trajectory fwd = integrate(sys, 0.0, 2.0, cfg);
    const DynamicalSystem rev = time_reversed(sys, fwd.states.back());
    const State back = integrate(rev, 0.0, 2.0, cfg).states.back();
    for (std::size_t i = 0; i < back.size(); ++i) {
      CHECK(norm(back[i].r - fwd.states.front()[i].r) < 1e-8);
      CHECK(norm(back[i].v + fwd.states.front()[i].v) < 1e-8);
    }
  }
}

TEST_CASE("coupling scan: Darwin correction falls as 1/c^2") {
  // Deviation of the Darwin end state from the near-Newtonian one.
  IntegratorConfig cfg;
  cfg.tol = 1e-12;
  const State newton = integrate(kepler(1e7), 0.0, 2.0, cfg).states.back();
  const double d1 = state_distance(integrate(kepler(10.0), 0.0, 2.0, cfg).states.back(), newton);
  const double d2 = state_distance(integrate(kepler(20.0), 0.0, 2.0, cfg).states.back(), newton);
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("A-B pair: solenoid force balances the field momentum rate") {
  const Trajectory tr = integrate(aharonov_bohm(Provider::UnconstrainedForce), 0.0, 6.0, {});
  const LedgerReport rep = ledger_report(tr);
  CHECK(rep.max_force_ratio_error < 1e-9);
  // The charge is force-free; the solenoid picks up what the field gives away.
  CHECK(rep.mechanical_drift > 1e-3);
  const Vec3 dfield = tr.ledger.back().field - tr.ledger.front().field;
  CHECK(norm(rep.mechanical_change + dfield) < 1e-8 * rep.momentum_scale);
}

TEST_CASE("A-C pair: Hamiltonian and Lagrangian providers conserve their energies") {
  for (Provider p : {Provider::Hamiltonian, Provider::ConstrainedLagrangian, Provider::HiddenMomentum}) {
    const LedgerReport rep = ledger_report(integrate(aharonov_casher(p), 0.0, 5.0, {}));
    CHECK(rep.energy_drift < 1e-8);
  }
}

TEST_CASE("validation of pairings and providers") {
  CHECK(validate(kepler(3.0)) == SystemKind::TwoCharges);
  CHECK(validate(aharonov_bohm(Provider::UnconstrainedForce)) == SystemKind::AharonovBohm);
  CHECK_THROWS_AS(validate(aharonov_bohm(Provider::Hamiltonian)), ValidationError);
  CHECK_THROWS_AS(validate(aharonov_bohm(Provider::Darwin)), ValidationError);
  CHECK_THROWS_AS(validate(mott_schwinger(Provider::Darwin)), ValidationError);
  DynamicalSystem two = kepler(3.0);
  two.provider = Provider::UnconstrainedForce;
  CHECK_THROWS_AS(validate(two), ValidationError);
  two = kepler(3.0);
  two.bodies[1].dynamic = false;
  CHECK_THROWS_AS(validate(two), ValidationError);
  two.bodies.pop_back();
  CHECK_THROWS_AS(validate(two), ValidationError);

  DynamicalSystem ac = aharonov_casher(Provider::Hamiltonian);
  ac.bodies[1].dynamic = true;
  CHECK_THROWS_AS(validate(ac), ValidationError);
  ac = aharonov_casher(Provider::ConstrainedLagrangian);
  ac.bodies[0].dynamic = false;
  CHECK_THROWS_AS(validate(ac), ValidationError);
  ac.bodies[0].dynamic = true;
  ac.bodies[1].length = 0.0;
  CHECK_THROWS_AS(validate(ac), ValidationError);

  IntegratorConfig cfg;
  cfg.tol = 0.0;
  CHECK_THROWS_AS(integrate(kepler(3.0), 0.0, 1.0, cfg), ValidationError);
  CHECK_THROWS_AS(integrate(kepler(3.0), 1.0, 1.0, {}), ValidationError);
  cfg = {};
  cfg.method = Method::Rk4Fixed;
  CHECK_THROWS_AS(integrate(kepler(3.0), 0.0, 1.0, cfg), ValidationError);
  cfg = {};
  cfg.max_steps = 3;
  CHECK_THROWS_AS(integrate(kepler(3.0), 0.0, 10.0, cfg), StepSizeUnderflowError);
}

TEST_CASE("Mott-Schwinger scattering: closed-form impulses, mode agreement") {
  const double b = 2.0, v = 0.5, c = 20.0;
  // |J| = 2 q mu / (c b^2) for a straight pass.
  const double j = 2.0 * 0.5 * 1.0 / (c * b * b);
  ScatterConfig cfg;
  cfg.cutoff_multiple = 100.0;
  const ScatteringResult un = scattering_run(mott_schwinger(Provider::UnconstrainedForce), b, v, ScatterMode::ImpulseApprox, cfg);
  REQUIRE(un.bodies.size() == 2);
  CHECK(norm(un.bodies[0].impulse + un.bodies[1].impulse) < 1e-9 * j);
  CHECK(std::fabs(norm(un.bodies[0].impulse) - j) < 1e-6 * j);

  const ScatteringResult co = scattering_run(mott_schwinger(Provider::ConstrainedLagrangian), b, v, ScatterMode::ImpulseApprox, cfg);
  CHECK(norm(co.bodies[0].impulse + co.bodies[1].impulse) < 1e-9 * j);
  // Same impulses, but only the unconstrained dipole is displaced.
  CHECK(norm(co.bodies[0].impulse - un.bodies[0].impulse) < 1e-9 * j);
  CHECK(norm(un.bodies[1].displacement) > 1e-2);
  CHECK(norm(co.bodies[1].displacement) < 1e-12);

  // Weak coupling: the full integration approaches the straight-path result.
  const ScatteringResult full = scattering_run(mott_schwinger(Provider::UnconstrainedForce, 2000.0), b, v, ScatterMode::Full, cfg);
  const ScatteringResult approx = scattering_run(mott_schwinger(Provider::UnconstrainedForce, 2000.0), b, v, ScatterMode::ImpulseApprox, cfg);
  const double j_weak = norm(approx.bodies[0].impulse);
  CHECK(norm(full.bodies[0].impulse - approx.bodies[0].impulse) < 1e-3 * j_weak);

  CHECK_THROWS_AS(scattering_run(mott_schwinger(Provider::UnconstrainedForce), -1.0, v, ScatterMode::ImpulseApprox),
                  ValidationError);
  CHECK_THROWS_AS(scattering_run(mott_schwinger(Provider::UnconstrainedForce), b, 0.0, ScatterMode::ImpulseApprox),
                  ValidationError);
  ScatterConfig shortcut;
  shortcut.cutoff_multiple = 5.0;
  CHECK_THROWS_AS(scattering_run(mott_schwinger(Provider::UnconstrainedForce), b, v, ScatterMode::ImpulseApprox, shortcut),
                  ValidationError);
}

TEST_CASE("A-B scattering: zero impulse, solenoid offset qPhi/(2Mcv)") {
  const double b = 1.5, v = 0.8, c = 10.0;
  const ScatteringResult r = scattering_run(aharonov_bohm(Provider::UnconstrainedForce, c), b, v, ScatterMode::ImpulseApprox);
  CHECK(norm(r.bodies[0].impulse) < 1e-8);
  CHECK(norm(r.bodies[1].impulse) < 1e-8);
  CHECK(norm(r.bodies[0].displacement) == 0.0);
  CHECK(r.bodies[1].displacement.x == doctest::Approx(0.5 / (2.0 * c * v)).epsilon(1e-6));
  const ScatteringResult co = scattering_run(aharonov_bohm(Provider::ConstrainedLagrangian, c), b, v, ScatterMode::ImpulseApprox);
  CHECK(norm(co.bodies[1].displacement) < 1e-12);
}

TEST_CASE("sweep: deterministic rows in input order, failures captured") {
  std::vector<SweepPoint> pts;
  for (int k = 0; k < 7; ++k) {
    SweepPoint p;
    p.sys = mott_schwinger(Provider::UnconstrainedForce);
    p.b = 0.5 + 0.25 * k;
    p.v = 0.3;
    p.label = "b" + std::to_string(k);
    pts.push_back(p);
  }
  pts[3].b = -1.0;
  const auto one = sweep(pts, 1);
  const auto four = sweep(pts, 4);
  REQUIRE(one.size() == pts.size());
  REQUIRE(four.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(one[i].index == i);
    CHECK(four[i].point.label == pts[i].label);
    CHECK(one[i].error == four[i].error);
    if (i == 3) {
      CHECK_FALSE(one[i].result.has_value());
      CHECK(one[i].error.find("impact parameter") != std::string::npos);
      continue;
    }
    REQUIRE(one[i].result.has_value());
    REQUIRE(four[i].result.has_value());
    CHECK(one[i].result->bodies[0].impulse == four[i].result->bodies[0].impulse);
    CHECK(one[i].result->bodies[0].displacement == four[i].result->bodies[0].displacement);
  }
  CHECK_THROWS_AS(sweep({}, 1), ValidationError);
  CHECK_THROWS_AS(sweep(pts, 0), ValidationError);
}
