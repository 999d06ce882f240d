#include "doctest.h"

#include <cmath>
#include <random>

#include "darwinics/unconstrained_forces.hpp"
#include "support/oracles.hpp"

using namespace darwinics;
using namespace darwinics::unconstrained;

namespace {

double rel_err(const Vec3& got, const Vec3& ref) { return norm(got - ref) / norm(ref); }

struct MsGeometry {
  PointCharge charge;
  MagneticDipole dipole;
};

MsGeometry random_ms(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  MsGeometry g;
  g.dipole = {{d(rng), d(rng), d(rng)}, 1.0, {d(rng), d(rng), d(rng)}, {}};
  g.charge = {1.0 + d(rng), 1.0, g.dipole.r + (1.5 + d(rng)) * oracle::random_unit(rng),
              {d(rng), d(rng), d(rng)}};
  return g;
}

}  // namespace

TEST_CASE("loop force matches the discretised-loop Lorentz sum") {
  const Units u = Units::make(3.0, 1.0);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const MsGeometry g = random_ms(rng);
    const double dist = norm(g.charge.r - g.dipole.r);
    const auto on_loop = [&](long double eps) {
      const auto loop = oracle::loop_for(g.dipole.mu, g.dipole.r, eps, u.c, 256);
      return oracle::loop_force(loop, u.c, [&](oracle::V3 p) {
        return oracle::charge_field(g.charge.q, oracle::from(g.charge.v), oracle::from(g.charge.r), u.c, p);
      });
    };
    const auto on_charge = [&](long double eps) {
      const auto loop = oracle::loop_for(g.dipole.mu, g.dipole.r, eps, u.c, 256);
      const oracle::V3 b = oracle::loop_field(loop, u.c, oracle::from(g.charge.r));
      return oracle::cross(oracle::from(g.charge.v), b) * (g.charge.q / u.c);
    };
    const double eps = 1e-2 * dist;
    const Vec3 ref_loop = oracle::to(oracle::richardson(on_loop, eps));
    const Vec3 ref_charge = oracle::to(oracle::richardson(on_charge, eps));
    CHECK(rel_err(force_on_loop_from_charge(g.charge, g.dipole, u), ref_loop) < 1e-6);
    CHECK(rel_err(force_on_charge_from_loop(g.charge, g.dipole, u), ref_charge) < 1e-6);
    // Unextrapolated sums are off at order (eps/d)^2, so the extrapolation matters.
    CHECK(rel_err(force_on_loop_from_charge(g.charge, g.dipole, u), oracle::to(on_loop(eps))) > 1e-7);
  }
}

TEST_CASE("forces depend on the relative velocity only") {
  const Units u = Units::make(3.0, 1.0);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    MsGeometry g = random_ms(rng);
    const Vec3 boost = 0.3 * oracle::random_unit(rng);
    const Vec3 f_loop = force_on_loop_from_charge(g.charge, g.dipole, u);
    const Vec3 f_charge = force_on_charge_from_loop(g.charge, g.dipole, u);
    g.charge.v += boost;
    g.dipole.v += boost;
    CHECK(approx_equal(force_on_loop_from_charge(g.charge, g.dipole, u), f_loop, 1e-14, 1e-12));
    CHECK(approx_equal(force_on_charge_from_loop(g.charge, g.dipole, u), f_charge, 1e-14, 1e-12));
  }
}

TEST_CASE("closed forms in the moment-along-z, velocity-along-x frame") {
  const Units u = Units::make(2.0, 1.0);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 rel{d(rng), d(rng), d(rng)};
    const double mu = 0.7, q = -1.3, v = 0.4;
    const PointCharge charge{q, 1.0, rel, {v, 0, 0}};
    const MagneticDipole dipole{{0, 0, mu}, 1.0, {}, {}};
    CHECK(approx_equal(fig5_force_on_loop(mu, q, v, rel, u), force_on_loop_from_charge(charge, dipole, u), 1e-14,
                       1e-12));
    CHECK(approx_equal(fig5_force_on_charge(mu, q, v, rel, u), force_on_charge_from_loop(charge, dipole, u), 1e-14,
                       1e-12));
  }
}

TEST_CASE("unconstrained pair violates the third law at a generic state") {
  const Units u = Units::make(2.0, 1.0);
  const Vec3 rel{1.0, 0.7, 0.4};
  const Vec3 f1 = fig5_force_on_loop(1.0, 1.0, 0.5, rel, u);
  const Vec3 f2 = fig5_force_on_charge(1.0, 1.0, 0.5, rel, u);
  CHECK(norm(f1 + f2) > 0.1 * std::fmax(norm(f1), norm(f2)));
}

TEST_CASE("forces on the line sources vanish exactly") {
  const Units u = Units::make(2.0, 1.0);
  const LineSolenoid s{3.0, {1, 1, 0}, 1.0, {}};
  const PointCharge q{1.0, 1.0, {2, -1, 7}, {0.3, 0.2, 0.1}};
  CHECK(ab_force_on_charge(q, s) == Vec3{});
  const LineCharge w{0.5, {0, 0, 0}, 1.0, {}};
  const MagneticDipole m{{0, 0, 1}, 1.0, {1, 2, 3}, {0.1, 0, 0}};
  CHECK(ac_force_on_wire(m, w) == Vec3{});
  CHECK_THROWS_AS(ab_force_on_charge({1.0, 1.0, {1, 1, 5}, {}}, s), OnAxisError);
  CHECK_THROWS_AS(ac_force_on_wire({{0, 0, 1}, 1.0, {0, 0, 2}, {}}, w), OnAxisError);
  (void)u;
}

TEST_CASE("line-source closed forms equal z-quadrature of per-element forces") {
  const Units u = Units::make(3.0, 1.0);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double flux = 2.0 * d(rng);
    const LineSolenoid s{flux, {d(rng), d(rng), 0}, 1.0, {d(rng), d(rng), 0}};
    const PointCharge q{1.0 + d(rng), 1.0, {2 + d(rng), d(rng), d(rng)}, {d(rng), d(rng), d(rng)}};
    const double mprime = flux / (4.0 * kPi);
    const double rho = norm(transverse(q.r - s.axis_point));
    const auto slice = [&](double z) {
      const MagneticDipole m{{0, 0, mprime}, 1.0, {s.axis_point.x, s.axis_point.y, z}, s.v};
      return force_on_loop_from_charge(q, m, u);
    };
    const auto ab = quad::integrate(quad::VectorFn(slice), -INFINITY, INFINITY, {}, q.r.z, rho).value;
    CHECK(rel_err(ab_force_on_solenoid(q, s, u), ab) < 1e-6);

    const LineCharge w{d(rng), {d(rng), d(rng), 0}, 1.0, {d(rng), d(rng), 0}};
    const MagneticDipole m{{d(rng), d(rng), d(rng)}, 1.0, {2 + d(rng), d(rng), d(rng)}, {d(rng), d(rng), d(rng)}};
    const double rho_w = norm(transverse(m.r - w.axis_point));
    const auto element = [&](double z) {
      const PointCharge e{w.lambda, 1.0, {w.axis_point.x, w.axis_point.y, z}, w.v};
      return force_on_loop_from_charge(e, m, u);
    };
    const auto ac = quad::integrate(quad::VectorFn(element), -INFINITY, INFINITY, {}, m.r.z, rho_w).value;
    CHECK(rel_err(ac_force_on_loop(m, w, u), ac) < 1e-6);
  }
}

TEST_CASE("printed moment density scales the solenoid force by c") {
  const Units u = Units::make(7.0, 1.0);
  const LineSolenoid s{1.0, {}, 1.0, {}};
  const PointCharge q{1.0, 1.0, {1, 2, 0}, {0.5, 0, 0}};
  CHECK(approx_equal(ab_force_on_solenoid(q, s, u, MomentDensity::PrintedWithC), 7.0 * ab_force_on_solenoid(q, s, u)));
}

TEST_CASE("straight pass: zero net impulse, finite offset along the motion") {
  // Charge along x at impact b past a solenoid at the origin. The offset of the
  // solenoid works out to q Phi / (2 M c v) along +x (integrals of rational functions).
  const Units u = Units::make(10.0, 1.0);
  const double q = 1.2, flux = 0.8, M = 3.0;
  for (double b : {0.5, 1.0, 3.0}) {
    for (double v : {0.2, 1.0}) {
      const LineSolenoid s{flux, {}, 1.0, {}};
      const ForceField f = ab_solenoid_field(q, s, u);
      const StraightPath path{{0, b, 0}, {v, 0, 0}};
      const auto impulse = straight_path_impulse(f, path);
      const StraightPath incoming{{0, b, 0}, {v, 0, 0}, -INFINITY, 0.0};
      const double peak = norm(straight_path_impulse(f, incoming).value);
      CHECK(peak > 0.0);
      CHECK(norm(impulse.value) < 1e-8 * peak);

      const Vec3 offset = straight_path_offset(f, path, M).value;
      const Vec3 expected{q * flux / (2.0 * M * u.c * v), 0, 0};
      CHECK(norm(offset - expected) < 1e-6 * norm(expected));

      // Measured at a late time instead, the 1/t^2 tail of F_y leaves T * J_y(T) -> -q Phi / (pi M c v).
      const Vec3 late = straight_path_displacement(f, path, M).value;
      CHECK(late.x == doctest::Approx(expected.x).epsilon(1e-6));
      CHECK(late.y == doctest::Approx(-q * flux / (kPi * M * u.c * v)).epsilon(1e-6));
    }
  }
}

TEST_CASE("wire passing a dipole: same structure with q m' -> lambda mu") {
  const Units u = Units::make(10.0, 1.0);
  const double lambda = 0.6, mu = 1.1, M = 2.0, v = 0.5, b = 1.0;
  const MagneticDipole dip{{0, 0, mu}, M, {}, {}};
  const ForceField f = ac_loop_field(dip, lambda, u);
  const StraightPath path{{0, b, 0}, {v, 0, 0}};
  const StraightPath incoming{{0, b, 0}, {v, 0, 0}, -INFINITY, 0.0};
  const double peak = norm(straight_path_impulse(f, incoming).value);
  CHECK(norm(straight_path_impulse(f, path).value) < 1e-8 * peak);
  const Vec3 dx = straight_path_offset(f, path, M).value;
  CHECK(dx.x == doctest::Approx(2.0 * kPi * lambda * mu / (M * u.c * v)).epsilon(1e-6));
  CHECK(std::fabs(dx.y) < 1e-9 * std::fabs(dx.x));
}

TEST_CASE("Mott-Schwinger pass transfers net momentum to the loop") {
  const Units u = Units::make(10.0, 1.0);
  const MagneticDipole dip{{0, 0, 1.0}, 1.0, {}, {}};
  const StraightPath path{{0, 1.0, 0}, {1.0, 0, 0}};
  const Vec3 on_loop = straight_path_impulse(ms_loop_field(dip, 1.0, u), path).value;
  const Vec3 on_charge = straight_path_impulse(ms_charge_field(dip, 1.0, u), path).value;
  // Int (1/r^3 - 3 y^2 / r^5) dt at y = b, v = 1: 2/b^2 - 4/b^2 = -2/b^2; times mu q v / c.
  CHECK(on_loop.y == doctest::Approx(-2.0 / 10.0).epsilon(1e-10));
  CHECK(on_charge.y == doctest::Approx(2.0 / 10.0).epsilon(1e-10));
  CHECK(norm(on_loop + on_charge) < 1e-12);
  // Displacement about the final time diverges with the cutoff; the asymptote offset does not.
  CHECK_THROWS_AS(straight_path_displacement(ms_loop_field(dip, 1.0, u), path, 1.0), NonConvergenceError);
  CHECK(is_finite(straight_path_offset(ms_loop_field(dip, 1.0, u), path, 1.0).value));
}

TEST_CASE("path validation") {
  const Units u = Units::make(10.0, 1.0);
  const MagneticDipole dip{{0, 0, 1.0}, 1.0, {}, {}};
  const ForceField f = ms_loop_field(dip, 1.0, u);
  CHECK_THROWS_AS(straight_path_impulse(f, {{0, 1, 0}, {}}), ValidationError);
  CHECK_THROWS_AS(straight_path_impulse(f, {{0, 1, 0}, {1, 0, 0}, 2.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(straight_path_impulse(f, {{-1, 0, 0}, {1, 0, 0}}), CoincidentPointsError);
  CHECK_THROWS_AS(straight_path_displacement(f, {{0, 1, 0}, {1, 0, 0}}, 0.0), ValidationError);
  const auto [tc, b] = closest_approach(f, {{-3, 2, 0}, {2, 0, 0}});
  CHECK(tc == doctest::Approx(1.5));
  CHECK(b == doctest::Approx(2.0));
}
