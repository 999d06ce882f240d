#include "doctest.h"

#include <cmath>
#include <random>

#include "darwinics/constrained_dynamics.hpp"
#include "support/oracles.hpp"

using namespace darwinics;
using namespace darwinics::constrained;

namespace {

oracle::VecL packl(std::initializer_list<double> xs) {
  oracle::VecL out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out(i++) = x;
  return out;
}

Vec3 v3(const oracle::VecL& a, int i) { return {double(a(i)), double(a(i + 1)), double(a(i + 2))}; }

}  // namespace

TEST_CASE("Mott-Schwinger: both interaction routes agree") {
  const Units u = Units::make(3.0, 1.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const MagneticDipole m{{d(rng), d(rng), d(rng)}, 1.0, {d(rng), d(rng), d(rng)}, {d(rng), d(rng), d(rng)}};
    const PointCharge q{d(rng), 1.0, m.r + 1.5 * oracle::random_unit(rng), {d(rng), d(rng), d(rng)}};
    CHECK(ms_interaction_field_route(q, m, u) == doctest::Approx(ms_interaction_potential_route(q, m, u)).epsilon(1e-12));
  }
}

TEST_CASE("Mott-Schwinger: closed-form accelerations equal the Euler-Lagrange oracle and the library solver") {
  const Units u = Units::make(3.0, 1.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const MagneticDipole m{{d(rng), d(rng), d(rng)}, 1.5, {d(rng), d(rng), d(rng)}, {d(rng), d(rng), d(rng)}};
    const PointCharge q{1.0 + d(rng), 0.7, m.r + 1.5 * oracle::random_unit(rng), {d(rng), d(rng), d(rng)}};
    const MsAccelerations a = ms_accelerations(q, m, u);

    const auto L = oracle::mott_schwinger(q.q, q.m, oracle::from(m.mu), m.m, u.c);
    const auto ref = oracle::euler_lagrange(L, packl({q.r.x, q.r.y, q.r.z, m.r.x, m.r.y, m.r.z}),
                                            packl({q.v.x, q.v.y, q.v.z, m.v.x, m.v.y, m.v.z}), 1e-3L);
    const double scale = std::fmax(norm(v3(ref, 0)), norm(v3(ref, 3)));
    CHECK(norm(a.a_q - v3(ref, 0)) < 1e-9 * scale);
    CHECK(norm(a.a_mu - v3(ref, 3)) < 1e-9 * scale);

    // third law
    const Vec3 fq = a.a_q * q.m, fm = a.a_mu * m.m;
    CHECK(norm(fq + fm) <= 1e-12 * norm(fq));

    const auto sys = ms_system(q, m, u);
    Vector x(6), v(6);
    x << q.r.x, q.r.y, q.r.z, m.r.x, m.r.y, m.r.z;
    v << q.v.x, q.v.y, q.v.z, m.v.x, m.v.y, m.v.z;
    StepConfig cfg;
    cfg.velocity_scale = 1.0;
    cfg.position_scale = 1.0;
    const Vector num = numeric_euler_lagrange(sys, x, v, cfg);
    CHECK(norm(Vec3{num(0), num(1), num(2)} - a.a_q) < 1e-7 * scale);
  }
}

TEST_CASE("A-B: constrained accelerations vanish on a state grid") {
  const Units u = Units::make(5.0, 1.0);
  int states = 0;
  double worst = 0.0;
  for (double rho : {0.3, 1.0, 3.0, 10.0})
    for (int ang = 0; ang < 8; ++ang)
      for (double vq : {0.1, 1.0})
        for (int vang = 0; vang < 4; ++vang)
          for (double vs : {0.0, 0.5})
            for (double flux : {-2.0, 1.0}) {
              const double th = 2.0 * kPi * ang / 8.0, ph = 2.0 * kPi * vang / 4.0 + 0.3;
              const LineSolenoid s{flux, {0.2, -0.1, 0}, 2.0, {vs, -0.5 * vs, 0}};
              const PointCharge q{1.0, 1.0, s.axis_point + Vec3{std::cos(th), std::sin(th), 0.1} * rho,
                                  {vq * std::cos(ph), vq * std::sin(ph), 0.2 * vq}};
              const auto closed = ab_accelerations(q, s);
              CHECK(closed.first == Vec3{});
              CHECK(closed.second == Vec3{});
              StepConfig cfg;
              cfg.position_scale = rho;
              cfg.velocity_scale = std::fmax(vq, vs);
              const auto num = ab_accelerations_numeric(q, s, u, 1.0, cfg);
              // Naive scale: the Lorentz force a field of that vector potential would give.
              const double naive = std::fabs(q.q * flux) * cfg.velocity_scale / (2.0 * kPi * u.c * rho * rho);
              worst = std::fmax(worst, std::fmax(norm(num.first), norm(num.second)) / naive);
              ++states;
            }
  CHECK(states >= 800);
  CHECK(worst < 1e-8);
}

TEST_CASE("A-C: constrained accelerations vanish on a state grid") {
  const Units u = Units::make(5.0, 1.0);
  int states = 0;
  double worst = 0.0;
  for (double rho : {0.3, 1.0, 3.0, 10.0})
    for (int ang = 0; ang < 8; ++ang)
      for (double vm : {0.1, 1.0})
        for (int vang = 0; vang < 4; ++vang)
          for (double vw : {0.0, 0.5})
            for (double lambda : {-2.0, 1.0}) {
              const double th = 2.0 * kPi * ang / 8.0, ph = 2.0 * kPi * vang / 4.0 + 0.3;
              const LineCharge w{lambda, {0.1, 0.4, 0}, 2.0, {0.0, vw, 0}};
              const MagneticDipole m{{0, 0, 0.8}, 1.0, w.axis_point + Vec3{std::cos(th), std::sin(th), -0.2} * rho,
                                     {vm * std::cos(ph), vm * std::sin(ph), 0.1 * vm}};
              const auto closed = ac_accelerations(m, w);
              CHECK(closed.first == Vec3{});
              StepConfig cfg;
              cfg.position_scale = rho;
              cfg.velocity_scale = std::fmax(vm, vw);
              const auto num = ac_accelerations_numeric(m, w, u, 1.0, cfg);
              const double naive = 2.0 * std::fabs(lambda) * 0.8 * cfg.velocity_scale / (u.c * rho * rho);
              worst = std::fmax(worst, std::fmax(norm(num.first), norm(num.second)) / naive);
              ++states;
            }
  CHECK(states >= 800);
  CHECK(worst < 1e-8);
}

TEST_CASE("A-C with a tilted moment is not force-free and matches the oracle") {
  const Units u = Units::make(5.0, 1.0);
  const LineCharge w{1.0, {}, 1.0, {}};
  const MagneticDipole m{{0.6, 0.0, 0.8}, 1.0, {1.0, 0.5, 0.0}, {0.3, -0.2, 0.4}};
  CHECK_THROWS_AS(ac_accelerations(m, w), ValidationError);
  const auto num = ac_accelerations_numeric(m, w, u);
  const auto L = oracle::aharonov_casher(oracle::from(m.mu), m.m, w.lambda, w.mass_per_length, u.c);
  const auto ref = oracle::euler_lagrange(L, packl({1.0, 0.5, 0.0, 0.0, 0.0}), packl({0.3, -0.2, 0.4, 0.0, 0.0}), 1e-3L);
  CHECK(norm(num.first - v3(ref, 0)) < 1e-7 * norm(v3(ref, 0)));
  CHECK(norm(v3(ref, 0)) > 1e-3);
}

TEST_CASE("A-B and A-C Euler-Lagrange oracles vanish too") {
  const Units u = Units::make(5.0, 1.0);
  const auto Lab = oracle::aharonov_bohm(1.0, 1.0, 2.0, 3.0, u.c);
  const auto a = oracle::euler_lagrange(Lab, packl({1.0, 0.7, 0.2, 0.1, -0.3}), packl({0.4, -0.1, 0.3, 0.2, 0.1}), 1e-3L);
  CHECK(double(a.cwiseAbs().maxCoeff()) < 1e-12);
  const auto Lac = oracle::aharonov_casher({0, 0, 1.0}, 1.0, 0.5, 2.0, u.c);
  const auto b = oracle::euler_lagrange(Lac, packl({1.0, 0.7, 0.2, 0.1, -0.3}), packl({0.4, -0.1, 0.3, 0.2, 0.1}), 1e-3L);
  CHECK(double(b.cwiseAbs().maxCoeff()) < 1e-12);
}

TEST_CASE("A-C interaction: explicit and field forms agree") {
  const Units u = Units::make(2.0, 1.0);
  const LineCharge w{0.7, {0.5, -0.5, 0}, 1.0, {0.1, 0.2, 0}};
  const MagneticDipole m{{0.3, -0.2, 1.0}, 1.0, {2.0, 1.0, 4.0}, {-0.4, 0.3, 0.9}};
  CHECK(ac_interaction_explicit(m, w, u) == doctest::Approx(ac_interaction_field(m, w, u)).epsilon(1e-13));
}

TEST_CASE("Darwin Lagrangian system reproduces the closed solve") {
  const Units u = Units::make(3.0, 1.0);
  const auto s = darwin::feynman_configuration(1.0, 1.0, 1.0, 0.6);
  const auto exact = darwin::darwin_accelerations(s, u);
  Vector x(6), v(6);
  x << 0, 0, 0, 1, 0, 0;
  v << 0.6, 0, 0, 0, 0.6, 0;
  StepConfig cfg;
  cfg.velocity_scale = 0.6;
  const Vector a = numeric_euler_lagrange(darwin_system(s, u), x, v, cfg);
  CHECK(norm(Vec3{a(0), a(1), a(2)} - exact.a1) < 1e-8 * norm(exact.a1));
  CHECK(norm(Vec3{a(3), a(4), a(5)} - exact.a2) < 1e-8 * norm(exact.a1));
}

TEST_CASE("numeric Euler-Lagrange input checks") {
  const Units u = Units::make(3.0, 1.0);
  const auto s = darwin::feynman_configuration(1.0, 1.0, 1.0, 0.6);
  const auto sys = darwin_system(s, u);
  CHECK_THROWS_AS(numeric_euler_lagrange(sys, Vector::Zero(5), Vector::Zero(6)), ValidationError);
  StepConfig bad;
  bad.position_scale = 0.0;
  CHECK_THROWS_AS(numeric_euler_lagrange(sys, Vector::Ones(6), Vector::Zero(6), bad), ValidationError);
}

TEST_CASE("hidden-momentum and Hamiltonian flows in the wire geometry") {
  const Units u = Units::make(100.0, 1.0);
  const LineCharge w{1.0, {}, 1.0, {}};
  const auto e = wire_field(w);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const MagneticDipole m{{0, 0, 0.5}, 1.0, {1.5 + d(rng), d(rng), d(rng)}, {d(rng), d(rng), d(rng)}};
    const Vec3 a_hid = hidden_momentum_accelerations(m, e, u);
    const Mat3 j = e.jacobian(m.r);
    const double first_order = norm(j * m.v) * norm(m.mu) / (m.m * u.c);
    CHECK(norm(a_hid) < 1e-13 * first_order);

    // The Hamiltonian drops |mu x E|^2 / 2mc^2; what survives is (1/m c) mu x J (mu x E) / (m c).
    const Vec3 mxe = cross(m.mu, e.field(m.r));
    const Vec3 p = m.v * m.m + mxe / u.c;
    const Vec3 a_ham = hamilton_accelerations(p, m.r, m.mu, e, m.m, u);
    const Vec3 second = cross(m.mu, j * mxe) / (m.m * m.m * u.c * u.c);
    CHECK(norm(a_ham - second) <= 1e-10 * norm(second));
  }
}

TEST_CASE("Lagrangian flow of a dipole in a general static field matches the oracle") {
  const Units u = Units::make(3.0, 1.0);
  const auto e = point_charge_field(2.0, {0.3, -0.2, 0.1});
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 r = Vec3{0.3, -0.2, 0.1} + (1.0 + 0.5 * d(rng)) * oracle::random_unit(rng);
    const Vec3 v{d(rng), d(rng), d(rng)};
    const Vec3 mu{d(rng), d(rng), d(rng)};
    const double m = 1.3;
    const Vec3 a_lag = mu_gradient_acceleration(v, r, mu, e, m, u);
    const oracle::V3 src{0.3L, -0.2L, 0.1L}, mul = oracle::from(mu);
    const oracle::Lagrangian L = [&](const oracle::VecL& x, const oracle::VecL& vv) {
      const oracle::V3 dd = oracle::at(x, 0) - src;
      const long double n = oracle::norm(dd);
      const oracle::V3 ef = dd * (2.0L / (n * n * n));
      const oracle::V3 vel = oracle::at(vv, 0);
      return m * oracle::dot(vel, vel) / 2 + oracle::dot(vel, oracle::cross(mul, ef)) / u.c;
    };
    const auto ref = oracle::euler_lagrange(L, packl({r.x, r.y, r.z}), packl({v.x, v.y, v.z}), 1e-3L);
    CHECK(norm(a_lag - v3(ref, 0)) < 1e-9 * norm(a_lag));
  }
}

TEST_CASE("Hamilton flow follows the Lagrangian flow to first order in the coupling") {
  const auto e = point_charge_field(2.0, {0.3, -0.2, 0.1});
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (double c : {1e3, 1e5, 1e9}) {
    const Units u = Units::make(c, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      const Vec3 r = Vec3{0.3, -0.2, 0.1} + (1.0 + 0.5 * d(rng)) * oracle::random_unit(rng);
      const Vec3 v{d(rng), d(rng), d(rng)};
      const Vec3 mu{d(rng), d(rng), d(rng)};
      const double m = 1.3;
      const Vec3 a_lag = mu_gradient_acceleration(v, r, mu, e, m, u);
      const Vec3 p = v * m + cross(mu, e.field(r)) / u.c;
      CHECK(approx_equal(hamilton_velocity(p, r, mu, e, m, u), v, 1e-15, 1e-13));
      const double kappa = norm(cross(mu, e.field(r))) / (u.c * m * norm(v));
      const double rel = norm(hamilton_accelerations(p, r, mu, e, m, u) - a_lag) / norm(a_lag);
      CHECK(rel <= 5.0 * kappa + 1e-13);
      if (c == 1e9) CHECK(rel < 1e-6);
    }
  }
}

TEST_CASE("Legendre transform reproduces the exact Hamiltonian") {
  const Units u = Units::make(10.0, 1.0);
  const LineCharge w{1.5, {}, 1.0, {}};
  const MagneticDipole m{{0, 0, 2.0}, 0.8, {1.0, 0.4, 0.0}, {0.3, -0.7, 0.2}};
  const LegendreReport r = legendre_check(m, w, u);
  CHECK(r.legendre_residual < 1e-13);
  CHECK(r.h_approx + r.dropped_term == doctest::Approx(r.h_exact).epsilon(1e-13));
  CHECK(r.h_exact == doctest::Approx(0.5 * 0.8 * norm2(m.v)).epsilon(1e-13));
  CHECK_THROWS_AS(legendre_check(m, {1.0, {}, 1.0, {0.1, 0, 0}}, u), ValidationError);
}

TEST_CASE("uniform field: no torque-free force on a moving dipole") {
  const Units u = Units::make(10.0, 1.0);
  const auto e = uniform_field({0, 0, 3.0});
  const MagneticDipole m{{1, 2, 3}, 1.0, {}, {0.4, 0.1, -0.2}};
  CHECK(hidden_momentum_accelerations(m, e, u) == Vec3{});
  CHECK(norm(mu_gradient_acceleration(m.v, m.r, m.mu, e, 1.0, u)) == 0.0);
}
