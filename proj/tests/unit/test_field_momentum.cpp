#include "doctest.h"

#include <cmath>

#include "darwinics/darwin_two_body.hpp"
#include "darwinics/field_momentum.hpp"

using namespace darwinics;
using namespace darwinics::field;

TEST_CASE("hidden momentum of a loop in a uniform field is mu x E / c") {
  const Units u = Units::make(7.0, 1.0);
  const Vec3 e{0.3, -1.2, 0.8};
  for (const Vec3& n : {Vec3{0, 0, 1}, Vec3{1, 0, 0}, Vec3{0.6, 0.0, 0.8}, Vec3{-0.36, 0.48, 0.8}}) {
    const CurrentLoop loop{0.7, 2.3, {1.0, -2.0, 0.5}, n};
    const auto phi = [&](const Vec3& r) { return -dot(e, r); };
    const LineIntegral p = hidden_momentum_line_current(phi, loop, u, 64);
    const Vec3 expected = cross(loop.moment(u), e) / u.c;
    CHECK(norm(p.value - expected) <= 1e-10 * norm(expected));
    CHECK(p.error < 1e-12);
  }
  CHECK_THROWS_AS(hidden_momentum_line_current([](const Vec3&) { return 0.0; }, {1, 1, {}, {0, 0, 1}}, u, 7),
                  ValidationError);
}

TEST_CASE("loop frame is right-handed and orthonormal") {
  for (const Vec3& n : {Vec3{0, 0, 1}, Vec3{1, 0, 0}, Vec3{0.6, 0.0, 0.8}}) {
    const auto [e1, e2] = loop_frame(n);
    CHECK(std::fabs(dot(e1, e2)) < 1e-15);
    CHECK(approx_equal(cross(e1, e2), n, 1e-15, 1e-14));
  }
}

TEST_CASE("Gauss-Legendre rule integrates polynomials exactly") {
  std::vector<double> x, w;
  gauss_legendre_rule(8, x, w);
  REQUIRE(x.size() == 8);
  double s0 = 0, s14 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s0 += w[i];
    s14 += w[i] * std::pow(x[i], 14);
  }
  CHECK(s0 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s14 == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("point dipole in a uniform field: field momentum is the contact term (2/3c) E x mu") {
  const Units u = Units::make(3.0, 1.0);
  FieldConfiguration cfg;
  cfg.uniform_e = {0, 0, 2.0};
  cfg.dipoles.push_back({{1.0, 0.5, 0.0}, {}});
  IntegrationRegion region;
  region.scale = 1.0;
  const auto res = em_field_momentum(cfg, region, u);
  const Vec3 expected = cross(cfg.uniform_e, cfg.dipoles[0].mu) * (2.0 / (3.0 * u.c));
  CHECK(norm(res.value - expected) < 1e-10 * norm(expected));
  CHECK(norm(res.far_part + res.ball_part) < 1e-10 * norm(expected));
}

TEST_CASE("static charge plus dipole: field and hidden momenta cancel") {
  const Units u = Units::make(3.0, 1.0);
  FieldConfiguration cfg;
  cfg.charges.push_back({1.5, {0, 0, 0}, {}});
  cfg.dipoles.push_back({{0.2, 0.4, 1.0}, {1.0, 0.5, -0.3}});
  const Vec3 e_at_mu = coulomb_field(1.5, {}, cfg.dipoles[0].r);
  const Vec3 p_hid = cross(cfg.dipoles[0].mu, e_at_mu) / u.c;

  IntegrationRegion region;
  const auto coarse = em_field_momentum(cfg, region, u);
  CHECK(norm(coarse.value + p_hid) < 0.02 * norm(p_hid));

  IntegrationRegion fine = region;
  fine.n_radial *= 2;
  fine.n_polar *= 2;
  fine.n_azimuth *= 2;
  fine.ball_radial_panels *= 2;
  const auto res = em_field_momentum(cfg, fine, u);
  CHECK(norm(res.value + p_hid) < 0.005 * norm(p_hid));
  // Field momentum of the pair is (q/c) A_dip at the charge.
  CHECK(approx_equal(-p_hid, dipole_vector_potential(cfg.dipoles[0].mu, cfg.dipoles[0].r, {}) * (1.5 / u.c), 1e-15,
                     1e-12));
}

TEST_CASE("two slow charges: E x B volume integral equals the Darwin interaction momentum") {
  const Units u = Units::make(4.0, 1.0);
  darwin::TwoBodyState s;
  s.body1 = {1.0, 1.0, {0, 0, 0}, {0.3, 0.1, 0.0}};
  s.body2 = {-0.7, 1.0, {1.2, 0.4, -0.2}, {-0.1, 0.25, 0.05}};
  FieldConfiguration cfg;
  cfg.charges.push_back({s.body1.q, s.body1.r, s.body1.v});
  cfg.charges.push_back({s.body2.q, s.body2.r, s.body2.v});
  IntegrationRegion region;
  region.n_radial *= 2;
  region.n_polar *= 2;
  region.n_azimuth *= 2;
  region.ball_radial_panels *= 2;
  const auto res = em_field_momentum(cfg, region, u);
  const Vec3 expected = darwin::interaction_field_momentum(s, u);
  CHECK(norm(res.value - expected) < 0.005 * norm(expected));
}

TEST_CASE("stationary distribution: surface terms decay and the momenta balance") {
  const Units u = Units::make(3.0, 1.0);
  FieldConfiguration cfg;
  cfg.charges.push_back({1.0, {0, 0, 0}, {}});
  cfg.dipoles.push_back({{0, 0, 1.0}, {1.0, 0, 0}});
  IntegrationRegion region;
  region.n_polar = 48;
  region.n_azimuth = 96;
  const auto rep = stationary_lemma_check(cfg, {4.0, 8.0, 16.0, 32.0}, region, u);
  CHECK(rep.imbalance < 0.02);
  CHECK(rep.decay_exponent < -0.9);
  CHECK(norm(rep.surface_values.back()) < norm(rep.surface_values.front()));
  CHECK_THROWS_AS(stationary_lemma_check(cfg, {1.0, 2.0}, region, u), ValidationError);
  CHECK_THROWS_AS(stationary_lemma_check(cfg, {1.0, 2.0, 3.0}, region, u), ValidationError);
}

TEST_CASE("configuration and region validation") {
  const Units u = Units::make(3.0, 1.0);
  FieldConfiguration cfg;
  cfg.charges.push_back({1.0, {}, {}});
  cfg.charges.push_back({1.0, {}, {}});
  CHECK_THROWS_AS(em_field_momentum(cfg, {}, u), ValidationError);
  IntegrationRegion bad;
  bad.n_radial = 0;
  FieldConfiguration one;
  one.charges.push_back({1.0, {}, {}});
  CHECK_THROWS_AS(em_field_momentum(one, bad, u), ValidationError);
}

TEST_CASE("a lone static charge carries no field momentum") {
  const Units u = Units::make(3.0, 1.0);
  FieldConfiguration cfg;
  cfg.charges.push_back({2.0, {0.5, 0.5, 0.5}, {}});
  const auto res = em_field_momentum(cfg, {}, u);
  CHECK(norm(res.value) == 0.0);
}
