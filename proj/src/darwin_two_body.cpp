#include "darwinics/darwin_two_body.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

namespace darwinics::darwin {

namespace {

struct Geometry {
  Vec3 d;     // r1 - r2
  Vec3 ddot;  // v1 - v2
  double r;
  double k;  // q1 q2 / 2c^2
};

Geometry geometry(const TwoBodyState& s, const Units& u, double singular_radius) {
  Geometry g;
  g.d = s.body1.r - s.body2.r;
  g.r = norm(g.d);
  if (g.r < singular_radius) throw CoincidentPointsError("darwin: bodies closer than the singular radius");
  g.ddot = s.body1.v - s.body2.v;
  g.k = s.body1.q * s.body2.q / (2.0 * u.c * u.c);
  return g;
}

// Velocity-dependent (acceleration-free) part of d/dt of the interaction term
// of the canonical momentum of the body that sees the partner velocity `vp`.
Vec3 interaction_momentum_rate(const Geometry& g, const Vec3& vp) {
  const double r3 = g.r * g.r * g.r;
  const double r5 = r3 * g.r * g.r;
  const double d_rdot = dot(g.d, g.ddot);
  const double vp_d = dot(vp, g.d);
  return (-vp * d_rdot / r3 + g.ddot * vp_d / r3 + g.d * dot(vp, g.ddot) / r3 - g.d * (3.0 * vp_d * d_rdot / r5)) * g.k;
}

// dL/dr1; dL/dr2 is its negative.
Vec3 lagrangian_gradient_r1(const TwoBodyState& s, const Geometry& g) {
  const Vec3& v1 = s.body1.v;
  const Vec3& v2 = s.body2.v;
  const double r3 = g.r * g.r * g.r;
  const double r5 = r3 * g.r * g.r;
  const double v1d = dot(v1, g.d);
  const double v2d = dot(v2, g.d);
  const Vec3 coulomb = g.d * (s.body1.q * s.body2.q / r3);
  const Vec3 magnetic = -g.d * (dot(v1, v2) / r3) + (v1 * v2d + v2 * v1d) / r3 - g.d * (3.0 * v1d * v2d / r5);
  return coulomb + magnetic * g.k;
}

}  // namespace

void validate(const TwoBodyState& s, const Units& u, double singular_radius) {
  darwinics::validate(s.body1, u);
  darwinics::validate(s.body2, u);
  if (norm(s.body1.r - s.body2.r) < singular_radius)
    throw ValidationError("two-body state: positions closer than the singular radius");
}

double darwin_lagrangian(const TwoBodyState& s, const Units& u, double singular_radius) {
  const Geometry g = geometry(s, u, singular_radius);
  const Vec3& v1 = s.body1.v;
  const Vec3& v2 = s.body2.v;
  const Vec3 rhat = g.d / g.r;
  const double kinetic = 0.5 * s.body1.m * norm2(v1) + 0.5 * s.body2.m * norm2(v2);
  const double q1q2 = s.body1.q * s.body2.q;
  return kinetic - q1q2 / g.r + (g.k / g.r) * (dot(v1, v2) + dot(v1, rhat) * dot(v2, rhat));
}

AccelPair darwin_accelerations(const TwoBodyState& s, const Units& u, double singular_radius) {
  const Geometry g = geometry(s, u, singular_radius);
  const Vec3 rhat = g.d / g.r;

  Eigen::Matrix<double, 6, 6> a = Eigen::Matrix<double, 6, 6>::Zero();
  for (int i = 0; i < 3; ++i) {
    a(i, i) = s.body1.m;
    a(i + 3, i + 3) = s.body2.m;
    for (int j = 0; j < 3; ++j) {
      const double coupling = (g.k / g.r) * ((i == j ? 1.0 : 0.0) + rhat[i] * rhat[j]);
      a(i, j + 3) = coupling;
      a(i + 3, j) = coupling;
    }
  }

  const Vec3 grad1 = lagrangian_gradient_r1(s, g);
  const Vec3 b1 = grad1 - interaction_momentum_rate(g, s.body2.v);
  const Vec3 b2 = -grad1 - interaction_momentum_rate(g, s.body1.v);
  Eigen::Matrix<double, 6, 1> b;
  b << b1.x, b1.y, b1.z, b2.x, b2.y, b2.z;

  const Eigen::PartialPivLU<Eigen::Matrix<double, 6, 6>> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-12)) {
    std::ostringstream msg;
    msg << "darwin: acceleration system is singular (rcond " << rcond
        << "); q1 q2 / (m c^2 r) is outside the validity regime";
    throw SingularSystemError(msg.str());
  }
  const Eigen::Matrix<double, 6, 1> x = lu.solve(b);
  return {{x(0), x(1), x(2)}, {x(3), x(4), x(5)}};
}

TwoBodyState feynman_configuration(double q, double m, double r, double v) {
  TwoBodyState s;
  s.body1 = {q, m, {0.0, 0.0, 0.0}, {v, 0.0, 0.0}};
  s.body2 = {q, m, {r, 0.0, 0.0}, {0.0, v, 0.0}};
  return s;
}

FeynmanAccelerations feynman_accelerations_closed_form(double q, double m, double r, double v, const Units& u) {
  const double c2 = u.c * u.c;
  const double eps = q * q / (m * c2 * r);  // q^2 / (m c^2 r)
  const double beta2 = v * v / c2;
  const double den_x = 1.0 - eps * eps;
  const double den_y = 1.0 - 0.25 * eps * eps;
  if (!(den_x > 0.0) || !(den_y > 0.0)) throw OutOfRegimeError("feynman: q^2/(m c^2 r) must be below 1");
  const double coulomb = q * q / (m * r * r);
  FeynmanAccelerations out;
  out.a1x = -coulomb * ((1.0 + 0.5 * beta2) + eps * (1.0 - beta2)) / den_x;
  out.a1y = -coulomb * beta2 / den_y;
  out.a2x = coulomb * ((1.0 - beta2) + eps * (1.0 + 0.5 * beta2)) / den_x;
  out.a2y = (v * v / (2.0 * r)) * eps * eps / den_y;
  return out;
}

FeynmanAccelerations feynman_accelerations_first_order(double q, double m, double r, double v, const Units& u) {
  const double beta2 = v * v / (u.c * u.c);
  const double coulomb = q * q / (m * r * r);
  return {-coulomb * (1.0 + 0.5 * beta2), -coulomb * beta2, coulomb * (1.0 - beta2), 0.0};
}

FeynmanAccelerations lorentz_expanded_accelerations(double q, double m, double r, double v, const Units& u) {
  if (!(std::fabs(v) < u.c)) throw OutOfRegimeError("lorentz: speed must be below c");
  const double beta2 = v * v / (u.c * u.c);
  const double gamma = 1.0 / std::sqrt(1.0 - beta2);
  const double coulomb = q * q / (m * r * r);
  return {-gamma * coulomb, -gamma * coulomb * beta2, coulomb / (gamma * gamma), 0.0};
}

std::pair<Vec3, Vec3> canonical_momenta(const TwoBodyState& s, const Units& u, double singular_radius) {
  const Vec3 a2_at_1 = darwin_vector_potential(s.body2.q, s.body2.v, s.body2.r, s.body1.r, u, singular_radius);
  const Vec3 a1_at_2 = darwin_vector_potential(s.body1.q, s.body1.v, s.body1.r, s.body2.r, u, singular_radius);
  return {s.body1.v * s.body1.m + a2_at_1 * (s.body1.q / u.c), s.body2.v * s.body2.m + a1_at_2 * (s.body2.q / u.c)};
}

Vec3 mechanical_momentum(const TwoBodyState& s) { return s.body1.v * s.body1.m + s.body2.v * s.body2.m; }

Vec3 interaction_field_momentum(const TwoBodyState& s, const Units& u, double singular_radius) {
  const Geometry g = geometry(s, u, singular_radius);
  const Vec3 rhat = g.d / g.r;
  const Vec3 vsum = s.body1.v + s.body2.v;
  return (vsum + rhat * dot(vsum, rhat)) * (g.k / g.r);
}

double darwin_energy(const TwoBodyState& s, const Units& u, double singular_radius) {
  // The interaction is bilinear in the velocities, so v.dL/dv doubles it.
  const Geometry g = geometry(s, u, singular_radius);
  const Vec3 rhat = g.d / g.r;
  const Vec3& v1 = s.body1.v;
  const Vec3& v2 = s.body2.v;
  const double kinetic = 0.5 * s.body1.m * norm2(v1) + 0.5 * s.body2.m * norm2(v2);
  const double magnetic = (g.k / g.r) * (dot(v1, v2) + dot(v1, rhat) * dot(v2, rhat));
  return kinetic + s.body1.q * s.body2.q / g.r + magnetic;
}

Vec3 canonical_angular_momentum(const TwoBodyState& s, const Units& u, double singular_radius) {
  const auto [p1, p2] = canonical_momenta(s, u, singular_radius);
  return cross(s.body1.r, p1) + cross(s.body2.r, p2);
}

}  // namespace darwinics::darwin
