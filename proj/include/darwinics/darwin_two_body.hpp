#pragma once

// Two point charges under the Darwin Lagrangian
//
//   L = m1 v1^2/2 + m2 v2^2/2 - q1 q2 / r
//       + (q1 q2 / 2 r c^2) [ v1.v2 + (v1.rhat)(v2.rhat) ],   r = r1 - r2.
//
// The Euler-Lagrange equations are linear in both accelerations (each body's
// canonical momentum contains the other body's velocity), so they are solved
// as one 6x6 system.

#include <utility>

#include "darwinics/model.hpp"

namespace darwinics::darwin {

struct TwoBodyState {
  PointCharge body1;
  PointCharge body2;
};

struct AccelPair {
  Vec3 a1;
  Vec3 a2;
};

/// Planar accelerations of the two charges in the Feynman configuration.
struct FeynmanAccelerations {
  double a1x{0.0};
  double a1y{0.0};
  double a2x{0.0};
  double a2y{0.0};
};

void validate(const TwoBodyState& s, const Units& u, double singular_radius = kDefaultSingularRadius);

double darwin_lagrangian(const TwoBodyState& s, const Units& u, double singular_radius = kDefaultSingularRadius);

/// Exact solution of the coupled Euler-Lagrange equations.
/// Throws SingularSystemError when q1 q2 / (m c^2 r) approaches 1.
AccelPair darwin_accelerations(const TwoBodyState& s, const Units& u, double singular_radius = kDefaultSingularRadius);

/// Body 1 at the origin moving along +x, body 2 at r x_hat moving along +y, equal q and m.
TwoBodyState feynman_configuration(double q, double m, double r, double v);

/// Unexpanded rational closed forms at the Feynman configuration.
FeynmanAccelerations feynman_accelerations_closed_form(double q, double m, double r, double v, const Units& u);

/// The same quantities expanded to first order in q^2 / (m c^2 r).
FeynmanAccelerations feynman_accelerations_first_order(double q, double m, double r, double v, const Units& u);

/// Lorentz-force accelerations at the Feynman configuration with exact gamma.
FeynmanAccelerations lorentz_expanded_accelerations(double q, double m, double r, double v, const Units& u);

/// p_i = m_i v_i + (q_i / c) A_j(r_i) with A_j the Darwin potential of the other body.
std::pair<Vec3, Vec3> canonical_momenta(const TwoBodyState& s, const Units& u,
                                        double singular_radius = kDefaultSingularRadius);

/// Total canonical minus total mechanical momentum.
Vec3 interaction_field_momentum(const TwoBodyState& s, const Units& u,
                                double singular_radius = kDefaultSingularRadius);

Vec3 mechanical_momentum(const TwoBodyState& s);

/// Legendre energy sum_i v_i . dL/dv_i - L.
double darwin_energy(const TwoBodyState& s, const Units& u, double singular_radius = kDefaultSingularRadius);

/// Total canonical angular momentum sum_i r_i x p_i about the origin.
Vec3 canonical_angular_momentum(const TwoBodyState& s, const Units& u,
                                double singular_radius = kDefaultSingularRadius);

}  // namespace darwinics::darwin
