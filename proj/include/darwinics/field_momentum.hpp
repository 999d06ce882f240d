#pragma once

// Electromagnetic field momentum (1/4pi c) Int E x B, hidden momentum of a
// current loop, and the surface-integral form of the stationary-distribution
// lemma.

#include <functional>
#include <vector>

#include "darwinics/kernels/kernels.hpp"
#include "darwinics/model.hpp"

namespace darwinics::field {

struct ChargeSource {
  double q{0.0};
  Vec3 r;
  Vec3 v;
};

struct DipoleSource {
  Vec3 mu;
  Vec3 r;
};

/// Superposition of point charges (moving, with their order-v/c magnetic
/// field), ideal point dipoles and imposed uniform fields.
struct FieldConfiguration {
  std::vector<ChargeSource> charges;
  std::vector<DipoleSource> dipoles;
  Vec3 uniform_e;
  Vec3 uniform_b;
  /// Subtract each moving charge's own E x B (divergent at the charge).
  bool drop_self_terms{true};

  Vec3 electric_field(const Vec3& r) const;
  Vec3 magnetic_field(const Vec3& r, const Units& u) const;
  /// Electrostatic potential of the charges (uniform E contributes -E . r).
  double potential(const Vec3& r) const;
  std::vector<Vec3> singular_points() const;
};

void validate(const FieldConfiguration& cfg);

/// Spherical grid about `center`: r = scale * s / (1 - s) with midpoint
/// cells in s and in azimuth, Gauss-Legendre in cos(theta). Each singular
/// point carries a ball of radius `ball_radius` (0: a quarter of the smallest
/// source separation, or `scale` for a lone source); a smooth partition of
/// unity hands the ball interior to a local spherical grid.
struct IntegrationRegion {
  Vec3 center;
  double scale{0.0};  // 0: derived from the source layout
  int n_radial{64};
  int n_polar{32};
  int n_azimuth{64};
  int ball_radial_panels{4};
  double ball_radius{0.0};
  double rel_tol{0.02};
};

void validate(const IntegrationRegion& region);

struct FieldMomentumResult {
  Vec3 value;
  double error{0.0};              // two-resolution estimate
  Vec3 far_part;                  // grid outside the balls (weighted by 1 - chi)
  Vec3 ball_part;                 // local grids inside the balls (weighted by chi)
  Vec3 contact_part;              // (2/3c) E(r_mu) x mu of each point dipole
  Vec3 coarse_value;
  bool converged{false};
};

/// Throws NonConvergenceError when error > rel_tol * |value| (plus a roundoff floor).
FieldMomentumResult em_field_momentum(const FieldConfiguration& cfg, const IntegrationRegion& region,
                                      const Units& u);

/// Unit vectors (e1, e2) spanning the loop plane with e1 x e2 = normal.
std::pair<Vec3, Vec3> loop_frame(const Vec3& normal);

struct LineIntegral {
  Vec3 value;
  double error{0.0};
};

/// -(1/c^2) closed-loop integral of phi I dl by the periodic trapezoid rule
/// (n and n/2 points for the error estimate).
LineIntegral hidden_momentum_line_current(const std::function<double(const Vec3&)>& phi, const CurrentLoop& loop,
                                          const Units& u, int n_points = 512);

struct LemmaReport {
  std::vector<double> radii;
  std::vector<Vec3> surface_values;  // (1/4pi c) closed-surface Int x (E x B) . n dS
  double decay_exponent{0.0};        // least-squares slope of log|S| vs log R
  bool all_zero{false};
  Vec3 p_em;
  Vec3 p_hid;
  double imbalance{0.0};  // |p_em + p_hid| / max(|p_em|, |p_hid|)
};

/// Surface integrals at each radius (about region.center) plus the p_em + p_hid
/// balance, with each point dipole realised as a small current loop of radius
/// `loop_radius` for the hidden momentum in the charges' potential.
LemmaReport stationary_lemma_check(const FieldConfiguration& cfg, const std::vector<double>& radii,
                                   const IntegrationRegion& region, const Units& u, double loop_radius = 1e-3);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre_rule(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace darwinics::field
