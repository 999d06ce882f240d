#pragma once

// Forces for the unconstrained description: every constituent of an extended
// body feels its own Lorentz force and the body force is the sum.
//
// Sign convention: the general forms follow the standard oracles
//   F_loop   = grad(mu . B_charge)            (the (1/c) Int J x B force in the limit eps -> 0)
//   F_charge = (q/c) (v_q - v_mu) x B_dipole
// and the Fig. 5 closed forms are these oracles specialised to mu || z, v || x.

#include <functional>
#include <limits>
#include <string>
#include <utility>

#include "darwinics/model.hpp"
#include "darwinics/quadrature.hpp"

namespace darwinics::unconstrained {

enum class Target { OnLoop, OnCharge, OnSolenoid, OnWire };

std::string to_string(Target t);

/// Force on one body as a function of the kinematic state of the other
/// (moving) body at time t; the receiving body is held at its reference pose.
struct ForceField {
  std::string system;
  Target target{Target::OnLoop};
  std::function<Vec3(const Vec3& r, const Vec3& v, double t)> eval;
  /// Reference point of the receiving body (closest-approach anchor for infinite paths).
  Vec3 anchor;
  /// The anchor is a line source parallel to z: distances are measured in-plane.
  bool axis_anchor{false};

  Vec3 operator()(const Vec3& r, const Vec3& v, double t) const { return eval(r, v, t); }
};

struct StraightPath {
  Vec3 start;  // position at t = 0
  Vec3 velocity;
  double t_min{-std::numeric_limits<double>::infinity()};
  double t_max{std::numeric_limits<double>::infinity()};

  Vec3 position(double t) const { return start + velocity * t; }
};

void validate(const StraightPath& p);

// --- Mott-Schwinger pair -------------------------------------------------

Vec3 force_on_loop_from_charge(const PointCharge& charge, const MagneticDipole& dipole, const Units& u,
                               double singular_radius = kDefaultSingularRadius);

Vec3 force_on_charge_from_loop(const PointCharge& charge, const MagneticDipole& dipole, const Units& u,
                               double singular_radius = kDefaultSingularRadius);

/// Fig. 5 frame: loop at the origin with moment mu z_hat, charge at rel = (x, y, z) moving with v x_hat.
Vec3 fig5_force_on_loop(double mu, double q, double v, const Vec3& rel, const Units& u);
Vec3 fig5_force_on_charge(double mu, double q, double v, const Vec3& rel, const Units& u);

// --- A-B: charge and line solenoid ---------------------------------------

/// Identically zero outside the solenoid; still rejects on-axis charges.
Vec3 ab_force_on_charge(const PointCharge& charge, const LineSolenoid& s,
                        double singular_radius = kDefaultSingularRadius);

/// z-integral of force_on_loop_from_charge over the solenoid's dipole slices:
///   F = (q m'/c) [ 2 w / rho^2 - 4 (w . rho) rho / rho^4 ],   w = z_hat x (v_q - v_s),
/// rho the in-plane offset of the charge from the axis, m' the moment per length.
Vec3 ab_force_on_solenoid(const PointCharge& charge, const LineSolenoid& s, const Units& u,
                          MomentDensity density = MomentDensity::Gaussian,
                          double singular_radius = kDefaultSingularRadius);

// --- A-C: dipole and line charge -----------------------------------------

Vec3 ac_force_on_wire(const MagneticDipole& dipole, const LineCharge& w,
                      double singular_radius = kDefaultSingularRadius);

/// z-integral of force_on_loop_from_charge over wire elements lambda dz:
///   F = (lambda/c) [ 2 w_perp / rho^2 - 4 (w_perp . rho) rho / rho^4 ],   w = mu x (v_w - v_mu).
Vec3 ac_force_on_loop(const MagneticDipole& dipole, const LineCharge& w, const Units& u,
                      double singular_radius = kDefaultSingularRadius);

// --- force fields for straight-path integrals -----------------------------

/// Force on a fixed solenoid from a charge moving along a path.
ForceField ab_solenoid_field(double q, const LineSolenoid& s, const Units& u,
                             MomentDensity density = MomentDensity::Gaussian);
/// Force on a fixed dipole from a wire translating along a path (r = wire axis point).
ForceField ac_loop_field(const MagneticDipole& dipole, double lambda, const Units& u);
/// Force on a fixed dipole from a charge moving along a path.
ForceField ms_loop_field(const MagneticDipole& dipole, double q, const Units& u);
/// Force on a charge moving along a path from a fixed dipole.
ForceField ms_charge_field(const MagneticDipole& dipole, double q, const Units& u);

struct PathIntegralConfig {
  quad::QuadConfig quad{};
  /// Finite cutoff for displacement integrals, in units of the impact time b/|v|.
  double cutoff_multiple{200.0};
};

/// Int F dt along the path. Infinite ends are handled by the tan map centred on closest approach.
quad::Estimate<Vec3> straight_path_impulse(const ForceField& f, const StraightPath& path,
                                           const PathIntegralConfig& cfg = {});

/// (1/m) Int Int F dt' dt: final position offset of the receiving body (initially at rest)
/// relative to staying put, evaluated as (1/m) Int (t_max - t) F(t) dt.
///
/// Infinite ranges are replaced by symmetric cutoffs T, 2T, 4T about closest approach
/// (T = cutoff_multiple * b/|v|) and Richardson-extrapolated assuming an O(1/T) tail.
quad::Estimate<Vec3> straight_path_displacement(const ForceField& f, const StraightPath& path, double mass,
                                                const PathIntegralConfig& cfg = {});

/// (1/m) Int (t_c - t) F(t) dt with t_c the time of closest approach: the offset,
/// at t_c, of the outgoing asymptote from the incoming straight line. Finite even
/// when the net impulse is not; equals straight_path_displacement when it vanishes.
quad::Estimate<Vec3> straight_path_offset(const ForceField& f, const StraightPath& path, double mass,
                                          const PathIntegralConfig& cfg = {});

/// Time of closest approach of the path to the field's anchor and the impact parameter.
std::pair<double, double> closest_approach(const ForceField& f, const StraightPath& path);

}  // namespace darwinics::unconstrained
