#pragma once

// Plane-wave phase accumulation (1/hbar) Int p . dx along polygonal paths.

#include <functional>
#include <vector>

#include "darwinics/model.hpp"
#include "darwinics/unconstrained_forces.hpp"

namespace darwinics::phase {

struct PolyPath {
  std::vector<Vec3> vertices;
  bool closed{false};
  double speed{1.0};  // constant traversal speed
};

void validate(const PolyPath& p);

double path_length(const PolyPath& p);

struct PhaseResult {
  double phase{0.0};
  double kinetic{0.0};
  double vector{0.0};  // (q/c) A or (1/c) mu x E part
  double force{0.0};   // Int [Int F dt] . dx part
};

/// Int a(x) . dx along every segment by adaptive quadrature.
double path_integral(const PolyPath& p, const std::function<Vec3(const Vec3&)>& a, double rel_tol = 1e-13);

/// Signed number of turns of a closed path about a z-parallel axis.
int winding_number(const PolyPath& p, const Vec3& axis_point);

/// Throws AxisCrossingError when a segment comes within `singular_radius` of the axis.
void check_axis_clearance(const PolyPath& p, const Vec3& axis_point, double singular_radius);

/// (1/hbar) closed Int (q/c) A_s . dx for a stationary solenoid; no kinetic term is carried.
PhaseResult ab_phase(const PolyPath& path, const LineSolenoid& s, double q, const Units& u,
                     double singular_radius = kDefaultSingularRadius);

/// (1/hbar) closed Int (1/c) (mu x E_w) . dx for a stationary wire.
PhaseResult ac_phase(const PolyPath& path, const LineCharge& w, const Vec3& mu, const Units& u,
                     double singular_radius = kDefaultSingularRadius);

/// How the solenoid's constituents are represented in the summed potential.
struct SolenoidConstituents {
  int slices{0};            // 0: the ideal line, whose summed potential is exactly A_s
  double half_length{0.0};  // slices span z in [-half_length, half_length] about the path plane
  MomentDensity density{MomentDensity::Gaussian};
};

/// (1/hbar) Int (m v + (q/c) sum_j A_j) . dx, v tangent to the path at path.speed.
PhaseResult unconstrained_ab_phase(const PolyPath& path, const LineSolenoid& s, double q, double m, const Units& u,
                                   const SolenoidConstituents& constituents = {},
                                   double singular_radius = kDefaultSingularRadius);

/// Summed vector potential of `slices` point dipoles (moment density times dz)
/// at midpoints of [z0 - L, z0 + L] along the solenoid axis.
Vec3 dipole_slice_potential(const LineSolenoid& s, const Vec3& r, const SolenoidConstituents& c, double z0,
                            const Units& u);

/// A straight open arm x(t) = start + velocity t over [t_min, t_max] (ends may be infinite).
using Arm = unconstrained::StraightPath;

struct ArmPhase {
  PhaseResult result;
  bool kinetic_omitted{false};  // infinite arm: the common-mode kinetic phase is not finite
  double quadrature_error{0.0};
};

struct CompositePhase {
  ArmPhase first;
  ArmPhase second;
  double difference{0.0};  // first.phase - second.phase
};

/// Composite body of `constituents` non-interacting parts sharing the arm kinematics;
/// the total initial momentum p0 is split equally among them (only the sum enters).
/// force(r, v, t) is the total force on the composite body at its own state.
CompositePhase composite_force_phase(const Arm& first, const Arm& second, const unconstrained::ForceField& force,
                                     const Vec3& p0_total, int constituents, const Units& u);

/// Total force on a dipole travelling past a fixed wire (the force field for composite_force_phase).
unconstrained::ForceField ac_moving_dipole_field(const Vec3& mu, const LineCharge& w, const Units& u);

}  // namespace darwinics::phase
