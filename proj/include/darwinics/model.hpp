#pragma once

// Body and source definitions plus the elementary Gaussian-unit field
// evaluators. Every evaluator rejects field points within the singular radius
// of its source instead of returning Inf.

#include "darwinics/errors.hpp"
#include "darwinics/vec3.hpp"

namespace darwinics {

inline constexpr double kSpeedOfLightCgs = 2.99792458e10;  // cm/s
inline constexpr double kHbarCgs = 1.0545718e-27;          // erg s
inline constexpr double kDefaultSingularRadius = 1e-9;
inline constexpr double kPi = 3.14159265358979323846;

struct Units {
  double c{kSpeedOfLightCgs};
  double hbar{kHbarCgs};

  static Units gaussian() { return {}; }
  /// Nondimensional runs: q = m = r = 1 with a chosen (large) c.
  static Units nondimensional(double c, double hbar = 1.0) { return make(c, hbar); }
  static Units make(double c, double hbar);
};

struct PointCharge {
  double q{0.0};
  double m{1.0};
  Vec3 r;
  Vec3 v;
};

struct MagneticDipole {
  Vec3 mu;
  double m{1.0};
  Vec3 r;
  Vec3 v;
};

/// Infinitely long, infinitely thin solenoid parallel to z through axis_point.
struct LineSolenoid {
  double flux{0.0};
  Vec3 axis_point;  // z component ignored
  double mass_per_length{1.0};
  Vec3 v;  // v.z must be 0
};

/// Infinite straight line charge parallel to z through axis_point.
struct LineCharge {
  double lambda{0.0};
  Vec3 axis_point;  // z component ignored
  double mass_per_length{1.0};
  Vec3 v;  // v.z must be 0
};

struct CurrentLoop {
  double radius{1.0};
  double current{0.0};
  Vec3 center;
  Vec3 normal{0.0, 0.0, 1.0};

  /// mu = I * pi * radius^2 / c along the normal.
  Vec3 moment(const Units& u) const;
};

void validate(const Units& u);
void validate(const PointCharge& b, const Units& u);
void validate(const MagneticDipole& b, const Units& u);
void validate(const LineSolenoid& s);
void validate(const LineCharge& w);
void validate(const CurrentLoop& loop);

/// Magnetic moment per unit length of a solenoid with flux Phi.
///
/// The Gaussian value is Phi/4pi (moment has units of flux times length). The
/// other convention multiplies by c, which is what the source derivation prints;
/// it is kept selectable so its consequences can be reproduced.
enum class MomentDensity { Gaussian, PrintedWithC };

double solenoid_moment_per_length(double flux, const Units& u, MomentDensity convention = MomentDensity::Gaussian);

// --- elementary fields ----------------------------------------------------
// r_field - r_src is the displacement from source to field point throughout.

/// Darwin (Coulomb-gauge, order v/c) vector potential of a moving charge.
Vec3 darwin_vector_potential(double q, const Vec3& v, const Vec3& r_src, const Vec3& r_field, const Units& u,
                             double singular_radius = kDefaultSingularRadius);

double coulomb_potential(double q, const Vec3& r_src, const Vec3& r_field,
                         double singular_radius = kDefaultSingularRadius);

Vec3 coulomb_field(double q, const Vec3& r_src, const Vec3& r_field, double singular_radius = kDefaultSingularRadius);

/// (q/c) v x r / r^3, the curl of darwin_vector_potential.
Vec3 charge_magnetic_field(double q, const Vec3& v, const Vec3& r_src, const Vec3& r_field, const Units& u,
                           double singular_radius = kDefaultSingularRadius);

Vec3 dipole_vector_potential(const Vec3& mu, const Vec3& r_src, const Vec3& r_field,
                             double singular_radius = kDefaultSingularRadius);

/// Scalar potential of a moving magnetic dipole: v.(mu x r) / (c r^3).
double dipole_scalar_potential_moving(const Vec3& mu, const Vec3& v_mu, const Vec3& r_src, const Vec3& r_field,
                                      const Units& u, double singular_radius = kDefaultSingularRadius);

Vec3 dipole_magnetic_field(const Vec3& mu, const Vec3& r_src, const Vec3& r_field,
                           double singular_radius = kDefaultSingularRadius);

/// Jacobian dB_i/dx_j of the point-dipole field (outside the source).
Mat3 dipole_magnetic_field_jacobian(const Vec3& mu, const Vec3& r_src, const Vec3& r_field,
                                    double singular_radius = kDefaultSingularRadius);

/// (Phi/2pi) z x rho / rho^2 outside an ideal line solenoid.
Vec3 solenoid_vector_potential(const LineSolenoid& s, const Vec3& r_field,
                               double singular_radius = kDefaultSingularRadius);

/// 2 lambda rho_hat / rho, radial in the xy plane.
Vec3 wire_electric_field(const LineCharge& w, const Vec3& r_field, double singular_radius = kDefaultSingularRadius);

Mat3 wire_electric_field_jacobian(const LineCharge& w, const Vec3& r_field,
                                  double singular_radius = kDefaultSingularRadius);

/// In-plane displacement of r_field from a line source axis; throws OnAxisError inside the singular radius.
Vec3 axis_offset(const Vec3& axis_point, const Vec3& r_field, double singular_radius);

}  // namespace darwinics
