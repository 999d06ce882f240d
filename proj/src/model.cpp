#include "darwinics/model.hpp"

#include <ostream>
#include <sstream>
#include <string>

namespace darwinics {

std::ostream& operator<<(std::ostream& os, const Vec3& v) {
  return os << '(' << v.x << ", " << v.y << ", " << v.z << ')';
}

namespace {

Vec3 separation(const Vec3& r_src, const Vec3& r_field, double singular_radius) {
  const Vec3 d = r_field - r_src;
  if (norm(d) < singular_radius) {
    std::ostringstream msg;
    msg << "field point " << r_field << " within singular radius " << singular_radius << " of source " << r_src;
    throw CoincidentPointsError(msg.str());
  }
  return d;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

Units Units::make(double c, double hbar) {
  Units u{c, hbar};
  validate(u);
  return u;
}

Vec3 CurrentLoop::moment(const Units& u) const {
  return normal * (current * kPi * radius * radius / u.c);
}

void validate(const Units& u) {
  require(std::isfinite(u.c) && u.c > 0.0, "units: c must be positive");
  require(std::isfinite(u.hbar) && u.hbar > 0.0, "units: hbar must be positive");
}

void validate(const PointCharge& b, const Units& u) {
  require(std::isfinite(b.q), "charge: q must be finite");
  require(std::isfinite(b.m) && b.m > 0.0, "charge: mass must be positive");
  require(is_finite(b.r) && is_finite(b.v), "charge: position and velocity must be finite");
  require(norm(b.v) < u.c, "charge: speed must be below c");
}

void validate(const MagneticDipole& b, const Units& u) {
  require(is_finite(b.mu), "dipole: moment must be finite");
  require(std::isfinite(b.m) && b.m > 0.0, "dipole: mass must be positive");
  require(is_finite(b.r) && is_finite(b.v), "dipole: position and velocity must be finite");
  require(norm(b.v) < u.c, "dipole: speed must be below c");
}

void validate(const LineSolenoid& s) {
  require(std::isfinite(s.flux), "solenoid: flux must be finite");
  require(std::isfinite(s.mass_per_length) && s.mass_per_length > 0.0, "solenoid: mass_per_length must be positive");
  require(is_finite(s.axis_point) && is_finite(s.v), "solenoid: axis point and velocity must be finite");
  require(s.v.z == 0.0, "solenoid: velocity must be transverse (v.z == 0)");
}

void validate(const LineCharge& w) {
  require(std::isfinite(w.lambda), "wire: lambda must be finite");
  require(std::isfinite(w.mass_per_length) && w.mass_per_length > 0.0, "wire: mass_per_length must be positive");
  require(is_finite(w.axis_point) && is_finite(w.v), "wire: axis point and velocity must be finite");
  require(w.v.z == 0.0, "wire: velocity must be transverse (v.z == 0)");
}

void validate(const CurrentLoop& loop) {
  require(std::isfinite(loop.radius) && loop.radius > 0.0, "loop: radius must be positive");
  require(std::isfinite(loop.current), "loop: current must be finite");
  require(std::fabs(norm(loop.normal) - 1.0) < 1e-12, "loop: normal must be a unit vector");
}

double solenoid_moment_per_length(double flux, const Units& u, MomentDensity convention) {
  const double gaussian = flux / (4.0 * kPi);
  return convention == MomentDensity::Gaussian ? gaussian : u.c * gaussian;
}

Vec3 darwin_vector_potential(double q, const Vec3& v, const Vec3& r_src, const Vec3& r_field, const Units& u,
                             double singular_radius) {
  const Vec3 d = separation(r_src, r_field, singular_radius);
  const double r = norm(d);
  const Vec3 rhat = d / r;
  return (v + rhat * dot(v, rhat)) * (q / (2.0 * r * u.c));
}

double coulomb_potential(double q, const Vec3& r_src, const Vec3& r_field, double singular_radius) {
  return q / norm(separation(r_src, r_field, singular_radius));
}

Vec3 coulomb_field(double q, const Vec3& r_src, const Vec3& r_field, double singular_radius) {
  const Vec3 d = separation(r_src, r_field, singular_radius);
  const double r = norm(d);
  return d * (q / (r * r * r));
}

Vec3 charge_magnetic_field(double q, const Vec3& v, const Vec3& r_src, const Vec3& r_field, const Units& u,
                           double singular_radius) {
  const Vec3 d = separation(r_src, r_field, singular_radius);
  const double r = norm(d);
  return cross(v, d) * (q / (u.c * r * r * r));
}

Vec3 dipole_vector_potential(const Vec3& mu, const Vec3& r_src, const Vec3& r_field, double singular_radius) {
  const Vec3 d = separation(r_src, r_field, singular_radius);
  const double r = norm(d);
  return cross(mu, d) / (r * r * r);
}

double dipole_scalar_potential_moving(const Vec3& mu, const Vec3& v_mu, const Vec3& r_src, const Vec3& r_field,
                                      const Units& u, double singular_radius) {
  const Vec3 d = separation(r_src, r_field, singular_radius);
  const double r = norm(d);
  return dot(v_mu, cross(mu, d)) / (u.c * r * r * r);
}

Vec3 dipole_magnetic_field(const Vec3& mu, const Vec3& r_src, const Vec3& r_field, double singular_radius) {
  const Vec3 d = separation(r_src, r_field, singular_radius);
  const double r2 = norm2(d);
  const double r = std::sqrt(r2);
  const double r3 = r2 * r;
  return (d * (3.0 * dot(mu, d) / r2) - mu) / r3;
}

Mat3 dipole_magnetic_field_jacobian(const Vec3& mu, const Vec3& r_src, const Vec3& r_field, double singular_radius) {
  // B_i = 3 (mu.d) d_i / r^5 - mu_i / r^3
  const Vec3 d = separation(r_src, r_field, singular_radius);
  const double r2 = norm2(d);
  const double r = std::sqrt(r2);
  const double r5 = r2 * r2 * r;
  const double md = dot(mu, d);
  Mat3 jac;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double delta = i == j ? 1.0 : 0.0;
      jac(i, j) = (3.0 * (mu[j] * d[i] + md * delta + mu[i] * d[j]) - 15.0 * md * d[i] * d[j] / r2) / r5;
    }
  }
  return jac;
}

Vec3 axis_offset(const Vec3& axis_point, const Vec3& r_field, double singular_radius) {
  const Vec3 rho = transverse(r_field - axis_point);
  if (norm(rho) < singular_radius) {
    std::ostringstream msg;
    msg << "field point " << r_field << " on line source axis through " << transverse(axis_point);
    throw OnAxisError(msg.str());
  }
  return rho;
}

Vec3 solenoid_vector_potential(const LineSolenoid& s, const Vec3& r_field, double singular_radius) {
  const Vec3 rho = axis_offset(s.axis_point, r_field, singular_radius);
  return cross(Vec3::unit_z(), rho) * (s.flux / (2.0 * kPi * norm2(rho)));
}

Vec3 wire_electric_field(const LineCharge& w, const Vec3& r_field, double singular_radius) {
  const Vec3 rho = axis_offset(w.axis_point, r_field, singular_radius);
  return rho * (2.0 * w.lambda / norm2(rho));
}

Mat3 wire_electric_field_jacobian(const LineCharge& w, const Vec3& r_field, double singular_radius) {
  const Vec3 rho = axis_offset(w.axis_point, r_field, singular_radius);
  const double rho2 = norm2(rho);
  Mat3 jac;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double delta = i == j ? 1.0 : 0.0;
      jac(i, j) = 2.0 * w.lambda * (delta / rho2 - 2.0 * rho[i] * rho[j] / (rho2 * rho2));
    }
  }
  return jac;
}

}  // namespace darwinics
