#include "darwinics/unconstrained_forces.hpp"

#include <cmath>
#include <sstream>

#include "darwinics/errors.hpp"

namespace darwinics::unconstrained {

std::string to_string(Target t) {
  switch (t) {
    case Target::OnLoop:
      return "on_loop";
    case Target::OnCharge:
      return "on_charge";
    case Target::OnSolenoid:
      return "on_solenoid";
    case Target::OnWire:
      return "on_wire";
  }
  return "unknown";
}

void validate(const StraightPath& p) {
  if (!is_finite(p.start) || !is_finite(p.velocity)) throw ValidationError("path: start and velocity must be finite");
  if (!(norm(p.velocity) > 0.0)) throw ValidationError("path: velocity must be nonzero");
  if (!(p.t_min < p.t_max)) throw ValidationError("path: t_min must be below t_max");
}

namespace {

// grad_d [ (w . d) / d^3 ] for the dipole-energy form mu . B = (q/c) (mu x u) . d / d^3.
Vec3 gradient_w_dot_d_over_d3(const Vec3& w, const Vec3& d) {
  const double r2 = norm2(d);
  const double r = std::sqrt(r2);
  const double r3 = r2 * r;
  return w / r3 - d * (3.0 * dot(w, d) / (r3 * r2));
}

// Int dz over the line of the (w . d)/d^3 gradient, for w in-plane and d = (rho, z).
Vec3 line_integrated_gradient(const Vec3& w_perp, const Vec3& rho) {
  const double r2 = norm2(rho);
  return w_perp * (2.0 / r2) - rho * (4.0 * dot(w_perp, rho) / (r2 * r2));
}

}  // namespace

Vec3 force_on_loop_from_charge(const PointCharge& charge, const MagneticDipole& dipole, const Units& u,
                               double singular_radius) {
  const Vec3 d = dipole.r - charge.r;
  if (norm(d) < singular_radius) throw CoincidentPointsError("mott-schwinger: charge inside the loop's singular radius");
  const Vec3 w = cross(dipole.mu, charge.v - dipole.v);
  return gradient_w_dot_d_over_d3(w, d) * (charge.q / u.c);
}

Vec3 force_on_charge_from_loop(const PointCharge& charge, const MagneticDipole& dipole, const Units& u,
                               double singular_radius) {
  const Vec3 b = dipole_magnetic_field(dipole.mu, dipole.r, charge.r, singular_radius);
  return cross(charge.v - dipole.v, b) * (charge.q / u.c);
}

Vec3 fig5_force_on_loop(double mu, double q, double v, const Vec3& rel, const Units& u) {
  const double r2 = norm2(rel);
  const double r = std::sqrt(r2);
  const double pre = mu * q * v / (u.c * r2 * r);
  const Vec3 bracket = Vec3::unit_y() - Vec3{rel.x * rel.y, rel.y * rel.y, rel.y * rel.z} * (3.0 / r2);
  return bracket * pre;
}

Vec3 fig5_force_on_charge(double mu, double q, double v, const Vec3& rel, const Units& u) {
  const double r2 = norm2(rel);
  const double r = std::sqrt(r2);
  const double pre = mu * q * v / (u.c * r2 * r);
  const Vec3 bracket = Vec3::unit_y() - Vec3{0.0, rel.z * rel.z, -rel.y * rel.z} * (3.0 / r2);
  return bracket * pre;
}

Vec3 ab_force_on_charge(const PointCharge& charge, const LineSolenoid& s, double singular_radius) {
  axis_offset(s.axis_point, charge.r, singular_radius);
  return {};
}

Vec3 ab_force_on_solenoid(const PointCharge& charge, const LineSolenoid& s, const Units& u, MomentDensity density,
                          double singular_radius) {
  const Vec3 rho = axis_offset(s.axis_point, charge.r, singular_radius);
  const double m_per_len = solenoid_moment_per_length(s.flux, u, density);
  const Vec3 w = transverse(cross(Vec3::unit_z(), charge.v - s.v));
  return line_integrated_gradient(w, rho) * (charge.q * m_per_len / u.c);
}

Vec3 ac_force_on_wire(const MagneticDipole& dipole, const LineCharge& w, double singular_radius) {
  axis_offset(w.axis_point, dipole.r, singular_radius);
  return {};
}

Vec3 ac_force_on_loop(const MagneticDipole& dipole, const LineCharge& w, const Units& u, double singular_radius) {
  const Vec3 rho = axis_offset(w.axis_point, dipole.r, singular_radius);
  const Vec3 wv = transverse(cross(dipole.mu, w.v - dipole.v));
  return line_integrated_gradient(wv, rho) * (w.lambda / u.c);
}

ForceField ab_solenoid_field(double q, const LineSolenoid& s, const Units& u, MomentDensity density) {
  ForceField f;
  f.system = "ab";
  f.target = Target::OnSolenoid;
  f.anchor = transverse(s.axis_point);
  f.axis_anchor = true;
  f.eval = [q, s, u, density](const Vec3& r, const Vec3& v, double) {
    return ab_force_on_solenoid(PointCharge{q, 1.0, r, v}, s, u, density);
  };
  return f;
}

ForceField ac_loop_field(const MagneticDipole& dipole, double lambda, const Units& u) {
  ForceField f;
  f.system = "ac";
  f.target = Target::OnLoop;
  f.anchor = dipole.r;
  f.axis_anchor = true;
  f.eval = [dipole, lambda, u](const Vec3& r, const Vec3& v, double) {
    return ac_force_on_loop(dipole, LineCharge{lambda, r, 1.0, v}, u);
  };
  return f;
}

ForceField ms_loop_field(const MagneticDipole& dipole, double q, const Units& u) {
  ForceField f;
  f.system = "mott-schwinger";
  f.target = Target::OnLoop;
  f.anchor = dipole.r;
  f.eval = [dipole, q, u](const Vec3& r, const Vec3& v, double) {
    return force_on_loop_from_charge(PointCharge{q, 1.0, r, v}, dipole, u);
  };
  return f;
}

ForceField ms_charge_field(const MagneticDipole& dipole, double q, const Units& u) {
  ForceField f;
  f.system = "mott-schwinger";
  f.target = Target::OnCharge;
  f.anchor = dipole.r;
  f.eval = [dipole, q, u](const Vec3& r, const Vec3& v, double) {
    return force_on_charge_from_loop(PointCharge{q, 1.0, r, v}, dipole, u);
  };
  return f;
}

std::pair<double, double> closest_approach(const ForceField& f, const StraightPath& path) {
  Vec3 x0 = path.start - f.anchor;
  Vec3 v = path.velocity;
  if (f.axis_anchor) {
    x0 = transverse(x0);
    v = transverse(v);
  }
  const double v2 = norm2(v);
  if (!(v2 > 0.0)) throw ValidationError("path: no in-plane motion relative to the line source");
  const double tc = -dot(x0, v) / v2;
  const double b = norm(x0 + v * tc);
  return {tc, b};
}

namespace {

double impact_time(const ForceField& f, const StraightPath& path, double& tc) {
  const auto [t_c, b] = closest_approach(f, path);
  tc = t_c;
  const double speed = f.axis_anchor ? norm(transverse(path.velocity)) : norm(path.velocity);
  if (!(b > 0.0)) throw CoincidentPointsError("path passes through the source");
  return b / speed;
}

// Integral of g over [a, b] split at tc when it lies inside; ends may be infinite.
quad::Estimate<Vec3> split_integral(const quad::VectorFn& g, double a, double b, double tc, double tau,
                                    const quad::QuadConfig& qc) {
  if (tc > a && tc < b) {
    const auto lo = quad::integrate(g, a, tc, qc, tc, tau);
    const auto hi = quad::integrate(g, tc, b, qc, tc, tau);
    return {lo.value + hi.value, lo.error + hi.error};
  }
  return quad::integrate(g, a, b, qc, tc, tau);
}

}  // namespace

quad::Estimate<Vec3> straight_path_impulse(const ForceField& f, const StraightPath& path,
                                           const PathIntegralConfig& cfg) {
  validate(path);
  double tc = 0.0;
  const double tau = impact_time(f, path, tc);
  auto g = [&](double t) { return f(path.position(t), path.velocity, t); };
  return split_integral(g, path.t_min, path.t_max, tc, tau, cfg.quad);
}

namespace {

// (1/m) Int F(t) (t_ref(t0, t1) - t) dt over the path, with infinite ends replaced by
// symmetric cutoffs T, 2T, 4T about closest approach and Richardson-extrapolated in 1/T.
template <class Ref>
quad::Estimate<Vec3> weighted_displacement(const ForceField& f, const StraightPath& path, double mass,
                                           const PathIntegralConfig& cfg, Ref t_ref) {
  validate(path);
  if (!(mass > 0.0)) throw ValidationError("displacement: mass must be positive");
  double tc = 0.0;
  const double tau = impact_time(f, path, tc);

  auto window = [&](double t0, double t1) {
    const double r = t_ref(t0, t1, tc);
    auto g = [&](double t) { return f(path.position(t), path.velocity, t) * (r - t); };
    auto e = split_integral(g, t0, t1, tc, tau, cfg.quad);
    return quad::Estimate<Vec3>{e.value / mass, e.error / mass};
  };

  const bool lo_inf = !std::isfinite(path.t_min);
  const bool hi_inf = !std::isfinite(path.t_max);
  if (!lo_inf && !hi_inf) return window(path.t_min, path.t_max);

  auto cut = [&](double T) {
    const double t0 = lo_inf ? tc - T : path.t_min;
    const double t1 = hi_inf ? tc + T : path.t_max;
    return window(t0, t1).value;
  };
  const double T = cfg.cutoff_multiple * tau;
  const Vec3 d1 = cut(T);
  const Vec3 d2 = cut(2.0 * T);
  const Vec3 d4 = cut(4.0 * T);
  const Vec3 r1 = d2 * 2.0 - d1;
  const Vec3 r2 = d4 * 2.0 - d2;
  const double residual = norm(r2 - r1);
  const double scale = std::fmax(norm(r2), norm(d4 - d1));
  if (residual > 1e-3 * scale + 1e-300) {
    std::ostringstream msg;
    msg << "displacement cutoff extrapolation did not settle: residual " << residual << " vs scale " << scale;
    throw NonConvergenceError(msg.str());
  }
  return {r2, residual};
}

}  // namespace

quad::Estimate<Vec3> straight_path_displacement(const ForceField& f, const StraightPath& path, double mass,
                                                const PathIntegralConfig& cfg) {
  return weighted_displacement(f, path, mass, cfg, [](double, double t1, double) { return t1; });
}

quad::Estimate<Vec3> straight_path_offset(const ForceField& f, const StraightPath& path, double mass,
                                          const PathIntegralConfig& cfg) {
  return weighted_displacement(f, path, mass, cfg, [](double, double, double tc) { return tc; });
}

}  // namespace darwinics::unconstrained
