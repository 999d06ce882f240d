#include "darwinics/phase_shifts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "darwinics/kernels/kernels.hpp"
#include "darwinics/quadrature.hpp"

namespace darwinics::phase {

namespace {

struct Segment {
  Vec3 a, b;
};

std::vector<Segment> segments(const PolyPath& p) {
  std::vector<Segment> out;
  const auto& v = p.vertices;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) out.push_back({v[i], v[i + 1]});
  if (p.closed && v.front() != v.back()) out.push_back({v.back(), v.front()});
  return out;
}

// Parameter in [0, 1] of the in-plane foot of `axis` on segment a-b.
double axis_foot(const Segment& s, const Vec3& axis) {
  const Vec3 d = transverse(s.b - s.a);
  const double dd = norm2(d);
  if (dd == 0.0) return 0.5;
  return std::clamp(dot(transverse(axis - s.a), d) / dd, 0.0, 1.0);
}

double segment_integral(const Segment& s, const std::function<Vec3(const Vec3&)>& a, double rel_tol,
                        const std::vector<Vec3>& split_axes) {
  const Vec3 d = s.b - s.a;
  const auto f = [&](double t) { return dot(a(s.a + d * t), d); };
  std::vector<double> cuts{0.0, 1.0};
  for (const auto& ax : split_axes) cuts.push_back(axis_foot(s, ax));
  std::sort(cuts.begin(), cuts.end());
  quad::QuadConfig cfg;
  cfg.rel_tol = rel_tol;
  cfg.accept_factor = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] - cuts[i] <= 0.0) continue;
    sum += quad::integrate(quad::ScalarFn(f), cuts[i], cuts[i + 1], cfg).value;
  }
  return sum;
}

double integrate_path(const PolyPath& p, const std::function<Vec3(const Vec3&)>& a, double rel_tol,
                      const std::vector<Vec3>& split_axes) {
  validate(p);
  double sum = 0.0;
  for (const auto& s : segments(p)) sum += segment_integral(s, a, rel_tol, split_axes);
  return sum;
}

void require_closed(const PolyPath& p, const char* op) {
  if (!p.closed) throw ValidationError(std::string(op) + ": path must be closed");
}

}  // namespace

void validate(const PolyPath& p) {
  if (p.vertices.size() < 2) throw ValidationError("path: need at least 2 vertices");
  if (!(std::isfinite(p.speed) && p.speed > 0.0)) throw ValidationError("path: speed must be positive");
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    if (!is_finite(p.vertices[i])) throw ValidationError("path: non-finite vertex");
    if (i > 0 && p.vertices[i] == p.vertices[i - 1])
      throw ValidationError("path: consecutive vertices " + std::to_string(i - 1) + " and " + std::to_string(i) +
                            " coincide");
  }
  if (p.closed) {
    const std::size_t n = p.vertices.size() - (p.vertices.front() == p.vertices.back() ? 1 : 0);
    if (n < 3) throw ValidationError("path: closed path needs 3 distinct vertices");
  }
}

double path_length(const PolyPath& p) {
  validate(p);
  double len = 0.0;
  for (const auto& s : segments(p)) len += norm(s.b - s.a);
  return len;
}

double path_integral(const PolyPath& p, const std::function<Vec3(const Vec3&)>& a, double rel_tol) {
  return integrate_path(p, a, rel_tol, {});
}

int winding_number(const PolyPath& p, const Vec3& axis_point) {
  validate(p);
  require_closed(p, "winding_number");
  double total = 0.0;
  for (const auto& s : segments(p)) {
    const Vec3 a = transverse(s.a - axis_point);
    const Vec3 b = transverse(s.b - axis_point);
    total += std::atan2(a.x * b.y - a.y * b.x, a.x * b.x + a.y * b.y);
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

void check_axis_clearance(const PolyPath& p, const Vec3& axis_point, double singular_radius) {
  validate(p);
  for (const auto& s : segments(p)) {
    const double t = axis_foot(s, axis_point);
    const Vec3 foot = transverse(s.a + (s.b - s.a) * t - axis_point);
    if (norm(foot) <= singular_radius)
      throw AxisCrossingError("path passes within " + std::to_string(norm(foot)) + " of the source axis");
  }
}

PhaseResult ab_phase(const PolyPath& path, const LineSolenoid& s, double q, const Units& u, double singular_radius) {
  validate(s);
  validate(u);
  require_closed(path, "ab_phase");
  if (norm(transverse(s.v)) != 0.0) throw ValidationError("ab_phase: solenoid must be stationary");
  check_axis_clearance(path, s.axis_point, singular_radius);
  const auto a = [&](const Vec3& r) { return solenoid_vector_potential(s, r, singular_radius); };
  PhaseResult out;
  out.vector = q / (u.c * u.hbar) * integrate_path(path, a, 1e-13, {s.axis_point});
  out.phase = out.vector;
  return out;
}

PhaseResult ac_phase(const PolyPath& path, const LineCharge& w, const Vec3& mu, const Units& u,
                     double singular_radius) {
  validate(w);
  validate(u);
  require_closed(path, "ac_phase");
  if (norm(transverse(w.v)) != 0.0) throw ValidationError("ac_phase: wire must be stationary");
  check_axis_clearance(path, w.axis_point, singular_radius);
  const auto a = [&](const Vec3& r) { return cross(mu, wire_electric_field(w, r, singular_radius)); };
  PhaseResult out;
  out.vector = integrate_path(path, a, 1e-13, {w.axis_point}) / (u.c * u.hbar);
  out.phase = out.vector;
  return out;
}

Vec3 dipole_slice_potential(const LineSolenoid& s, const Vec3& r, const SolenoidConstituents& c, double z0,
                            const Units& u) {
  if (c.slices <= 0 || !(c.half_length > 0.0))
    throw ValidationError("constituents: slices and half_length must be positive");
  const auto n = static_cast<std::size_t>(c.slices);
  const double dz = 2.0 * c.half_length / static_cast<double>(n);
  const double m = solenoid_moment_per_length(s.flux, u, c.density) * dz;
  std::vector<double> z(n), mk(n, m);
  for (std::size_t k = 0; k < n; ++k) z[k] = z0 - c.half_length + (static_cast<double>(k) + 0.5) * dz;
  return kernels::dipole_column_potential(s.axis_point.x, s.axis_point.y, z.data(), mk.data(), n, r);
}

PhaseResult unconstrained_ab_phase(const PolyPath& path, const LineSolenoid& s, double q, double m, const Units& u,
                                   const SolenoidConstituents& constituents, double singular_radius) {
  validate(s);
  validate(u);
  if (!(m > 0.0)) throw ValidationError("unconstrained_ab_phase: mass must be positive");
  check_axis_clearance(path, s.axis_point, singular_radius);

  PhaseResult out;
  out.kinetic = m * path.speed * path_length(path) / u.hbar;

  std::function<Vec3(const Vec3&)> a;
  if (constituents.slices == 0) {
    a = [&](const Vec3& r) { return solenoid_vector_potential(s, r, singular_radius); };
  } else {
    a = [&](const Vec3& r) {
      axis_offset(s.axis_point, r, singular_radius);
      return dipole_slice_potential(s, r, constituents, r.z, u);
    };
  }
  out.vector = q / (u.c * u.hbar) * integrate_path(path, a, 1e-13, {s.axis_point});
  out.phase = out.kinetic + out.vector;
  return out;
}

unconstrained::ForceField ac_moving_dipole_field(const Vec3& mu, const LineCharge& w, const Units& u) {
  validate(w);
  unconstrained::ForceField f;
  f.system = "aharonov-casher";
  f.target = unconstrained::Target::OnLoop;
  f.anchor = w.axis_point;
  f.axis_anchor = true;
  f.eval = [mu, w, u](const Vec3& r, const Vec3& v, double) {
    MagneticDipole d;
    d.mu = mu;
    d.r = r;
    d.v = v;
    return unconstrained::ac_force_on_loop(d, w, u);
  };
  return f;
}

namespace {

ArmPhase arm_phase(const Arm& arm, const unconstrained::ForceField& force, const Vec3& p0, const Units& u) {
  unconstrained::validate(arm);
  ArmPhase out;
  const bool finite = std::isfinite(arm.t_min) && std::isfinite(arm.t_max);
  if (finite) {
    out.result.kinetic = dot(p0, arm.position(arm.t_max) - arm.position(arm.t_min)) / u.hbar;
  } else {
    out.kinetic_omitted = true;
  }

  const auto [tc, b] = unconstrained::closest_approach(force, arm);
  const double scale = b / norm(arm.velocity);

  // Int_{t_min}^{t_max} v . P(t) dt with P(t) = Int_{t_min}^t F, integrated by parts.
  // An infinite upper end needs v . P(inf) = 0; the reference time is then arbitrary.
  if (!std::isfinite(arm.t_max)) {
    const auto impulse = unconstrained::straight_path_impulse(force, arm);
    const auto peak = quad::integrate(
        quad::ScalarFn([&](double t) { return std::fabs(dot(force(arm.position(t), arm.velocity, t), arm.velocity)); }),
        arm.t_min, arm.t_max, {}, tc, scale);
    if (std::fabs(dot(impulse.value, arm.velocity)) > 1e-8 * peak.value)
      throw NonConvergenceError("composite_force_phase: force phase diverges (nonzero impulse along the arm)");
  }
  const double t_ref = std::isfinite(arm.t_max) ? arm.t_max : tc;
  quad::QuadConfig cfg;
  cfg.rel_tol = 1e-11;
  cfg.accept_factor = 0.0;
  const auto est = quad::integrate(
      quad::ScalarFn([&](double t) {
        return dot(force(arm.position(t), arm.velocity, t), arm.velocity) * (t_ref - t);
      }),
      arm.t_min, arm.t_max, cfg, tc, scale);
  out.result.force = est.value / u.hbar;
  out.quadrature_error = est.error / u.hbar;
  out.result.phase = out.result.kinetic + out.result.force;
  return out;
}

}  // namespace

CompositePhase composite_force_phase(const Arm& first, const Arm& second, const unconstrained::ForceField& force,
                                     const Vec3& p0_total, int constituents, const Units& u) {
  validate(u);
  if (constituents < 1) throw ValidationError("composite_force_phase: need at least one constituent");
  if (force.axis_anchor) {
    for (const Arm* arm : {&first, &second}) {
      const Vec3 rel = transverse(arm->start - force.anchor);
      const Vec3 dir = transverse(arm->velocity);
      if (norm(dir) > 0.0 && std::fabs(cross(rel, dir).z) / norm(dir) <= kDefaultSingularRadius)
        throw AxisCrossingError("composite_force_phase: arm intersects the source axis");
    }
  }
  // Equal partition; only the sum enters the phase.
  const Vec3 share = p0_total / static_cast<double>(constituents);
  Vec3 p0;
  for (int j = 0; j < constituents; ++j) p0 += share;

  CompositePhase out;
  out.first = arm_phase(first, force, p0, u);
  out.second = arm_phase(second, force, p0, u);
  out.difference = out.first.result.phase - out.second.result.phase;
  return out;
}

}  // namespace darwinics::phase
