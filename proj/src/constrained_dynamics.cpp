#include "darwinics/constrained_dynamics.hpp"

#include <cmath>
#include <sstream>

#include "darwinics/errors.hpp"

namespace darwinics::constrained {

double LagrangianSystem::operator()(const Vector& q, const Vector& v) const {
  return 0.5 * masses.dot(v.cwiseProduct(v)) + interaction(q, v);
}

namespace {

Vec3 vec3_at(const Vector& x, Eigen::Index i) { return {x(i), x(i + 1), x(i + 2)}; }
Vec3 planar_at(const Vector& x, Eigen::Index i) { return {x(i), x(i + 1), 0.0}; }

struct ElPieces {
  Vector rhs;    // dL/dq - C v
  Eigen::MatrixXd mass;
  double force_scale{0.0};
};

ElPieces assemble(const LagrangianSystem& sys, const Vector& q, const Vector& v, double hq, double hv) {
  const Eigen::Index n = sys.dof();
  const auto& f = sys.interaction;
  Vector grad(n);
  Eigen::MatrixXd hvv(n, n);
  Eigen::MatrixXd cvq(n, n);

  for (Eigen::Index i = 0; i < n; ++i) {
    Vector qp = q, qm = q;
    qp(i) += hq;
    qm(i) -= hq;
    grad(i) = (f(qp, v) - f(qm, v)) / (2.0 * hq);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      Vector pp = v, pm = v, mp = v, mm = v;
      pp(i) += hv;
      pp(j) += hv;
      pm(i) += hv;
      pm(j) -= hv;
      mp(i) -= hv;
      mp(j) += hv;
      mm(i) -= hv;
      mm(j) -= hv;
      hvv(i, j) = (f(q, pp) - f(q, pm) - f(q, mp) + f(q, mm)) / (4.0 * hv * hv);
      hvv(j, i) = hvv(i, j);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {  // velocity index
    Vector vp = v, vm = v;
    vp(i) += hv;
    vm(i) -= hv;
    for (Eigen::Index j = 0; j < n; ++j) {  // position index
      Vector qp = q, qm = q;
      qp(j) += hq;
      qm(j) -= hq;
      cvq(i, j) = (f(qp, vp) - f(qp, vm) - f(qm, vp) + f(qm, vm)) / (4.0 * hq * hv);
    }
  }

  ElPieces out;
  const Vector cv = cvq * v;
  out.rhs = grad - cv;
  out.mass = hvv;
  out.mass.diagonal() += sys.masses;
  out.force_scale = std::fmax(grad.cwiseAbs().maxCoeff(), cv.cwiseAbs().maxCoeff());
  return out;
}

}  // namespace

Vector numeric_euler_lagrange(const LagrangianSystem& sys, const Vector& q, const Vector& v, const StepConfig& cfg) {
  const Eigen::Index n = sys.dof();
  if (q.size() != n || v.size() != n) throw ValidationError("numeric_euler_lagrange: state size does not match dof");
  if (!(cfg.position_scale > 0.0) || !(cfg.velocity_scale > 0.0))
    throw ValidationError("numeric_euler_lagrange: scales must be positive");

  // The Lagrangians here are at most quadratic in velocity, so velocity
  // differences are exact for any step; a large step keeps roundoff down.
  const double hq = cfg.rel_step * cfg.position_scale;
  const double hv = 0.1 * cfg.velocity_scale;
  const ElPieces coarse = assemble(sys, q, v, hq, hv);
  const ElPieces fine = assemble(sys, q, v, 0.5 * hq, 0.5 * hv);

  const Vector rhs = (4.0 * fine.rhs - coarse.rhs) / 3.0;
  const Eigen::MatrixXd mass = (4.0 * fine.mass - coarse.mass) / 3.0;

  const double scale = std::fmax(fine.force_scale, 1e-300);
  const double disagreement = (rhs - fine.rhs).cwiseAbs().maxCoeff();
  if (disagreement > cfg.agreement_tol * scale) {
    std::ostringstream msg;
    msg << "numeric_euler_lagrange: Richardson estimates disagree by " << disagreement << " (force scale " << scale
        << "); adjust the characteristic scales";
    throw NonConvergenceError(msg.str());
  }

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(mass);
  if (!lu.isInvertible() || lu.rcond() < 1e-12) throw SingularSystemError("numeric_euler_lagrange: singular mass matrix");
  return lu.solve(rhs);
}

// --- Mott-Schwinger -----------------------------------------------------------

double ms_interaction_field_route(const PointCharge& charge, const MagneticDipole& dipole, const Units& u,
                                  double singular_radius) {
  const Vec3 b = charge_magnetic_field(charge.q, charge.v, charge.r, dipole.r, u, singular_radius);
  const Vec3 e = coulomb_field(charge.q, charge.r, dipole.r, singular_radius);
  const Vec3 d = cross(dipole.v, dipole.mu) / u.c;
  return dot(dipole.mu, b) + dot(d, e);
}

double ms_interaction_potential_route(const PointCharge& charge, const MagneticDipole& dipole, const Units& u,
                                      double singular_radius) {
  const Vec3 a = dipole_vector_potential(dipole.mu, dipole.r, charge.r, singular_radius);
  const double phi = dipole_scalar_potential_moving(dipole.mu, dipole.v, dipole.r, charge.r, u, singular_radius);
  return (charge.q / u.c) * dot(charge.v, a) - charge.q * phi;
}

double ms_lagrangian(const PointCharge& charge, const MagneticDipole& dipole, const Units& u,
                     double singular_radius) {
  return 0.5 * charge.m * norm2(charge.v) + 0.5 * dipole.m * norm2(dipole.v) +
         ms_interaction_potential_route(charge, dipole, u, singular_radius);
}

MsAccelerations ms_accelerations(const PointCharge& charge, const MagneticDipole& dipole, const Units& u,
                                 double singular_radius) {
  const Vec3 b = dipole_magnetic_field(dipole.mu, charge.r, dipole.r, singular_radius);
  const Vec3 f_mu = cross(dipole.v - charge.v, b) * (charge.q / u.c);
  return {-f_mu / charge.m, f_mu / dipole.m};
}

LagrangianSystem ms_system(const PointCharge& charge, const MagneticDipole& dipole, const Units& u) {
  LagrangianSystem sys;
  sys.labels = {"x_q", "y_q", "z_q", "x_mu", "y_mu", "z_mu"};
  sys.masses = Vector::Constant(6, charge.m);
  sys.masses.tail(3).setConstant(dipole.m);
  sys.interaction = [q = charge.q, mu = dipole.mu, u](const Vector& x, const Vector& v) {
    const PointCharge c{q, 1.0, vec3_at(x, 0), vec3_at(v, 0)};
    const MagneticDipole d{mu, 1.0, vec3_at(x, 3), vec3_at(v, 3)};
    return ms_interaction_potential_route(c, d, u, 0.0);
  };
  return sys;
}

// --- A-B -------------------------------------------------------------------

double ab_interaction(const PointCharge& charge, const LineSolenoid& s, const Units& u, double singular_radius) {
  const Vec3 a = solenoid_vector_potential(s, charge.r, singular_radius);
  return (charge.q / u.c) * dot(charge.v - s.v, a);
}

double ab_lagrangian(const PointCharge& charge, const LineSolenoid& s, const Units& u, double length,
                     double singular_radius) {
  return 0.5 * charge.m * norm2(charge.v) + 0.5 * s.mass_per_length * length * norm2(s.v) +
         ab_interaction(charge, s, u, singular_radius);
}

LagrangianSystem ab_system(const PointCharge& charge, const LineSolenoid& s, const Units& u, double length) {
  LagrangianSystem sys;
  sys.labels = {"x_q", "y_q", "z_q", "x_s", "y_s"};
  sys.masses = Vector::Constant(5, charge.m);
  sys.masses.tail(2).setConstant(s.mass_per_length * length);
  sys.interaction = [q = charge.q, flux = s.flux, u](const Vector& x, const Vector& v) {
    const PointCharge c{q, 1.0, vec3_at(x, 0), vec3_at(v, 0)};
    const LineSolenoid sol{flux, planar_at(x, 3), 1.0, planar_at(v, 3)};
    return ab_interaction(c, sol, u, 0.0);
  };
  return sys;
}

PairAccelerations ab_accelerations(const PointCharge& charge, const LineSolenoid& s, double singular_radius) {
  axis_offset(s.axis_point, charge.r, singular_radius);
  return {};
}

namespace {

Vector pack(std::initializer_list<double> xs) {
  Vector out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out(i++) = x;
  return out;
}

}  // namespace

PairAccelerations ab_accelerations_numeric(const PointCharge& charge, const LineSolenoid& s, const Units& u,
                                           double length, const StepConfig& cfg) {
  axis_offset(s.axis_point, charge.r, kDefaultSingularRadius);
  const LagrangianSystem sys = ab_system(charge, s, u, length);
  const Vector q = pack({charge.r.x, charge.r.y, charge.r.z, s.axis_point.x, s.axis_point.y});
  const Vector v = pack({charge.v.x, charge.v.y, charge.v.z, s.v.x, s.v.y});
  const Vector a = numeric_euler_lagrange(sys, q, v, cfg);
  return {vec3_at(a, 0), planar_at(a, 3)};
}

// --- A-C -------------------------------------------------------------------

double ac_interaction_explicit(const MagneticDipole& dipole, const LineCharge& w, const Units& u,
                               double singular_radius) {
  const Vec3 rho = axis_offset(w.axis_point, dipole.r, singular_radius);  // r_mu - r_w in-plane
  const Vec3 r_w_minus_mu = -rho;
  return (2.0 * w.lambda / u.c) * dot(w.v - dipole.v, cross(dipole.mu, r_w_minus_mu)) / norm2(rho);
}

double ac_interaction_field(const MagneticDipole& dipole, const LineCharge& w, const Units& u,
                            double singular_radius) {
  const Vec3 e = wire_electric_field(w, dipole.r, singular_radius);
  return dot(dipole.v - w.v, cross(dipole.mu, e)) / u.c;
}

double ac_lagrangian(const MagneticDipole& dipole, const LineCharge& w, const Units& u, double length,
                     double singular_radius) {
  return 0.5 * dipole.m * norm2(dipole.v) + 0.5 * w.mass_per_length * length * norm2(w.v) +
         ac_interaction_field(dipole, w, u, singular_radius);
}

LagrangianSystem ac_system(const MagneticDipole& dipole, const LineCharge& w, const Units& u, double length) {
  LagrangianSystem sys;
  sys.labels = {"x_mu", "y_mu", "z_mu", "x_w", "y_w"};
  sys.masses = Vector::Constant(5, dipole.m);
  sys.masses.tail(2).setConstant(w.mass_per_length * length);
  sys.interaction = [mu = dipole.mu, lambda = w.lambda, u](const Vector& x, const Vector& v) {
    const MagneticDipole d{mu, 1.0, vec3_at(x, 0), vec3_at(v, 0)};
    const LineCharge wire{lambda, planar_at(x, 3), 1.0, planar_at(v, 3)};
    return ac_interaction_field(d, wire, u, 0.0);
  };
  return sys;
}

PairAccelerations ac_accelerations(const MagneticDipole& dipole, const LineCharge& w, double singular_radius) {
  axis_offset(w.axis_point, dipole.r, singular_radius);
  if (dipole.mu.x != 0.0 || dipole.mu.y != 0.0)
    throw ValidationError("ac_accelerations: closed form requires mu parallel to z; use ac_accelerations_numeric");
  return {};
}

PairAccelerations ac_accelerations_numeric(const MagneticDipole& dipole, const LineCharge& w, const Units& u,
                                           double length, const StepConfig& cfg) {
  axis_offset(w.axis_point, dipole.r, kDefaultSingularRadius);
  const LagrangianSystem sys = ac_system(dipole, w, u, length);
  const Vector q = pack({dipole.r.x, dipole.r.y, dipole.r.z, w.axis_point.x, w.axis_point.y});
  const Vector v = pack({dipole.v.x, dipole.v.y, dipole.v.z, w.v.x, w.v.y});
  const Vector a = numeric_euler_lagrange(sys, q, v, cfg);
  return {vec3_at(a, 0), planar_at(a, 3)};
}

// --- Darwin ------------------------------------------------------------------

LagrangianSystem darwin_system(const darwin::TwoBodyState& s, const Units& u) {
  LagrangianSystem sys;
  sys.labels = {"x1", "y1", "z1", "x2", "y2", "z2"};
  sys.masses = Vector::Constant(6, s.body1.m);
  sys.masses.tail(3).setConstant(s.body2.m);
  sys.interaction = [q1 = s.body1.q, q2 = s.body2.q, u](const Vector& x, const Vector& v) {
    const Vec3 d = vec3_at(x, 0) - vec3_at(x, 3);
    const double r = norm(d);
    const Vec3 rhat = d / r;
    const Vec3 v1 = vec3_at(v, 0);
    const Vec3 v2 = vec3_at(v, 3);
    return -q1 * q2 / r + (q1 * q2 / (2.0 * r * u.c * u.c)) * (dot(v1, v2) + dot(v1, rhat) * dot(v2, rhat));
  };
  return sys;
}

// --- static fields -------------------------------------------------------------

StaticElectricField wire_field(const LineCharge& w, double singular_radius) {
  return {[w, singular_radius](const Vec3& r) { return wire_electric_field(w, r, singular_radius); },
          [w, singular_radius](const Vec3& r) { return wire_electric_field_jacobian(w, r, singular_radius); }};
}

StaticElectricField point_charge_field(double q, const Vec3& r_src, double singular_radius) {
  return {[=](const Vec3& r) { return coulomb_field(q, r_src, r, singular_radius); },
          [=](const Vec3& r) {
            const Vec3 d = r - r_src;
            const double r2 = norm2(d);
            if (std::sqrt(r2) < singular_radius) throw CoincidentPointsError("point-charge field: coincident points");
            const double r3 = r2 * std::sqrt(r2);
            Mat3 j;
            for (int a = 0; a < 3; ++a)
              for (int b = 0; b < 3; ++b) j(a, b) = q * ((a == b ? 1.0 : 0.0) - 3.0 * d[a] * d[b] / r2) / r3;
            return j;
          }};
}

StaticElectricField uniform_field(const Vec3& e) {
  return {[e](const Vec3&) { return e; }, [](const Vec3&) { return Mat3{}; }};
}

// --- Hamiltonian -------------------------------------------------------------

double ac_hamiltonian(const Vec3& p, const Vec3& r, const Vec3& mu, const StaticElectricField& e, double m,
                      const Units& u) {
  return norm2(p) / (2.0 * m) - dot(p, cross(mu, e.field(r))) / (m * u.c);
}

Vec3 hamilton_velocity(const Vec3& p, const Vec3& r, const Vec3& mu, const StaticElectricField& e, double m,
                       const Units& u) {
  return (p - cross(mu, e.field(r)) / u.c) / m;
}

Vec3 hamilton_force(const Vec3& p, const Vec3& r, const Vec3& mu, const StaticElectricField& e, double m,
                    const Units& u) {
  // d/dx_i [p . (mu x E)] = (p x mu) . dE/dx_i = (J^T (p x mu))_i
  const Mat3 j = e.jacobian(r);
  return (j.transposed() * cross(p, mu)) / (m * u.c);
}

Vec3 hamilton_accelerations(const Vec3& p, const Vec3& r, const Vec3& mu, const StaticElectricField& e, double m,
                            const Units& u) {
  const Vec3 rdot = hamilton_velocity(p, r, mu, e, m, u);
  const Vec3 pdot = hamilton_force(p, r, mu, e, m, u);
  const Mat3 j = e.jacobian(r);
  return (pdot - cross(mu, j * rdot) / u.c) / m;
}

Vec3 mu_gradient_acceleration(const Vec3& v, const Vec3& r, const Vec3& mu, const StaticElectricField& e, double m,
                              const Units& u) {
  return -cross(v, e.jacobian(r) * mu) / (m * u.c);
}

Vec3 hidden_momentum_accelerations(const MagneticDipole& dipole, const StaticElectricField& e, const Units& u) {
  const Mat3 j = e.jacobian(dipole.r);
  // grad(mu . B') with mu . B' = -(1/c) (mu x v) . E
  const Vec3 grad_mu_b = -(j.transposed() * cross(dipole.mu, dipole.v)) / u.c;
  // d/dt (mu x E) for fixed mu and a static field
  const Vec3 d_hidden = cross(dipole.mu, j * dipole.v) / u.c;
  return (grad_mu_b - d_hidden) / dipole.m;
}

LegendreReport legendre_check(const MagneticDipole& dipole, const LineCharge& w, const Units& u,
                              double singular_radius) {
  if (norm(w.v) != 0.0) throw ValidationError("legendre_check: the wire must be stationary");
  const Vec3 e = wire_electric_field(w, dipole.r, singular_radius);
  const Vec3 mxe = cross(dipole.mu, e);
  const Vec3& v = dipole.v;
  const double m = dipole.m;

  LegendreReport rep;
  rep.canonical_momentum = v * m + mxe / u.c;
  const Vec3& p = rep.canonical_momentum;
  rep.lagrangian = 0.5 * m * norm2(v) + dot(v, mxe) / u.c;
  rep.h_legendre = dot(p, v) - rep.lagrangian;
  rep.h_exact = norm2(p - mxe / u.c) / (2.0 * m);
  rep.h_approx = norm2(p) / (2.0 * m) - dot(p, mxe) / (m * u.c);
  rep.dropped_term = norm2(mxe) / (2.0 * m * u.c * u.c);
  rep.legendre_residual = std::fabs(rep.h_legendre - rep.h_exact) / std::fmax(std::fabs(rep.h_exact), 1e-300);
  return rep;
}

}  // namespace darwinics::constrained
