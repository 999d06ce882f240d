#pragma once

// Constrained description: extended bodies move rigidly, so their equations
// of motion follow from the Euler-Lagrange equations of the integrated
// Lagrangian in the body coordinates. Also the single-particle Hamiltonian and
// hidden-momentum treatments of the dipole next to a line charge.

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "darwinics/darwin_two_body.hpp"
#include "darwinics/model.hpp"

namespace darwinics::constrained {

using Vector = Eigen::VectorXd;

/// L(q, v) = sum_i m_i v_i^2 / 2 + interaction(q, v). Only the interaction is
/// differentiated numerically; the kinetic part is exact.
struct LagrangianSystem {
  std::vector<std::string> labels;
  Vector masses;
  std::function<double(const Vector& q, const Vector& v)> interaction;

  double operator()(const Vector& q, const Vector& v) const;
  Eigen::Index dof() const { return masses.size(); }
};

struct StepConfig {
  double position_scale{1.0};
  double velocity_scale{1.0};
  double rel_step{1e-5};
  /// Richardson estimates must agree to this fraction of the force scale.
  double agreement_tol{1e-6};
};

/// Solves (diag(m) + d2L/dv2) a = dL/dq - d2L/dv dq . v with central
/// differences, Richardson-extrapolated once.
Vector numeric_euler_lagrange(const LagrangianSystem& sys, const Vector& q, const Vector& v,
                              const StepConfig& cfg = {});

// --- Mott-Schwinger -------------------------------------------------------

/// Interaction from coupling the charge's fields to the loop's magnetic and
/// motional electric dipoles: mu . B_q + d . E_q with d = v_mu x mu / c.
double ms_interaction_field_route(const PointCharge& charge, const MagneticDipole& dipole, const Units& u,
                                  double singular_radius = kDefaultSingularRadius);

/// Interaction from coupling the loop's potentials to the charge: (q/c) v_q . A_mu - q phi_mu.
double ms_interaction_potential_route(const PointCharge& charge, const MagneticDipole& dipole, const Units& u,
                                      double singular_radius = kDefaultSingularRadius);

double ms_lagrangian(const PointCharge& charge, const MagneticDipole& dipole, const Units& u,
                     double singular_radius = kDefaultSingularRadius);

struct MsAccelerations {
  Vec3 a_q;
  Vec3 a_mu;
};

/// m_mu a_mu = (q/c) (v_mu - v_q) x B_dip(r_mu - r_q) and m_q a_q = -m_mu a_mu.
MsAccelerations ms_accelerations(const PointCharge& charge, const MagneticDipole& dipole, const Units& u,
                                 double singular_radius = kDefaultSingularRadius);

/// Coordinates (x_q, y_q, z_q, x_mu, y_mu, z_mu).
LagrangianSystem ms_system(const PointCharge& charge, const MagneticDipole& dipole, const Units& u);

// --- A-B -------------------------------------------------------------------

/// (q/c) (v_q - v_s) . A_s(r_q).
double ab_interaction(const PointCharge& charge, const LineSolenoid& s, const Units& u,
                      double singular_radius = kDefaultSingularRadius);

/// `length` converts the solenoid's mass per length into a rigid-body mass.
double ab_lagrangian(const PointCharge& charge, const LineSolenoid& s, const Units& u, double length = 1.0,
                     double singular_radius = kDefaultSingularRadius);

/// Coordinates (x_q, y_q, z_q, x_s, y_s).
LagrangianSystem ab_system(const PointCharge& charge, const LineSolenoid& s, const Units& u, double length = 1.0);

struct PairAccelerations {
  Vec3 first;
  Vec3 second;
};

/// Closed form: the interaction is locally a total time derivative, so both
/// accelerations vanish. Throws OnAxisError for an on-axis charge.
PairAccelerations ab_accelerations(const PointCharge& charge, const LineSolenoid& s,
                                   double singular_radius = kDefaultSingularRadius);

PairAccelerations ab_accelerations_numeric(const PointCharge& charge, const LineSolenoid& s, const Units& u,
                                           double length = 1.0, const StepConfig& cfg = {});

// --- A-C -------------------------------------------------------------------

/// Explicit form (2 lambda / c) (v_w - v_mu) . [mu x (r_w - r_mu)] / rho^2.
double ac_interaction_explicit(const MagneticDipole& dipole, const LineCharge& w, const Units& u,
                               double singular_radius = kDefaultSingularRadius);

/// Field form (1/c) (v_mu - v_w) . (mu x E_w(r_mu)).
double ac_interaction_field(const MagneticDipole& dipole, const LineCharge& w, const Units& u,
                            double singular_radius = kDefaultSingularRadius);

double ac_lagrangian(const MagneticDipole& dipole, const LineCharge& w, const Units& u, double length = 1.0,
                     double singular_radius = kDefaultSingularRadius);

/// Coordinates (x_mu, y_mu, z_mu, x_w, y_w).
LagrangianSystem ac_system(const MagneticDipole& dipole, const LineCharge& w, const Units& u, double length = 1.0);

/// Zero for mu || z (E_w does not vary along the moment). Other orientations
/// are out of scope for the closed form and raise ValidationError.
PairAccelerations ac_accelerations(const MagneticDipole& dipole, const LineCharge& w,
                                   double singular_radius = kDefaultSingularRadius);

PairAccelerations ac_accelerations_numeric(const MagneticDipole& dipole, const LineCharge& w, const Units& u,
                                           double length = 1.0, const StepConfig& cfg = {});

// --- Darwin cross-check ------------------------------------------------------

/// Coordinates (r1, r2).
LagrangianSystem darwin_system(const darwin::TwoBodyState& s, const Units& u);

// --- static electric fields for the Hamiltonian / hidden-momentum treatments --

/// A static, curl-free electric field with its Jacobian J_ij = dE_i/dx_j.
struct StaticElectricField {
  std::function<Vec3(const Vec3&)> field;
  std::function<Mat3(const Vec3&)> jacobian;
};

StaticElectricField wire_field(const LineCharge& w, double singular_radius = kDefaultSingularRadius);
StaticElectricField point_charge_field(double q, const Vec3& r_src, double singular_radius = kDefaultSingularRadius);
StaticElectricField uniform_field(const Vec3& e);

/// H = p^2/2m - (1/mc) p . (mu x E(r)).
double ac_hamiltonian(const Vec3& p, const Vec3& r, const Vec3& mu, const StaticElectricField& e, double m,
                      const Units& u);

/// r_dot = dH/dp for the Hamiltonian above.
Vec3 hamilton_velocity(const Vec3& p, const Vec3& r, const Vec3& mu, const StaticElectricField& e, double m,
                       const Units& u);

/// p_dot = -dH/dr for the Hamiltonian above.
Vec3 hamilton_force(const Vec3& p, const Vec3& r, const Vec3& mu, const StaticElectricField& e, double m,
                    const Units& u);

/// r_ddot along the Hamilton flow: (p_dot - (1/c)(r_dot . grad)(mu x E)) / m.
Vec3 hamilton_accelerations(const Vec3& p, const Vec3& r, const Vec3& mu, const StaticElectricField& e, double m,
                            const Units& u);

/// Closed form -(1/(m c)) (mu . grad)(v x E) = -(1/(m c)) v x (J mu).
Vec3 mu_gradient_acceleration(const Vec3& v, const Vec3& r, const Vec3& mu, const StaticElectricField& e, double m,
                              const Units& u);

/// m a = grad(mu . B') - (1/c) d/dt (mu x E) with B' = -(v x E)/c, assembled
/// term by term from the field Jacobian.
Vec3 hidden_momentum_accelerations(const MagneticDipole& dipole, const StaticElectricField& e, const Units& u);

struct LegendreReport {
  Vec3 canonical_momentum;       // m v + mu x E / c
  double lagrangian{0.0};        // m v^2/2 + (1/c) v . (mu x E)
  double h_legendre{0.0};        // p . v - L
  double h_exact{0.0};           // (p - mu x E / c)^2 / 2m
  double h_approx{0.0};          // p^2/2m - (1/mc) p . (mu x E)
  double dropped_term{0.0};      // |mu x E|^2 / (2 m c^2)
  double legendre_residual{0.0}; // |h_legendre - h_exact| / max(|h_exact|, tiny)
};

/// Stationary wire. `dipole.v` is the velocity.
LegendreReport legendre_check(const MagneticDipole& dipole, const LineCharge& w, const Units& u,
                              double singular_radius = kDefaultSingularRadius);

}  // namespace darwinics::constrained
