#pragma once

// Trajectory integration with conservation ledgers, and scattering runs in
// the impulse approximation or by full integration.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "darwinics/model.hpp"
#include "darwinics/quadrature.hpp"

namespace darwinics::sim {

enum class Provider { Darwin, UnconstrainedForce, ConstrainedLagrangian, Hamiltonian, HiddenMomentum };

std::string to_string(Provider p);
Provider provider_from_string(const std::string& s);

/// Pairings the providers know: two charges, charge + dipole, charge + solenoid, dipole + wire.
enum class SystemKind { TwoCharges, MottSchwinger, AharonovBohm, AharonovCasher };

std::string to_string(SystemKind k);

using BodyData = std::variant<PointCharge, MagneticDipole, LineSolenoid, LineCharge>;

struct Body {
  std::string name;
  BodyData data;
  bool dynamic{true};
  /// Line sources only: effective mass = mass_per_length * length.
  double length{1.0};

  Vec3 position() const;
  Vec3 velocity() const;
  double mass() const;
  bool is_line_source() const;
};

struct DynamicalSystem {
  std::vector<Body> bodies;  // exactly two, ordered as in SystemKind
  Provider provider{Provider::Darwin};
  Units units;
  MomentDensity density{MomentDensity::Gaussian};
  double singular_radius{kDefaultSingularRadius};
};

/// Checks body kinds, ordering, provider compatibility and that some body is dynamic.
SystemKind validate(const DynamicalSystem& sys);

struct BodyState {
  Vec3 r;
  Vec3 v;
};

using State = std::vector<BodyState>;

State initial_state(const DynamicalSystem& sys);

/// The system with its bodies placed at `state`.
DynamicalSystem with_state(const DynamicalSystem& sys, const State& state);

/// Accelerations of every body (zero for fixed bodies and in z for line sources).
std::vector<Vec3> accelerations(const DynamicalSystem& sys, const State& state);

struct LedgerRow {
  Vec3 mechanical;   // sum of m v
  Vec3 canonical;    // sum of dL/dv of the pair Lagrangian (H provider: m v + mu x E / c)
  Vec3 field;        // interaction field momentum of the pair
  double energy{0};  // Legendre energy of the pair Lagrangian (H provider: H)
  /// A-B pair: F_solenoid . g / |g|^2 with g = -d(field)/dt; NaN otherwise.
  double force_ratio{0};
};

LedgerRow ledger_row(const DynamicalSystem& sys, const State& state);

enum class Method { Dopri5, Rk4Fixed };

struct IntegratorConfig {
  Method method{Method::Dopri5};
  double tol{1e-10};             // absolute and relative local error target
  double dt{0.0};                // Rk4Fixed step; Dopri5 initial step (0: automatic)
  int samples{0};                // >0: uniform dense-output samples instead of every accepted step
  std::size_t max_steps{5'000'000};
  double min_dt{0.0};            // steps below this raise StepSizeUnderflowError (0: 1e-12 of span)
};

struct Trajectory {
  std::vector<std::string> names;
  std::vector<double> t;
  std::vector<State> states;
  std::vector<LedgerRow> ledger;
  std::size_t steps{0};
  Provider provider{Provider::Darwin};
};

Trajectory integrate(const DynamicalSystem& sys, double t0, double t1, const IntegratorConfig& cfg = {});

/// Velocities and T-odd sources (moments, flux) reversed.
DynamicalSystem time_reversed(const DynamicalSystem& sys, const State& state);

struct LedgerReport {
  double momentum_scale{0};     // largest ledger momentum magnitude (1 when all vanish)
  double energy_scale{0};       // largest |energy| (1 when it vanishes)
  Vec3 mechanical_change;       // last - first
  double mechanical_drift{0};   // max |p_mech(t) - p_mech(t0)| / momentum_scale
  double canonical_drift{0};
  double field_drift{0};
  double energy_drift{0};       // relative to energy_scale
  /// max over interior samples of |dp_mech/dt + dp_field/dt| / max |dp_mech/dt| (central differences).
  double balance_residual{0};
  double max_force_ratio_error{0};  // max |force_ratio - 1| where defined
};

LedgerReport ledger_report(const Trajectory& traj);

enum class ScatterMode { ImpulseApprox, Full };

std::string to_string(ScatterMode m);

struct ScatterConfig {
  double cutoff_multiple{200.0};
  IntegratorConfig integrator{};
  quad::QuadConfig quad{};
};

struct BodyScatter {
  Vec3 impulse;
  Vec3 displacement;  // outgoing minus incoming asymptote at closest approach (net-impulse drift removed)
  double deflection{0};
  double impulse_error{0};
  double displacement_error{0};
};

struct ScatteringResult {
  std::vector<BodyScatter> bodies;
  ScatterMode mode{ScatterMode::ImpulseApprox};
  double b{0};
  double v{0};
};

/// Body 1 held at its pose; body 0 passes it with speed v along x at impact b along y.
/// Asymptotes are at +-cutoff_multiple * b / v, extrapolated in the cutoff.
ScatteringResult scattering_run(const DynamicalSystem& sys, double b, double v, ScatterMode mode,
                                const ScatterConfig& cfg = {});

struct SweepPoint {
  DynamicalSystem sys;
  double b{1};
  double v{1};
  ScatterMode mode{ScatterMode::ImpulseApprox};
  std::string label;
};

struct SweepRow {
  std::size_t index{0};
  SweepPoint point;
  std::optional<ScatteringResult> result;
  std::string error;  // non-empty when the point failed
};

/// Runs points on up to `workers` threads; rows come back in input order.
std::vector<SweepRow> sweep(const std::vector<SweepPoint>& points, int workers = 1,
                            const ScatterConfig& cfg = {});

}  // namespace darwinics::sim
