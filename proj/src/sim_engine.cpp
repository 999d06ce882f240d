#include "darwinics/sim_engine.hpp"

#include <algorithm>
#include <atomic>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "darwinics/constrained_dynamics.hpp"
#include "darwinics/darwin_two_body.hpp"
#include "darwinics/unconstrained_forces.hpp"

namespace darwinics::sim {

namespace odeint = boost::numeric::odeint;
using Buffer = std::vector<double>;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class T>
const T& as(const Body& b) {
  return std::get<T>(b.data);
}

template <class T>
bool is(const Body& b) {
  return std::holds_alternative<T>(b.data);
}

std::string body_kind(const Body& b) {
  if (is<PointCharge>(b)) return "charge";
  if (is<MagneticDipole>(b)) return "dipole";
  if (is<LineSolenoid>(b)) return "solenoid";
  return "wire";
}

SystemKind kind_of(const DynamicalSystem& sys) {
  if (sys.bodies.size() != 2)
    throw ValidationError("system: expected exactly two bodies, got " + std::to_string(sys.bodies.size()));
  const Body& a = sys.bodies[0];
  const Body& b = sys.bodies[1];
  if (is<PointCharge>(a) && is<PointCharge>(b)) return SystemKind::TwoCharges;
  if (is<PointCharge>(a) && is<MagneticDipole>(b)) return SystemKind::MottSchwinger;
  if (is<PointCharge>(a) && is<LineSolenoid>(b)) return SystemKind::AharonovBohm;
  if (is<MagneticDipole>(a) && is<LineCharge>(b)) return SystemKind::AharonovCasher;
  throw ValidationError("system: unsupported body pairing (" + body_kind(a) + ", " + body_kind(b) +
                        "); expected charge+charge, charge+dipole, charge+solenoid or dipole+wire");
}

// Line sources keep their position in axis_point.
struct Kin {
  Vec3* r;
  Vec3* v;
};
Kin kin(BodyData& d) {
  return std::visit(
      [](auto& x) -> Kin {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, LineSolenoid> || std::is_same_v<T, LineCharge>) return {&x.axis_point, &x.v};
        else return {&x.r, &x.v};
      },
      d);
}

}  // namespace

std::string to_string(Provider p) {
  switch (p) {
    case Provider::Darwin: return "darwin";
    case Provider::UnconstrainedForce: return "unconstrained-force";
    case Provider::ConstrainedLagrangian: return "constrained-lagrangian";
    case Provider::Hamiltonian: return "hamiltonian";
    case Provider::HiddenMomentum: return "hidden-momentum";
  }
  return "?";
}

Provider provider_from_string(const std::string& s) {
  for (Provider p : {Provider::Darwin, Provider::UnconstrainedForce, Provider::ConstrainedLagrangian,
                     Provider::Hamiltonian, Provider::HiddenMomentum})
    if (to_string(p) == s) return p;
  throw ValidationError("unknown provider '" + s + "'");
}

std::string to_string(SystemKind k) {
  switch (k) {
    case SystemKind::TwoCharges: return "two-charges";
    case SystemKind::MottSchwinger: return "mott-schwinger";
    case SystemKind::AharonovBohm: return "aharonov-bohm";
    case SystemKind::AharonovCasher: return "aharonov-casher";
  }
  return "?";
}

std::string to_string(ScatterMode m) { return m == ScatterMode::Full ? "full" : "impulse-approx"; }

Vec3 Body::position() const {
  return std::visit(
      [](const auto& x) -> Vec3 {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, LineSolenoid> || std::is_same_v<T, LineCharge>) return transverse(x.axis_point);
        else return x.r;
      },
      data);
}

Vec3 Body::velocity() const {
  return std::visit([](const auto& x) { return x.v; }, data);
}

double Body::mass() const {
  return std::visit(
      [this](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, LineSolenoid> || std::is_same_v<T, LineCharge>)
          return x.mass_per_length * length;
        else return x.m;
      },
      data);
}

bool Body::is_line_source() const { return is<LineSolenoid>(*this) || is<LineCharge>(*this); }

SystemKind validate(const DynamicalSystem& sys) {
  validate(sys.units);
  const SystemKind kind = kind_of(sys);
  bool any_dynamic = false;
  for (const auto& b : sys.bodies) {
    std::visit(
        [&](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, PointCharge> || std::is_same_v<T, MagneticDipole>) validate(d, sys.units);
          else validate(d);
        },
        b.data);
    if (b.is_line_source() && !(std::isfinite(b.length) && b.length > 0.0))
      throw ValidationError("body '" + b.name + "': length must be positive");
    if (!(b.mass() > 0.0)) throw ValidationError("body '" + b.name + "': mass must be positive");
    any_dynamic = any_dynamic || b.dynamic;
  }
  if (!any_dynamic) throw ValidationError("system: at least one body must be dynamic");

  const auto reject = [&](const std::string& why) {
    throw ValidationError("provider " + to_string(sys.provider) + " is not available for " + to_string(kind) + ": " +
                          why);
  };
  switch (sys.provider) {
    case Provider::Darwin:
      if (kind != SystemKind::TwoCharges) reject("needs two point charges");
      break;
    case Provider::UnconstrainedForce:
      if (kind == SystemKind::TwoCharges) reject("use the darwin provider");
      break;
    case Provider::ConstrainedLagrangian:
      break;
    case Provider::Hamiltonian:
    case Provider::HiddenMomentum:
      if (kind != SystemKind::AharonovCasher) reject("needs a dipole and a line charge");
      if (sys.bodies[1].dynamic || norm(sys.bodies[1].velocity()) != 0.0) reject("the line charge must be fixed");
      break;
  }
  if (kind == SystemKind::TwoCharges && !(sys.bodies[0].dynamic && sys.bodies[1].dynamic))
    reject("both charges must be dynamic");
  return kind;
}

State initial_state(const DynamicalSystem& sys) {
  State s;
  for (const auto& b : sys.bodies) s.push_back({b.position(), b.velocity()});
  return s;
}

DynamicalSystem with_state(const DynamicalSystem& sys, const State& state) {
  DynamicalSystem out = sys;
  for (std::size_t i = 0; i < out.bodies.size(); ++i) {
    Kin k = kin(out.bodies[i].data);
    *k.r = state[i].r;
    *k.v = state[i].v;
    if (out.bodies[i].is_line_source()) {
      k.r->z = 0.0;
      k.v->z = 0.0;
    }
  }
  return out;
}

namespace {

// Accelerations from the provider, ignoring the fixed flags.
std::vector<Vec3> raw_accelerations(const DynamicalSystem& s, SystemKind kind) {
  const auto& u = s.units;
  const double sr = s.singular_radius;
  const Body& b0 = s.bodies[0];
  const Body& b1 = s.bodies[1];
  switch (kind) {
    case SystemKind::TwoCharges: {
      const auto a = darwin::darwin_accelerations({as<PointCharge>(b0), as<PointCharge>(b1)}, u, sr);
      return {a.a1, a.a2};
    }
    case SystemKind::MottSchwinger: {
      const auto& q = as<PointCharge>(b0);
      const auto& d = as<MagneticDipole>(b1);
      if (s.provider == Provider::UnconstrainedForce)
        return {unconstrained::force_on_charge_from_loop(q, d, u, sr) / q.m,
                unconstrained::force_on_loop_from_charge(q, d, u, sr) / d.m};
      const auto a = constrained::ms_accelerations(q, d, u, sr);
      return {a.a_q, a.a_mu};
    }
    case SystemKind::AharonovBohm: {
      const auto& q = as<PointCharge>(b0);
      const auto& sol = as<LineSolenoid>(b1);
      if (s.provider == Provider::UnconstrainedForce)
        return {unconstrained::ab_force_on_charge(q, sol, sr) / q.m,
                unconstrained::ab_force_on_solenoid(q, sol, u, s.density, sr) / b1.mass()};
      const auto a = constrained::ab_accelerations(q, sol, sr);
      return {a.first, a.second};
    }
    case SystemKind::AharonovCasher: {
      const auto& d = as<MagneticDipole>(b0);
      const auto& w = as<LineCharge>(b1);
      switch (s.provider) {
        case Provider::UnconstrainedForce:
          return {unconstrained::ac_force_on_loop(d, w, u, sr) / d.m,
                  unconstrained::ac_force_on_wire(d, w, sr) / b1.mass()};
        case Provider::Hamiltonian: {
          const auto e = constrained::wire_field(w, sr);
          const Vec3 p = d.v * d.m + cross(d.mu, e.field(d.r)) / u.c;
          return {constrained::hamilton_accelerations(p, d.r, d.mu, e, d.m, u), Vec3{}};
        }
        case Provider::HiddenMomentum:
          return {constrained::hidden_momentum_accelerations(d, constrained::wire_field(w, sr), u), Vec3{}};
        default: {
          const auto a = constrained::ac_accelerations(d, w, sr);
          return {a.first, a.second};
        }
      }
    }
  }
  return {};
}

std::vector<Vec3> masked(const DynamicalSystem& s, std::vector<Vec3> a) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!s.bodies[i].dynamic) a[i] = Vec3{};
    if (s.bodies[i].is_line_source()) a[i].z = 0.0;
  }
  return a;
}

constrained::LagrangianSystem pair_lagrangian(const DynamicalSystem& s, SystemKind kind, constrained::Vector& q,
                                              constrained::Vector& v) {
  const Body& b0 = s.bodies[0];
  const Body& b1 = s.bodies[1];
  const auto fill = [&](int n1) {
    q.resize(3 + n1);
    v.resize(3 + n1);
    const Vec3 r0 = b0.position(), v0 = b0.velocity(), r1 = b1.position(), v1 = b1.velocity();
    for (int i = 0; i < 3; ++i) {
      q[i] = r0[i];
      v[i] = v0[i];
    }
    for (int i = 0; i < n1; ++i) {
      q[3 + i] = r1[i];
      v[3 + i] = v1[i];
    }
  };
  switch (kind) {
    case SystemKind::TwoCharges:
      fill(3);
      return constrained::darwin_system({as<PointCharge>(b0), as<PointCharge>(b1)}, s.units);
    case SystemKind::MottSchwinger:
      fill(3);
      return constrained::ms_system(as<PointCharge>(b0), as<MagneticDipole>(b1), s.units);
    case SystemKind::AharonovBohm:
      fill(2);
      return constrained::ab_system(as<PointCharge>(b0), as<LineSolenoid>(b1), s.units, b1.length);
    case SystemKind::AharonovCasher:
      fill(2);
      return constrained::ac_system(as<MagneticDipole>(b0), as<LineCharge>(b1), s.units, b1.length);
  }
  throw ValidationError("unreachable");
}

// dL/dv by central differences; exact up to roundoff since L is at most quadratic in v.
constrained::Vector velocity_gradient(const constrained::LagrangianSystem& L, const constrained::Vector& q,
                                      const constrained::Vector& v) {
  const double h = std::max(v.cwiseAbs().maxCoeff(), 1e-3);
  constrained::Vector g(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    constrained::Vector vp = v, vm = v;
    vp[i] += h;
    vm[i] -= h;
    g[i] = (L(q, vp) - L(q, vm)) / (2.0 * h);
  }
  return g;
}

Vec3 gather(const constrained::Vector& x) {
  // Dof layout: 3 Cartesian components of body 0, then 3 (or 2 in-plane) of body 1.
  Vec3 out{x[0], x[1], x[2]};
  for (Eigen::Index i = 3; i < x.size(); ++i) out[static_cast<int>(i - 3)] += x[i];
  return out;
}

}  // namespace

std::vector<Vec3> accelerations(const DynamicalSystem& sys, const State& state) {
  const SystemKind kind = kind_of(sys);
  const DynamicalSystem s = with_state(sys, state);
  return masked(s, raw_accelerations(s, kind));
}

LedgerRow ledger_row(const DynamicalSystem& sys, const State& state) {
  const SystemKind kind = kind_of(sys);
  const DynamicalSystem s = with_state(sys, state);
  const auto& u = s.units;
  const double sr = s.singular_radius;
  LedgerRow row;
  for (const auto& b : s.bodies) row.mechanical += b.velocity() * b.mass();
  row.force_ratio = kNaN;

  if (kind == SystemKind::TwoCharges) {
    const darwin::TwoBodyState tb{as<PointCharge>(s.bodies[0]), as<PointCharge>(s.bodies[1])};
    const auto [p1, p2] = darwin::canonical_momenta(tb, u, sr);
    row.canonical = p1 + p2;
    row.field = darwin::interaction_field_momentum(tb, u, sr);
    row.energy = darwin::darwin_energy(tb, u, sr);
    return row;
  }

  constrained::Vector q, v;
  const auto L = pair_lagrangian(s, kind, q, v);
  const constrained::Vector p = velocity_gradient(L, q, v);
  row.canonical = gather(p);
  row.energy = p.dot(v) - L(q, v);

  switch (kind) {
    case SystemKind::MottSchwinger: {
      const auto& c = as<PointCharge>(s.bodies[0]);
      const auto& d = as<MagneticDipole>(s.bodies[1]);
      row.field = dipole_vector_potential(d.mu, d.r, c.r, sr) * (c.q / u.c);
      break;
    }
    case SystemKind::AharonovBohm: {
      const auto& c = as<PointCharge>(s.bodies[0]);
      const auto& sol = as<LineSolenoid>(s.bodies[1]);
      row.field = solenoid_vector_potential(sol, c.r, sr) * (c.q / u.c);
      // -d(field)/dt = -(q/c) ((v_q - v_s) . grad) A_s, with A_s = (Phi/2pi) z x rho / rho^2.
      const Vec3 rho = axis_offset(sol.axis_point, c.r, sr);
      const Vec3 w = transverse(c.v - sol.v);
      const double r2 = norm2(rho);
      const Vec3 da = cross(Vec3::unit_z(), w / r2 - rho * (2.0 * dot(w, rho) / (r2 * r2))) * (sol.flux / (2.0 * kPi));
      const Vec3 g = -da * (c.q / u.c);
      const Vec3 f = unconstrained::ab_force_on_solenoid(c, sol, u, s.density, sr);
      if (norm2(g) > 0.0) row.force_ratio = dot(f, g) / norm2(g);
      break;
    }
    case SystemKind::AharonovCasher: {
      const auto& d = as<MagneticDipole>(s.bodies[0]);
      const auto& w = as<LineCharge>(s.bodies[1]);
      const Vec3 e = wire_electric_field(w, d.r, sr);
      row.field = cross(e, d.mu) / u.c;
      if (s.provider == Provider::Hamiltonian) {
        const auto ef = constrained::wire_field(w, sr);
        const Vec3 pc = d.v * d.m + cross(d.mu, e) / u.c;
        row.canonical = pc + w.v * s.bodies[1].mass();
        row.energy = constrained::ac_hamiltonian(pc, d.r, d.mu, ef, d.m, u);
      }
      break;
    }
    default:
      break;
  }
  return row;
}

DynamicalSystem time_reversed(const DynamicalSystem& sys, const State& state) {
  DynamicalSystem out = with_state(sys, state);
  for (auto& b : out.bodies) {
    std::visit(
        [](auto& d) {
          using T = std::decay_t<decltype(d)>;
          d.v = -d.v;
          if constexpr (std::is_same_v<T, MagneticDipole>) d.mu = -d.mu;
          if constexpr (std::is_same_v<T, LineSolenoid>) d.flux = -d.flux;
        },
        b.data);
  }
  return out;
}

namespace {

State unpack(const Buffer& x, std::size_t n) {
  State s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i].r = {x[6 * i], x[6 * i + 1], x[6 * i + 2]};
    s[i].v = {x[6 * i + 3], x[6 * i + 4], x[6 * i + 5]};
  }
  return s;
}

Buffer pack(const State& s) {
  Buffer x(6 * s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      x[6 * i + k] = s[i].r[k];
      x[6 * i + 3 + k] = s[i].v[k];
    }
  }
  return x;
}

std::string describe(const State& s) {
  std::ostringstream o;
  o.precision(10);
  for (std::size_t i = 0; i < s.size(); ++i)
    o << (i ? "; " : "") << "body" << i << " r=(" << s[i].r.x << "," << s[i].r.y << "," << s[i].r.z << ") v=("
      << s[i].v.x << "," << s[i].v.y << "," << s[i].v.z << ")";
  return o.str();
}

using Rhs = std::function<void(const Buffer&, Buffer&, double)>;
using Observer = std::function<void(const Buffer&, double)>;

// Integrates x' = f over [t0, t1], calling `observe` at each recorded time. Returns the step count.
std::size_t drive(const Rhs& f, Buffer x, double t0, double t1, const IntegratorConfig& cfg, const Observer& observe,
                  const std::function<std::string(const Buffer&)>& diag) {
  if (!(cfg.tol > 0.0)) throw ValidationError("integrator: tol must be positive");
  if (!(t1 > t0)) throw ValidationError("integrator: t1 must exceed t0");
  const double span = t1 - t0;
  const double min_dt = cfg.min_dt > 0.0 ? cfg.min_dt : 1e-12 * span;
  std::size_t steps = 0;

  if (cfg.method == Method::Rk4Fixed) {
    if (!(cfg.dt > 0.0)) throw ValidationError("integrator: rk4 needs dt > 0");
    const auto n = static_cast<std::size_t>(std::ceil(span / cfg.dt - 1e-9));
    const double dt = span / static_cast<double>(n);
    const std::size_t every = cfg.samples > 0 ? std::max<std::size_t>(1, n / static_cast<std::size_t>(cfg.samples)) : 1;
    odeint::runge_kutta4<Buffer> rk;
    observe(x, t0);
    for (std::size_t i = 1; i <= n; ++i) {
      rk.do_step(f, x, t0 + static_cast<double>(i - 1) * dt, dt);
      ++steps;
      if (i % every == 0 || i == n) observe(x, i == n ? t1 : t0 + static_cast<double>(i) * dt);
    }
    return steps;
  }

  auto stepper = odeint::make_dense_output(cfg.tol, cfg.tol, odeint::runge_kutta_dopri5<Buffer>());
  stepper.initialize(x, t0, cfg.dt > 0.0 ? cfg.dt : 1e-4 * span);
  Buffer tmp(x.size());
  std::vector<double> sample_times;
  if (cfg.samples > 0)
    for (int k = 0; k <= cfg.samples; ++k) sample_times.push_back(t0 + span * k / cfg.samples);
  std::size_t next = 0;
  if (sample_times.empty()) observe(x, t0);

  try {
    while (stepper.current_time() < t1) {
      const auto [ta, tb] = stepper.do_step(f);
      ++steps;
      if (steps > cfg.max_steps)
        throw StepSizeUnderflowError("integrator: exceeded " + std::to_string(cfg.max_steps) + " steps at t=" +
                                     std::to_string(tb) + " state " + diag(stepper.current_state()));
      if (tb - ta < min_dt && tb < t1)
        throw StepSizeUnderflowError("integrator: step " + std::to_string(tb - ta) + " below minimum at t=" +
                                     std::to_string(tb) + " state " + diag(stepper.current_state()));
      if (!sample_times.empty()) {
        while (next < sample_times.size() && sample_times[next] <= std::min(tb, t1)) {
          stepper.calc_state(sample_times[next], tmp);
          observe(tmp, sample_times[next]);
          ++next;
        }
      } else if (tb < t1) {
        observe(stepper.current_state(), tb);
      }
    }
  } catch (const odeint::step_adjustment_error& e) {
    throw StepSizeUnderflowError(std::string("integrator: ") + e.what() + " state " + diag(stepper.current_state()));
  }
  if (sample_times.empty()) {
    stepper.calc_state(t1, tmp);
    observe(tmp, t1);
  }
  return steps;
}

}  // namespace

Trajectory integrate(const DynamicalSystem& sys, double t0, double t1, const IntegratorConfig& cfg) {
  validate(sys);
  const std::size_t n = sys.bodies.size();
  Trajectory traj;
  traj.provider = sys.provider;
  for (const auto& b : sys.bodies) traj.names.push_back(b.name);

  const Rhs f = [&](const Buffer& x, Buffer& dx, double) {
    const State s = unpack(x, n);
    const auto a = accelerations(sys, s);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 v = sys.bodies[i].dynamic ? s[i].v : sys.bodies[i].velocity();
      for (int k = 0; k < 3; ++k) {
        dx[6 * i + k] = v[k];
        dx[6 * i + 3 + k] = a[i][k];
      }
    }
  };
  const Observer obs = [&](const Buffer& x, double t) {
    const State s = unpack(x, n);
    if (!traj.t.empty() && t <= traj.t.back()) return;
    traj.t.push_back(t);
    traj.states.push_back(s);
    traj.ledger.push_back(ledger_row(sys, s));
  };
  traj.steps = drive(f, pack(initial_state(sys)), t0, t1, cfg, obs,
                     [n](const Buffer& x) { return describe(unpack(x, n)); });
  return traj;
}

LedgerReport ledger_report(const Trajectory& traj) {
  if (traj.t.empty()) throw ValidationError("ledger_report: empty trajectory");
  LedgerReport r;
  const auto& l0 = traj.ledger.front();
  double pscale = 0.0, escale = std::fabs(l0.energy);
  for (const auto& row : traj.ledger) {
    pscale = std::max({pscale, norm(row.mechanical), norm(row.canonical), norm(row.field)});
    escale = std::max(escale, std::fabs(row.energy));
  }
  r.momentum_scale = pscale > 0.0 ? pscale : 1.0;
  r.energy_scale = escale > 0.0 ? escale : 1.0;
  r.mechanical_change = traj.ledger.back().mechanical - l0.mechanical;
  for (const auto& row : traj.ledger) {
    r.mechanical_drift = std::max(r.mechanical_drift, norm(row.mechanical - l0.mechanical) / r.momentum_scale);
    r.canonical_drift = std::max(r.canonical_drift, norm(row.canonical - l0.canonical) / r.momentum_scale);
    r.field_drift = std::max(r.field_drift, norm(row.field - l0.field) / r.momentum_scale);
    r.energy_drift = std::max(r.energy_drift, std::fabs(row.energy - l0.energy) / r.energy_scale);
    if (std::isfinite(row.force_ratio))
      r.max_force_ratio_error = std::max(r.max_force_ratio_error, std::fabs(row.force_ratio - 1.0));
  }
  double max_rate = 0.0, max_res = 0.0;
  for (std::size_t i = 1; i + 1 < traj.t.size(); ++i) {
    const double dt = traj.t[i + 1] - traj.t[i - 1];
    const Vec3 dm = (traj.ledger[i + 1].mechanical - traj.ledger[i - 1].mechanical) / dt;
    const Vec3 df = (traj.ledger[i + 1].field - traj.ledger[i - 1].field) / dt;
    max_rate = std::max(max_rate, norm(dm));
    max_res = std::max(max_res, norm(dm + df));
  }
  r.balance_residual = max_rate > 0.0 ? max_res / max_rate : 0.0;
  return r;
}

namespace {

double deflection(const Vec3& p_in, const Vec3& impulse) {
  if (norm(p_in) == 0.0) return 0.0;
  const Vec3 p_out = p_in + impulse;
  return std::atan2(norm(cross(p_in, p_out)), dot(p_in, p_out));
}

DynamicalSystem scatter_setup(const DynamicalSystem& sys, double b, double v, double t_start, State& s0) {
  s0 = initial_state(sys);
  const Vec3 target = s0[1].r;
  s0[1].v = Vec3{};
  s0[0].r = target + Vec3{v * t_start, b, 0.0};
  s0[0].v = Vec3{v, 0.0, 0.0};
  return with_state(sys, s0);
}

ScatteringResult impulse_mode(const DynamicalSystem& sys, SystemKind kind, double b, double v,
                              const ScatterConfig& cfg) {
  State s0;
  const DynamicalSystem base = scatter_setup(sys, b, v, 0.0, s0);
  const Vec3 target = s0[1].r;
  unconstrained::StraightPath path{s0[0].r, s0[0].v};
  unconstrained::PathIntegralConfig pcfg{cfg.quad, cfg.cutoff_multiple};

  ScatteringResult out;
  out.mode = ScatterMode::ImpulseApprox;
  out.b = b;
  out.v = v;
  for (std::size_t k = 0; k < 2; ++k) {
    unconstrained::ForceField f;
    f.system = to_string(kind);
    f.anchor = target;
    f.axis_anchor = base.bodies[1].is_line_source();
    const double m = base.bodies[k].mass();
    f.eval = [&base, kind, target, k, m](const Vec3& r, const Vec3& vel, double) {
      DynamicalSystem s = with_state(base, State{{r, vel}, {target, Vec3{}}});
      return raw_accelerations(s, kind)[k] * m;
    };
    BodyScatter bs;
    const auto imp = unconstrained::straight_path_impulse(f, path, pcfg);
    const auto disp = unconstrained::straight_path_offset(f, path, m, pcfg);
    bs.impulse = imp.value;
    bs.impulse_error = imp.error;
    bs.displacement = disp.value;
    bs.displacement_error = disp.error;
    bs.deflection = deflection(s0[k].v * m, bs.impulse);
    out.bodies.push_back(bs);
  }
  return out;
}

struct FullRun {
  std::vector<Vec3> impulse;
  std::vector<Vec3> displacement;
};

FullRun full_run(const DynamicalSystem& sys, SystemKind kind, double b, double v, double T,
                 const IntegratorConfig& icfg) {
  State s0;
  const DynamicalSystem base = scatter_setup(sys, b, v, -T, s0);
  const std::size_t n = 2;
  // State plus per-body impulse accumulators.
  const Rhs f = [&](const Buffer& x, Buffer& dx, double) {
    const State s = unpack(x, n);
    const DynamicalSystem cur = with_state(base, s);
    const auto raw = raw_accelerations(cur, kind);
    const auto a = masked(cur, raw);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 vel = base.bodies[i].dynamic ? s[i].v : Vec3{};
      Vec3 force = raw[i] * base.bodies[i].mass();
      if (base.bodies[i].is_line_source()) force.z = 0.0;
      for (int k = 0; k < 3; ++k) {
        dx[6 * i + k] = vel[k];
        dx[6 * i + 3 + k] = a[i][k];
        dx[6 * n + 3 * i + k] = force[k];
      }
    }
  };
  Buffer x0 = pack(s0);
  x0.resize(6 * n + 3 * n, 0.0);
  Buffer last;
  IntegratorConfig c = icfg;
  c.samples = 1;
  drive(f, x0, -T, T, c, [&](const Buffer& x, double) { last = x; },
        [n](const Buffer& x) { return describe(unpack(x, n)); });
  FullRun out;
  const State sf = unpack(last, n);
  for (std::size_t i = 0; i < n; ++i) {
    out.impulse.push_back({last[6 * n + 3 * i], last[6 * n + 3 * i + 1], last[6 * n + 3 * i + 2]});
    // Offset of the outgoing asymptote from the incoming one at t = 0.
    out.displacement.push_back(sf[i].r - s0[i].r - (s0[i].v + sf[i].v) * T);
  }
  return out;
}

}  // namespace

ScatteringResult scattering_run(const DynamicalSystem& sys, double b, double v, ScatterMode mode,
                                const ScatterConfig& cfg) {
  const SystemKind kind = validate(sys);
  if (!(std::isfinite(b) && b > 0.0)) throw ValidationError("scattering: impact parameter must be positive");
  if (!(std::isfinite(v) && v > 0.0)) throw ValidationError("scattering: speed must be positive");
  if (!(cfg.cutoff_multiple >= 20.0)) throw ValidationError("scattering: cutoff multiple must be at least 20");
  if (sys.provider == Provider::Hamiltonian || sys.provider == Provider::HiddenMomentum) {
    if (sys.bodies[1].dynamic) throw ValidationError("scattering: the line charge must be fixed");
  }
  if (mode == ScatterMode::ImpulseApprox) return impulse_mode(sys, kind, b, v, cfg);

  const double T = cfg.cutoff_multiple * b / v;
  const FullRun r1 = full_run(sys, kind, b, v, T, cfg.integrator);
  const FullRun r2 = full_run(sys, kind, b, v, 2.0 * T, cfg.integrator);
  ScatteringResult out;
  out.mode = ScatterMode::Full;
  out.b = b;
  out.v = v;
  for (std::size_t i = 0; i < 2; ++i) {
    BodyScatter bs;
    bs.impulse = r2.impulse[i] * 2.0 - r1.impulse[i];
    bs.impulse_error = norm(r2.impulse[i] - r1.impulse[i]);
    bs.displacement = r2.displacement[i] * 2.0 - r1.displacement[i];
    bs.displacement_error = norm(r2.displacement[i] - r1.displacement[i]);
    const Vec3 p_in = i == 0 ? Vec3{v, 0.0, 0.0} * sys.bodies[0].mass() : Vec3{};
    bs.deflection = deflection(p_in, bs.impulse);
    out.bodies.push_back(bs);
  }
  return out;
}

std::vector<SweepRow> sweep(const std::vector<SweepPoint>& points, int workers, const ScatterConfig& cfg) {
  if (points.empty()) throw ValidationError("sweep: empty grid");
  if (workers < 1) throw ValidationError("sweep: workers must be at least 1");
  std::vector<SweepRow> rows(points.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      rows[i].index = i;
      rows[i].point = points[i];
      try {
        rows[i].result = scattering_run(points[i].sys, points[i].b, points[i].v, points[i].mode, cfg);
      } catch (const std::exception& e) {
        rows[i].error = e.what();
      }
    }
  };
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(workers), points.size());
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < n; ++k) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return rows;
}

}  // namespace darwinics::sim
