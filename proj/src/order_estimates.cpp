#include "darwinics/order_estimates.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

#include "darwinics/errors.hpp"

namespace darwinics::estimates {

using namespace si;
namespace k = si::constants;

namespace {

void require_positive(double v, const char* what) {
  if (!(std::isfinite(v) && v > 0.0)) throw ValidationError(fmt::format("{} must be positive (got {})", what, v));
}

void require_nonnegative(double v, const char* what) {
  if (!(std::isfinite(v) && v >= 0.0))
    throw ValidationError(fmt::format("{} must be non-negative (got {})", what, v));
}

Entry make_entry(std::string name, double value, std::string unit, std::optional<double> printed, std::string origin,
                 std::string note = {}) {
  Entry e{std::move(name), value, std::move(unit), printed, std::move(origin), std::move(note), Status::Computed};
  if (printed) e.status = *e.log_ratio() < kOrderBand ? Status::Reproduced : Status::Mismatch;
  return e;
}

}  // namespace

void validate(const SolenoidExperiment& e) {
  require_positive(e.electron_energy_ev, "electron_energy_ev");
  require_positive(e.loop_diameter.value, "loop_diameter");
  require_positive(e.interaction_length.value, "interaction_length");
  require_nonnegative(e.wire_diameter.value, "wire_diameter");
  require_nonnegative(e.current.value, "current");
  require_positive(e.carrier_density.value, "carrier_density");
  require_nonnegative(e.temperature.value, "temperature");
}

void validate(const NeutronModel& n) {
  require_positive(n.moment.value, "moment");
  require_positive(n.loop_radius.value, "loop_radius");
  require_positive(n.interaction_time.value, "interaction_time");
}

Velocity electron_speed(Energy kinetic) {
  require_nonnegative(kinetic.value, "kinetic energy");
  const Energy rest = k::electron_mass * k::speed_of_light * k::speed_of_light;
  const double gamma = 1.0 + (kinetic / rest).value;
  return k::speed_of_light * std::sqrt(1.0 - 1.0 / (gamma * gamma));
}

Time interaction_time(const SolenoidExperiment& e) {
  validate(e);
  return e.interaction_length / electron_speed(electron_volts(e.electron_energy_ev));
}

Velocity drift_velocity(Current i, NumberDensity n, Area a) {
  require_nonnegative(i.value, "current");
  require_positive(n.value, "carrier density");
  require_positive(a.value, "area");
  return i / (n * a * k::elementary_charge);
}

Velocity thermal_velocity(Temperature t) {
  require_nonnegative(t.value, "temperature");
  return si::sqrt(2.0 * k::boltzmann * t / k::electron_mass);
}

Length thermal_displacement(Temperature t, Time dt) {
  require_nonnegative(dt.value, "time");
  return thermal_velocity(t) * dt;
}

Force lorentz_force_on_coil_electron(Velocity v_carrier, Velocity v_electron, Length r0) {
  require_positive(r0.value, "r0");
  const MagneticField b = k::mu0 * k::elementary_charge * v_electron / (4.0 * k::pi * r0 * r0);
  return k::elementary_charge * v_carrier * b;
}

Force centripetal_force(Mass m, Velocity v, Length r) {
  require_positive(r.value, "radius");
  return m * v * v / r;
}

Time neutron_circulation_period(MagneticMoment mu, Length r_loop) {
  require_positive(mu.value, "moment");
  require_positive(r_loop.value, "loop radius");
  return k::elementary_charge * (k::pi * r_loop * r_loop) / mu;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::ConstrainedPlausible: return "constrained-plausible";
    case Verdict::UnconstrainedPlausible: return "unconstrained-plausible";
    case Verdict::Ambiguous: return "ambiguous";
  }
  return "?";
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Computed: return "computed";
    case Status::Reproduced: return "reproduced";
    case Status::Mismatch: return "mismatch";
    case Status::FlaggedPrint: return "flagged-print";
    case Status::Unreproduced: return "unreproduced";
  }
  return "?";
}

// A factor of 10 either way decides; anything in between is ambiguous.
VerdictReport constraint_verdict(const SolenoidExperiment& e) {
  validate(e);
  VerdictReport r;
  const Length dx = thermal_displacement(e.temperature, interaction_time(e));
  if (e.wire_diameter.value == 0.0) {
    r.warning = "zero wire diameter: the displacement has nothing to be compared with";
    return r;
  }
  r.ratio = (dx / e.wire_diameter).value;
  if (r.ratio < 0.1) r.verdict = Verdict::UnconstrainedPlausible;
  else if (r.ratio > 10.0) r.verdict = Verdict::ConstrainedPlausible;
  return r;
}

VerdictReport constraint_verdict(const NeutronModel& n) {
  validate(n);
  VerdictReport r;
  r.ratio = (n.interaction_time / neutron_circulation_period(n.moment, n.loop_radius)).value;
  if (r.ratio > 10.0) r.verdict = Verdict::ConstrainedPlausible;
  else if (r.ratio < 0.1) r.verdict = Verdict::UnconstrainedPlausible;
  return r;
}

std::optional<double> Entry::log_ratio() const {
  if (!printed || *printed == 0.0 || value == 0.0) return std::nullopt;
  return std::fabs(std::log10(std::fabs(value / *printed)));
}

const Entry& EstimateReport::at(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw std::out_of_range("no estimate named " + name);
}

EstimateReport solenoid_report(const SolenoidExperiment& e, const std::string& preset) {
  validate(e);
  EstimateReport r;
  r.preset = preset;

  const Velocity v_e = electron_speed(electron_volts(e.electron_energy_ev));
  const Time t_int = interaction_time(e);
  const Length wire_radius = e.wire_diameter / 2.0;
  const Area area = k::pi * wire_radius * wire_radius;
  const Velocity v_drift = drift_velocity(e.current, e.carrier_density, area);
  const Velocity v_th = thermal_velocity(e.temperature);
  const Length dx_th = thermal_displacement(e.temperature, t_int);
  const Length r0 = e.loop_diameter / 2.0;
  const Force f_drift = lorentz_force_on_coil_electron(v_drift, v_e, r0);
  const Force f_thermal = lorentz_force_on_coil_electron(v_th, v_e, r0);
  const Force f_cent = centripetal_force(k::electron_mass, v_drift, r0);
  const Length dx_int = 0.5 * (f_thermal / k::electron_mass) * t_int * t_int;

  auto& en = r.entries;
  en.push_back(make_entry("electron_speed", v_e.value, "m/s", std::nullopt, "derived", "relativistic"));
  en.push_back(make_entry("interaction_time", t_int.value, "s", 1e-12, "printed", "length / relativistic speed"));
  en.push_back(make_entry("drift_velocity", v_drift.value, "m/s", 80e-6, "printed", "I / (n A q)"));
  auto vth = make_entry("thermal_velocity", v_th.value, "m/s", 9.5e5, "printed", "sqrt(2 kB T / m_e)");
  vth.status = Status::FlaggedPrint;
  vth.note = "printed value is 10x the formula; the printed displacement uses the formula value";
  en.push_back(vth);
  en.push_back(make_entry("thermal_displacement", dx_th.value, "m", 87e-9, "printed", "v_thermal * t_int"));
  en.push_back(make_entry("lorentz_force_on_coil_electron", f_drift.value, "N", 1e-32, "printed",
                          "q v_drift B, B = mu0 q v_e / (4 pi r0^2), r0 = d_loop / 2"));
  en.push_back(make_entry("lorentz_force_thermal", f_thermal.value, "N", std::nullopt, "derived",
                          "as above with v_thermal"));
  en.push_back(make_entry("centripetal_force", f_cent.value, "N", 1e-34, "printed", "m_e v_drift^2 / r0"));
  auto dxi = make_entry("interaction_displacement", dx_int.value, "m", 3.7e-20, "printed",
                        "(1/2)(F_thermal / m_e) t_int^2");
  dxi.status = Status::Unreproduced;
  en.push_back(dxi);
  en.push_back(make_entry("wire_diameter", e.wire_diameter.value, "m", std::nullopt, "input"));
  r.verdict = constraint_verdict(e);
  en.push_back(make_entry("displacement_to_wire_ratio", r.verdict->ratio, "1", std::nullopt, "derived"));
  return r;
}

EstimateReport neutron_report(const NeutronModel& n, const std::string& preset) {
  validate(n);
  EstimateReport r;
  r.preset = preset;
  const Time period = neutron_circulation_period(n.moment, n.loop_radius);
  r.entries.push_back(make_entry("circulation_period", period.value, "s", 1e-23, "printed", "q pi r^2 / mu"));
  r.entries.push_back(make_entry("interaction_time", n.interaction_time.value, "s", std::nullopt, "input"));
  r.verdict = constraint_verdict(n);
  r.entries.push_back(make_entry("interaction_to_period_ratio", r.verdict->ratio, "1", std::nullopt, "derived"));
  return r;
}

void to_json(nlohmann::json& j, const EstimateReport& r) {
  j = nlohmann::json::object();
  j["preset"] = r.preset;
  auto& arr = j["entries"] = nlohmann::json::array();
  for (const auto& e : r.entries) {
    nlohmann::json row{{"name", e.name},
                       {"value", e.value},
                       {"unit", e.unit},
                       {"origin", e.origin},
                       {"status", to_string(e.status)},
                       {"note", e.note}};
    row["printed"] = e.printed ? nlohmann::json(*e.printed) : nlohmann::json(nullptr);
    const auto lr = e.log_ratio();
    row["log10_ratio"] = lr ? nlohmann::json(*lr) : nlohmann::json(nullptr);
    arr.push_back(row);
  }
  if (r.verdict) {
    j["verdict"] = {{"verdict", to_string(r.verdict->verdict)},
                    {"ratio", r.verdict->ratio},
                    {"warning", r.verdict->warning}};
  }
}

std::string format_table(const EstimateReport& r) {
  std::string out = fmt::format("{:<32} {:>12} {:<5} {:>12} {:>9} {:<14}\n", "quantity", "computed", "unit",
                                "printed", "|log10|", "status");
  for (const auto& e : r.entries) {
    const auto lr = e.log_ratio();
    out += fmt::format("{:<32} {:>12.4g} {:<5} {:>12} {:>9} {:<14}\n", e.name, e.value, e.unit,
                       e.printed ? fmt::format("{:.3g}", *e.printed) : std::string("-"),
                       lr ? fmt::format("{:.3f}", *lr) : std::string("-"), to_string(e.status));
  }
  if (r.verdict) {
    out += fmt::format("verdict: {} (ratio {:.3g})", to_string(r.verdict->verdict), r.verdict->ratio);
    if (!r.verdict->warning.empty()) out += fmt::format(" warning: {}", r.verdict->warning);
    out += "\n";
  }
  return out;
}

}  // namespace darwinics::estimates
