#pragma once

// Feasibility estimates for constituent motion inside a solenoid wire and a
// neutron, in SI units.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "darwinics/units.hpp"

namespace darwinics::estimates {

/// Inputs for an electron passing a solenoid. The current, carrier density and
/// temperature are not printed with the reference numbers; the defaults are
/// inferred so that the printed drift velocity and thermal displacement follow.
struct SolenoidExperiment {
  double electron_energy_ev{40e3};
  si::Length loop_diameter{36e-6};
  si::Length interaction_length{108e-6};  // three loop diameters
  si::Length wire_diameter{5e-6};
  si::Current current{16e-6};
  si::NumberDensity carrier_density{6.3e28};  // tungsten
  si::Temperature temperature{300.0};
};

void validate(const SolenoidExperiment& e);

struct NeutronModel {
  si::MagneticMoment moment{1e-26};
  si::Length loop_radius{1e-15};
  si::Time interaction_time{1e-5};
};

void validate(const NeutronModel& n);

/// Relativistic electron speed for a kinetic energy.
si::Velocity electron_speed(si::Energy kinetic);

si::Time interaction_time(const SolenoidExperiment& e);
si::Velocity drift_velocity(si::Current i, si::NumberDensity n, si::Area a);
si::Velocity thermal_velocity(si::Temperature t);
si::Length thermal_displacement(si::Temperature t, si::Time dt);
/// Field of the passing electron at r0 times the carrier charge and speed.
si::Force lorentz_force_on_coil_electron(si::Velocity v_carrier, si::Velocity v_electron, si::Length r0);
si::Force centripetal_force(si::Mass m, si::Velocity v, si::Length r);
/// T = q pi r^2 / mu for a single elementary charge circulating.
si::Time neutron_circulation_period(si::MagneticMoment mu, si::Length r_loop);

enum class Verdict { ConstrainedPlausible, UnconstrainedPlausible, Ambiguous };
std::string to_string(Verdict v);

struct VerdictReport {
  Verdict verdict{Verdict::Ambiguous};
  double ratio{0.0};  // displacement / wire diameter, or interaction time / period
  std::string warning;
};

VerdictReport constraint_verdict(const SolenoidExperiment& e);
VerdictReport constraint_verdict(const NeutronModel& n);

enum class Status {
  Computed,      // no printed counterpart
  Reproduced,    // within the order-of-magnitude band of the printed value
  Mismatch,      // outside the band
  FlaggedPrint,  // printed value known to be inconsistent with its own formula
  Unreproduced,  // printed value whose derivation could not be reconstructed
};
std::string to_string(Status s);

struct Entry {
  std::string name;
  double value{0.0};
  std::string unit;
  std::optional<double> printed;  // reference value where one is given
  std::string origin;             // "printed", "derived" or "input"
  std::string note;
  Status status{Status::Computed};

  /// |log10(value / printed)|.
  std::optional<double> log_ratio() const;
};

struct EstimateReport {
  std::string preset;
  std::vector<Entry> entries;
  std::optional<VerdictReport> verdict;

  const Entry& at(const std::string& name) const;
};

/// Order-of-magnitude band used for Reproduced/Mismatch.
inline constexpr double kOrderBand = 0.7;

EstimateReport solenoid_report(const SolenoidExperiment& e, const std::string& preset = "custom");
EstimateReport neutron_report(const NeutronModel& n, const std::string& preset = "custom");

void to_json(nlohmann::json& j, const EstimateReport& r);
std::string format_table(const EstimateReport& r);

}  // namespace darwinics::estimates
