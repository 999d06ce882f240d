#include "doctest.h"

#include <cmath>

#include "darwinics/errors.hpp"
#include "darwinics/order_estimates.hpp"

using namespace darwinics;
using namespace darwinics::estimates;
using namespace darwinics::si;

// Dimension bookkeeping is compile-time.
static_assert(Addable<Length, Length>);
static_assert(!Addable<Length, Time>);
static_assert(!Addable<Force, Energy>);
static_assert(std::is_same_v<decltype(Length{} / Time{}), Velocity>);
static_assert(std::is_same_v<decltype(Mass{} * Acceleration{}), Force>);
static_assert(std::is_same_v<decltype(si::sqrt(Area{})), Length>);

namespace {

// Plain-double restatement of the estimates.
namespace ref {
constexpr double e = 1.602176634e-19, me = 9.1093837015e-31, kb = 1.380649e-23, c = 299792458.0;
constexpr double mu0 = 1.25663706212e-6, pi = 3.14159265358979323846;

double speed(double ev) {
  const double gamma = 1.0 + ev * e / (me * c * c);
  return c * std::sqrt(1.0 - 1.0 / (gamma * gamma));
}
}  // namespace ref

}  // namespace

TEST_CASE("relativistic electron speed") {
  CHECK(electron_speed(electron_volts(40e3)).value == doctest::Approx(ref::speed(40e3)).epsilon(1e-12));
  // 40 keV is about 0.37 c
  CHECK(electron_speed(electron_volts(40e3)).value / ref::c == doctest::Approx(0.3741).epsilon(1e-3));
  CHECK(electron_speed(electron_volts(0.0)).value == 0.0);
  CHECK_THROWS_AS(electron_speed(electron_volts(-1.0)), ValidationError);
}

TEST_CASE("solenoid estimates against a plain restatement") {
  const SolenoidExperiment x;
  const double v_e = ref::speed(40e3);
  const double t = 108e-6 / v_e;
  const double area = ref::pi * 2.5e-6 * 2.5e-6;
  const double v_d = 16e-6 / (6.3e28 * area * ref::e);
  const double v_th = std::sqrt(2.0 * ref::kb * 300.0 / ref::me);
  const double r0 = 18e-6;
  const double b = ref::mu0 * ref::e * v_e / (4.0 * ref::pi * r0 * r0);

  CHECK(interaction_time(x).value == doctest::Approx(t).epsilon(1e-12));
  CHECK(drift_velocity(x.current, x.carrier_density, Area{area}).value == doctest::Approx(v_d).epsilon(1e-12));
  CHECK(thermal_velocity(x.temperature).value == doctest::Approx(v_th).epsilon(1e-12));
  CHECK(thermal_displacement(x.temperature, Time{t}).value == doctest::Approx(v_th * t).epsilon(1e-12));
  CHECK(lorentz_force_on_coil_electron(Velocity{v_d}, Velocity{v_e}, Length{r0}).value ==
        doctest::Approx(ref::e * v_d * b).epsilon(1e-12));
  CHECK(centripetal_force(si::constants::electron_mass, Velocity{v_d}, Length{r0}).value ==
        doctest::Approx(ref::me * v_d * v_d / r0).epsilon(1e-12));
}

TEST_CASE("report: printed values reproduced within the order band, discrepancies flagged") {
  const EstimateReport r = solenoid_report({});
  CHECK(r.at("interaction_time").status == Status::Reproduced);
  CHECK(r.at("interaction_time").value == doctest::Approx(9.631e-13).epsilon(1e-3));
  CHECK(r.at("drift_velocity").status == Status::Reproduced);
  CHECK(r.at("drift_velocity").value == doctest::Approx(8.073e-5).epsilon(1e-3));
  CHECK(r.at("thermal_displacement").status == Status::Reproduced);
  CHECK(r.at("thermal_displacement").value == doctest::Approx(9.18e-8).epsilon(1e-2));
  CHECK(r.at("centripetal_force").status == Status::Reproduced);
  CHECK(r.at("thermal_velocity").status == Status::FlaggedPrint);
  CHECK(*r.at("thermal_velocity").log_ratio() == doctest::Approx(1.0).epsilon(0.05));
  CHECK(r.at("interaction_displacement").status == Status::Unreproduced);
  // The coil-electron Lorentz force comes out near 7e-32 N: outside the band.
  CHECK(r.at("lorentz_force_on_coil_electron").value == doctest::Approx(7.173e-32).epsilon(1e-3));
  CHECK(r.at("lorentz_force_on_coil_electron").status == Status::Mismatch);
  REQUIRE(r.verdict);
  CHECK(r.verdict->verdict == Verdict::UnconstrainedPlausible);
  CHECK(r.verdict->ratio == doctest::Approx(0.0184).epsilon(1e-2));
  CHECK_THROWS_AS(r.at("nope"), std::out_of_range);
}

TEST_CASE("neutron estimate and verdict") {
  const NeutronModel n;
  const double period = ref::e * ref::pi * 1e-30 / 1e-26;
  CHECK(neutron_circulation_period(n.moment, n.loop_radius).value == doctest::Approx(period).epsilon(1e-12));
  const EstimateReport r = neutron_report(n);
  CHECK(r.at("circulation_period").value == doctest::Approx(5.033e-23).epsilon(1e-3));
  CHECK(r.verdict->verdict == Verdict::ConstrainedPlausible);
  CHECK(r.verdict->ratio == doctest::Approx(1e-5 / period).epsilon(1e-12));
}

TEST_CASE("verdict thresholds and degenerate inputs") {
  SolenoidExperiment x;
  x.wire_diameter = Length{0.0};
  const VerdictReport v = constraint_verdict(x);
  CHECK(v.verdict == Verdict::Ambiguous);
  CHECK_FALSE(v.warning.empty());

  x.wire_diameter = Length{9.18e-8};  // about the thermal displacement
  CHECK(constraint_verdict(x).verdict == Verdict::Ambiguous);
  x.wire_diameter = Length{1e-9};
  CHECK(constraint_verdict(x).verdict == Verdict::ConstrainedPlausible);

  SolenoidExperiment bad;
  bad.temperature = Temperature{-1.0};
  CHECK_THROWS_AS(solenoid_report(bad), ValidationError);
  NeutronModel nb;
  nb.loop_radius = Length{0.0};
  CHECK_THROWS_AS(neutron_report(nb), ValidationError);
}

TEST_CASE("json and table output") {
  const EstimateReport r = solenoid_report({}, "mollenstedt-bayh");
  nlohmann::json j;
  to_json(j, r);
  CHECK(j["preset"] == "mollenstedt-bayh");
  CHECK(j["entries"].size() == r.entries.size());
  CHECK(j["verdict"]["verdict"] == "unconstrained-plausible");
  const std::string table = format_table(r);
  CHECK(table.find("flagged-print") != std::string::npos);
  CHECK(table.find("verdict: unconstrained-plausible") != std::string::npos);
}
