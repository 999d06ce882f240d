#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "darwinics/order_estimates.hpp"
#include "darwinics/phase_shifts.hpp"
#include "darwinics/scenario.hpp"
#include "json.hpp"

namespace {

using namespace darwinics;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("darwinics");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("DARWINICS_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

/// Accepts plain numbers and multiples of pi: "2pi", "pi", "0.5pi".
double parse_scalar(const std::string& s) {
  std::string t = s;
  double factor = 1.0;
  if (t.size() >= 2 && t.compare(t.size() - 2, 2, "pi") == 0) {
    factor = kPi;
    t.erase(t.size() - 2);
    if (t.empty() || t == "+") t = "1";
    if (t == "-") t = "-1";
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ValidationError("cannot parse number '" + s + "'");
  }
  if (used != t.size()) throw ValidationError("cannot parse number '" + s + "'");
  return v * factor;
}

/// Regular polygon about `center` traversed `winding` times (negative: clockwise).
phase::PolyPath loop_path(const Vec3& center, double radius, int winding, int sides = 64) {
  phase::PolyPath p;
  p.closed = true;
  const int turns = std::abs(winding);
  const double dir = winding < 0 ? -1.0 : 1.0;
  const int n = sides * std::max(turns, 1);
  // Offsetting the start angle keeps repeated turns from repeating vertices exactly.
  for (int k = 0; k < n; ++k) {
    const double a = dir * 2.0 * kPi * k / sides + 1e-3 * (k / sides);
    p.vertices.push_back(center + Vec3{radius * std::cos(a), radius * std::sin(a), 0.0});
  }
  return p;
}

struct PhaseOptions {
  std::string which;
  std::string flux{"1"}, lambda{"1"}, mu{"1"};
  double q{1.0}, c{1.0}, hbar{1.0}, radius{1.0}, b{1.0}, speed{1.0}, offset{0.0};
  int winding{1};
  std::string format{"text"};
};

int run_phase(const PhaseOptions& o) {
  const Units u = Units::make(o.c, o.hbar);
  json rows = json::array();
  if (o.which == "ab") {
    LineSolenoid s;
    s.flux = parse_scalar(o.flux);
    const auto path = loop_path(Vec3{o.offset, 0.0, 0.0}, o.radius, o.winding);
    const auto r = phase::ab_phase(path, s, o.q, u);
    const int w = phase::winding_number(path, s.axis_point);
    rows.push_back({{"case", "ab"}, {"winding", w}, {"phase", r.phase}, {"kinetic", r.kinetic}, {"vector", r.vector},
                    {"force", r.force}, {"closed_form", w * o.q * s.flux / (o.hbar * o.c)}});
  } else if (o.which == "ac") {
    const double mu = parse_scalar(o.mu);
    const double lambda = parse_scalar(o.lambda);
    for (double scale : {1.0, 2.0, 4.0}) {
      LineCharge w;
      w.lambda = lambda * scale;
      const auto path = loop_path(Vec3{o.offset, 0.0, 0.0}, o.radius, o.winding);
      const auto r = phase::ac_phase(path, w, Vec3{0.0, 0.0, mu}, u);
      const int n = phase::winding_number(path, w.axis_point);
      rows.push_back({{"case", "ac"}, {"lambda", w.lambda}, {"mu", mu}, {"winding", n}, {"phase", r.phase},
                      {"kinetic", r.kinetic}, {"vector", r.vector}, {"force", r.force},
                      {"closed_form", n * 4.0 * kPi * w.lambda * mu / (o.hbar * o.c)}});
    }
  } else {
    LineCharge w;
    w.lambda = parse_scalar(o.lambda);
    const Vec3 mu{0.0, 0.0, parse_scalar(o.mu)};
    const auto f = phase::ac_moving_dipole_field(mu, w, u);
    phase::Arm lower{Vec3{0.0, -o.b, 0.0}, Vec3{o.speed, 0.0, 0.0}};
    phase::Arm upper{Vec3{0.0, o.b, 0.0}, Vec3{o.speed, 0.0, 0.0}};
    const auto r = phase::composite_force_phase(upper, lower, f, Vec3{o.speed, 0.0, 0.0}, 1, u);
    // Per arm: -(2 pi lambda mu / hbar c) sign(y_mu - y_w); the lower-minus-upper
    // difference is the counter-clockwise closed-loop phase.
    const double unit = 2.0 * kPi * w.lambda * mu.z / (o.hbar * o.c);
    rows.push_back({{"case", "composite-upper"}, {"phase", r.first.result.phase}, {"force", r.first.result.force},
                    {"closed_form", -unit}});
    rows.push_back({{"case", "composite-lower"}, {"phase", r.second.result.phase}, {"force", r.second.result.force},
                    {"closed_form", unit}});
    rows.push_back({{"case", "difference(lower-upper)"}, {"phase", -r.difference}, {"closed_form", 2.0 * unit}});
  }
  if (o.format == "json") {
    std::cout << rows.dump(1) << "\n";
    return kExitOk;
  }
  std::cout << fmt::format("{:<26} {:>22} {:>22} {:>12}\n", "case", "numeric [rad]", "closed form [rad]", "rel. diff");
  for (const auto& r : rows) {
    const double num = r["phase"].get<double>();
    const double ref = r["closed_form"].get<double>();
    const double rel = ref != 0.0 ? std::fabs(num - ref) / std::fabs(ref) : std::fabs(num);
    std::string label = r["case"].get<std::string>();
    if (r.contains("lambda")) label += fmt::format(" lambda={:g}", r["lambda"].get<double>());
    std::cout << fmt::format("{:<26} {:>22.15g} {:>22.15g} {:>12.3g}\n", label, num, ref, rel);
  }
  return kExitOk;
}

struct EstimateOptions {
  std::string preset{"mollenstedt-bayh"};
  std::optional<double> energy_ev, loop_diameter, length, wire_diameter, current, density, temperature;
  std::optional<double> moment, loop_radius, interaction_time;
  std::string format{"text"};
};

int run_estimates(const EstimateOptions& o) {
  estimates::EstimateReport report;
  if (o.preset == "mollenstedt-bayh") {
    report = estimates::solenoid_report({}, o.preset);
  } else if (o.preset == "neutron") {
    report = estimates::neutron_report({}, o.preset);
  } else if (o.preset == "custom") {
    std::string missing;
    const std::pair<const char*, const std::optional<double>*> need[] = {
        {"--energy-ev", &o.energy_ev},   {"--loop-diameter", &o.loop_diameter}, {"--length", &o.length},
        {"--wire-diameter", &o.wire_diameter}, {"--current", &o.current},       {"--density", &o.density},
        {"--temperature", &o.temperature}};
    for (const auto& [flag, v] : need)
      if (!v->has_value()) missing += std::string(missing.empty() ? "" : ", ") + flag;
    if (!missing.empty()) throw ValidationError("custom estimates need " + missing);
    estimates::SolenoidExperiment e;
    e.electron_energy_ev = *o.energy_ev;
    e.loop_diameter = si::Length(*o.loop_diameter);
    e.interaction_length = si::Length(*o.length);
    e.wire_diameter = si::Length(*o.wire_diameter);
    e.current = si::Current(*o.current);
    e.carrier_density = si::NumberDensity(*o.density);
    e.temperature = si::Temperature(*o.temperature);
    report = estimates::solenoid_report(e, o.preset);
  } else if (o.preset == "custom-neutron") {
    if (!o.moment || !o.loop_radius || !o.interaction_time)
      throw ValidationError("custom-neutron estimates need --moment, --loop-radius and --interaction-time");
    estimates::NeutronModel n;
    n.moment = si::MagneticMoment(*o.moment);
    n.loop_radius = si::Length(*o.loop_radius);
    n.interaction_time = si::Time(*o.interaction_time);
    report = estimates::neutron_report(n, o.preset);
  } else {
    throw ValidationError("unknown preset '" + o.preset + "' (mollenstedt-bayh, neutron, custom, custom-neutron)");
  }
  if (o.format == "json") {
    json j;
    estimates::to_json(j, report);
    std::cout << j.dump(1) << "\n";
  } else {
    std::cout << estimates::format_table(report);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Darwin-Lagrangian two-body dynamics, forces, field momentum and phases"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(io::kToolVersion));

  std::string scenario_path, out_dir = "out", format = "csv";
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  int workers = 1;

  auto add_common = [&](CLI::App* sc) {
    sc->add_option("scenario", scenario_path, "scenario JSON file")->required()->check(CLI::ExistingFile);
    sc->add_option("--out", out_dir, "output directory");
    sc->add_option("--tol", tol, "integrator tolerance override");
    sc->add_option("--seed", seed, "seed override");
    sc->add_option("--format", format, "data format")->check(CLI::IsMember({"csv", "json"}));
  };
  auto* run = app.add_subcommand("run", "run a scenario");
  add_common(run);
  auto* sweep = app.add_subcommand("sweep", "run a scenario's sweep block");
  add_common(sweep);
  sweep->add_option("--workers", workers, "parallel workers")->check(CLI::PositiveNumber);
  auto* validate_cmd = app.add_subcommand("validate", "parse and validate a scenario");
  validate_cmd->add_option("scenario", scenario_path, "scenario JSON file")->required()->check(CLI::ExistingFile);

  PhaseOptions po;
  auto* phase_cmd = app.add_subcommand("phase", "phase shifts: ab, ac or composite");
  phase_cmd->add_option("which", po.which, "ab | ac | composite")->required()->check(
      CLI::IsMember({"ab", "ac", "composite"}));
  phase_cmd->add_option("--flux", po.flux, "solenoid flux (accepts e.g. 2pi)");
  phase_cmd->add_option("--lambda", po.lambda, "line charge density");
  phase_cmd->add_option("--mu", po.mu, "dipole moment along z");
  phase_cmd->add_option("--q", po.q, "charge");
  phase_cmd->add_option("--c", po.c, "speed of light");
  phase_cmd->add_option("--hbar", po.hbar, "reduced Planck constant");
  phase_cmd->add_option("--winding", po.winding, "signed number of turns of the loop");
  phase_cmd->add_option("--radius", po.radius, "loop radius");
  phase_cmd->add_option("--offset", po.offset, "loop centre x offset from the axis");
  phase_cmd->add_option("--b", po.b, "composite: arm offset from the wire");
  phase_cmd->add_option("--speed", po.speed, "composite: arm speed");
  phase_cmd->add_option("--format", po.format, "text or json")->check(CLI::IsMember({"text", "json"}));

  EstimateOptions eo;
  auto* est = app.add_subcommand("estimates", "order-of-magnitude estimates");
  est->add_option("--preset", eo.preset, "mollenstedt-bayh | neutron | custom | custom-neutron");
  est->add_option("--energy-ev", eo.energy_ev, "electron kinetic energy [eV]");
  est->add_option("--loop-diameter", eo.loop_diameter, "[m]");
  est->add_option("--length", eo.length, "interaction length [m]");
  est->add_option("--wire-diameter", eo.wire_diameter, "[m]");
  est->add_option("--current", eo.current, "[A]");
  est->add_option("--density", eo.density, "carrier density [m^-3]");
  est->add_option("--temperature", eo.temperature, "[K]");
  est->add_option("--moment", eo.moment, "neutron moment [J/T]");
  est->add_option("--loop-radius", eo.loop_radius, "[m]");
  est->add_option("--interaction-time", eo.interaction_time, "[s]");
  est->add_option("--format", eo.format, "text or json")->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    const auto fmt_kind = format == "json" ? io::Format::Json : io::Format::Csv;
    auto load = [&] {
      io::Scenario s = io::load_scenario(scenario_path);
      if (tol) s.run.integrator.tol = *tol;
      if (seed) s.seed = *seed;
      spdlog::info("scenario '{}' system={} mode={}", s.name, s.system, s.mode);
      return s;
    };
    if (*run) {
      const auto out = io::run_scenario(load(), out_dir, fmt_kind);
      for (const auto& f : out.files) std::cout << f.string() << "\n";
    } else if (*sweep) {
      const auto out = io::run_sweep(load(), out_dir, workers, fmt_kind);
      for (const auto& f : out.files) std::cout << f.string() << "\n";
    } else if (*validate_cmd) {
      const auto s = io::load_scenario(scenario_path);
      std::cout << io::resolved(s).dump(1) << "\n";
    } else if (*phase_cmd) {
      return run_phase(po);
    } else if (*est) {
      return run_estimates(eo);
    }
    return kExitOk;
  } catch (const ValidationError& e) {
    spdlog::error("validation: {}", e.what());
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const AxisCrossingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    spdlog::error("numeric: {}", e.what());
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
