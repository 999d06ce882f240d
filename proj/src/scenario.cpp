#include "darwinics/scenario.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "darwinics/darwin_two_body.hpp"
#include "darwinics/kernels/kernels.hpp"

namespace darwinics::io {

using nlohmann::json;

namespace {

// SI -> Gaussian factors.
struct SiFactors {
  double charge{1e-1 * kSpeedOfLightCgs};  // C -> statC
  double mass{1e3};
  double length{1e2};
  double flux{1e8};                                  // Wb -> Mx
  double line_charge{1e-3 * kSpeedOfLightCgs};       // C/m -> statC/cm
  double moment{1e3};                                // A m^2 -> erg/G
  double mass_per_length{1e1};                       // kg/m -> g/cm
};

struct Ctx {
  bool si{false};
  SiFactors f;
};

std::string at(const std::string& base, const std::string& key) { return base + "/" + key; }

const json& member(const json& o, const std::string& path, const char* key) {
  if (!o.is_object()) throw ScenarioError(path, "expected an object");
  const auto it = o.find(key);
  if (it == o.end()) throw ScenarioError(at(path, key), "missing");
  return *it;
}

bool has(const json& o, const char* key) { return o.is_object() && o.contains(key); }

double num(const json& o, const std::string& path, const char* key, std::optional<double> def = std::nullopt) {
  if (!has(o, key)) {
    if (def) return *def;
    throw ScenarioError(at(path, key), "missing");
  }
  const json& v = o.at(key);
  if (!v.is_number()) throw ScenarioError(at(path, key), "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ScenarioError(at(path, key), "must be finite");
  return x;
}

std::string str(const json& o, const std::string& path, const char* key, std::optional<std::string> def = {}) {
  if (!has(o, key)) {
    if (def) return *def;
    throw ScenarioError(at(path, key), "missing");
  }
  const json& v = o.at(key);
  if (!v.is_string()) throw ScenarioError(at(path, key), "expected a string");
  return v.get<std::string>();
}

bool boolean(const json& o, const std::string& path, const char* key, bool def) {
  if (!has(o, key)) return def;
  const json& v = o.at(key);
  if (!v.is_boolean()) throw ScenarioError(at(path, key), "expected true or false");
  return v.get<bool>();
}

Vec3 vec(const json& o, const std::string& path, const char* key, std::optional<Vec3> def = std::nullopt) {
  if (!has(o, key)) {
    if (def) return *def;
    throw ScenarioError(at(path, key), "missing");
  }
  const json& v = o.at(key);
  if (!v.is_array() || v.size() < 2 || v.size() > 3) throw ScenarioError(at(path, key), "expected 2 or 3 numbers");
  Vec3 out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ScenarioError(at(path, key), "expected numbers");
    out[static_cast<int>(i)] = v[i].get<double>();
  }
  if (!is_finite(out)) throw ScenarioError(at(path, key), "must be finite");
  return out;
}

std::vector<double> numbers(const json& o, const std::string& path, const char* key) {
  const json& v = member(o, path, key);
  if (!v.is_array()) throw ScenarioError(at(path, key), "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ScenarioError(at(path, key), "expected numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

sim::Body parse_body(const json& o, const std::string& path, const Ctx& c) {
  sim::Body b;
  const std::string kind = str(o, path, "kind");
  b.name = str(o, path, "name", kind);
  b.dynamic = boolean(o, path, "dynamic", true);
  const double L = c.si ? c.f.length : 1.0;
  if (kind == "charge") {
    PointCharge p;
    p.q = num(o, path, "q") * (c.si ? c.f.charge : 1.0);
    p.m = num(o, path, "m", 1.0) * (c.si ? c.f.mass : 1.0);
    p.r = vec(o, path, "r") * L;
    p.v = vec(o, path, "v", Vec3{}) * L;
    b.data = p;
  } else if (kind == "dipole") {
    MagneticDipole d;
    d.mu = vec(o, path, "mu") * (c.si ? c.f.moment : 1.0);
    d.m = num(o, path, "m", 1.0) * (c.si ? c.f.mass : 1.0);
    d.r = vec(o, path, "r") * L;
    d.v = vec(o, path, "v", Vec3{}) * L;
    b.data = d;
  } else if (kind == "solenoid") {
    LineSolenoid s;
    s.flux = num(o, path, "flux") * (c.si ? c.f.flux : 1.0);
    s.axis_point = transverse(vec(o, path, "axis_point") * L);
    s.mass_per_length = num(o, path, "mass_per_length", 1.0) * (c.si ? c.f.mass_per_length : 1.0);
    s.v = vec(o, path, "v", Vec3{}) * L;
    b.length = num(o, path, "length", 1.0) * L;
    b.data = s;
  } else if (kind == "wire") {
    LineCharge w;
    w.lambda = num(o, path, "lambda") * (c.si ? c.f.line_charge : 1.0);
    w.axis_point = transverse(vec(o, path, "axis_point") * L);
    w.mass_per_length = num(o, path, "mass_per_length", 1.0) * (c.si ? c.f.mass_per_length : 1.0);
    w.v = vec(o, path, "v", Vec3{}) * L;
    b.length = num(o, path, "length", 1.0) * L;
    b.data = w;
  } else {
    throw ScenarioError(at(path, "kind"), "unknown body kind '" + kind + "' (charge, dipole, solenoid, wire)");
  }
  return b;
}

json body_json(const sim::Body& b) {
  json o{{"name", b.name}, {"dynamic", b.dynamic}};
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PointCharge>) {
          o["kind"] = "charge";
          o["q"] = d.q;
          o["m"] = d.m;
          o["r"] = vec_json(d.r);
        } else if constexpr (std::is_same_v<T, MagneticDipole>) {
          o["kind"] = "dipole";
          o["mu"] = vec_json(d.mu);
          o["m"] = d.m;
          o["r"] = vec_json(d.r);
        } else if constexpr (std::is_same_v<T, LineSolenoid>) {
          o["kind"] = "solenoid";
          o["flux"] = d.flux;
          o["axis_point"] = vec_json(d.axis_point);
          o["mass_per_length"] = d.mass_per_length;
          o["length"] = b.length;
        } else {
          o["kind"] = "wire";
          o["lambda"] = d.lambda;
          o["axis_point"] = vec_json(d.axis_point);
          o["mass_per_length"] = d.mass_per_length;
          o["length"] = b.length;
        }
        o["v"] = vec_json(d.v);
      },
      b.data);
  return o;
}

const std::map<std::string, std::pair<std::string, std::string>>& expected_kinds() {
  static const std::map<std::string, std::pair<std::string, std::string>> m{
      {"feynman", {"charge", "charge"}},
      {"mott-schwinger", {"charge", "dipole"}},
      {"ab", {"charge", "solenoid"}},
      {"ac", {"dipole", "wire"}},
  };
  return m;
}

std::string kind_name(const sim::Body& b) {
  if (std::holds_alternative<PointCharge>(b.data)) return "charge";
  if (std::holds_alternative<MagneticDipole>(b.data)) return "dipole";
  if (std::holds_alternative<LineSolenoid>(b.data)) return "solenoid";
  return "wire";
}

sim::ScatterMode scatter_mode(const std::string& s, const std::string& path) {
  if (s == "impulse-approx") return sim::ScatterMode::ImpulseApprox;
  if (s == "full") return sim::ScatterMode::Full;
  throw ScenarioError(path, "unknown scatter mode '" + s + "' (impulse-approx, full)");
}

std::string unit_of(const std::string& unit_system, const char* gaussian_unit) {
  return unit_system == "nondimensional" ? "nd" : gaussian_unit;
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)));
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  f << content;
}

std::filesystem::path write_table(const Table& t, const std::filesystem::path& dir, const std::string& stem,
                                  Format format, const json& meta) {
  if (format == Format::Csv) {
    const auto p = dir / (stem + ".csv");
    write_file(p, to_csv(t));
    return p;
  }
  const auto p = dir / (stem + ".json");
  json j = to_json(t);
  j["metadata"] = meta;
  write_file(p, j.dump(1) + "\n");
  return p;
}

}  // namespace

sim::Provider provider_for(const std::string& system, const std::string& mode) {
  const std::string path = "/mode";
  if (system == "feynman") {
    if (mode == "constrained") return sim::Provider::Darwin;
    throw ScenarioError(path, "feynman supports only 'constrained' (got '" + mode + "')");
  }
  if (mode == "constrained") return sim::Provider::ConstrainedLagrangian;
  if (mode == "unconstrained") return sim::Provider::UnconstrainedForce;
  if (mode == "hamiltonian" || mode == "hidden-momentum") {
    if (system != "ac")
      throw ScenarioError(path, "mode '" + mode + "' is only valid for system 'ac' (got '" + system + "')");
    return mode == "hamiltonian" ? sim::Provider::Hamiltonian : sim::Provider::HiddenMomentum;
  }
  throw ScenarioError(path, "unknown mode '" + mode + "' (constrained, unconstrained, hamiltonian, hidden-momentum)");
}

Scenario parse_scenario(const json& doc) {
  const json& j = has(doc, "scenario") && has(doc, "version") ? doc.at("scenario") : doc;
  if (!j.is_object()) throw ScenarioError("", "scenario must be a JSON object");
  Scenario s;
  s.name = str(j, "", "name", std::string("scenario"));
  s.system = str(j, "", "system");
  if (!expected_kinds().count(s.system))
    throw ScenarioError("/system", "unknown system '" + s.system + "' (feynman, mott-schwinger, ab, ac)");
  s.mode = str(j, "", "mode", std::string("constrained"));
  s.sys.provider = provider_for(s.system, s.mode);
  if (has(j, "seed")) {
    const json& v = j.at("seed");
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ScenarioError("/seed", "expected a non-negative integer");
    s.seed = v.get<std::uint64_t>();
  }

  Ctx ctx;
  const json units = has(j, "units") ? j.at("units") : json::object();
  const std::string usys = str(units, "/units", "system", std::string("gaussian"));
  if (usys == "gaussian" || usys == "si") {
    s.sys.units = Units::gaussian();
    s.unit_system = "gaussian";
    ctx.si = usys == "si";
  } else if (usys == "nondimensional") {
    s.sys.units = Units::nondimensional(num(units, "/units", "c"), num(units, "/units", "hbar", 1.0));
    s.unit_system = "nondimensional";
  } else {
    throw ScenarioError("/units/system", "unknown unit system '" + usys + "' (gaussian, si, nondimensional)");
  }

  if (has(j, "feynman")) {
    const json& f = j.at("feynman");
    if (s.system != "feynman") throw ScenarioError("/feynman", "only valid for system 'feynman'");
    const double L = ctx.si ? ctx.f.length : 1.0;
    const auto tb = darwin::feynman_configuration(num(f, "/feynman", "q") * (ctx.si ? ctx.f.charge : 1.0),
                                                  num(f, "/feynman", "m") * (ctx.si ? ctx.f.mass : 1.0),
                                                  num(f, "/feynman", "r") * L, num(f, "/feynman", "v") * L);
    s.sys.bodies = {sim::Body{"charge1", tb.body1}, sim::Body{"charge2", tb.body2}};
  } else {
    const json& bodies = member(j, "", "bodies");
    if (!bodies.is_array() || bodies.size() != 2) throw ScenarioError("/bodies", "expected an array of two bodies");
    for (std::size_t i = 0; i < 2; ++i) s.sys.bodies.push_back(parse_body(bodies[i], "/bodies/" + std::to_string(i), ctx));
  }
  const auto& want = expected_kinds().at(s.system);
  for (std::size_t i = 0; i < 2; ++i) {
    const std::string need = i == 0 ? want.first : want.second;
    if (kind_name(s.sys.bodies[i]) != need)
      throw ScenarioError("/bodies/" + std::to_string(i) + "/kind",
                          "system '" + s.system + "' needs a " + need + " here (got " + kind_name(s.sys.bodies[i]) + ")");
  }
  const std::string density = str(j, "", "moment_density", std::string("gaussian"));
  if (density == "gaussian") s.sys.density = MomentDensity::Gaussian;
  else if (density == "printed-with-c") s.sys.density = MomentDensity::PrintedWithC;
  else throw ScenarioError("/moment_density", "expected 'gaussian' or 'printed-with-c'");
  s.sys.singular_radius = num(j, "", "singular_radius", kDefaultSingularRadius) * (ctx.si ? ctx.f.length : 1.0);

  const json run = has(j, "run") ? j.at("run") : json::object();
  const std::string kind = str(run, "/run", "kind", std::string("trajectory"));
  auto& r = s.run;
  const double L = ctx.si ? ctx.f.length : 1.0;
  if (kind == "trajectory") r.kind = RunKind::Trajectory;
  else if (kind == "scattering") r.kind = RunKind::Scattering;
  else throw ScenarioError("/run/kind", "expected 'trajectory' or 'scattering'");
  r.t0 = num(run, "/run", "t0", 0.0);
  r.t1 = num(run, "/run", "t1", 1.0);
  r.integrator.tol = num(run, "/run", "tol", 1e-10);
  r.integrator.dt = num(run, "/run", "dt", 0.0);
  r.integrator.samples = static_cast<int>(num(run, "/run", "samples", 0.0));
  r.integrator.max_steps = static_cast<std::size_t>(num(run, "/run", "max_steps", 5e6));
  const std::string method = str(run, "/run", "method", std::string("dopri5"));
  if (method == "dopri5") r.integrator.method = sim::Method::Dopri5;
  else if (method == "rk4") r.integrator.method = sim::Method::Rk4Fixed;
  else throw ScenarioError("/run/method", "expected 'dopri5' or 'rk4'");
  r.b = num(run, "/run", "b", 1.0) * L;
  r.v = num(run, "/run", "v", 1.0) * L;
  r.cutoff_multiple = num(run, "/run", "cutoff_multiple", 200.0);
  if (has(run, "scatter_modes")) {
    const json& m = run.at("scatter_modes");
    if (!m.is_array() || m.empty()) throw ScenarioError("/run/scatter_modes", "expected a non-empty array");
    r.scatter_modes.clear();
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (!m[i].is_string()) throw ScenarioError("/run/scatter_modes", "expected strings");
      r.scatter_modes.push_back(scatter_mode(m[i].get<std::string>(), "/run/scatter_modes/" + std::to_string(i)));
    }
  }
  if (!(r.integrator.tol > 0.0)) throw ScenarioError("/run/tol", "must be positive");
  if (r.kind == RunKind::Trajectory && !(r.t1 > r.t0)) throw ScenarioError("/run/t1", "must exceed t0");
  if (r.integrator.method == sim::Method::Rk4Fixed && !(r.integrator.dt > 0.0))
    throw ScenarioError("/run/dt", "rk4 needs a positive dt");
  if (r.kind == RunKind::Scattering && !(r.b > 0.0 && r.v > 0.0))
    throw ScenarioError("/run", "scattering needs positive b and v");

  if (has(j, "sweep")) {
    const json& sw = j.at("sweep");
    SweepSpec spec;
    spec.b = numbers(sw, "/sweep", "b");
    for (auto& x : spec.b) x *= L;
    if (has(sw, "v")) {
      spec.v = numbers(sw, "/sweep", "v");
      for (auto& x : spec.v) x *= L;
    } else {
      spec.v = {r.v};
    }
    if (has(sw, "modes")) {
      for (const auto& m : sw.at("modes")) {
        if (!m.is_string()) throw ScenarioError("/sweep/modes", "expected strings");
        spec.modes.push_back(m.get<std::string>());
      }
    } else {
      spec.modes = {s.mode};
    }
    spec.scatter_mode = scatter_mode(str(sw, "/sweep", "scatter_mode", std::string("impulse-approx")), "/sweep/scatter_mode");
    if (spec.b.empty() || spec.v.empty() || spec.modes.empty()) throw ScenarioError("/sweep", "empty sweep grid");
    for (double x : spec.b)
      if (!(x > 0.0)) throw ScenarioError("/sweep/b", "values must be positive");
    for (double x : spec.v)
      if (!(x > 0.0)) throw ScenarioError("/sweep/v", "values must be positive");
    for (const auto& m : spec.modes) provider_for(s.system, m);
    s.sweep = spec;
  }

  try {
    sim::validate(s.sys);
  } catch (const ScenarioError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ScenarioError("/bodies", e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ScenarioError("", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ScenarioError("", path.string() + ": " + e.what());
  }
  return parse_scenario(j);
}

json resolved(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["system"] = s.system;
  j["mode"] = s.mode;
  j["seed"] = s.seed;
  j["units"] = {{"system", s.unit_system}, {"c", s.sys.units.c}, {"hbar", s.sys.units.hbar}};
  j["bodies"] = json::array({body_json(s.sys.bodies[0]), body_json(s.sys.bodies[1])});
  j["moment_density"] = s.sys.density == MomentDensity::Gaussian ? "gaussian" : "printed-with-c";
  j["singular_radius"] = s.sys.singular_radius;
  const auto& r = s.run;
  json run{{"kind", r.kind == RunKind::Trajectory ? "trajectory" : "scattering"},
           {"t0", r.t0},
           {"t1", r.t1},
           {"tol", r.integrator.tol},
           {"dt", r.integrator.dt},
           {"samples", r.integrator.samples},
           {"max_steps", r.integrator.max_steps},
           {"method", r.integrator.method == sim::Method::Dopri5 ? "dopri5" : "rk4"},
           {"b", r.b},
           {"v", r.v},
           {"cutoff_multiple", r.cutoff_multiple}};
  run["scatter_modes"] = json::array();
  for (auto m : r.scatter_modes) run["scatter_modes"].push_back(sim::to_string(m));
  j["run"] = run;
  if (s.sweep) {
    j["sweep"] = {{"b", s.sweep->b},
                  {"v", s.sweep->v},
                  {"modes", s.sweep->modes},
                  {"scatter_mode", sim::to_string(s.sweep->scatter_mode)}};
  }
  return j;
}

sim::DynamicalSystem system_for_mode(const Scenario& s, const std::string& mode) {
  sim::DynamicalSystem sys = s.sys;
  sys.provider = provider_for(s.system, mode);
  return sys;
}

std::string to_csv(const Table& t) {
  std::string out;
  for (const auto& c : t.columns) out += fmt::format("# name={}, unit={}\n", c.name, c.unit);
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += fmt::format("{:.17g}", row[i]);
    }
    out += '\n';
  }
  return out;
}

json to_json(const Table& t) {
  json j;
  j["columns"] = json::array();
  for (const auto& c : t.columns) j["columns"].push_back({{"name", c.name}, {"unit", c.unit}});
  j["data"] = t.rows;
  return j;
}

Table trajectory_table(const sim::Trajectory& traj, const std::string& us) {
  Table t;
  const auto len = unit_of(us, "cm"), vel = unit_of(us, "cm/s"), mom = unit_of(us, "g*cm/s");
  t.columns.push_back({"t", unit_of(us, "s")});
  for (const auto& n : traj.names) {
    for (const char* c : {"x", "y", "z"}) t.columns.push_back({n + ".r_" + c, len});
    for (const char* c : {"x", "y", "z"}) t.columns.push_back({n + ".v_" + c, vel});
  }
  for (const char* q : {"p_mech", "p_canonical", "p_field"})
    for (const char* c : {"x", "y", "z"}) t.columns.push_back({std::string(q) + "_" + c, mom});
  t.columns.push_back({"energy", unit_of(us, "erg")});
  t.columns.push_back({"force_ratio", "1"});
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    std::vector<double> row{traj.t[i]};
    for (const auto& b : traj.states[i])
      for (const Vec3& v : {b.r, b.v}) row.insert(row.end(), {v.x, v.y, v.z});
    const auto& l = traj.ledger[i];
    for (const Vec3& v : {l.mechanical, l.canonical, l.field}) row.insert(row.end(), {v.x, v.y, v.z});
    row.push_back(l.energy);
    row.push_back(l.force_ratio);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table scattering_table(const std::vector<sim::ScatteringResult>& results, const std::string& us) {
  Table t;
  const auto len = unit_of(us, "cm"), mom = unit_of(us, "g*cm/s");
  t.columns = {{"mode", "enum(0=impulse-approx;1=full)"}, {"body", "index"}, {"b", len}, {"v", unit_of(us, "cm/s")}};
  for (const char* c : {"x", "y", "z"}) t.columns.push_back({std::string("impulse_") + c, mom});
  for (const char* c : {"x", "y", "z"}) t.columns.push_back({std::string("displacement_") + c, len});
  t.columns.push_back({"deflection", "rad"});
  t.columns.push_back({"impulse_error", mom});
  t.columns.push_back({"displacement_error", len});
  for (const auto& r : results) {
    for (std::size_t i = 0; i < r.bodies.size(); ++i) {
      const auto& b = r.bodies[i];
      t.rows.push_back({r.mode == sim::ScatterMode::Full ? 1.0 : 0.0, static_cast<double>(i), r.b, r.v, b.impulse.x,
                        b.impulse.y, b.impulse.z, b.displacement.x, b.displacement.y, b.displacement.z, b.deflection,
                        b.impulse_error, b.displacement_error});
    }
  }
  return t;
}

Table sweep_table(const std::vector<sim::SweepRow>& rows, const std::vector<std::string>& modes,
                  const std::string& us) {
  Table t;
  const auto len = unit_of(us, "cm"), mom = unit_of(us, "g*cm/s");
  std::string mode_unit = "enum(";
  for (std::size_t i = 0; i < modes.size(); ++i) mode_unit += fmt::format("{}{}={}", i ? ";" : "", i, modes[i]);
  mode_unit += ")";
  t.columns = {{"index", "1"}, {"b", len}, {"v", unit_of(us, "cm/s")}, {"mode", mode_unit}, {"ok", "bool"}};
  for (int k = 0; k < 2; ++k) {
    for (const char* c : {"x", "y", "z"}) t.columns.push_back({fmt::format("impulse{}_{}", k, c), mom});
    for (const char* c : {"x", "y", "z"}) t.columns.push_back({fmt::format("displacement{}_{}", k, c), len});
    t.columns.push_back({fmt::format("deflection{}", k), "rad"});
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : rows) {
    double mode_id = 0;
    for (std::size_t i = 0; i < modes.size(); ++i)
      if (modes[i] == r.point.label) mode_id = static_cast<double>(i);
    std::vector<double> row{static_cast<double>(r.index), r.point.b, r.point.v, mode_id, r.result ? 1.0 : 0.0};
    for (std::size_t k = 0; k < 2; ++k) {
      if (r.result) {
        const auto& b = r.result->bodies[k];
        row.insert(row.end(), {b.impulse.x, b.impulse.y, b.impulse.z, b.displacement.x, b.displacement.y,
                               b.displacement.z, b.deflection});
      } else {
        row.insert(row.end(), 7, nan);
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

json ledger_json(const sim::LedgerReport& r) {
  return {{"momentum_scale", r.momentum_scale},
          {"energy_scale", r.energy_scale},
          {"mechanical_change", vec_json(r.mechanical_change)},
          {"mechanical_drift", r.mechanical_drift},
          {"canonical_drift", r.canonical_drift},
          {"field_drift", r.field_drift},
          {"energy_drift", r.energy_drift},
          {"balance_residual", r.balance_residual},
          {"max_force_ratio_error", r.max_force_ratio_error}};
}

namespace {

json base_manifest(const Scenario& s) {
  return {{"tool", "darwinics"},
          {"version", kToolVersion},
          {"timestamp", timestamp_utc()},
          {"simd", kernels::to_string(kernels::active_isa())},
          {"scenario", resolved(s)}};
}

RunOutcome finish(const Scenario& s, const std::filesystem::path& dir, json manifest,
                  std::vector<std::filesystem::path> files) {
  manifest["outputs"] = json::array();
  for (const auto& f : files) manifest["outputs"].push_back(f.filename().string());
  const auto mpath = dir / (s.name + "_manifest.json");
  write_file(mpath, manifest.dump(1) + "\n");
  files.push_back(mpath);
  return {files, manifest};
}

}  // namespace

RunOutcome run_scenario(const Scenario& s, const std::filesystem::path& out_dir, Format format) {
  std::filesystem::create_directories(out_dir);
  json manifest = base_manifest(s);
  const json meta{{"name", s.name}, {"units", s.unit_system}};
  std::vector<std::filesystem::path> files;
  if (s.run.kind == RunKind::Trajectory) {
    const auto traj = sim::integrate(s.sys, s.run.t0, s.run.t1, s.run.integrator);
    files.push_back(write_table(trajectory_table(traj, s.unit_system), out_dir, s.name + "_trajectory", format, meta));
    manifest["ledger"] = ledger_json(sim::ledger_report(traj));
    manifest["steps"] = traj.steps;
  } else {
    sim::ScatterConfig cfg;
    cfg.cutoff_multiple = s.run.cutoff_multiple;
    cfg.integrator = s.run.integrator;
    std::vector<sim::ScatteringResult> results;
    for (auto m : s.run.scatter_modes) results.push_back(sim::scattering_run(s.sys, s.run.b, s.run.v, m, cfg));
    files.push_back(write_table(scattering_table(results, s.unit_system), out_dir, s.name + "_scattering", format, meta));
    manifest["ledger"] = nullptr;
  }
  return finish(s, out_dir, manifest, files);
}

RunOutcome run_sweep(const Scenario& s, const std::filesystem::path& out_dir, int workers, Format format) {
  if (!s.sweep) throw ScenarioError("/sweep", "scenario has no sweep block");
  std::filesystem::create_directories(out_dir);
  std::vector<sim::SweepPoint> points;
  for (double b : s.sweep->b)
    for (double v : s.sweep->v)
      for (const auto& m : s.sweep->modes) points.push_back({system_for_mode(s, m), b, v, s.sweep->scatter_mode, m});
  sim::ScatterConfig cfg;
  cfg.cutoff_multiple = s.run.cutoff_multiple;
  cfg.integrator = s.run.integrator;
  const auto rows = sim::sweep(points, workers, cfg);
  json manifest = base_manifest(s);
  manifest["failures"] = json::array();
  for (const auto& r : rows)
    if (!r.error.empty()) manifest["failures"].push_back({{"index", r.index}, {"error", r.error}});
  const json meta{{"name", s.name}, {"units", s.unit_system}};
  std::vector<std::filesystem::path> files{
      write_table(sweep_table(rows, s.sweep->modes, s.unit_system), out_dir, s.name + "_sweep", format, meta)};
  auto out = finish(s, out_dir, manifest, files);
  for (const auto& r : rows)
    if (!r.error.empty()) throw NonConvergenceError("sweep point " + std::to_string(r.index) + ": " + r.error);
  return out;
}

}  // namespace darwinics::io
