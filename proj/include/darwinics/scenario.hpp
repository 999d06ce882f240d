#pragma once

// Scenario files (JSON), their resolution into engine inputs, and the
// CSV / JSON writers used by the command-line tool.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "darwinics/sim_engine.hpp"

namespace darwinics::io {

inline constexpr const char* kToolVersion = "0.1.0";

/// Thrown for malformed JSON or schema violations; `field` is a JSON pointer.
class ScenarioError : public ValidationError {
 public:
  ScenarioError(const std::string& field, const std::string& message)
      : ValidationError(field.empty() ? message : field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class RunKind { Trajectory, Scattering };

struct RunSpec {
  RunKind kind{RunKind::Trajectory};
  double t0{0.0};
  double t1{1.0};
  sim::IntegratorConfig integrator{};
  double b{1.0};
  double v{1.0};
  std::vector<sim::ScatterMode> scatter_modes{sim::ScatterMode::ImpulseApprox};
  double cutoff_multiple{200.0};
};

struct SweepSpec {
  std::vector<double> b;
  std::vector<double> v;
  std::vector<std::string> modes;
  sim::ScatterMode scatter_mode{sim::ScatterMode::ImpulseApprox};
};

struct Scenario {
  std::string name;
  std::string system;  // feynman | mott-schwinger | ab | ac
  std::string mode;    // constrained | unconstrained | hamiltonian | hidden-momentum
  std::string unit_system{"gaussian"};  // as resolved: gaussian or nondimensional
  sim::DynamicalSystem sys;
  RunSpec run;
  std::optional<SweepSpec> sweep;
  std::uint64_t seed{0};
};

/// Parses a scenario document. A run manifest (which embeds the resolved
/// scenario under "scenario") is accepted as well. SI input is converted to
/// Gaussian here.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& path);

/// Fully explicit form in internal units; parse_scenario(resolved(s)) == s.
nlohmann::json resolved(const Scenario& s);

sim::Provider provider_for(const std::string& system, const std::string& mode);

/// Dynamical system for a sweep mode (same bodies, provider chosen by mode).
sim::DynamicalSystem system_for_mode(const Scenario& s, const std::string& mode);

// --- tabular output ---------------------------------------------------------

struct Column {
  std::string name;
  std::string unit;
};

struct Table {
  std::vector<Column> columns;
  std::vector<std::vector<double>> rows;
};

/// One "# name=..., unit=..." line per column, then rows at 17 significant digits.
std::string to_csv(const Table& t);
nlohmann::json to_json(const Table& t);

Table trajectory_table(const sim::Trajectory& traj, const std::string& unit_system);
Table scattering_table(const std::vector<sim::ScatteringResult>& results, const std::string& unit_system);
Table sweep_table(const std::vector<sim::SweepRow>& rows, const std::vector<std::string>& modes,
                  const std::string& unit_system);

nlohmann::json ledger_json(const sim::LedgerReport& r);

struct RunOutcome {
  std::vector<std::filesystem::path> files;
  nlohmann::json manifest;
};

enum class Format { Csv, Json };

/// Executes the scenario's run block and writes data + manifest into out_dir.
RunOutcome run_scenario(const Scenario& s, const std::filesystem::path& out_dir, Format format = Format::Csv);

/// Executes the sweep block (one row per b x v x mode point) on `workers` threads.
RunOutcome run_sweep(const Scenario& s, const std::filesystem::path& out_dir, int workers = 1,
                     Format format = Format::Csv);

}  // namespace darwinics::io
