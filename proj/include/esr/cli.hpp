#pragma once

// Command-line front end: configuration, the four report-producing commands
// and their CSV/JSON serializations.
//
// CSV prints reals in fixed point with 6 decimals; JSON prints full double
// precision and carries "schema_version" (currently 1).

#include "esr/bchsh.hpp"
#include "esr/esr_calculus.hpp"
#include "esr/lhv_sim.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace esr::cli {

inline constexpr int kSchemaVersion = 1;

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

enum class OutputFormat { csv, json };

// A direction given either as a coplanar angle in degrees or as a 3-vector.
struct DirectionSpec {
  std::optional<double> degrees;
  std::optional<std::array<double, 3>> vector;
};

struct ExperimentConfig {
  // "singlet" or an explicit row-major 4x4 matrix.
  std::string state_name = "singlet";
  std::optional<Matrix4> state_matrix;
  // "tsirelson" or four directions (a, a', b, b').
  std::string angle_preset = "tsirelson";
  std::optional<std::array<DirectionSpec, 4>> angles;
  // One value (uniform), two (sequential: A, B) or four (A(a), A(a'), B(b), B(b')).
  std::vector<double> detection = {1.0};
  double apparatus_factor = 1.0;
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 0;
  OutputFormat format = OutputFormat::csv;
  std::optional<double> grid_step_deg;
  std::string model = "gisin-gisin";
  unsigned workers = 1;
  // Sequential-measurement observables.
  DirectionSpec obs_a{0.0, std::nullopt};
  DirectionSpec obs_b{0.0, std::nullopt};
};

// Fills `config` from a JSON object; only keys present are applied.
void apply_json_config(const nlohmann::json& doc, ExperimentConfig& config);
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});

// Parsers for flag values; all throw ValidationError on malformed input.
std::array<DirectionSpec, 4> parse_angle_list(const std::string& text);
DirectionSpec parse_direction(const std::string& text);
std::vector<double> parse_number_list(const std::string& text);

DensityState resolve_state(const ExperimentConfig& config);
ChshSetting resolve_setting(const ExperimentConfig& config);
Direction resolve_direction(const DirectionSpec& spec);
// Role-keyed detection model for CHSH commands (one or four values).
DetectionModel resolve_chsh_detection(const ExperimentConfig& config);
// Display strings for a, a', b, b' (degrees or "(x;y;z)").
std::array<std::string, 4> setting_labels(const ExperimentConfig& config);

// ---- reports ----

struct BoundReport {
  std::array<std::string, 4> setting;
  double denominator = 0.0;
  double bound = 0.0;
  double no_registration_lower_bound = 0.0;
  double grid_step_deg = 0.0;
  double grid_min_bound = 0.0;
  std::array<double, 4> grid_min_angles_deg{};
  double grid_no_registration_lower_bound = 0.0;
};

struct ScanReport {
  std::string state;
  double grid_step_deg = 0.0;
  std::vector<ScanRow> rows;
};

struct SimulateReport {
  std::string model;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::array<std::string, 4> setting;
  ChshStatistics stats;
  // Modified CHSH value from measured detection frequencies and quantum
  // conditional expectation values in the configured state.
  Estimate modified_chsh_measured;
};

struct SequentialReport {
  std::string state;
  std::string a;
  std::string b;
  double pd_a = 0.0;
  double pd_b = 0.0;
  std::vector<OutcomeEntry> entries;
  double total = 0.0;
  double correlation = 0.0;
};

BoundReport cmd_bound(const ExperimentConfig& config);
ScanReport cmd_scan(const ExperimentConfig& config);
SimulateReport cmd_simulate(const ExperimentConfig& config);
SequentialReport cmd_sequential(const ExperimentConfig& config);

// Column header of the scan CSV.
inline constexpr const char* kScanCsvHeader =
    "a_deg,aprime_deg,b_deg,bprime_deg,pd_a,pd_aprime,pd_b,pd_bprime,standard_lhs,"
    "modified_lhs,bound,standard_violated,modified_violated";

void write_csv(std::ostream& out, const BoundReport& report);
void write_csv(std::ostream& out, const ScanReport& report);
void write_csv(std::ostream& out, const SimulateReport& report);
void write_csv(std::ostream& out, const SequentialReport& report);

nlohmann::json to_json(const BoundReport& report);
nlohmann::json to_json(const ScanReport& report);
nlohmann::json to_json(const SimulateReport& report);
nlohmann::json to_json(const SequentialReport& report);

// Runs the command line. Data goes to `out`, diagnostics to `err`; returns
// the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace esr::cli
