#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "fcatraffic/fuzzy_simulator.hpp"
#include "fcatraffic/metrics.hpp"
#include "fcatraffic/nasch_simulator.hpp"
#include "fcatraffic/rules.hpp"
#include "fcatraffic/scenario.hpp"
#include "fcatraffic/trajectory.hpp"

namespace fca {

/// Model section of a scenario file.
///
/// The fuzzy model takes either a fuzzy saturation flow in veh/h (alpha is
/// then derived) or an explicit alpha triple. Rule names refer to R1, R2 or a
/// table listed under custom_rules.
struct ModelConfig {
  Model model = Model::Fuzzy;
  std::string rule_low = "R1";
  std::string rule_high = "R2";
  std::map<std::string, RuleMatrix> custom_rules;
  std::optional<std::array<double, 3>> saturation_flow_veh_h;
  std::optional<std::array<double, 3>> alpha;
  NaschParams nasch;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct OutputConfig {
  std::string directory = ".";
  long count_interval = 60;  // steps between vehicle-count samples

  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct SimulationConfig {
  ModelConfig model;
  Scenario scenario;
  OutputConfig output;

  friend bool operator==(const SimulationConfig&, const SimulationConfig&) = default;
};

/// Throws Error(ConfigError) on missing or malformed fields; the resulting
/// scenario is validated.
SimulationConfig parse_config(const nlohmann::json& doc);
SimulationConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const SimulationConfig& config);

/// Built-in or custom rule by name.
RuleTable resolve_rule(const ModelConfig& model, const std::string& name);
Calibration resolve_calibration(const ModelConfig& model);

/// Tool name, version and generator identity shared by every output file.
nlohmann::json provenance(std::string_view command);

nlohmann::json to_json(const TriangularFuzzy& z);
nlohmann::json to_json(const PercentileSummary& s);

/// (t, cell, state) rows; state is the velocity or -1 for an empty cell.
void write_discharge_csv(std::ostream& out, const DischargeTrace& trace);

/// (t, vehicle, channel, position, velocity) rows.
void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log);

}  // namespace fca
