#include "fcatraffic/config.hpp"

#include <fstream>
#include <ostream>

#include "fcatraffic/error.hpp"

namespace fca {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorKind::ConfigError, message);
}

const json& require(const json& obj, const char* key, const char* section) {
  if (!obj.is_object() || !obj.contains(key)) {
    config_error(std::string("missing '") + key + "' in " + section);
  }
  return obj.at(key);
}

template <typename T>
T read(const json& value, const std::string& what) {
  try {
    return value.get<T>();
  } catch (const json::exception& e) {
    config_error("invalid " + what + ": " + e.what());
  }
}

template <typename T>
T read_or(const json& obj, const char* key, T fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return read<T>(obj.at(key), key);
}

std::array<double, 3> read_triple(const json& value, const std::string& what) {
  if (!value.is_array() || value.size() != 3) config_error(what + " must be a 3-element array");
  return read<std::array<double, 3>>(value, what);
}

RuleMatrix read_matrix(const json& value, const std::string& name) {
  if (!value.is_array() || value.size() != kRuleRows) {
    config_error("rule " + name + " must have 4 rows");
  }
  RuleMatrix u{};
  for (int r = 0; r < kRuleRows; ++r) {
    const json& row = value[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != kRuleCols) {
      config_error("rule " + name + " rows must have 6 entries");
    }
    for (int c = 0; c < kRuleCols; ++c) {
      u[r][c] = read<int>(row[static_cast<std::size_t>(c)], "rule entry");
    }
  }
  validate_rule_matrix(u);
  return u;
}

}  // namespace

SimulationConfig parse_config(const json& doc) {
  if (!doc.is_object()) config_error("config must be a JSON object");
  SimulationConfig cfg;

  const json& model = require(doc, "model", "config");
  ModelConfig& mc = cfg.model;
  mc.model = parse_model(read<std::string>(require(model, "type", "model"), "model type"));
  mc.rule_low = read_or<std::string>(model, "rule_low", "R1");
  mc.rule_high = read_or<std::string>(model, "rule_high", "R2");
  if (model.contains("custom_rules")) {
    for (const auto& [name, table] : model.at("custom_rules").items()) {
      mc.custom_rules[name] = read_matrix(table, name);
    }
  }
  if (model.contains("saturation_flow")) {
    mc.saturation_flow_veh_h = read_triple(model.at("saturation_flow"), "saturation_flow");
  }
  if (model.contains("alpha")) mc.alpha = read_triple(model.at("alpha"), "alpha");
  if (model.contains("nasch")) {
    const json& n = model.at("nasch");
    mc.nasch.v_max = read_or<int>(n, "v_max", mc.nasch.v_max);
    mc.nasch.p = read_or<double>(n, "p", mc.nasch.p);
  }
  validate(mc.nasch);

  Scenario& s = cfg.scenario;
  const json& geometry = require(doc, "geometry", "config");
  s.road_length_m = read<double>(require(geometry, "road_length_m", "geometry"), "road length");
  s.cell_length_m = read_or<double>(
      geometry, "cell_length_m", mc.model == Model::Fuzzy ? kFuzzyCellLength : kNaschCellLength);
  s.stop_lines_m = read_or<std::vector<double>>(geometry, "stop_lines_m", {});

  if (doc.contains("signals")) {
    const json& signals = doc.at("signals");
    if (!signals.is_array()) config_error("signals must be an array");
    for (const json& sig : signals) {
      SignalPlan plan;
      plan.stop_line = read<std::size_t>(require(sig, "stop_line", "signal"), "stop_line");
      plan.cycle = read<long>(require(sig, "cycle", "signal"), "cycle");
      plan.green_start = read_or<long>(sig, "green_start", 0);
      plan.green_duration = read<long>(require(sig, "green_duration", "signal"), "green_duration");
      s.signals.push_back(plan);
    }
  }

  const json initial = doc.value("initial", json::object());
  s.initial_queue_per_intersection = read_or<int>(initial, "queue_per_intersection", 0);
  s.last_vehicle_at_first_cell = read_or<bool>(initial, "last_vehicle_at_first_cell", false);
  s.horizon = read_or<long>(doc, "horizon_steps", 3600);

  const json output = doc.value("output", json::object());
  cfg.output.directory = read_or<std::string>(output, "directory", ".");
  cfg.output.count_interval = read_or<long>(output, "count_interval", 60);
  if (cfg.output.count_interval < 1) config_error("output.count_interval must be >= 1");

  s.validate();
  if (mc.model == Model::Fuzzy) resolve_calibration(mc);
  return cfg;
}

SimulationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    config_error("cannot parse " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

json to_json(const SimulationConfig& cfg) {
  const ModelConfig& mc = cfg.model;
  json model = {{"type", to_string(mc.model)},
                {"rule_low", mc.rule_low},
                {"rule_high", mc.rule_high},
                {"nasch", {{"v_max", mc.nasch.v_max}, {"p", mc.nasch.p}}}};
  if (!mc.custom_rules.empty()) {
    json rules = json::object();
    for (const auto& [name, u] : mc.custom_rules) rules[name] = u;
    model["custom_rules"] = rules;
  }
  if (mc.saturation_flow_veh_h) model["saturation_flow"] = *mc.saturation_flow_veh_h;
  if (mc.alpha) model["alpha"] = *mc.alpha;

  const Scenario& s = cfg.scenario;
  json signals = json::array();
  for (const auto& plan : s.signals) {
    signals.push_back({{"stop_line", plan.stop_line},
                       {"cycle", plan.cycle},
                       {"green_start", plan.green_start},
                       {"green_duration", plan.green_duration}});
  }
  return {{"model", model},
          {"geometry",
           {{"road_length_m", s.road_length_m},
            {"cell_length_m", s.cell_length_m},
            {"stop_lines_m", s.stop_lines_m}}},
          {"signals", signals},
          {"initial",
           {{"queue_per_intersection", s.initial_queue_per_intersection},
            {"last_vehicle_at_first_cell", s.last_vehicle_at_first_cell}}},
          {"horizon_steps", s.horizon},
          {"output", {{"directory", cfg.output.directory}, {"count_interval", cfg.output.count_interval}}}};
}

RuleTable resolve_rule(const ModelConfig& model, const std::string& name) {
  if (auto it = model.custom_rules.find(name); it != model.custom_rules.end()) {
    return make_custom_rule(name, it->second);
  }
  return builtin_rule(name);
}

Calibration resolve_calibration(const ModelConfig& model) {
  const RuleTable low = resolve_rule(model, model.rule_low);
  const RuleTable high = resolve_rule(model, model.rule_high);
  if (model.alpha) return make_calibration(low, high, *model.alpha);
  if (model.saturation_flow_veh_h) {
    const auto& s = *model.saturation_flow_veh_h;
    return calibrate_alpha(make_tfn(s[0], s[1], s[2]), low, high);
  }
  config_error("fuzzy model needs either 'saturation_flow' or 'alpha'");
}

json provenance(std::string_view command) {
  return {{"tool", "fcatraffic"},
          {"version", FCA_VERSION},
          {"command", command},
          {"generator", kGeneratorName},
          {"seconds_per_step", kSecondsPerStep}};
}

json to_json(const TriangularFuzzy& z) { return json::array({z.lower(), z.peak(), z.upper()}); }

json to_json(const PercentileSummary& s) {
  return {{"min", s.min},       {"p05", s.p05}, {"median", s.median},
          {"p95", s.p95},       {"max", s.max}, {"spread", s.spread()}};
}

void write_discharge_csv(std::ostream& out, const DischargeTrace& trace) {
  out << "t,cell,state\n";
  for (std::size_t t = 0; t < trace.states.size(); ++t) {
    const auto& row = trace.states[t];
    for (std::size_t k = 0; k < row.size(); ++k) {
      out << t << ',' << trace.first_cell + static_cast<Cell>(k) << ',' << row[k] << '\n';
    }
  }
}

void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log) {
  out << "t,vehicle,channel,position,velocity\n";
  for (std::size_t t = 0; t < log.snapshot_count(); ++t) {
    for (std::size_t c = 0; c < log.channel_count(); ++c) {
      const auto x = log.positions_at(static_cast<long>(t), c);
      const auto v = log.velocities_at(static_cast<long>(t), c);
      for (std::size_t i = 0; i < log.vehicles; ++i) {
        out << t << ',' << i << ',' << log.channels[c] << ',' << x[i] << ',' << v[i] << '\n';
      }
    }
  }
}

}  // namespace fca
