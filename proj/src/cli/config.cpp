#include "esr/cli.hpp"
#include "esr/error.hpp"

#include "format.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace esr::cli {

namespace {

using nlohmann::json;

double parse_number(const std::string& token) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    throw ValidationError("not a number: '" + token + "'");
  }
  while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used]))) ++used;
  if (used != token.size() || !std::isfinite(value)) {
    throw ValidationError("not a number: '" + token + "'");
  }
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (c == sep) {
      out.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  out.push_back(current);
  return out;
}

DirectionSpec direction_from_json(const json& node) {
  if (node.is_number()) return {node.get<double>(), std::nullopt};
  if (node.is_array() && node.size() == 3 &&
      std::all_of(node.begin(), node.end(), [](const json& v) { return v.is_number(); })) {
    return {std::nullopt, std::array<double, 3>{node[0].get<double>(), node[1].get<double>(),
                                                node[2].get<double>()}};
  }
  throw ValidationError("direction must be an angle in degrees or a 3-vector");
}

Complex complex_from_json(const json& node) {
  if (node.is_number()) return {node.get<double>(), 0.0};
  if (node.is_array() && node.size() == 2 && node[0].is_number() && node[1].is_number()) {
    return {node[0].get<double>(), node[1].get<double>()};
  }
  throw ValidationError("matrix entries must be numbers or [re, im] pairs");
}

std::uint64_t positive_integer(const json& node, const char* key) {
  if (!node.is_number_integer() || node.get<std::int64_t>() < 0) {
    throw ValidationError(std::string(key) + " must be a non-negative integer");
  }
  return node.get<std::uint64_t>();
}

std::string direction_label(const DirectionSpec& spec) {
  if (spec.degrees) return fixed6(*spec.degrees);
  const auto& v = *spec.vector;
  return "(" + fixed6(v[0]) + ";" + fixed6(v[1]) + ";" + fixed6(v[2]) + ")";
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& token : split(text, ',')) out.push_back(parse_number(token));
  return out;
}

DirectionSpec parse_direction(const std::string& text) {
  const auto values = parse_number_list(text);
  if (values.size() == 1) return {values[0], std::nullopt};
  if (values.size() == 3) {
    return {std::nullopt, std::array<double, 3>{values[0], values[1], values[2]}};
  }
  throw ValidationError("direction must be 'deg' or 'x,y,z': '" + text + "'");
}

std::array<DirectionSpec, 4> parse_angle_list(const std::string& text) {
  std::array<DirectionSpec, 4> out;
  if (text.find(';') != std::string::npos) {
    const auto parts = split(text, ';');
    if (parts.size() != 4) throw ValidationError("expected four ';'-separated vectors");
    for (std::size_t i = 0; i < 4; ++i) {
      out[i] = parse_direction(parts[i]);
      if (!out[i].vector) throw ValidationError("expected 'x,y,z' vectors separated by ';'");
    }
    return out;
  }
  const auto values = parse_number_list(text);
  if (values.size() != 4) {
    throw ValidationError("expected four comma-separated angles or 'tsirelson'");
  }
  for (std::size_t i = 0; i < 4; ++i) out[i] = {values[i], std::nullopt};
  return out;
}

void apply_json_config(const json& doc, ExperimentConfig& config) {
  if (!doc.is_object()) throw ValidationError("config must be a JSON object");
  try {
    if (doc.contains("state")) {
      const json& s = doc["state"];
      if (s.is_string()) {
        config.state_name = s.get<std::string>();
        config.state_matrix.reset();
      } else if (s.is_array() && s.size() == 4) {
        Matrix4 m;
        for (int i = 0; i < 4; ++i) {
          if (!s[i].is_array() || s[i].size() != 4) {
            throw ValidationError("state matrix must be 4x4");
          }
          for (int j = 0; j < 4; ++j) m(i, j) = complex_from_json(s[i][j]);
        }
        config.state_name = "custom";
        config.state_matrix = m;
      } else {
        throw ValidationError("state must be \"singlet\" or a 4x4 matrix");
      }
    }
    if (doc.contains("angles")) {
      const json& a = doc["angles"];
      if (a.is_string()) {
        config.angle_preset = a.get<std::string>();
        config.angles.reset();
      } else if (a.is_array() && a.size() == 4) {
        std::array<DirectionSpec, 4> specs;
        for (std::size_t i = 0; i < 4; ++i) specs[i] = direction_from_json(a[i]);
        config.angles = specs;
        config.angle_preset.clear();
      } else {
        throw ValidationError("angles must be \"tsirelson\" or four directions");
      }
    }
    if (doc.contains("detection")) {
      const json& d = doc["detection"];
      if (d.is_number()) {
        config.detection = {d.get<double>()};
      } else if (d.is_array()) {
        config.detection = d.get<std::vector<double>>();
      } else {
        throw ValidationError("detection must be a number or a list of numbers");
      }
    }
    if (doc.contains("apparatus_factor")) {
      config.apparatus_factor = doc["apparatus_factor"].get<double>();
    }
    if (doc.contains("trials")) config.trials = positive_integer(doc["trials"], "trials");
    if (doc.contains("seed")) config.seed = positive_integer(doc["seed"], "seed");
    if (doc.contains("format")) {
      const auto f = doc["format"].get<std::string>();
      if (f == "csv") {
        config.format = OutputFormat::csv;
      } else if (f == "json") {
        config.format = OutputFormat::json;
      } else {
        throw ValidationError("format must be csv or json");
      }
    }
    if (doc.contains("grid_step")) config.grid_step_deg = doc["grid_step"].get<double>();
    if (doc.contains("model")) config.model = doc["model"].get<std::string>();
    if (doc.contains("workers")) {
      config.workers = static_cast<unsigned>(positive_integer(doc["workers"], "workers"));
    }
    if (doc.contains("a")) config.obs_a = direction_from_json(doc["a"]);
    if (doc.contains("b")) config.obs_b = direction_from_json(doc["b"]);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad config value: ") + e.what());
  }
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  apply_json_config(doc, base);
  return base;
}

DensityState resolve_state(const ExperimentConfig& config) {
  if (config.state_matrix) return DensityState(*config.state_matrix, config.state_name);
  if (config.state_name == "singlet") return singlet_state();
  throw ValidationError("unknown state '" + config.state_name + "'");
}

Direction resolve_direction(const DirectionSpec& spec) {
  if (spec.degrees) return Direction::in_plane(*spec.degrees * std::numbers::pi / 180.0);
  if (spec.vector) {
    const auto& v = *spec.vector;
    return Direction::normalized(v[0], v[1], v[2]);
  }
  throw ValidationError("empty direction");
}

ChshSetting resolve_setting(const ExperimentConfig& config) {
  if (config.angles) {
    const auto& s = *config.angles;
    return {resolve_direction(s[0]), resolve_direction(s[1]), resolve_direction(s[2]),
            resolve_direction(s[3])};
  }
  if (config.angle_preset == "tsirelson") return ChshSetting::tsirelson();
  throw ValidationError("unknown angle preset '" + config.angle_preset + "'");
}

std::array<std::string, 4> setting_labels(const ExperimentConfig& config) {
  std::array<DirectionSpec, 4> specs;
  if (config.angles) {
    specs = *config.angles;
  } else if (config.angle_preset == "tsirelson") {
    specs = {DirectionSpec{0.0, {}}, {90.0, {}}, {45.0, {}}, {135.0, {}}};
  } else {
    throw ValidationError("unknown angle preset '" + config.angle_preset + "'");
  }
  return {direction_label(specs[0]), direction_label(specs[1]), direction_label(specs[2]),
          direction_label(specs[3])};
}

DetectionModel resolve_chsh_detection(const ExperimentConfig& config) {
  if (config.detection.size() == 1) {
    return DetectionModel::uniform(config.detection[0], config.apparatus_factor);
  }
  if (config.detection.size() == 4) {
    DetectionModel model(config.apparatus_factor);
    for (std::size_t r = 0; r < 4; ++r) {
      model.set(DetectionModel::kAny, kChshRoles[r], config.detection[r]);
    }
    return model;
  }
  throw ValidationError("detection needs one value or four values (a, a', b, b')");
}

}  // namespace esr::cli
