#include "cli/config.hpp"

#include <charconv>
#include <fstream>

#include "rpf/params_io.hpp"

namespace rpf::cli {

namespace {

using json = nlohmann::json;

double parse_number(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("'" + key + "' expects a number, got '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("'" + key + "' expects true/false, got '" + text + "'");
}

void set_sim_key(RunConfig& c, const std::string& key, const json& value) {
  try {
    if (key == "wall_following") {
      c.wall_following = wall_following_from_string(value.get<std::string>());
    } else if (key == "park_arrived") {
      c.park_arrived = value.get<bool>();
    } else if (key == "eta") {
      c.apf.eta = value.get<double>();
    } else if (key == "lambda") {
      c.apf.lambda = value.get<double>();
    } else if (key == "max_steps") {
      const double v = value.get<double>();
      if (v != static_cast<int>(v)) throw ConfigError("'max_steps' must be an integer");
      c.max_steps = static_cast<int>(v);
    } else {
      throw ConfigError("unknown sim key '" + key + "'");
    }
  } catch (const json::exception&) {
    throw ConfigError("sim key '" + key + "' has the wrong type");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

bool is_sim_key(const std::string& key) {
  return key == "wall_following" || key == "park_arrived" || key == "eta" || key == "lambda" ||
         key == "max_steps";
}

}  // namespace

SimConfig RunConfig::sim_config(PlannerMode mode, std::uint64_t seed) const {
  SimConfig s;
  s.world = world;
  s.seed = seed;
  s.max_steps = max_steps;
  s.mode = mode;
  s.wall_following = wall_following;
  s.apf = apf;
  s.park_arrived = park_arrived;
  return s;
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : world_param_fields(world)) j["world"][k] = v;
  for (const auto& [k, v] : ppo_config_fields(ppo)) j["ppo"][k] = v;
  j["sim"]["wall_following"] = to_string(wall_following);
  j["sim"]["park_arrived"] = park_arrived;
  j["sim"]["eta"] = apf.eta;
  j["sim"]["lambda"] = apf.lambda;
  j["sim"]["max_steps"] = max_steps;
  return j;
}

void RunConfig::validate() const {
  try {
    world.validate();
    ppo.validate();
    sim_config(PlannerMode::VanillaApf, 0).validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void apply_config_json(RunConfig& config, const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& [section, body] : doc.items()) {
    if (!body.is_object()) throw ConfigError("config: section '" + section + "' must be an object");
    for (const auto& [key, value] : body.items()) {
      if (section == "sim") {
        set_sim_key(config, key, value);
        continue;
      }
      if (!value.is_number()) throw ConfigError("config: '" + section + "." + key + "' must be a number");
      try {
        if (section == "world") {
          set_world_param(config.world, key, value.get<double>());
        } else if (section == "ppo") {
          set_ppo_param(config.ppo, key, value.get<double>());
        } else {
          throw ConfigError("config: unknown section '" + section + "'");
        }
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
    }
  }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  apply_config_json(config, doc);
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set expects key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  try {
    if (is_world_param(key)) {
      set_world_param(config.world, key, parse_number(key, text));
    } else if (is_ppo_param(key)) {
      set_ppo_param(config.ppo, key, parse_number(key, text));
    } else if (key == "wall_following") {
      set_sim_key(config, key, json(text));
    } else if (key == "park_arrived") {
      set_sim_key(config, key, json(parse_bool(key, text)));
    } else if (is_sim_key(key)) {
      set_sim_key(config, key, json(parse_number(key, text)));
    } else {
      throw ConfigError("unknown parameter '" + key + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace rpf::cli
