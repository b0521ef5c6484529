#include "rpf/scenario.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "rpf/params_io.hpp"

namespace rpf {

using nlohmann::json;

void Scenario::validate() const {
  for (std::size_t i = 0; i < robots.size(); ++i) {
    for (std::size_t j = i + 1; j < robots.size(); ++j) {
      if (distance(robots[i].start, robots[j].start) < 2.0 * params.r) {
        throw std::invalid_argument("scenario '" + name + "': starts of robots " +
                                    std::to_string(i) + " and " + std::to_string(j) +
                                    " are closer than 2r");
      }
    }
    for (const Obstacle& o : obstacles) {
      if (surface_contact(robots[i].start, o).distance < params.r ||
          surface_contact(robots[i].goal, o).distance < params.r) {
        throw std::invalid_argument("scenario '" + name + "': robot " + std::to_string(i) +
                                    " start or goal lies inside an obstacle");
      }
    }
  }
}

Scenario gen_cluttered(std::mt19937_64& rng, std::size_t n_robots, double obstacle_radius,
                       const ClutteredLayout& layout) {
  Scenario s;
  s.name = obstacle_radius == 0.5 ? "cluttered" : "cluttered-r" + std::to_string(obstacle_radius);
  const double size = layout.arena_size;
  s.obstacles.push_back(Obstacle::rect({0.0, 0.0}, {size, size}));
  const double offset = (size - layout.pitch * (layout.lattice - 1)) / 2.0;
  for (int row = 0; row < layout.lattice; ++row) {
    for (int col = 0; col < layout.lattice; ++col) {
      s.obstacles.push_back(
          Obstacle::circle({offset + col * layout.pitch, offset + row * layout.pitch},
                           obstacle_radius));
    }
  }

  std::uniform_real_distribution<double> coord(0.0, size);
  int tries = 0;
  const auto clear_of_obstacles = [&](Vec2 p) {
    for (const Obstacle& o : s.obstacles) {
      if (surface_contact(p, o).distance < layout.spawn_clearance) return false;
    }
    return true;
  };
  const auto sample = [&](auto&& accept) {
    while (true) {
      if (++tries > layout.max_tries) {
        throw std::runtime_error("gen_cluttered: rejection sampling exceeded max_tries");
      }
      const Vec2 p{coord(rng), coord(rng)};
      if (clear_of_obstacles(p) && accept(p)) return p;
    }
  };

  for (std::size_t i = 0; i < n_robots; ++i) {
    const Vec2 start = sample([&](Vec2 p) {
      for (const RobotSpawn& r : s.robots) {
        if (distance(p, r.start) < layout.spawn_separation) return false;
      }
      return true;
    });
    const Vec2 goal = sample([&](Vec2 p) {
      if (distance(p, start) < layout.min_travel) return false;
      for (const RobotSpawn& r : s.robots) {
        if (distance(p, r.goal) < layout.spawn_separation) return false;
      }
      return true;
    });
    s.robots.push_back({start, goal});
  }
  return s;
}

Scenario gen_circle_swap(std::size_t n_robots, double radius, std::mt19937_64* rng) {
  if (n_robots < 2) throw std::invalid_argument("gen_circle_swap: need at least 2 robots");
  Scenario s;
  s.name = "circle" + std::to_string(n_robots) + "-r" + std::to_string(radius);
  const double spacing = 2.0 * kPi / static_cast<double>(n_robots);
  std::uniform_real_distribution<double> jitter(-kCircleJitterFraction * spacing,
                                                kCircleJitterFraction * spacing);
  for (std::size_t k = 0; k < n_robots; ++k) {
    double angle = spacing * static_cast<double>(k);
    if (rng != nullptr) angle += jitter(*rng);
    const Vec2 start = from_heading(angle) * radius;
    s.robots.push_back({start, -start});
  }
  return s;
}

bool is_builtin_scenario(const std::string& name) {
  return name == "circle6" || name == "circle8-r3" || name == "circle8-r8" ||
         name == "cluttered" || name == "cluttered-small";
}

Scenario scenario_by_name(const std::string& name_or_path, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Scenario s;
  if (name_or_path == "circle6") {
    s = gen_circle_swap(6, 2.0, &rng);
  } else if (name_or_path == "circle8-r3") {
    s = gen_circle_swap(8, 3.0, &rng);
  } else if (name_or_path == "circle8-r8") {
    s = gen_circle_swap(8, 8.0, &rng);
  } else if (name_or_path == "cluttered") {
    s = gen_cluttered(rng, 6, 0.5);
  } else if (name_or_path == "cluttered-small") {
    s = gen_cluttered(rng, 6, 0.1);
  } else {
    return load_scenario(name_or_path);
  }
  s.name = name_or_path;
  return s;
}

namespace {

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

Vec2 vec_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw std::invalid_argument(std::string("scenario: '") + what + "' must be [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

std::string scenario_to_json(const Scenario& scenario) {
  json doc;
  doc["name"] = scenario.name;
  json params = json::object();
  for (const auto& [key, value] : world_param_fields(scenario.params)) params[key] = value;
  doc["params"] = params;
  doc["robots"] = json::array();
  for (const RobotSpawn& r : scenario.robots) {
    doc["robots"].push_back({{"start", vec_json(r.start)}, {"goal", vec_json(r.goal)}});
  }
  doc["obstacles"] = json::array();
  for (const Obstacle& o : scenario.obstacles) {
    if (const auto* c = std::get_if<Circle>(&o.shape)) {
      doc["obstacles"].push_back(
          {{"type", "circle"}, {"center", vec_json(c->center)}, {"radius", c->radius}});
    } else {
      const auto& r = std::get<Rect>(o.shape);
      doc["obstacles"].push_back(
          {{"type", "rect"}, {"min", vec_json(r.min)}, {"max", vec_json(r.max)}});
    }
  }
  return doc.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("scenario: document must be an object");
  Scenario s;
  s.name = doc.value("name", std::string("unnamed"));
  if (doc.contains("params")) {
    if (!doc["params"].is_object()) throw std::invalid_argument("scenario: 'params' must be an object");
    for (const auto& [key, value] : doc["params"].items()) {
      if (!value.is_number()) {
        throw std::invalid_argument("scenario: param '" + key + "' must be a number");
      }
      set_world_param(s.params, key, value.get<double>());
    }
  }
  if (!doc.contains("robots") || !doc["robots"].is_array()) {
    throw std::invalid_argument("scenario: 'robots' array is required");
  }
  for (const json& r : doc["robots"]) {
    if (!r.is_object() || !r.contains("start") || !r.contains("goal")) {
      throw std::invalid_argument("scenario: each robot needs 'start' and 'goal'");
    }
    s.robots.push_back({vec_from(r["start"], "start"), vec_from(r["goal"], "goal")});
  }
  if (doc.contains("obstacles")) {
    for (const json& o : doc["obstacles"]) {
      const std::string type = o.value("type", std::string());
      if (type == "circle") {
        if (!o.contains("center") || !o.contains("radius") || !o["radius"].is_number()) {
          throw std::invalid_argument("scenario: circle needs 'center' and numeric 'radius'");
        }
        s.obstacles.push_back(
            Obstacle::circle(vec_from(o["center"], "center"), o["radius"].get<double>()));
      } else if (type == "rect") {
        if (!o.contains("min") || !o.contains("max")) {
          throw std::invalid_argument("scenario: rect needs 'min' and 'max'");
        }
        s.obstacles.push_back(Obstacle::rect(vec_from(o["min"], "min"), vec_from(o["max"], "max")));
      } else {
        throw std::invalid_argument("scenario: unknown obstacle type '" + type + "'");
      }
    }
  }
  s.params.validate();
  s.validate();
  return s;
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write scenario file " + path.string());
  out << scenario_to_json(scenario);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

}  // namespace rpf
