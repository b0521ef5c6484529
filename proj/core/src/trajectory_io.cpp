#include "rpf/trajectory_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rpf {

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

namespace {

double parse_real(const std::string& text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw std::runtime_error("trajectory: bad number '" + text + "'");
  }
  return value;
}

long long parse_int(const std::string& text) {
  long long value = 0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw std::runtime_error("trajectory: bad integer '" + text + "'");
  }
  return value;
}

void write_row(std::ostream& out, const TrajectoryRow& row) {
  out << row.step << ',' << row.robot << ',' << format_real(row.position.x) << ','
      << format_real(row.position.y) << ',' << format_real(row.heading) << ','
      << format_real(row.eta) << ',' << format_real(row.lambda) << ','
      << format_real(row.reward) << ',' << row.events << '\n';
}

}  // namespace

void write_trajectory(std::ostream& out, const Scenario& scenario, const EpisodeSummary& summary,
                      const std::vector<RewardBreakdown>& initial_rewards) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out << "# rpf-trajectory v1\n";
  out << "# scenario " << scenario.name << '\n';
  for (std::size_t i = 0; i < scenario.robots.size(); ++i) {
    const RobotSpawn& r = scenario.robots[i];
    out << "# robot " << i << " start " << format_real(r.start.x) << ' ' << format_real(r.start.y)
        << " goal " << format_real(r.goal.x) << ' ' << format_real(r.goal.y) << '\n';
  }
  for (const Obstacle& o : scenario.obstacles) {
    if (const auto* c = std::get_if<Circle>(&o.shape)) {
      out << "# circle " << format_real(c->center.x) << ' ' << format_real(c->center.y) << ' '
          << format_real(c->radius) << '\n';
    } else {
      const auto& r = std::get<Rect>(o.shape);
      out << "# rect " << format_real(r.min.x) << ' ' << format_real(r.min.y) << ' '
          << format_real(r.max.x) << ' ' << format_real(r.max.y) << '\n';
    }
  }
  out << kTrajectoryColumns << '\n';

  for (std::size_t i = 0; i < summary.robots.size(); ++i) {
    const RobotState& r = summary.robots[i];
    // Arrived without ever moving: spawned on the goal.
    const bool spawned_home = r.trail.size() == 1 && r.status == RobotStatus::Arrived;
    TrajectoryRow row{0, i, r.start(), 0.0, nan, nan, 0.0, 0};
    const Vec2 to_goal = r.goal - r.start();
    row.heading = norm(to_goal) > kNormEpsilon ? heading_of(to_goal) : 0.0;
    if (i < initial_rewards.size()) row.reward = initial_rewards[i].total;
    if (spawned_home) row.events = kEventArrived;
    write_row(out, row);
  }
  for (const StepRecord& step : summary.records) {
    for (const RobotStepRecord& rec : step.robots) {
      TrajectoryRow row{step.step, rec.robot, rec.position, rec.heading,
                        rec.apf ? rec.apf->eta : nan, rec.apf ? rec.apf->lambda : nan,
                        rec.reward.total, rec.events};
      write_row(out, row);
    }
  }
}

std::string trajectory_to_string(const Scenario& scenario, const EpisodeSummary& summary) {
  std::ostringstream out;
  write_trajectory(out, scenario, summary);
  return out.str();
}

std::vector<std::vector<Vec2>> TrajectoryDocument::trails() const {
  std::map<std::size_t, std::vector<Vec2>> by_robot;
  for (const TrajectoryRow& row : rows) by_robot[row.robot].push_back(row.position);
  std::vector<std::vector<Vec2>> out;
  for (auto& [id, trail] : by_robot) {
    if (out.size() <= id) out.resize(id + 1);
    out[id] = std::move(trail);
  }
  return out;
}

TrajectoryDocument read_trajectory(std::istream& in) {
  TrajectoryDocument doc;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string kind;
      meta >> kind;
      if (kind == "scenario") {
        std::getline(meta >> std::ws, doc.scenario);
      } else if (kind == "robot") {
        std::size_t id = 0;
        std::string start_kw, goal_kw, sx, sy, gx, gy;
        meta >> id >> start_kw >> sx >> sy >> goal_kw >> gx >> gy;
        if (!meta || start_kw != "start" || goal_kw != "goal") {
          throw std::runtime_error("trajectory: bad robot metadata line");
        }
        if (doc.robots.size() <= id) doc.robots.resize(id + 1);
        doc.robots[id] = {{parse_real(sx), parse_real(sy)}, {parse_real(gx), parse_real(gy)}};
      } else if (kind == "circle") {
        std::string cx, cy, rad;
        meta >> cx >> cy >> rad;
        if (!meta) throw std::runtime_error("trajectory: bad circle metadata line");
        doc.obstacles.push_back(
            Obstacle::circle({parse_real(cx), parse_real(cy)}, parse_real(rad)));
      } else if (kind == "rect") {
        std::string x0, y0, x1, y1;
        meta >> x0 >> y0 >> x1 >> y1;
        if (!meta) throw std::runtime_error("trajectory: bad rect metadata line");
        doc.obstacles.push_back(Obstacle::rect({parse_real(x0), parse_real(y0)},
                                               {parse_real(x1), parse_real(y1)}));
      }
      continue;
    }
    if (!header_seen) {
      if (line != kTrajectoryColumns) throw std::runtime_error("trajectory: unexpected header");
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream row_stream(line);
    std::string cell;
    while (std::getline(row_stream, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9) throw std::runtime_error("trajectory: expected 9 columns");
    TrajectoryRow row;
    row.step = static_cast<int>(parse_int(cells[0]));
    row.robot = static_cast<std::size_t>(parse_int(cells[1]));
    row.position = {parse_real(cells[2]), parse_real(cells[3])};
    row.heading = parse_real(cells[4]);
    row.eta = parse_real(cells[5]);
    row.lambda = parse_real(cells[6]);
    row.reward = parse_real(cells[7]);
    row.events = static_cast<std::uint32_t>(parse_int(cells[8]));
    doc.rows.push_back(row);
  }
  if (doc.rows.empty()) throw std::runtime_error("trajectory: no records");
  return doc;
}

TrajectoryDocument load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trajectory file " + path.string());
  return read_trajectory(in);
}

}  // namespace rpf
