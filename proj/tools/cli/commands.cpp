#include "cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "cli/manifest.hpp"
#include "cli/svg.hpp"
#include "rpf/metrics.hpp"
#include "rpf/scenario.hpp"
#include "rpf/trainer.hpp"
#include "rpf/trajectory_io.hpp"

namespace rpf::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using json = nlohmann::json;

namespace {

std::string kind_name(ActionKind kind) { return kind == ActionKind::ApfScales ? "rpf" : "ppo"; }

ActionKind kind_from_name(const std::string& name) {
  if (name == "rpf") return ActionKind::ApfScales;
  if (name == "ppo") return ActionKind::Steering;
  throw ConfigError("unknown training mode '" + name + "' (expected rpf or ppo)");
}

std::string eval_mode_name(PlannerMode mode) {
  switch (mode) {
    case PlannerMode::Rpf: return "rpf";
    case PlannerMode::VanillaApf: return "apf";
    case PlannerMode::VanillaPpo: return "ppo";
  }
  return "rpf";
}

PlannerMode eval_mode_from_name(const std::string& name) {
  if (name == "rpf") return PlannerMode::Rpf;
  if (name == "apf") return PlannerMode::VanillaApf;
  if (name == "ppo") return PlannerMode::VanillaPpo;
  throw ConfigError("unknown eval mode '" + name + "' (expected rpf, apf or ppo)");
}

RunConfig config_from_snapshot(const json& snapshot) {
  RunConfig c;
  apply_config_json(c, snapshot);
  c.validate();
  return c;
}

Scenario make_scenario(const std::string& name, std::uint64_t seed) {
  try {
    return scenario_by_name(name, seed);
  } catch (const std::exception& e) {
    throw ConfigError("scenario '" + name + "': " + e.what());
  }
}

PolicyBundle load_checkpoint(const fs::path& path, ActionKind expected) {
  if (!fs::is_regular_file(path)) throw ConfigError("checkpoint not found: " + path.string());
  PolicyBundle policy;
  try {
    policy = load_policy(path);
  } catch (const std::exception& e) {
    throw ConfigError("cannot load checkpoint " + path.string() + ": " + e.what());
  }
  if (policy.kind != expected) {
    throw ConfigError("checkpoint " + path.string() + " holds a " + kind_name(policy.kind) +
                      " policy, expected " + kind_name(expected));
  }
  return policy;
}

// save_policy writes to a temporary file and renames it into place.
void save_checkpoint(const PolicyBundle& policy, const fs::path& path) {
  try {
    save_policy(policy, path);
  } catch (const std::exception& e) {
    throw RunAbort("cannot write checkpoint " + path.string() + ": " + e.what());
  }
}

std::string checkpoint_name(std::int64_t episode) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "episode_%06lld.bin", static_cast<long long>(episode));
  return buf;
}

ojson metric_json(const MetricReport& r) {
  ojson j;
  j["per_robot"] = r.per_robot;
  j["mean"] = r.mean;
  return j;
}

std::vector<fs::path> run_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), dir);
    if (rel == kManifestName) continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  return files;
}

fs::path scratch_dir() {
  std::random_device rd;
  for (int attempt = 0; attempt < 100; ++attempt) {
    const fs::path p = fs::temp_directory_path() / ("rpf-replay-" + std::to_string(rd()));
    if (fs::create_directory(p)) return p;
  }
  throw RunAbort("cannot create a scratch directory");
}

void summarize_trajectory(const fs::path& path, std::ostream& out) {
  TrajectoryDocument doc;
  try {
    doc = load_trajectory(path);
  } catch (const std::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  int steps = 0, arrivals = 0, robot_hits = 0, obstacle_hits = 0;
  for (const auto& row : doc.rows) {
    steps = std::max(steps, row.step);
    if (row.events & kEventArrived) ++arrivals;
    if (row.events & kEventRobotCollision) ++robot_hits;
    if (row.events & kEventObstacleCollision) ++obstacle_hits;
  }
  const double dt = WorldParams{}.dt;
  const auto trails = doc.trails();
  out << "scenario " << doc.scenario << ": " << doc.robots.size() << " robots, " << steps
      << " steps, " << doc.rows.size() << " records\n";
  out << "arrivals " << arrivals << ", robot collisions " << robot_hits
      << ", obstacle collisions " << obstacle_hits << "\n";
  for (std::size_t i = 0; i < trails.size(); ++i) {
    out << "  robot " << i << ": l " << format_real(trail_length(trails[i], dt)) << " xi "
        << format_real(trail_smoothness(trails[i], dt)) << "\n";
  }
}

}  // namespace

std::uint64_t train_scenario_seed(std::uint64_t seed, int episode) {
  return seed * 1000003ULL + static_cast<std::uint64_t>(episode);
}

// ---------------------------------------------------------------------------
// Option snapshots

ojson TrainOptions::to_json() const {
  ojson j;
  j["config"] = config.to_json();
  j["scenarios"] = scenarios;
  j["seed"] = seed;
  j["episodes"] = episodes;
  j["checkpoint_every"] = checkpoint_every;
  j["mode"] = kind_name(kind);
  j["init"] = init ? ojson(fs::absolute(*init).string()) : ojson(nullptr);
  return j;
}

TrainOptions TrainOptions::from_json(const json& j) {
  try {
    TrainOptions o;
    o.config = config_from_snapshot(j.at("config"));
    o.scenarios = j.at("scenarios").get<std::vector<std::string>>();
    o.seed = j.at("seed").get<std::uint64_t>();
    o.episodes = j.at("episodes").get<int>();
    o.checkpoint_every = j.at("checkpoint_every").get<int>();
    o.kind = kind_from_name(j.at("mode").get<std::string>());
    if (!j.at("init").is_null()) o.init = j.at("init").get<std::string>();
    return o;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
}

ojson EvalOptions::to_json() const {
  ojson j;
  j["config"] = config.to_json();
  j["mode"] = eval_mode_name(mode);
  j["scenario"] = scenario;
  j["checkpoint"] = checkpoint ? ojson(fs::absolute(*checkpoint).string()) : ojson(nullptr);
  j["seed"] = seed;
  j["seeds"] = seeds;
  j["deterministic"] = deterministic;
  return j;
}

EvalOptions EvalOptions::from_json(const json& j) {
  try {
    EvalOptions o;
    o.config = config_from_snapshot(j.at("config"));
    o.mode = eval_mode_from_name(j.at("mode").get<std::string>());
    o.scenario = j.at("scenario").get<std::string>();
    if (!j.at("checkpoint").is_null()) o.checkpoint = j.at("checkpoint").get<std::string>();
    o.seed = j.at("seed").get<std::uint64_t>();
    o.seeds = j.at("seeds").get<int>();
    o.deterministic = j.at("deterministic").get<bool>();
    return o;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// train

void cmd_train(const TrainOptions& o, std::ostream& out) {
  o.config.validate();
  if (o.episodes < 0) throw ConfigError("--episodes must be >= 0");
  if (o.checkpoint_every < 0) throw ConfigError("--checkpoint-every must be >= 0");
  if (o.scenarios.empty()) throw ConfigError("no training scenario");
  for (const auto& name : o.scenarios) make_scenario(name, 0);

  PolicyBundle policy = o.init ? load_checkpoint(*o.init, o.kind)
                               : PolicyBundle::create(o.kind, o.seed, PolicyArchitecture{});

  write_manifest(o.out, "train", o.to_json());
  if (o.episodes == 0) {
    out << "manifest written to " << (o.out / kManifestName).string() << "; no episodes run\n";
    return;
  }

  const fs::path ckpt_dir = o.out / "checkpoints";
  fs::create_directories(ckpt_dir);
  std::ofstream log(o.out / "train_log.jsonl", std::ios::binary | std::ios::trunc);
  if (!log) throw RunAbort("cannot write " + (o.out / "train_log.jsonl").string());

  Trainer trainer(policy, o.config.ppo, o.config.sim_config(planner_mode_for(o.kind), o.seed),
                  o.seed);
  fs::path last_good;
  for (int e = 0; e < o.episodes; ++e) {
    const std::string& name = o.scenarios[static_cast<std::size_t>(e) % o.scenarios.size()];
    const Scenario scenario = make_scenario(name, train_scenario_seed(o.seed, e));
    const EpisodeLog entry = trainer.train_episode(scenario);
    log << entry.to_json() << '\n';
    log.flush();
    if (entry.aborted) {
      throw RunAbort("non-finite loss in episode " + std::to_string(e) + "; last good checkpoint: " +
                     (last_good.empty() ? std::string("none") : last_good.string()));
    }
    if (o.checkpoint_every > 0 && (e + 1) % o.checkpoint_every == 0) {
      last_good = ckpt_dir / checkpoint_name(e + 1);
      save_checkpoint(policy, last_good);
    }
    out << "episode " << e << " " << name << " return " << entry.return_mean << " arrivals "
        << entry.arrivals << "/" << entry.robots << " collisions " << entry.collisions << "\n";
  }
  save_checkpoint(policy, o.out / "policy.bin");
  out << "final checkpoint " << (o.out / "policy.bin").string() << "\n";
}

// ---------------------------------------------------------------------------
// eval

void cmd_eval(const EvalOptions& o, std::ostream& out) {
  o.config.validate();
  if (o.seeds < 1) throw ConfigError("--seeds must be >= 1");
  make_scenario(o.scenario, o.seed);

  std::optional<PolicyBundle> policy;
  if (o.mode == PlannerMode::VanillaApf) {
    if (o.checkpoint) throw ConfigError("--checkpoint is not used in apf mode");
  } else {
    if (!o.checkpoint) {
      throw ConfigError("mode " + eval_mode_name(o.mode) + " needs --checkpoint");
    }
    const ActionKind kind = o.mode == PlannerMode::Rpf ? ActionKind::ApfScales : ActionKind::Steering;
    policy = load_checkpoint(*o.checkpoint, kind);
  }

  write_manifest(o.out, "eval", o.to_json());

  ojson report;
  report["mode"] = eval_mode_name(o.mode);
  report["scenario"] = o.scenario;
  report["deterministic"] = o.deterministic;
  report["episodes"] = ojson::array();
  double sum_l = 0.0, sum_xi = 0.0;
  int successes = 0;
  for (int k = 0; k < o.seeds; ++k) {
    const std::uint64_t seed = o.seed + static_cast<std::uint64_t>(k);
    const Scenario scenario = make_scenario(o.scenario, seed);
    const SimConfig sim = o.config.sim_config(o.mode, seed);
    std::optional<PolicyController> controller;
    if (policy) controller.emplace(*policy, sim.world, seed, o.deterministic);
    EpisodeSummary summary;
    try {
      summary = run_episode(sim, scenario, controller ? &*controller : nullptr, true);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    const EpisodeMetrics m = evaluate_episode(summary, sim.world.dt);
    const std::string traj = "trajectory_seed" + std::to_string(seed) + ".traj";
    write_text(o.out / traj, trajectory_to_string(scenario, summary));

    const bool success = summary.arrivals == static_cast<int>(summary.robots.size()) &&
                         summary.collisions() == 0;
    successes += success ? 1 : 0;
    sum_l += m.distance.mean;
    sum_xi += m.smoothness.mean;

    ojson ep;
    ep["seed"] = seed;
    ep["trajectory"] = traj;
    ep["robots"] = summary.robots.size();
    ep["steps"] = summary.steps;
    ep["arrivals"] = summary.arrivals;
    ep["robot_collisions"] = summary.robot_collisions;
    ep["obstacle_collisions"] = summary.obstacle_collisions;
    ep["success"] = success;
    ep["distance"] = metric_json(m.distance);
    ep["smoothness"] = metric_json(m.smoothness);
    ep["included"] = m.included;
    ep["collided"] = m.collided;
    ep["returns"] = summary.returns;
    report["episodes"].push_back(ep);

    out << "seed " << seed << ": arrivals " << summary.arrivals << "/" << summary.robots.size()
        << ", collisions " << summary.collisions() << ", steps " << summary.steps << ", l "
        << format_real(m.distance.mean) << ", xi " << format_real(m.smoothness.mean) << "\n";
  }
  report["mean_distance"] = sum_l / o.seeds;
  report["mean_smoothness"] = sum_xi / o.seeds;
  report["success_rate"] = static_cast<double>(successes) / o.seeds;
  write_text(o.out / "report.json", report.dump(2) + "\n");
  out << "report " << (o.out / "report.json").string() << "\n";
}

// ---------------------------------------------------------------------------
// replay

void cmd_replay(const fs::path& target, std::ostream& out) {
  if (!fs::exists(target)) throw ConfigError("no such file or directory: " + target.string());
  const bool is_manifest =
      fs::is_directory(target) || target.filename() == kManifestName;
  if (!is_manifest) {
    summarize_trajectory(target, out);
    return;
  }

  const json m = read_manifest(target);
  const fs::path original = fs::is_directory(target) ? target : target.parent_path();
  const std::string command = m.at("command").get<std::string>();
  const fs::path scratch = scratch_dir();
  std::ostringstream quiet;
  try {
    if (command == "train") {
      TrainOptions o = TrainOptions::from_json(m.at("invocation"));
      o.out = scratch;
      cmd_train(o, quiet);
    } else if (command == "eval") {
      EvalOptions o = EvalOptions::from_json(m.at("invocation"));
      o.out = scratch;
      cmd_eval(o, quiet);
    } else {
      throw ConfigError("manifest: cannot replay command '" + command + "'");
    }
  } catch (...) {
    fs::remove_all(scratch);
    throw;
  }

  const auto expected = run_files(original);
  const auto produced = run_files(scratch);
  std::vector<std::string> problems;
  for (const auto& rel : expected) {
    if (!fs::exists(scratch / rel)) {
      problems.push_back(rel.string() + ": not produced by the replay");
    } else if (read_text(original / rel) != read_text(scratch / rel)) {
      problems.push_back(rel.string() + ": differs");
    }
  }
  for (const auto& rel : produced) {
    if (!fs::exists(original / rel)) problems.push_back(rel.string() + ": missing from the run");
  }
  fs::remove_all(scratch);

  if (!problems.empty()) {
    std::string msg = "replay mismatch in " + original.string() + ":";
    for (const auto& p : problems) msg += "\n  " + p;
    throw RunAbort(msg);
  }
  out << "replay of " << command << " run " << original.string() << ": " << expected.size()
      << " files bit-identical\n";
}

// ---------------------------------------------------------------------------
// plot

void cmd_plot_trajectory(const fs::path& trajectory, const fs::path& svg) {
  TrajectoryDocument doc;
  try {
    doc = load_trajectory(trajectory);
  } catch (const std::exception& e) {
    throw ConfigError(trajectory.string() + ": " + e.what());
  }
  write_text(svg, trajectory_svg(doc));
}

void cmd_plot_reports(const std::vector<fs::path>& reports, const fs::path& svg) {
  std::vector<MetricBar> bars;
  for (const auto& path : reports) {
    json r;
    try {
      r = json::parse(read_text(path));
      bars.push_back({r.at("mode").get<std::string>(), r.at("mean_distance").get<double>(),
                      r.at("mean_smoothness").get<double>()});
    } catch (const json::exception& e) {
      throw ConfigError("report " + path.string() + ": " + e.what());
    }
  }
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto same = std::count_if(bars.begin(), bars.end(),
                                    [&](const MetricBar& b) { return b.label == bars[i].label; });
    if (same > 1) bars[i].label += " #" + std::to_string(i + 1);
  }
  write_text(svg, metrics_bar_svg(bars));
}

// ---------------------------------------------------------------------------
// command line

namespace {

struct Common {
  std::string config_file;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_file, "JSON config with world/ppo/sim sections")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", c.sets, "Override one parameter, key=value (repeatable)");
}

RunConfig resolve(const Common& c) {
  RunConfig config;
  if (!c.config_file.empty()) apply_config_file(config, c.config_file);
  for (const auto& s : c.sets) apply_override(config, s);
  return config;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-robot reinforced potential field planner"};
  app.set_version_flag("--version", git_describe());
  app.require_subcommand(1);

  Common train_common, eval_common;
  std::vector<std::string> train_scenarios;
  std::uint64_t train_seed = 0;
  std::optional<int> train_episodes;
  int checkpoint_every = 50;
  std::string train_mode = "rpf";
  std::string init_path;
  std::string train_out = "runs/train";

  auto* train = app.add_subcommand("train", "Train a shared policy with PPO");
  add_common(train, train_common);
  train->add_option("--scenario", train_scenarios,
                    "Training scenario name or JSON file (repeatable; cycled per episode). "
                    "Default: cluttered and circle6 alternating");
  train->add_option("--episodes", train_episodes, "Episodes to run (default: ppo.episodes)");
  train->add_option("--seed", train_seed, "Seed for weights, sampling and scenarios");
  train->add_option("--out", train_out, "Output directory");
  train->add_option("--checkpoint-every", checkpoint_every,
                    "Write checkpoints/episode_NNNNNN.bin every M episodes (0 disables)");
  train->add_option("--mode", train_mode, "rpf (APF scales) or ppo (direct steering)")
      ->check(CLI::IsMember({"rpf", "ppo"}));
  train->add_option("--init", init_path, "Continue from an existing checkpoint")
      ->check(CLI::ExistingFile);

  std::string eval_mode = "rpf";
  std::string eval_scenario = "circle8-r3";
  std::string eval_checkpoint;
  std::uint64_t eval_seed = 0;
  int eval_seeds = 1;
  bool deterministic = false;
  std::string eval_out = "runs/eval";

  auto* eval = app.add_subcommand("eval", "Evaluate a planner on a scenario");
  add_common(eval, eval_common);
  eval->add_option("--mode", eval_mode, "rpf, apf (fixed eta/lambda) or ppo")
      ->check(CLI::IsMember({"rpf", "apf", "ppo"}));
  eval->add_option("--scenario", eval_scenario, "Scenario name or JSON file");
  eval->add_option("--checkpoint", eval_checkpoint, "Policy checkpoint (rpf and ppo modes)");
  eval->add_option("--seed", eval_seed, "First evaluation seed");
  eval->add_option("--seeds", eval_seeds, "Number of consecutive seeds, one episode each");
  eval->add_flag("--deterministic", deterministic, "Act with the policy mean instead of sampling");
  eval->add_option("--out", eval_out, "Output directory");

  std::string replay_target;
  auto* replay = app.add_subcommand(
      "replay", "Summarise a trajectory file, or re-run a run directory and verify it");
  replay->add_option("target", replay_target, "Trajectory file, run directory or manifest.json")
      ->required();

  std::string plot_trajectory;
  std::vector<std::string> plot_reports;
  std::string plot_out;
  auto* plot = app.add_subcommand("plot", "Render a trajectory or compare reports as SVG");
  plot->add_option("trajectory", plot_trajectory, "Trajectory file");
  plot->add_option("--report", plot_reports, "Eval report.json (repeatable) for a bar chart");
  plot->add_option("--out", plot_out, "Output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (*train) {
      TrainOptions o;
      o.config = resolve(train_common);
      if (train_episodes) o.config.ppo.episodes = *train_episodes;
      o.episodes = o.config.ppo.episodes;
      o.scenarios = train_scenarios.empty() ? std::vector<std::string>{"cluttered", "circle6"}
                                            : train_scenarios;
      o.seed = train_seed;
      o.checkpoint_every = checkpoint_every;
      o.kind = kind_from_name(train_mode);
      if (!init_path.empty()) o.init = init_path;
      o.out = train_out;
      cmd_train(o, out);
    } else if (*eval) {
      EvalOptions o;
      o.config = resolve(eval_common);
      o.mode = eval_mode_from_name(eval_mode);
      o.scenario = eval_scenario;
      if (!eval_checkpoint.empty()) o.checkpoint = eval_checkpoint;
      o.seed = eval_seed;
      o.seeds = eval_seeds;
      o.deterministic = deterministic;
      o.out = eval_out;
      cmd_eval(o, out);
    } else if (*replay) {
      cmd_replay(replay_target, out);
    } else if (*plot) {
      if (plot_trajectory.empty() == plot_reports.empty()) {
        throw ConfigError("plot needs either a trajectory file or one or more --report files");
      }
      if (!plot_trajectory.empty()) {
        cmd_plot_trajectory(plot_trajectory, plot_out);
      } else {
        cmd_plot_reports({plot_reports.begin(), plot_reports.end()}, plot_out);
      }
      out << "wrote " << plot_out << "\n";
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const RunAbort& e) {
    err << "aborted: " << e.what() << "\n";
    return kExitAbort;
  } catch (const std::exception& e) {
    err << "aborted: " << e.what() << "\n";
    return kExitAbort;
  }
  return kExitOk;
}

}  // namespace rpf::cli
