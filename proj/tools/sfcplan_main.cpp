// Command-line frontend: training, benchmarking, single-shot planning, map
// generation and conversion. Options resolve as defaults < --config file <
// explicit flags.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "sfcplan/bench.hpp"
#include "sfcplan/config.hpp"
#include "sfcplan/errors.hpp"
#include "sfcplan/map_io.hpp"
#include "sfcplan/rng.hpp"
#include "sfcplan/table_io.hpp"
#include "sfcplan/trainer.hpp"

namespace {

using namespace sfcplan;

Eigen::Vector3d parseXyz(const std::string& text, const char* what) {
  Eigen::Vector3d v;
  if (std::sscanf(text.c_str(), "%lf,%lf,%lf", &v.x(), &v.y(), &v.z()) != 3)
    throw ConfigError(std::string(what) + ": expected x,y,z got '" + text + "'");
  return v;
}

KeyValueConfig loadConfigFile(const std::string& path) {
  if (path.empty()) return {};
  return KeyValueConfig::fromFile(path);
}

int cmdTrain(const std::string& config_path, const CLI::App& cmd, double v_max,
             std::uint64_t seed, long steps, double wall_minutes, int threads,
             int explore, bool uniform_walls, bool easy_half, int eval_period,
             int eval_episodes, std::string out_dir) {
  KeyValueConfig file = loadConfigFile(config_path);
  auto unset = [&cmd](const char* flag) { return cmd.count(flag) == 0; };
  if (unset("--vmax")) v_max = file.getDouble("v_max", v_max);
  if (unset("--seed")) seed = (std::uint64_t)file.getInt("seed", (int)seed);
  if (unset("--steps")) steps = file.getInt("steps", (int)steps);
  if (unset("--wall-minutes"))
    wall_minutes = file.getDouble("wall_minutes", wall_minutes);
  if (unset("--threads")) threads = file.getInt("threads", threads);
  if (unset("--explore")) explore = file.getInt("explore", explore);
  if (unset("--uniform-walls"))
    uniform_walls = file.getBool("uniform_walls", uniform_walls);
  if (unset("--easy-half")) easy_half = file.getBool("easy_half", easy_half);
  if (unset("--eval-period")) eval_period = file.getInt("eval_period", eval_period);
  if (unset("--eval-episodes"))
    eval_episodes = file.getInt("eval_episodes", eval_episodes);
  if (unset("--out")) out_dir = file.getString("out", out_dir);

  TrainConfig cfg = makeTrainConfig(v_max, seed);
  cfg.max_train_steps = steps;
  cfg.max_wall_seconds = wall_minutes * 60.0;
  cfg.sampler_threads = threads;
  cfg.explore_trajectories = explore;
  cfg.eval_period = eval_period;
  cfg.eval_episodes = eval_episodes;
  cfg.eval_easy_half = easy_half;
  cfg.out_dir = out_dir;
  if (uniform_walls) {
    // Fixed wall spacing at the hard end of the progression.
    cfg.curriculum.spacing_near = cfg.curriculum.spacing_far;
  }
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  std::printf("train: v_max=%.3g seed=%llu steps=%ld wall=%.1f min threads=%d\n",
              cfg.v_max, (unsigned long long)cfg.seed, cfg.max_train_steps,
              wall_minutes, cfg.sampler_threads);
  Trainer trainer(cfg);
  trainer.run();

  const auto& hist = trainer.history();
  double last_eval = -1.0, last_time = 0.0;
  for (const TrainLogRow& row : hist)
    if (row.eval_success >= 0.0) {
      last_eval = row.eval_success;
      last_time = row.eval_time;
    }
  std::printf("done: steps=%ld episodes=%ld", hist.empty() ? 0 : hist.back().step,
              trainer.totalEpisodes());
  if (last_eval >= 0.0)
    std::printf(" eval_success=%.3f eval_time=%.2fs", last_eval, last_time);
  std::printf("\n");
  if (!out_dir.empty())
    std::printf("checkpoint: %s/ckpt_final.bin\n", out_dir.c_str());
  return 0;
}

int cmdBench(const std::string& config_path, const CLI::App& cmd, BenchConfig cfg,
             std::string profile_name) {
  KeyValueConfig file = loadConfigFile(config_path);
  auto unset = [&cmd](const char* flag) { return cmd.count(flag) == 0; };
  if (unset("--scenario")) cfg.scenario = file.getString("scenario", cfg.scenario);
  if (unset("--vmax")) cfg.v_max = file.getDouble("v_max", cfg.v_max);
  if (unset("--episodes")) cfg.episodes = file.getInt("episodes", cfg.episodes);
  if (unset("--seed")) cfg.seed = (std::uint64_t)file.getInt("seed", (int)cfg.seed);
  if (unset("--profile")) profile_name = file.getString("profile", profile_name);
  if (unset("--checkpoint"))
    cfg.checkpoint = file.getString("checkpoint", cfg.checkpoint);
  if (unset("--out")) cfg.out_dir = file.getString("out", cfg.out_dir);
  cfg.profile = parseProfile(profile_name);

  if (cfg.checkpoint.empty()) throw ConfigError("bench requires --checkpoint");
  SdcqAgent agent = SdcqAgent::load(cfg.checkpoint);
  if (agent.config().obs_dim != cfg.env.observationSize())
    throw ConfigError("checkpoint observation width " +
                      std::to_string(agent.config().obs_dim) +
                      " does not match the environment's " +
                      std::to_string(cfg.env.observationSize()));
  if (!cfg.out_dir.empty()) std::filesystem::create_directories(cfg.out_dir);

  BenchReport report = runBenchmark(cfg, agent.policy());
  const std::string text = report.toText();
  std::fputs(text.c_str(), stdout);
  if (!cfg.out_dir.empty()) {
    std::ofstream out(cfg.out_dir + "/report.txt");
    out << text;
  }
  return report.successes == report.cfg.episodes ? 0 : 1;
}

int cmdEval(const std::string& checkpoint, const std::string& scenario,
            double v_max, int episodes, std::uint64_t seed, bool easy_half) {
  SdcqAgent agent = SdcqAgent::load(checkpoint);
  ScenarioSpec spec = scenarioByName(scenario, seed);
  EnvConfig env;
  env.action = ActionSpec::fromVmax(v_max);
  spec.check_inflation = env.inflate_voxels;
  spec.flight_z_min = env.corridor.z_min;
  spec.flight_z_max = env.corridor.z_max;
  EvalResult r = evaluatePolicy(agent.policy(), spec, env, episodes, seed, easy_half);
  std::printf("eval: %d/%d success (%.3f), mean_time=%.2fs mean_reward=%.2f\n",
              r.successes, r.episodes, r.success_rate, r.mean_time_success,
              r.mean_reward);
  return 0;
}

int cmdPlan(const std::string& map_path, const std::string& checkpoint,
            const std::string& start_s, const std::string& goal_s, double v_max,
            const std::string& profile_name, const std::string& out_dir) {
  OccupancyGrid map = importMap(map_path);
  SdcqAgent agent = SdcqAgent::load(checkpoint);
  EnvConfig cfg;
  cfg.action = ActionSpec::fromVmax(v_max);
  cfg.reward = profileRewards(parseProfile(profile_name));
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  PlanTiming t = planOnce(map, parseXyz(start_s, "--start"),
                          parseXyz(goal_s, "--goal"), agent.policy(), cfg, out_dir);
  std::printf("plan: %s in %d steps\n", t.success ? "success" : "no-arrival",
              t.steps);
  std::printf("timing: search=%.3fms corridor=%.3fms rollout=%.3fms total=%.3fms\n",
              t.search_ms, t.corridor_ms, t.rollout_ms, t.total_ms);
  return t.success ? 0 : 1;
}

int cmdGenMap(const std::string& scenario, std::uint64_t seed,
              const std::string& out_path, const std::string& format) {
  ScenarioSpec spec = scenarioByName(scenario, seed);
  Scenario sc = generateScenario(spec);
  const MapFormat fmt = format == "text" ? MapFormat::Text : MapFormat::Binary;
  exportMap(*sc.grid, out_path, fmt);
  const auto& d = sc.grid->dims();
  std::printf("map: %dx%dx%d voxels, %zu occupied, attempts=%d\n", d.x(), d.y(),
              d.z(), sc.grid->occupiedCount(), sc.attempts);
  std::printf("start=%.2f,%.2f,%.2f goal=%.2f,%.2f,%.2f\n", sc.start.x(),
              sc.start.y(), sc.start.z(), sc.goal.x(), sc.goal.y(), sc.goal.z());
  return 0;
}

int cmdExport(const std::string& in_path, const std::string& out_path,
              const std::string& format) {
  OccupancyGrid map = importMap(in_path);
  const MapFormat fmt = format == "text" ? MapFormat::Text : MapFormat::Binary;
  exportMap(map, out_path, fmt);
  const auto& d = map.dims();
  std::printf("wrote %s (%dx%dx%d voxels, %zu occupied)\n", out_path.c_str(),
              d.x(), d.y(), d.z(), map.occupiedCount());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corridor-following flight planner"};
  app.require_subcommand(1);

  std::string config_path;

  // train
  auto* train = app.add_subcommand("train", "Train a policy");
  double t_vmax = 4.0;
  std::uint64_t t_seed = 1;
  long t_steps = 4000;
  double t_wall = 0.0;
  int t_threads = 1, t_explore = 20, t_eval_period = 250, t_eval_episodes = 8;
  bool t_uniform = false, t_easy = false;
  std::string t_out = "train_out";
  train->add_option("--vmax", t_vmax, "Speed cap, m/s");
  train->add_option("--seed", t_seed, "Master seed");
  train->add_option("--steps", t_steps, "Gradient step budget");
  train->add_option("--wall-minutes", t_wall, "Wall-clock budget (0 = off)");
  train->add_option("--threads", t_threads, "Sampler threads (1 = deterministic)");
  train->add_option("--explore", t_explore, "Exploration rollouts per cycle");
  train->add_flag("--uniform-walls", t_uniform, "Disable the spacing progression");
  train->add_flag("--easy-half", t_easy, "Evaluate on half-length courses");
  train->add_option("--eval-period", t_eval_period, "Train steps between evals");
  train->add_option("--eval-episodes", t_eval_episodes, "Episodes per eval");
  train->add_option("--out", t_out, "Output directory");
  train->add_option("--config", config_path, "key=value config file");

  // bench
  auto* bench = app.add_subcommand("bench", "Benchmark a trained policy");
  BenchConfig b_cfg;
  std::string b_profile = "corb_f";
  bench->add_option("--checkpoint", b_cfg.checkpoint, "Agent checkpoint");
  bench->add_option("--scenario", b_cfg.scenario,
                    "sparse_walls|dense_walls|forest|curriculum_walls");
  bench->add_option("--vmax", b_cfg.v_max, "Speed cap, m/s");
  bench->add_option("--profile", b_profile, "corb_f|corb_s|default");
  bench->add_option("--episodes", b_cfg.episodes, "Course count");
  bench->add_option("--seed", b_cfg.seed, "Course seed base");
  bench->add_option("--out", b_cfg.out_dir, "Report and export directory");
  bench->add_option("--config", config_path, "key=value config file");

  // eval
  auto* eval = app.add_subcommand("eval", "Quick greedy success-rate check");
  std::string e_ckpt, e_scenario = "curriculum_walls";
  double e_vmax = 4.0;
  int e_episodes = 20;
  std::uint64_t e_seed = 1;
  bool e_easy = false;
  eval->add_option("--checkpoint", e_ckpt, "Agent checkpoint")->required();
  eval->add_option("--scenario", e_scenario, "Course preset");
  eval->add_option("--vmax", e_vmax, "Speed cap, m/s");
  eval->add_option("--episodes", e_episodes, "Episode count");
  eval->add_option("--seed", e_seed, "Course seed base");
  eval->add_flag("--easy-half", e_easy, "Move goals to the course midpoint");

  // plan
  auto* plan = app.add_subcommand("plan", "One planning pass over a map file");
  std::string p_map, p_ckpt, p_start = "0,-32,1", p_goal = "0,32,1";
  std::string p_profile = "corb_f", p_out;
  double p_vmax = 7.0;
  plan->add_option("--map", p_map, "Map file")->required();
  plan->add_option("--checkpoint", p_ckpt, "Agent checkpoint")->required();
  plan->add_option("--start", p_start, "x,y,z");
  plan->add_option("--goal", p_goal, "x,y,z");
  plan->add_option("--vmax", p_vmax, "Speed cap, m/s");
  plan->add_option("--profile", p_profile, "corb_f|corb_s|default");
  plan->add_option("--out", p_out, "Export directory");

  // gen-map
  auto* gen = app.add_subcommand("gen-map", "Generate a random course map");
  std::string g_scenario = "sparse_walls", g_out = "map.bin", g_format = "bin";
  std::uint64_t g_seed = 1;
  gen->add_option("--scenario", g_scenario, "Course preset");
  gen->add_option("--seed", g_seed, "Course seed");
  gen->add_option("--out", g_out, "Output map path");
  gen->add_option("--format", g_format, "bin|text");

  // export
  auto* exp = app.add_subcommand("export", "Convert a map between formats");
  std::string x_in, x_out, x_format = "text";
  exp->add_option("--in", x_in, "Input map")->required();
  exp->add_option("--out", x_out, "Output map")->required();
  exp->add_option("--format", x_format, "bin|text");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed())
      return cmdTrain(config_path, *train, t_vmax, t_seed, t_steps, t_wall,
                      t_threads, t_explore, t_uniform, t_easy, t_eval_period,
                      t_eval_episodes, t_out);
    if (bench->parsed()) return cmdBench(config_path, *bench, b_cfg, b_profile);
    if (eval->parsed())
      return cmdEval(e_ckpt, e_scenario, e_vmax, e_episodes, e_seed, e_easy);
    if (plan->parsed())
      return cmdPlan(p_map, p_ckpt, p_start, p_goal, p_vmax, p_profile, p_out);
    if (gen->parsed()) return cmdGenMap(g_scenario, g_seed, g_out, g_format);
    if (exp->parsed()) return cmdExport(x_in, x_out, x_format);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
