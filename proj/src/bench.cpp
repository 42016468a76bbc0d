#include "sfcplan/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <optional>
#include <sstream>

#include "sfcplan/astar.hpp"
#include "sfcplan/errors.hpp"
#include "sfcplan/polyline.hpp"
#include "sfcplan/rng.hpp"
#include "sfcplan/table_io.hpp"

namespace sfcplan {
namespace {

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

// Previously reported results for the matching course family and speed cap,
// measured with an external simulator stack. Shown in reports purely as
// context for the local numbers.
struct ReferenceRow {
  const char* scenario;
  int v;
  int fast_succ, safe_succ;  // out of 20
  double fast_time, safe_time;
};

constexpr ReferenceRow kReference[] = {
    {"sparse_walls", 7, 20, 20, 10.4, 12.7},
    {"forest", 7, 20, 20, 13.2, 13.1},
    {"dense_walls", 7, 20, 20, 13.3, 13.9},
    {"sparse_walls", 10, 17, 20, 9.3, 9.6},
    {"forest", 10, 19, 19, 8.2, 10.2},
    {"dense_walls", 10, 15, 19, 9.4, 11.1},
    {"sparse_walls", 15, 18, 20, 7.5, 7.7},
    {"forest", 15, 17, 19, 6.7, 9.3},
    {"dense_walls", 15, 10, 18, 7.9, 8.9},
};

void appendReference(std::ostringstream& out, const std::string& scenario,
                     double v_max) {
  for (const ReferenceRow& row : kReference) {
    if (scenario != row.scenario) continue;
    if (std::abs(v_max - row.v) > 1e-9) continue;
    out << "# [reference] external baseline, same course family at v_max="
        << row.v << ":\n";
    out << "#   fast profile: " << row.fast_succ << "/20 success, "
        << fmt("%.1f", row.fast_time) << " s mean flight time\n";
    out << "#   safe profile: " << row.safe_succ << "/20 success, "
        << fmt("%.1f", row.safe_time) << " s mean flight time\n";
    return;
  }
}

}  // namespace

RewardConfig profileRewards(RewardProfile p) {
  RewardConfig r;
  switch (p) {
    case RewardProfile::Default:
      r.k_p = -30.0;
      r.k_f = 5.0;
      break;
    case RewardProfile::Fast:
      r.k_p = -30.0;
      r.k_f = 8.0;
      break;
    case RewardProfile::Safe:
      r.k_p = -50.0;
      r.k_f = 3.0;
      break;
  }
  r.k_s = 50.0;
  return r;
}

RewardProfile parseProfile(const std::string& name) {
  if (name == "corb_f" || name == "fast") return RewardProfile::Fast;
  if (name == "corb_s" || name == "safe") return RewardProfile::Safe;
  if (name == "default") return RewardProfile::Default;
  throw ConfigError("unknown reward profile '" + name +
                    "' (expected corb_f, corb_s, or default)");
}

const char* profileName(RewardProfile p) {
  switch (p) {
    case RewardProfile::Fast:
      return "corb_f";
    case RewardProfile::Safe:
      return "corb_s";
    default:
      return "default";
  }
}

ScenarioSpec scenarioByName(const std::string& name, std::uint64_t seed) {
  if (name == "sparse_walls") return ScenarioSpec::sparseWalls(seed);
  if (name == "dense_walls") return ScenarioSpec::denseWalls(seed);
  if (name == "forest") return ScenarioSpec::forest(seed);
  if (name == "curriculum_walls") return ScenarioSpec::curriculumWalls(seed);
  throw ConfigError("unknown scenario '" + name +
                    "' (expected sparse_walls, dense_walls, forest, or "
                    "curriculum_walls)");
}

AuditResult auditTrajectory(const SafeFlightCorridor& sfc,
                            const BsplineTrajectory& traj, double dt) {
  AuditResult r;
  const double hi = traj.maxTau();
  for (double tau = traj.minTau(); tau <= hi + 1e-12; tau += dt) {
    ++r.points;
    if (!sfc.locate(traj.evalPosition(std::min(tau, hi))).has_value())
      ++r.violations;
  }
  return r;
}

BenchReport runBenchmark(const BenchConfig& cfg, const SdcqAgent::Policy& policy) {
  BenchReport report;
  report.cfg = cfg;
  report.cfg.env.action = ActionSpec::fromVmax(cfg.v_max);
  report.cfg.env.reward = profileRewards(cfg.profile);
  report.cfg.env.start_noise = false;
  const EnvConfig& env = report.cfg.env;

  PolicyFn greedy = [&policy](const Eigen::VectorXd& obs) {
    return policy.greedy(obs);
  };

  double time_sum = 0.0;
  double peak_sum = 0.0;
  for (int e = 0; e < cfg.episodes; ++e) {
    // A course that cannot even be planned is a map-generation artifact, not
    // a policy failure; deterministically roll a replacement instead.
    Scenario scenario;
    std::optional<PlannerEnv> planner;
    ScenarioSpec spec;
    for (std::uint64_t salt = 0; !planner.has_value(); ++salt) {
      spec = scenarioByName(cfg.scenario,
                            mixSeed(cfg.seed, static_cast<std::uint64_t>(e) + 100000 * salt));
      spec.check_inflation = env.inflate_voxels;
      spec.flight_z_min = env.corridor.z_min;
      spec.flight_z_max = env.corridor.z_max;
      spec.max_segment_len = env.max_segment_len;
      scenario = generateScenario(spec);
      try {
        planner.emplace(PlannerEnv::fromScenario(scenario, env));
      } catch (const PlanningError&) {
        if (salt >= 16) throw;
      }
    }
    KinematicState at_rest;
    at_rest.position = scenario.start;
    EpisodeResult ep = runEpisode(*planner, planner->makeStartState(at_rest), greedy);

    BenchEpisode row;
    row.index = e;
    row.seed = spec.seed;
    row.success = ep.success;
    row.cause = ep.cause;
    row.steps = ep.steps;
    row.time_s = ep.episode_time;
    row.peak_speed = ep.peak_speed;
    row.final_corridor = ep.final_corridor_index;
    report.episodes.push_back(row);

    peak_sum += ep.peak_speed;
    if (ep.success) {
      ++report.successes;
      time_sum += ep.episode_time;
      const AuditResult audit =
          auditTrajectory(planner->corridor(), ep.trajectory, env.dtau / 100.0);
      report.audit_points += audit.points;
      report.audit_violations += audit.violations;
    }

    if (!cfg.out_dir.empty()) {
      char name[64];
      std::snprintf(name, sizeof(name), "/ep_%02d_traj.txt", e);
      writeTrajectoryFile(cfg.out_dir + name, ep.trajectory);
      std::snprintf(name, sizeof(name), "/ep_%02d_steps.txt", e);
      writeEpisodeFile(cfg.out_dir + name, ep);
    }
  }

  const int n = std::max(1, cfg.episodes);
  report.success_rate = static_cast<double>(report.successes) / n;
  report.mean_time_success =
      report.successes > 0 ? time_sum / report.successes : 0.0;
  report.mean_peak_speed = peak_sum / n;
  return report;
}

std::string BenchReport::toText() const {
  std::ostringstream out;
  out << "# [config]\n";
  out << "scenario = " << cfg.scenario << "\n";
  out << "v_max = " << fmt("%.17g", cfg.v_max) << "\n";
  out << "episodes = " << cfg.episodes << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "profile = " << profileName(cfg.profile) << "\n";
  if (!cfg.checkpoint.empty()) out << "checkpoint = " << cfg.checkpoint << "\n";
  out << "k_p = " << fmt("%.17g", cfg.env.reward.k_p) << "\n";
  out << "k_f = " << fmt("%.17g", cfg.env.reward.k_f) << "\n";
  out << "k_s = " << fmt("%.17g", cfg.env.reward.k_s) << "\n";

  out << "# [episodes]\n";
  out << "# ep seed success cause steps time_s peak_speed final_corridor\n";
  for (const BenchEpisode& e : episodes) {
    out << "# " << e.index << " " << e.seed << " " << (e.success ? 1 : 0) << " "
        << episodeEndName(e.cause) << " " << e.steps << " "
        << fmt("%.3f", e.time_s) << " " << fmt("%.3f", e.peak_speed) << " "
        << e.final_corridor << "\n";
  }

  out << "# [summary]\n";
  out << "successes = " << successes << "\n";
  out << "success_rate = " << fmt("%.6f", success_rate) << "\n";
  out << "mean_time_success = " << fmt("%.6f", mean_time_success) << "\n";
  out << "mean_peak_speed = " << fmt("%.6f", mean_peak_speed) << "\n";
  out << "audit_points = " << audit_points << "\n";
  out << "audit_violations = " << audit_violations << "\n";

  appendReference(out, cfg.scenario, cfg.v_max);
  return out.str();
}

PlanTiming planOnce(const OccupancyGrid& raw_map, const Eigen::Vector3d& start,
                    const Eigen::Vector3d& goal, const SdcqAgent::Policy& policy,
                    const EnvConfig& cfg, const std::string& out_dir) {
  using Clock = std::chrono::steady_clock;
  auto ms = [](Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };

  PlanTiming timing;
  const auto t0 = Clock::now();

  auto inflated =
      std::make_shared<OccupancyGrid>(raw_map.inflated(cfg.inflate_voxels));
  AstarOptions opts;
  opts.z_min = cfg.corridor.z_min;
  opts.z_max = cfg.corridor.z_max;
  VoxelPath path = astar3d(*inflated, start, goal, opts);
  path.waypoints.front() = start;
  path.waypoints.back() = goal;
  if (path.waypoints.size() == 1) path.waypoints.push_back(goal);
  ReferencePolyline poly = simplifyPolyline(*inflated, path);
  poly = splitLongSegments(poly, cfg.max_segment_len);
  const auto t1 = Clock::now();
  timing.search_ms = ms(t0, t1);

  SafeFlightCorridor sfc = SafeFlightCorridor::build(*inflated, poly, cfg.corridor);
  const auto t2 = Clock::now();
  timing.corridor_ms = ms(t1, t2);

  PlannerEnv env = PlannerEnv::fromParts(std::move(inflated), std::move(sfc), cfg);
  KinematicState at_rest;
  at_rest.position = start;
  PlannerState s0 = env.makeStartState(at_rest);
  EpisodeResult ep = runEpisode(env, s0, [&policy](const Eigen::VectorXd& obs) {
    return policy.greedy(obs);
  });
  const auto t3 = Clock::now();
  timing.rollout_ms = ms(t2, t3);
  timing.total_ms = ms(t0, t3);
  timing.success = ep.success;
  timing.steps = ep.steps;

  if (!out_dir.empty()) {
    writePolylineFile(out_dir + "/plan_polyline.txt", env.corridor().polyline());
    writeCorridorFile(out_dir + "/plan_corridor.txt", env.corridor());
    writeTrajectoryFile(out_dir + "/plan_traj.txt", ep.trajectory);
    writeSampledTrajectoryFile(out_dir + "/plan_traj_dense.txt", ep.trajectory,
                               cfg.dtau / 10.0);
    writeEpisodeFile(out_dir + "/plan_steps.txt", ep);
  }
  return timing;
}

}  // namespace sfcplan
