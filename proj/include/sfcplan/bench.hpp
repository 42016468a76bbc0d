#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfcplan/planner_env.hpp"
#include "sfcplan/scenario.hpp"
#include "sfcplan/sdcq.hpp"

namespace sfcplan {

// Reward gain presets: the default is the training balance, the fast profile
// trades collision margin for progress, the safe profile the reverse.
enum class RewardProfile { Default, Fast, Safe };

RewardConfig profileRewards(RewardProfile p);
RewardProfile parseProfile(const std::string& name);  // default|corb_f|corb_s
const char* profileName(RewardProfile p);

// Course presets addressable from the command line.
ScenarioSpec scenarioByName(const std::string& name, std::uint64_t seed);

struct BenchConfig {
  std::string scenario = "sparse_walls";
  double v_max = 7.0;
  int episodes = 20;
  std::uint64_t seed = 1;
  RewardProfile profile = RewardProfile::Fast;
  std::string checkpoint;  // informational echo; the policy is passed in
  std::string out_dir;     // per-episode exports and report.txt; empty = none
  EnvConfig env;           // action/reward fields are derived before running
};

struct BenchEpisode {
  int index = 0;
  std::uint64_t seed = 0;
  bool success = false;
  EpisodeEnd cause = EpisodeEnd::Horizon;
  int steps = 0;
  double time_s = 0.0;
  double peak_speed = 0.0;
  int final_corridor = 0;
};

struct BenchReport {
  BenchConfig cfg;
  std::vector<BenchEpisode> episodes;
  int successes = 0;
  double success_rate = 0.0;
  double mean_time_success = 0.0;
  double mean_peak_speed = 0.0;
  long audit_points = 0;      // fine trajectory resamples on successful runs
  long audit_violations = 0;  // of those, points outside the corridor

  std::string toText() const;
};

struct AuditResult {
  long points = 0;
  long violations = 0;
};

// Post-hoc safety check: resamples the curve every dt seconds across its
// whole span and counts samples that fall outside every sub-corridor.
AuditResult auditTrajectory(const SafeFlightCorridor& sfc,
                            const BsplineTrajectory& traj, double dt);

// Greedy policy over `episodes` fresh courses; deterministic in (cfg, policy).
BenchReport runBenchmark(const BenchConfig& cfg, const SdcqAgent::Policy& policy);

struct PlanTiming {
  double search_ms = 0.0;    // inflate + voxel search + shortcut + split
  double corridor_ms = 0.0;  // corridor construction
  double rollout_ms = 0.0;   // greedy episode
  double total_ms = 0.0;
  bool success = false;
  int steps = 0;
};

// Single planning pass over an existing map, with stage timings. Writes
// polyline/corridor/trajectory exports into out_dir when given.
PlanTiming planOnce(const OccupancyGrid& raw_map, const Eigen::Vector3d& start,
                    const Eigen::Vector3d& goal, const SdcqAgent::Policy& policy,
                    const EnvConfig& cfg, const std::string& out_dir = "");

}  // namespace sfcplan
