#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "sfcplan/bspline.hpp"
#include "sfcplan/corridor.hpp"
#include "sfcplan/scenario.hpp"

namespace sfcplan {

// Kinodynamic envelope. The derived limits scale with the speed cap: maximum
// acceleration twice the speed cap, jerk cap 50 + 10 * v_max, vertical speed
// half the horizontal cap, vertical acceleration at most 6.
struct ActionSpec {
  double v_max = 4.0;
  double a_max = 8.0;
  double j_max = 90.0;
  double vz_max = 2.0;
  double az_max = 6.0;
  double eps = 1e-9;

  static ActionSpec fromVmax(double v_max);
};

// Reward gains: collision penalty magnitude |k_p| (sign-insensitive),
// progress gain k_f, arrival bonus k_s.
struct RewardConfig {
  double k_p = -30.0;
  double k_f = 5.0;
  double k_s = 50.0;
};

struct EnvConfig {
  double dtau = 0.3;      // knot interval, seconds
  int horizon = 100;      // control points per episode
  int window = 9;         // sub-corridors observed ahead
  double pos_scale = 10.0;
  int inflate_voxels = 1;
  double max_segment_len = 3.0;
  bool start_noise = false;
  double noise_pos_sigma = 0.05;
  double noise_vel_sigma = 0.1;
  ActionSpec action;
  RewardConfig reward;
  CorridorConfig corridor;

  int observationSize() const { return 9 + 6 * window + 2 + 1; }
};

// Unit-cube action to acceleration: the horizontal pair keeps its direction
// but its magnitude becomes max(|ax|, |ay|), so axis-aligned inputs keep full
// authority and diagonal corners do not exceed it; the vertical component
// passes through. Components are then scaled by their acceleration limits.
Eigen::Vector3d transformAction(const Eigen::Vector3d& alpha, const ActionSpec& spec);

// Clamps the horizontal speed to v_max (direction preserved) and the vertical
// component to +-vz_max.
Eigen::Vector3d clampVelocity(const Eigen::Vector3d& v, const ActionSpec& spec);

// Signed sum of spine segment lengths between sub-corridor m and n (3D);
// positive when n > m, negative when the agent fell back.
double rewardFollow(const SafeFlightCorridor& sfc, int m, int n);

// Scales positive progress down once jerk exceeds half its cap:
// factor (j_max - j) / (j_max / 2) inside (j_max/2, j_max], 0 beyond, 1 below.
// Non-positive progress passes through.
double jerkDiscount(double r_follow, double jerk, double j_max);

struct PlannerState {
  Eigen::Vector3d pm2, pm1, p;  // control point window q_{t-2}, q_{t-1}, q_t
  Eigen::Vector3d v;            // (q_t - q_{t-1}) / dtau
  int corridor_index = 0;
  int t = 2;  // knot index of the current window head
};

struct StepDiagnostics {
  int r_p = 0;           // 0 free, -1 when a between-knot sample leaves the corridor
  double r_f_raw = 0.0;  // progress before the jerk discount
  double r_f = 0.0;
  int r_s = 0;
  double jerk = 0.0;
};

struct StepOutcome {
  Eigen::VectorXd observation;  // of the successor state
  double reward = 0.0;
  bool terminated = false;  // collision or jerk violation
  bool success = false;     // reached the final sub-corridor
  StepDiagnostics diag;
};

class PlannerEnv {
 public:
  // Runs the geometric pipeline: inflate, voxel search inside the flight
  // band, shortcut, split long segments, then corridor construction, with
  // the exact start/goal substituted for their voxel centers.
  static PlannerEnv fromScenario(const Scenario& scenario, const EnvConfig& cfg);
  static PlannerEnv fromParts(std::shared_ptr<const OccupancyGrid> inflated_map,
                              SafeFlightCorridor sfc, const EnvConfig& cfg);

  const EnvConfig& config() const { return cfg_; }
  const SafeFlightCorridor& corridor() const { return sfc_; }
  const OccupancyGrid& map() const { return *map_; }
  int lastIndex() const { return sfc_.size() - 1; }

  PlannerState makeStartState(const KinematicState& state) const;
  // Adds Gaussian position/velocity noise when configured; a noised position
  // that leaves the corridor is redrawn so episodes never start terminated.
  PlannerState makeStartState(const KinematicState& state, std::mt19937_64& rng) const;

  Eigen::VectorXd observation(const PlannerState& s) const;

  // Pure transition: appends one control point from the cube action and
  // scores it. Safe to call concurrently on the same environment.
  std::pair<StepOutcome, PlannerState> step(const PlannerState& s,
                                            const Eigen::Vector3d& alpha) const;

 private:
  std::shared_ptr<const OccupancyGrid> map_;
  SafeFlightCorridor sfc_;
  EnvConfig cfg_;
};

using PolicyFn = std::function<Eigen::Vector3d(const Eigen::VectorXd&)>;

enum class EpisodeEnd { Success, Collision, JerkViolation, Horizon };

struct StepRow {
  int t = 0;
  Eigen::Vector3d alpha = Eigen::Vector3d::Zero();
  double reward = 0.0;
  StepDiagnostics diag;
  Eigen::Vector3d knot = Eigen::Vector3d::Zero();
  int corridor_index = 0;
};

struct EpisodeResult {
  BsplineTrajectory trajectory;
  bool success = false;
  EpisodeEnd cause = EpisodeEnd::Horizon;
  int steps = 0;
  double total_reward = 0.0;
  double episode_time = 0.0;  // steps * dtau
  double peak_speed = 0.0;    // max velocity control point magnitude
  int final_corridor_index = 0;
  std::vector<StepRow> rows;
};

// Runs a full episode from `start` under `policy` until success, collision,
// jerk violation, or the step horizon.
EpisodeResult runEpisode(const PlannerEnv& env, const PlannerState& start,
                         const PolicyFn& policy);

// Convenience wrapper: builds the environment for a scenario and rolls out
// from the scenario start at rest.
EpisodeResult rollout(const Scenario& scenario, const EnvConfig& cfg,
                      const PolicyFn& policy);

}  // namespace sfcplan
