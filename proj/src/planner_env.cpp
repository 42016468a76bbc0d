#include "sfcplan/planner_env.hpp"

#include <cmath>

#include "sfcplan/astar.hpp"
#include "sfcplan/errors.hpp"
#include "sfcplan/polyline.hpp"

namespace sfcplan {

ActionSpec ActionSpec::fromVmax(double v_max) {
  ActionSpec s;
  s.v_max = v_max;
  s.a_max = 2.0 * v_max;
  s.j_max = 50.0 + 10.0 * v_max;
  s.vz_max = v_max / 2.0;
  s.az_max = std::min(s.a_max, 6.0);
  return s;
}

Eigen::Vector3d transformAction(const Eigen::Vector3d& alpha, const ActionSpec& spec) {
  const double ax = alpha.x(), ay = alpha.y();
  const double norm = std::hypot(ax, ay);
  Eigen::Vector3d out;
  if (norm < spec.eps) {
    out.x() = 0.0;
    out.y() = 0.0;
  } else {
    const double m = std::max(std::abs(ax), std::abs(ay));
    out.x() = spec.a_max * m * ax / norm;
    out.y() = spec.a_max * m * ay / norm;
  }
  out.z() = spec.az_max * alpha.z();
  return out;
}

Eigen::Vector3d clampVelocity(const Eigen::Vector3d& v, const ActionSpec& spec) {
  Eigen::Vector3d out = v;
  const double h = std::hypot(v.x(), v.y());
  if (h > spec.v_max) {
    out.x() *= spec.v_max / h;
    out.y() *= spec.v_max / h;
  }
  out.z() = std::clamp(v.z(), -spec.vz_max, spec.vz_max);
  return out;
}

double rewardFollow(const SafeFlightCorridor& sfc, int m, int n) {
  if (m == n) return 0.0;
  double s = 0.0;
  const int lo = std::min(m, n), hi = std::max(m, n);
  for (int i = lo; i < hi; ++i) s += sfc.segmentLength3d(i);
  return n > m ? s : -s;
}

double jerkDiscount(double r_follow, double jerk, double j_max) {
  if (r_follow <= 0.0) return r_follow;
  const double half = j_max / 2.0;
  if (jerk <= half) return r_follow;
  if (jerk >= j_max) return 0.0;
  return r_follow * (j_max - jerk) / half;
}

PlannerEnv PlannerEnv::fromScenario(const Scenario& scenario, const EnvConfig& cfg) {
  auto inflated = std::make_shared<OccupancyGrid>(
      scenario.grid->inflated(cfg.inflate_voxels));

  AstarOptions opts;
  opts.z_min = cfg.corridor.z_min;
  opts.z_max = cfg.corridor.z_max;
  VoxelPath path = astar3d(*inflated, scenario.start, scenario.goal, opts);
  // Snap the endpoints from their voxel centers to the exact start and goal
  // so the corridor begins where the vehicle actually is.
  path.waypoints.front() = scenario.start;
  path.waypoints.back() = scenario.goal;
  if (path.waypoints.size() == 1) path.waypoints.push_back(scenario.goal);

  ReferencePolyline poly = simplifyPolyline(*inflated, path);
  poly = splitLongSegments(poly, cfg.max_segment_len);
  SafeFlightCorridor sfc = SafeFlightCorridor::build(*inflated, poly, cfg.corridor);
  return fromParts(std::move(inflated), std::move(sfc), cfg);
}

PlannerEnv PlannerEnv::fromParts(std::shared_ptr<const OccupancyGrid> inflated_map,
                                 SafeFlightCorridor sfc, const EnvConfig& cfg) {
  PlannerEnv env;
  env.map_ = std::move(inflated_map);
  env.sfc_ = std::move(sfc);
  env.cfg_ = cfg;
  return env;
}

PlannerState PlannerEnv::makeStartState(const KinematicState& state) const {
  const BsplineTrajectory traj = BsplineTrajectory::fromInitialState(state, cfg_.dtau);
  PlannerState s;
  s.pm2 = traj.controlPoint(0);
  s.pm1 = traj.controlPoint(1);
  s.p = traj.controlPoint(2);
  s.v = (s.p - s.pm1) / cfg_.dtau;
  s.t = 2;
  s.corridor_index = sfc_.locate(state.position).value_or(0);
  return s;
}

PlannerState PlannerEnv::makeStartState(const KinematicState& state,
                                        std::mt19937_64& rng) const {
  if (!cfg_.start_noise) return makeStartState(state);
  std::normal_distribution<double> gauss(0.0, 1.0);
  KinematicState noisy = state;
  for (int i = 0; i < 3; ++i)
    noisy.velocity[i] = state.velocity[i] + cfg_.noise_vel_sigma * gauss(rng);
  for (int attempt = 0; attempt < 16; ++attempt) {
    for (int i = 0; i < 3; ++i)
      noisy.position[i] = state.position[i] + cfg_.noise_pos_sigma * gauss(rng);
    if (sfc_.locate(noisy.position)) return makeStartState(noisy);
  }
  noisy.position = state.position;
  return makeStartState(noisy);
}

Eigen::VectorXd PlannerEnv::observation(const PlannerState& s) const {
  const int n = cfg_.window;
  Eigen::VectorXd obs(cfg_.observationSize());
  const Eigen::Vector3d ego = (s.pm2 + 4.0 * s.pm1 + s.p) / 6.0;
  obs.segment<3>(0) = (s.pm2 - ego) / cfg_.pos_scale;
  obs.segment<3>(3) = (s.pm1 - ego) / cfg_.pos_scale;
  obs.segment<3>(6) = (s.p - ego) / cfg_.pos_scale;

  const std::vector<double> win = sfc_.observationWindow(s.corridor_index, n, ego);
  int k = 9;
  for (int i = 0; i < 2 * (n + 1); ++i) obs[k++] = win[i] / cfg_.pos_scale;
  for (int j = 0; j < n; ++j) {
    const int base = 2 * (n + 1) + 4 * j;
    obs[k++] = win[base + 0] / cfg_.corridor.width_cap;
    obs[k++] = win[base + 1] / cfg_.corridor.width_cap;
    obs[k++] = win[base + 2] / cfg_.pos_scale;
    obs[k++] = win[base + 3] / cfg_.pos_scale;
  }
  obs[k] = static_cast<double>(s.t) / cfg_.horizon;
  return obs;
}

std::pair<StepOutcome, PlannerState> PlannerEnv::step(const PlannerState& s,
                                                      const Eigen::Vector3d& alpha) const {
  const double dt = cfg_.dtau;
  const Eigen::Vector3d accel = transformAction(alpha, cfg_.action);
  const Eigen::Vector3d v_new = clampVelocity(s.v + accel * dt, cfg_.action);
  const Eigen::Vector3d p_new = s.p + v_new * dt;

  StepOutcome out;
  out.diag.jerk =
      ((-s.pm2 + 3.0 * s.pm1 - 3.0 * s.p + p_new) / (dt * dt * dt)).norm();

  // Between-knot clearance: ten evenly spaced curve samples on the newly
  // completed piece must all stay inside some sub-corridor.
  bool clear = true;
  for (int k = 1; k <= 10; ++k) {
    const Eigen::Vector3d sample =
        BsplineTrajectory::segmentPoint(s.pm2, s.pm1, s.p, p_new, k / 10.0);
    if (!sfc_.locate(sample)) {
      clear = false;
      break;
    }
  }
  out.diag.r_p = clear ? 0 : -1;

  const Eigen::Vector3d knot_next = (s.pm1 + 4.0 * s.p + p_new) / 6.0;
  const std::optional<int> located = sfc_.locate(knot_next);
  const int n_idx = located.value_or(s.corridor_index);

  out.diag.r_f_raw = rewardFollow(sfc_, s.corridor_index, n_idx);
  out.diag.r_f = jerkDiscount(out.diag.r_f_raw, out.diag.jerk, cfg_.action.j_max);
  out.diag.r_s = (located && *located == lastIndex()) ? 1 : 0;

  out.reward = std::abs(cfg_.reward.k_p) * out.diag.r_p +
               cfg_.reward.k_f * out.diag.r_f + cfg_.reward.k_s * out.diag.r_s;
  out.terminated = (out.diag.r_p != 0) || (out.diag.jerk > cfg_.action.j_max);
  out.success = (out.diag.r_s == 1) && !out.terminated;

  PlannerState next;
  next.pm2 = s.pm1;
  next.pm1 = s.p;
  next.p = p_new;
  next.v = v_new;
  next.corridor_index = n_idx;
  next.t = s.t + 1;
  out.observation = observation(next);
  return {std::move(out), next};
}

EpisodeResult runEpisode(const PlannerEnv& env, const PlannerState& start,
                         const PolicyFn& policy) {
  const EnvConfig& cfg = env.config();
  EpisodeResult res;
  res.trajectory = BsplineTrajectory({start.pm2, start.pm1, start.p}, cfg.dtau);

  PlannerState state = start;
  while (state.t - start.t < cfg.horizon) {
    const Eigen::VectorXd obs = env.observation(state);
    const Eigen::Vector3d alpha = policy(obs);
    auto [out, next] = env.step(state, alpha);

    res.trajectory.appendPoint(next.p);
    res.total_reward += out.reward;
    res.peak_speed = std::max(res.peak_speed, next.v.norm());
    ++res.steps;

    StepRow row;
    row.t = state.t;
    row.alpha = alpha;
    row.reward = out.reward;
    row.diag = out.diag;
    row.knot = res.trajectory.knotPosition(2 + res.steps);
    row.corridor_index = next.corridor_index;
    res.rows.push_back(row);

    state = next;
    if (out.success) {
      res.success = true;
      res.cause = EpisodeEnd::Success;
      break;
    }
    if (out.terminated) {
      res.cause = out.diag.r_p != 0 ? EpisodeEnd::Collision : EpisodeEnd::JerkViolation;
      break;
    }
    res.cause = EpisodeEnd::Horizon;
  }
  res.final_corridor_index = state.corridor_index;
  res.episode_time = res.steps * cfg.dtau;
  return res;
}

EpisodeResult rollout(const Scenario& scenario, const EnvConfig& cfg,
                      const PolicyFn& policy) {
  const PlannerEnv env = PlannerEnv::fromScenario(scenario, cfg);
  KinematicState ks;
  ks.position = scenario.start;
  const PlannerState start = env.makeStartState(ks);
  return runEpisode(env, start, policy);
}

}  // namespace sfcplan
