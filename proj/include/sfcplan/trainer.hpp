#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sfcplan/planner_env.hpp"
#include "sfcplan/replay_buffer.hpp"
#include "sfcplan/scenario.hpp"
#include "sfcplan/sdcq.hpp"

namespace sfcplan {

struct TrainConfig {
  double v_max = 4.0;
  std::uint64_t seed = 1;
  int sampler_threads = 9;
  int explore_trajectories = 20;  // behavior-policy rollouts per cycle
  int explore_len = 12;           // step cap per cycle, greedy and behavior alike
  long max_train_steps = 4000;
  double max_wall_seconds = 0.0;  // 0 disables the wall-clock stop
  int batch = 256;
  std::size_t buffer_capacity = 200000;
  std::size_t warmup = 2000;
  int train_per_cycle = 1;  // gradient steps per cycle when single-threaded
  // Multi-thread sampler throttle: beyond warmup, workers pause once the
  // buffer has received this many transitions per completed train step, so
  // oversubscribed machines still give the trainer its share of CPU.
  // 0 disables the throttle.
  int data_per_step = 64;
  int eval_period = 250;    // train steps between evaluations; 0 disables
  int eval_episodes = 8;
  bool eval_easy_half = false;
  // Stop once an evaluation reaches this success rate; negative disables.
  double stop_eval_success = -1.0;
  std::string out_dir;  // empty: no log or checkpoint files
  AgentConfig agent;
  EnvConfig env;
  ScenarioSpec curriculum;
};

// Baseline configuration: curriculum walls, noisy episode starts, action
// envelope derived from the speed cap.
TrainConfig makeTrainConfig(double v_max, std::uint64_t seed);

struct EvalResult {
  int episodes = 0;
  int successes = 0;
  double success_rate = 0.0;
  double mean_time_success = 0.0;  // over successful episodes; 0 if none
  double mean_reward = 0.0;
};

// Greedy evaluation on freshly generated courses (seed-derived, disjoint from
// training randomness). easy_half moves the goal to the course midpoint,
// snapped to free space.
EvalResult evaluatePolicy(const SdcqAgent::Policy& policy, const ScenarioSpec& spec,
                          const EnvConfig& env_cfg, int episodes,
                          std::uint64_t seed, bool easy_half = false);

// One sampling slot: owns its current episode (course, environment, state)
// and three private RNG streams (course generation, behavior exploration,
// start noise), so the greedy execution path is unaffected by how many
// exploration rollouts run beside it.
class SamplerWorker {
 public:
  SamplerWorker(const ScenarioSpec& curriculum, const EnvConfig& env_cfg,
                std::uint64_t scenario_seed, std::uint64_t explore_seed,
                std::uint64_t noise_seed);

  struct CycleStats {
    int executed_steps = 0;
    int stored_transitions = 0;
    bool episode_finished = false;
  };

  // Advances the live episode greedily for up to explore_len steps, then
  // replays up to `explore_trajectories` behavior-policy rollouts from the
  // same pre-cycle state without touching the live episode. Every transition
  // of both kinds is appended to the buffer.
  CycleStats cycle(const SdcqAgent::Policy& policy, int explore_trajectories,
                   int explore_len, ReplayBuffer& buffer);

  struct EpisodeStats {
    bool success = false;
    EpisodeEnd cause = EpisodeEnd::Horizon;
    int steps = 0;
    double total_reward = 0.0;
  };

  // Control points executed by the greedy path, across all cycles.
  const std::vector<Eigen::Vector3d>& executedPoints() const { return executed_; }
  std::vector<EpisodeStats> drainEpisodes();

 private:
  void ensureEpisode();
  void finishEpisode(EpisodeEnd cause, bool success);

  ScenarioSpec spec_;
  EnvConfig env_cfg_;
  std::mt19937_64 scenario_rng_, explore_rng_, noise_rng_;
  std::shared_ptr<const PlannerEnv> env_;
  PlannerState state_;
  bool active_ = false;
  int episode_steps_ = 0;
  double episode_reward_ = 0.0;
  std::vector<Eigen::Vector3d> executed_;
  std::vector<EpisodeStats> finished_;
};

struct TrainLogRow {
  long step = 0;
  std::size_t buffer_size = 0;
  long episodes = 0;
  double mean_return = 0.0;  // recent completed training episodes
  double loss_d = 0.0;
  double loss_q = 0.0;
  double kappa = 0.0;
  double entropy = 0.0;
  double eval_success = -1.0;  // -1 when this row carried no evaluation
  double eval_time = 0.0;
};

class Trainer {
 public:
  explicit Trainer(TrainConfig cfg);

  // Blocks until the step budget or wall-clock limit is reached. With one
  // sampler thread everything runs interleaved on the calling thread and is
  // bit-reproducible; with more, samplers run concurrently.
  void run();

  const SdcqAgent& agent() const { return agent_; }
  SdcqAgent& agent() { return agent_; }
  const std::vector<TrainLogRow>& history() const { return history_; }
  long totalEpisodes() const { return total_episodes_; }

 private:
  void recordEpisodes(SamplerWorker& worker);
  TrainLogRow makeRow(long step, const SdcqAgent::TrainDiag& diag);
  void maybeEval(TrainLogRow& row, long step);
  void appendLog(const TrainLogRow& row, double wall_s);

  TrainConfig cfg_;
  SdcqAgent agent_;
  ReplayBuffer buffer_;
  std::mt19937_64 train_rng_;
  std::vector<TrainLogRow> history_;
  std::vector<double> recent_returns_;
  long total_episodes_ = 0;
  long eval_round_ = 0;
  std::string log_path_;
};

}  // namespace sfcplan
