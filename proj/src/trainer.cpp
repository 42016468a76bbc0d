#include "sfcplan/trainer.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "sfcplan/errors.hpp"
#include "sfcplan/rng.hpp"

namespace sfcplan {
namespace {

double elapsedSeconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Moves the goal to the course midpoint, nudged to the nearest free voxel
// center of the inflated map inside the flight band.
void applyEasyHalf(Scenario& scenario, const EnvConfig& cfg) {
  const OccupancyGrid inflated = scenario.grid->inflated(cfg.inflate_voxels);
  Eigen::Vector3d goal = scenario.goal;
  goal.y() = 0.5 * (scenario.start.y() + scenario.goal.y());
  const Eigen::Vector3i base = inflated.worldToVoxel(goal);
  for (int radius = 0; radius < 12; ++radius) {
    for (int dz = -radius; dz <= radius; ++dz)
      for (int dx = -radius; dx <= radius; ++dx)
        for (int dy = -radius; dy <= radius; ++dy) {
          const Eigen::Vector3i v = base + Eigen::Vector3i(dx, dy, dz);
          if (!inflated.inBounds(v) || inflated.isOccupied(v)) continue;
          const Eigen::Vector3d c = inflated.voxelToWorld(v);
          if (c.z() < cfg.corridor.z_min || c.z() > cfg.corridor.z_max) continue;
          scenario.goal = c;
          return;
        }
  }
  scenario.goal = goal;  // let the pipeline report the failure
}

}  // namespace

TrainConfig makeTrainConfig(double v_max, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.v_max = v_max;
  cfg.seed = seed;
  cfg.env.action = ActionSpec::fromVmax(v_max);
  cfg.env.start_noise = true;
  cfg.agent.obs_dim = cfg.env.observationSize();
  cfg.agent.init_seed = mixSeed(seed, 7);
  cfg.curriculum = ScenarioSpec::curriculumWalls(seed);
  cfg.curriculum.check_inflation = cfg.env.inflate_voxels;
  cfg.curriculum.flight_z_min = cfg.env.corridor.z_min;
  cfg.curriculum.flight_z_max = cfg.env.corridor.z_max;
  cfg.curriculum.max_segment_len = cfg.env.max_segment_len;
  return cfg;
}

EvalResult evaluatePolicy(const SdcqAgent::Policy& policy, const ScenarioSpec& spec,
                          const EnvConfig& env_cfg, int episodes,
                          std::uint64_t seed, bool easy_half) {
  EnvConfig cfg = env_cfg;
  cfg.start_noise = false;
  EvalResult res;
  res.episodes = episodes;
  for (int e = 0; e < episodes; ++e) {
    // The easy-half goal swap happens after the corridor viability check in
    // generateScenario, so the rollout's own plan can still fail; resample
    // the course deterministically until one flies.
    EpisodeResult ep;
    for (std::uint64_t salt = 0;; ++salt) {
      ScenarioSpec s = spec;
      s.seed = mixSeed(seed, static_cast<std::uint64_t>(e) + 100000 * salt);
      Scenario scenario = generateScenario(s);
      if (easy_half) applyEasyHalf(scenario, cfg);
      try {
        ep = rollout(scenario, cfg,
                     [&](const Eigen::VectorXd& obs) { return policy.greedy(obs); });
      } catch (const PlanningError&) {
        if (salt >= 16) throw;
        continue;
      }
      break;
    }
    res.mean_reward += ep.total_reward;
    if (ep.success) {
      ++res.successes;
      res.mean_time_success += ep.episode_time;
    }
  }
  if (episodes > 0) {
    res.success_rate = static_cast<double>(res.successes) / episodes;
    res.mean_reward /= episodes;
  }
  if (res.successes > 0) res.mean_time_success /= res.successes;
  return res;
}

SamplerWorker::SamplerWorker(const ScenarioSpec& curriculum, const EnvConfig& env_cfg,
                             std::uint64_t scenario_seed, std::uint64_t explore_seed,
                             std::uint64_t noise_seed)
    : spec_(curriculum),
      env_cfg_(env_cfg),
      scenario_rng_(scenario_seed),
      explore_rng_(explore_seed),
      noise_rng_(noise_seed) {}

void SamplerWorker::ensureEpisode() {
  if (active_) return;
  // Scenario generation pre-validates the corridor with default planner
  // settings; a customized env config can still reject a course here, so
  // roll replacements rather than killing the sampler thread.
  for (int attempt = 0;; ++attempt) {
    ScenarioSpec spec = spec_;
    spec.seed = scenario_rng_();
    const Scenario scenario = generateScenario(spec);
    try {
      env_ = std::make_shared<PlannerEnv>(PlannerEnv::fromScenario(scenario, env_cfg_));
    } catch (const PlanningError&) {
      if (attempt >= 64) throw;
      continue;
    }
    KinematicState ks;
    ks.position = scenario.start;
    state_ = env_->makeStartState(ks, noise_rng_);
    break;
  }
  active_ = true;
  episode_steps_ = 0;
  episode_reward_ = 0.0;
}

void SamplerWorker::finishEpisode(EpisodeEnd cause, bool success) {
  EpisodeStats st;
  st.success = success;
  st.cause = cause;
  st.steps = episode_steps_;
  st.total_reward = episode_reward_;
  finished_.push_back(st);
  active_ = false;
}

SamplerWorker::CycleStats SamplerWorker::cycle(const SdcqAgent::Policy& policy,
                                               int explore_trajectories,
                                               int explore_len, ReplayBuffer& buffer) {
  ensureEpisode();
  CycleStats stats;
  const std::shared_ptr<const PlannerEnv> env = env_;  // keep alive past episode end
  const PlannerState base = state_;

  for (int k = 0; k < explore_len; ++k) {
    const Eigen::VectorXd obs = env->observation(state_);
    const Eigen::Vector3d alpha = policy.greedy(obs);
    auto [out, next] = env->step(state_, alpha);
    buffer.append({obs, alpha, out.reward, out.observation,
                   out.terminated || out.success});
    ++stats.stored_transitions;
    ++stats.executed_steps;
    ++episode_steps_;
    episode_reward_ += out.reward;
    executed_.push_back(next.p);
    state_ = next;
    if (out.success || out.terminated) {
      finishEpisode(out.success ? EpisodeEnd::Success
                    : out.diag.r_p != 0 ? EpisodeEnd::Collision
                                        : EpisodeEnd::JerkViolation,
                    out.success);
      stats.episode_finished = true;
      break;
    }
    if (episode_steps_ >= env_cfg_.horizon) {
      finishEpisode(EpisodeEnd::Horizon, false);
      stats.episode_finished = true;
      break;
    }
  }

  // Non-executed exploration: behavior-policy branches from the pre-cycle
  // state feed the buffer but never move the live episode.
  for (int j = 0; j < explore_trajectories; ++j) {
    PlannerState s = base;
    for (int k = 0; k < explore_len; ++k) {
      const Eigen::VectorXd obs = env->observation(s);
      const Eigen::Vector3d alpha = policy.sample(obs, explore_rng_);
      auto [out, next] = env->step(s, alpha);
      buffer.append({obs, alpha, out.reward, out.observation,
                     out.terminated || out.success});
      ++stats.stored_transitions;
      s = next;
      if (out.success || out.terminated) break;
    }
  }
  return stats;
}

std::vector<SamplerWorker::EpisodeStats> SamplerWorker::drainEpisodes() {
  auto out = std::move(finished_);
  finished_.clear();
  return out;
}

Trainer::Trainer(TrainConfig cfg)
    : cfg_(std::move(cfg)),
      agent_(cfg_.agent),
      buffer_(cfg_.buffer_capacity),
      train_rng_(mixSeed(cfg_.seed, 42)) {
  if (cfg_.sampler_threads < 1)
    throw std::invalid_argument("trainer needs at least one sampler");
  if (!cfg_.out_dir.empty()) {
    std::filesystem::create_directories(cfg_.out_dir);
    log_path_ = cfg_.out_dir + "/train_log.txt";
    std::ofstream os(log_path_);
    os << "# wall_s step buffer episodes mean_return loss_d loss_q kappa entropy"
          " eval_success eval_time_s\n";
  }
}

void Trainer::recordEpisodes(SamplerWorker& worker) {
  for (const auto& ep : worker.drainEpisodes()) {
    ++total_episodes_;
    recent_returns_.push_back(ep.total_reward);
    if (recent_returns_.size() > 50)
      recent_returns_.erase(recent_returns_.begin());
  }
}

TrainLogRow Trainer::makeRow(long step, const SdcqAgent::TrainDiag& diag) {
  TrainLogRow row;
  row.step = step;
  row.buffer_size = buffer_.size();
  row.episodes = total_episodes_;
  if (!recent_returns_.empty()) {
    double s = 0.0;
    for (double r : recent_returns_) s += r;
    row.mean_return = s / static_cast<double>(recent_returns_.size());
  }
  row.loss_d = diag.loss_d;
  row.loss_q = diag.loss_q;
  row.kappa = diag.kappa;
  row.entropy = diag.mean_entropy;
  return row;
}

void Trainer::maybeEval(TrainLogRow& row, long step) {
  if (cfg_.eval_period <= 0 || step % cfg_.eval_period != 0) return;
  const EvalResult ev =
      evaluatePolicy(agent_.policy(), cfg_.curriculum, cfg_.env, cfg_.eval_episodes,
                     mixSeed(cfg_.seed, 9000 + static_cast<std::uint64_t>(eval_round_)),
                     cfg_.eval_easy_half);
  ++eval_round_;
  row.eval_success = ev.success_rate;
  row.eval_time = ev.mean_time_success;
  if (!cfg_.out_dir.empty()) agent_.save(cfg_.out_dir + "/ckpt_latest.bin");
}

void Trainer::appendLog(const TrainLogRow& row, double wall_s) {
  history_.push_back(row);
  if (log_path_.empty()) return;
  std::ofstream os(log_path_, std::ios::app);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%.1f %ld %zu %ld %.3f %.5f %.5f %.5f %.4f %.3f %.2f\n", wall_s,
                row.step, row.buffer_size, row.episodes, row.mean_return, row.loss_d,
                row.loss_q, row.kappa, row.entropy, row.eval_success, row.eval_time);
  os << buf;
}

void Trainer::run() {
  const auto t0 = std::chrono::steady_clock::now();
  auto wallExceeded = [&] {
    return cfg_.max_wall_seconds > 0.0 && elapsedSeconds(t0) >= cfg_.max_wall_seconds;
  };
  const int log_every = std::max(1, cfg_.eval_period > 0 ? cfg_.eval_period / 5 : 50);

  if (cfg_.sampler_threads == 1) {
    SamplerWorker worker(cfg_.curriculum, cfg_.env, mixSeed(cfg_.seed, 1000),
                         mixSeed(cfg_.seed, 2000), mixSeed(cfg_.seed, 3000));
    long step = 0;
    while (step < cfg_.max_train_steps && !wallExceeded()) {
      worker.cycle(agent_.policy(), cfg_.explore_trajectories, cfg_.explore_len,
                   buffer_);
      recordEpisodes(worker);
      if (buffer_.size() < cfg_.warmup) continue;
      for (int i = 0; i < cfg_.train_per_cycle && step < cfg_.max_train_steps; ++i) {
        const auto batch = buffer_.sample(cfg_.batch, train_rng_);
        const auto diag = agent_.trainStep(batch, train_rng_);
        ++step;
        if (step % log_every == 0 || step == cfg_.max_train_steps) {
          TrainLogRow row = makeRow(step, diag);
          maybeEval(row, step);
          appendLog(row, elapsedSeconds(t0));
          if (cfg_.stop_eval_success >= 0.0 &&
              row.eval_success >= cfg_.stop_eval_success) {
            step = cfg_.max_train_steps;
            break;
          }
        }
      }
    }
  } else {
    std::atomic<bool> stop{false};
    std::mutex policy_mu;
    auto shared_policy =
        std::make_shared<const SdcqAgent::Policy>(agent_.policy());
    auto getPolicy = [&] {
      std::lock_guard<std::mutex> lock(policy_mu);
      return shared_policy;
    };
    auto setPolicy = [&](SdcqAgent::Policy p) {
      auto ptr = std::make_shared<const SdcqAgent::Policy>(std::move(p));
      std::lock_guard<std::mutex> lock(policy_mu);
      shared_policy = std::move(ptr);
    };

    std::vector<std::unique_ptr<SamplerWorker>> workers;
    std::mutex episodes_mu;
    for (int w = 0; w < cfg_.sampler_threads; ++w)
      workers.push_back(std::make_unique<SamplerWorker>(
          cfg_.curriculum, cfg_.env, mixSeed(cfg_.seed, 1000 + w),
          mixSeed(cfg_.seed, 2000 + w), mixSeed(cfg_.seed, 3000 + w)));

    std::atomic<long> steps_done{0};
    std::vector<std::thread> threads;
    for (int w = 0; w < cfg_.sampler_threads; ++w) {
      threads.emplace_back([&, w] {
        while (!stop.load(std::memory_order_relaxed)) {
          if (cfg_.data_per_step > 0) {
            const std::size_t cap =
                cfg_.warmup + static_cast<std::size_t>(cfg_.data_per_step) *
                                  (steps_done.load(std::memory_order_relaxed) + 1);
            if (buffer_.insertions() > cap) {
              std::this_thread::sleep_for(std::chrono::milliseconds(2));
              continue;
            }
          }
          auto policy = getPolicy();
          workers[w]->cycle(*policy, cfg_.explore_trajectories, cfg_.explore_len,
                            buffer_);
          {
            std::lock_guard<std::mutex> lock(episodes_mu);
            recordEpisodes(*workers[w]);
          }
        }
      });
    }

    long step = 0;
    while (step < cfg_.max_train_steps && !wallExceeded()) {
      if (buffer_.size() < cfg_.warmup) {
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
        continue;
      }
      const auto batch = buffer_.sample(cfg_.batch, train_rng_);
      const auto diag = agent_.trainStep(batch, train_rng_);
      ++step;
      steps_done.store(step, std::memory_order_relaxed);
      setPolicy(agent_.policy());
      if (step % log_every == 0 || step == cfg_.max_train_steps) {
        TrainLogRow row;
        {
          std::lock_guard<std::mutex> lock(episodes_mu);
          row = makeRow(step, diag);
        }
        maybeEval(row, step);
        appendLog(row, elapsedSeconds(t0));
        if (cfg_.stop_eval_success >= 0.0 &&
            row.eval_success >= cfg_.stop_eval_success)
          break;
      }
    }
    stop.store(true);
    for (auto& t : threads) t.join();
  }

  if (!cfg_.out_dir.empty()) agent_.save(cfg_.out_dir + "/ckpt_final.bin");
}

}  // namespace sfcplan
