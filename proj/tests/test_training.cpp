#include <doctest.h>

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sfcplan/bench.hpp"
#include "sfcplan/errors.hpp"
#include "sfcplan/rng.hpp"
#include "sfcplan/trainer.hpp"
#include "support/oracles.hpp"

using namespace sfcplan;

namespace {

// Shrunken wall course so unit tests spend their time on logic, not on
// generating 65-meter maps.
ScenarioSpec smallCourse(std::uint64_t seed) {
  ScenarioSpec s = ScenarioSpec::curriculumWalls(seed);
  s.extent_min = {-5.0, -10.0, 0.0};
  s.extent_max = {5.0, 10.0, 3.0};
  s.spacing_near = 3.5;
  s.spacing_far = 2.5;
  return s;
}

// Constant-action policy: full throttle forward, near-zero lateral and
// vertical levels. Enough to cross an empty map.
SdcqAgent::Policy forwardPolicy(int obs_dim = 66) {
  SdcqAgent::Policy p;
  p.bins = 60;
  p.kappa = 1.0;
  p.qd = DenseNet({obs_dim, 180}, 1);
  for (auto& l : p.qd.layers()) {
    l.W.setZero();
    l.b.setZero();
  }
  p.qd.layers()[0].b[59] = 1.0;
  p.qd.layers()[0].b[60 + 29] = 1.0;
  p.qd.layers()[0].b[120 + 29] = 1.0;
  return p;
}

std::string tempDir(const char* stem) {
  const auto path = std::filesystem::temp_directory_path() /
                    (std::string(stem) + std::to_string(std::random_device{}()));
  return path.string();
}

}  // namespace

TEST_CASE("baseline train configuration derives everything from the speed cap") {
  const TrainConfig cfg = makeTrainConfig(7.0, 9);
  CHECK(cfg.v_max == 7.0);
  CHECK(cfg.seed == 9);
  CHECK(cfg.env.action.v_max == 7.0);
  CHECK(cfg.env.action.a_max == 14.0);
  CHECK(cfg.env.start_noise);
  CHECK(cfg.agent.obs_dim == 66);
  CHECK(cfg.agent.init_seed == mixSeed(9, 7));
  CHECK(cfg.curriculum.spacing_near == 4.5);
  CHECK(cfg.curriculum.spacing_far == 2.75);
  CHECK(cfg.curriculum.seed == 9);
  CHECK(cfg.sampler_threads == 9);
  CHECK(cfg.explore_trajectories == 20);
  CHECK(cfg.explore_len == 12);
  CHECK(cfg.batch == 256);
  CHECK(cfg.buffer_capacity == 200000);
  CHECK(cfg.warmup == 2000);
  CHECK(cfg.data_per_step == 64);
}

TEST_CASE("exploration rollouts never disturb the executed greedy path") {
  const ScenarioSpec course = smallCourse(21);
  EnvConfig env;
  env.action = ActionSpec::fromVmax(4.0);
  env.start_noise = true;

  AgentConfig acfg;
  acfg.obs_dim = 66;
  acfg.bins = 8;
  acfg.hidden = {16};
  acfg.init_seed = 4;
  const SdcqAgent::Policy policy = SdcqAgent(acfg).policy();

  SamplerWorker plain(course, env, 11, 22, 33);
  SamplerWorker noisy(course, env, 11, 22, 33);
  ReplayBuffer buf_plain(100000), buf_noisy(100000);

  for (int c = 0; c < 4; ++c) {
    const auto sp = plain.cycle(policy, 0, 10, buf_plain);
    const auto sn = noisy.cycle(policy, 25, 10, buf_noisy);
    CHECK(sp.executed_steps == sn.executed_steps);
    CHECK(sn.stored_transitions >= sp.stored_transitions);
  }

  const auto& pa = plain.executedPoints();
  const auto& pb = noisy.executedPoints();
  REQUIRE(pa.size() == pb.size());
  REQUIRE(!pa.empty());
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK((pa[i] - pb[i]).norm() == 0.0);

  CHECK(buf_plain.insertions() == pa.size());
  CHECK(buf_noisy.insertions() > buf_plain.insertions());
  CHECK(buf_noisy.insertions() <= pa.size() + 4 * 25 * 10);

  auto ea = plain.drainEpisodes();
  auto eb = noisy.drainEpisodes();
  REQUIRE(ea.size() == eb.size());
  for (std::size_t i = 0; i < ea.size(); ++i) {
    CHECK(ea[i].success == eb[i].success);
    CHECK(ea[i].cause == eb[i].cause);
    CHECK(ea[i].steps == eb[i].steps);
    CHECK(ea[i].total_reward == eb[i].total_reward);
  }
  CHECK(plain.drainEpisodes().empty());  // drain is destructive
}

TEST_CASE("single-thread training reproduces its history bit for bit") {
  auto makeCfg = [](const std::string& out_dir) {
    TrainConfig cfg = makeTrainConfig(4.0, 5);
    cfg.curriculum = smallCourse(5);
    cfg.sampler_threads = 1;
    cfg.max_train_steps = 6;
    cfg.warmup = 50;
    cfg.batch = 16;
    cfg.explore_trajectories = 3;
    cfg.explore_len = 8;
    cfg.eval_period = 3;
    cfg.eval_episodes = 1;
    cfg.eval_easy_half = true;
    cfg.agent.hidden = {24, 24};
    cfg.out_dir = out_dir;
    return cfg;
  };

  const std::string dir_a = tempDir("sfc_train_a_");
  const std::string dir_b = tempDir("sfc_train_b_");
  Trainer a(makeCfg(dir_a));
  a.run();
  Trainer b(makeCfg(dir_b));
  b.run();

  REQUIRE(a.history().size() == 6);
  REQUIRE(b.history().size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    const TrainLogRow &ra = a.history()[i], &rb = b.history()[i];
    CHECK(ra.step == rb.step);
    CHECK(ra.buffer_size == rb.buffer_size);
    CHECK(ra.episodes == rb.episodes);
    CHECK(ra.mean_return == rb.mean_return);
    CHECK(ra.loss_d == rb.loss_d);
    CHECK(ra.loss_q == rb.loss_q);
    CHECK(ra.kappa == rb.kappa);
    CHECK(ra.entropy == rb.entropy);
    CHECK(ra.eval_success == rb.eval_success);
    CHECK(ra.eval_time == rb.eval_time);
  }
  // Evaluations fire on the configured period and only there.
  CHECK(a.history()[2].eval_success >= 0.0);
  CHECK(a.history()[5].eval_success >= 0.0);
  CHECK(a.history()[0].eval_success == -1.0);
  CHECK(a.totalEpisodes() == b.totalEpisodes());
  CHECK(a.totalEpisodes() > 0);

  CHECK((testing::flattenParams(a.agent().discreteNet()) -
         testing::flattenParams(b.agent().discreteNet()))
            .norm() == 0.0);
  CHECK((testing::flattenParams(a.agent().criticNet()) -
         testing::flattenParams(b.agent().criticNet()))
            .norm() == 0.0);
  CHECK(a.agent().kappa() == b.agent().kappa());

  // Artifacts: header line, one log row per history row, both checkpoints.
  std::ifstream log(dir_a + "/train_log.txt");
  REQUIRE(log.good());
  std::string line;
  std::getline(log, line);
  CHECK(line ==
        "# wall_s step buffer episodes mean_return loss_d loss_q kappa entropy"
        " eval_success eval_time_s");
  int rows = 0;
  while (std::getline(log, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 6);
  CHECK(std::filesystem::exists(dir_a + "/ckpt_latest.bin"));
  CHECK(std::filesystem::exists(dir_a + "/ckpt_final.bin"));

  const SdcqAgent final_agent = SdcqAgent::load(dir_a + "/ckpt_final.bin");
  CHECK((testing::flattenParams(final_agent.discreteNet()) -
         testing::flattenParams(a.agent().discreteNet()))
            .norm() == 0.0);
  CHECK(final_agent.trainSteps() == a.agent().trainSteps());

  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

TEST_CASE("greedy evaluation is deterministic and self-consistent") {
  AgentConfig acfg;
  acfg.obs_dim = 66;
  acfg.bins = 8;
  acfg.hidden = {16};
  acfg.init_seed = 2;
  const SdcqAgent::Policy policy = SdcqAgent(acfg).policy();
  EnvConfig env;
  env.action = ActionSpec::fromVmax(4.0);

  const EvalResult a = evaluatePolicy(policy, smallCourse(3), env, 3, 77);
  const EvalResult b = evaluatePolicy(policy, smallCourse(3), env, 3, 77);
  CHECK(a.episodes == 3);
  CHECK(a.successes == b.successes);
  CHECK(a.success_rate == b.success_rate);
  CHECK(a.mean_reward == b.mean_reward);
  CHECK(a.mean_time_success == b.mean_time_success);
  CHECK(a.success_rate == doctest::Approx(a.successes / 3.0));
  CHECK(a.success_rate >= 0.0);
  CHECK(a.success_rate <= 1.0);
  if (a.successes == 0) CHECK(a.mean_time_success == 0.0);

  const EvalResult easy = evaluatePolicy(policy, smallCourse(3), env, 2, 77, true);
  CHECK(easy.episodes == 2);
}

TEST_CASE("reward profiles carry the tuned gain presets") {
  const RewardConfig d = profileRewards(RewardProfile::Default);
  CHECK(d.k_p == -30.0);
  CHECK(d.k_f == 5.0);
  CHECK(d.k_s == 50.0);
  const RewardConfig f = profileRewards(RewardProfile::Fast);
  CHECK(f.k_p == -30.0);
  CHECK(f.k_f == 8.0);
  CHECK(f.k_s == 50.0);
  const RewardConfig s = profileRewards(RewardProfile::Safe);
  CHECK(s.k_p == -50.0);
  CHECK(s.k_f == 3.0);
  CHECK(s.k_s == 50.0);

  CHECK(parseProfile("corb_f") == RewardProfile::Fast);
  CHECK(parseProfile("fast") == RewardProfile::Fast);
  CHECK(parseProfile("corb_s") == RewardProfile::Safe);
  CHECK(parseProfile("safe") == RewardProfile::Safe);
  CHECK(parseProfile("default") == RewardProfile::Default);
  CHECK_THROWS_AS(parseProfile("turbo"), ConfigError);
  for (RewardProfile p :
       {RewardProfile::Default, RewardProfile::Fast, RewardProfile::Safe})
    CHECK(parseProfile(profileName(p)) == p);
}

TEST_CASE("scenario presets resolve by name") {
  CHECK(scenarioByName("sparse_walls", 4).spacing_near == 5.0);
  CHECK(scenarioByName("dense_walls", 4).spacing_far == 2.0);
  CHECK(scenarioByName("forest", 4).kind == ScenarioKind::Forest);
  CHECK(scenarioByName("curriculum_walls", 4).spacing_near == 4.5);
  CHECK(scenarioByName("forest", 123).seed == 123);
  CHECK_THROWS_AS(scenarioByName("maze", 1), ConfigError);
}

TEST_CASE("trajectory audits count samples that leave the corridor") {
  OccupancyGrid g(Eigen::Vector3d(-3.0, -3.0, 0.0), 0.15, {40, 40, 20});
  const SafeFlightCorridor sfc = SafeFlightCorridor::build(
      g, ReferencePolyline({{0, 0, 1}, {2, 0, 1}}), CorridorConfig{});

  BsplineTrajectory inside = BsplineTrajectory::fromInitialState(
      {{0, 0, 1}, {1, 0, 0}, {0, 0, 0}}, 0.3);
  for (int i = 1; i <= 4; ++i)
    inside.appendPoint(Eigen::Vector3d(0.3 + 0.3 * i, 0, 1));
  const AuditResult ok = auditTrajectory(sfc, inside, 0.003);
  CHECK(ok.violations == 0);
  const double span = inside.maxTau() - inside.minTau();
  CHECK(ok.points >= static_cast<long>(span / 0.003));
  CHECK(ok.points <= static_cast<long>(span / 0.003) + 2);

  BsplineTrajectory escaping = BsplineTrajectory::fromInitialState(
      {{0, 0, 1}, {0, 3, 0}, {0, 0, 0}}, 0.3);
  for (int i = 1; i <= 8; ++i)
    escaping.appendPoint(Eigen::Vector3d(0, 0.9 + 0.9 * i, 1));
  const AuditResult bad = auditTrajectory(sfc, escaping, 0.003);
  CHECK(bad.violations > 0);
  CHECK(bad.violations < bad.points);  // it starts inside
}

TEST_CASE("one-shot planning times its stages and exports artifacts") {
  OccupancyGrid map(Eigen::Vector3d(-4.8, -4.8, 0.0), 0.15, {64, 64, 16});
  EnvConfig cfg;
  cfg.action = ActionSpec::fromVmax(4.0);
  const SdcqAgent::Policy policy = forwardPolicy();

  const std::string dir = tempDir("sfc_plan_");
  std::filesystem::create_directories(dir);
  const PlanTiming t = planOnce(map, {-4.0, 0.0, 1.0}, {4.0, 0.0, 1.0}, policy,
                                cfg, dir);
  CHECK(t.success);
  CHECK(t.steps >= 1);
  CHECK(t.search_ms > 0.0);
  CHECK(t.corridor_ms > 0.0);
  CHECK(t.rollout_ms > 0.0);
  CHECK(t.total_ms >= t.search_ms + t.corridor_ms);
  for (const char* name :
       {"plan_polyline.txt", "plan_corridor.txt", "plan_traj.txt",
        "plan_traj_dense.txt", "plan_steps.txt"})
    CHECK(std::filesystem::exists(dir + "/" + name));
  std::filesystem::remove_all(dir);

  OccupancyGrid blocked = map;
  const Eigen::Vector3i gv = blocked.worldToVoxel(Eigen::Vector3d(4.0, 0.0, 1.0));
  blocked.setOccupied(gv);
  CHECK_THROWS_AS(
      planOnce(blocked, {-4.0, 0.0, 1.0}, {4.0, 0.0, 1.0}, policy, cfg, ""),
      InvalidEndpointError);
}

TEST_CASE("benchmark reports are deterministic and internally consistent") {
  BenchConfig cfg;
  cfg.scenario = "dense_walls";
  cfg.v_max = 7.0;
  cfg.episodes = 2;
  cfg.seed = 3;
  cfg.profile = RewardProfile::Fast;
  const SdcqAgent::Policy policy = forwardPolicy();

  const BenchReport a = runBenchmark(cfg, policy);
  const BenchReport b = runBenchmark(cfg, policy);
  CHECK(a.toText() == b.toText());

  REQUIRE(a.episodes.size() == 2);
  int succ = 0;
  for (const BenchEpisode& e : a.episodes) {
    CHECK(e.seed == mixSeed(3, static_cast<std::uint64_t>(e.index)));
    if (e.cause == EpisodeEnd::Success) ++succ;
    CHECK(e.success == (e.cause == EpisodeEnd::Success));
    CHECK(e.steps >= 1);
  }
  CHECK(a.successes == succ);
  CHECK(a.success_rate == doctest::Approx(succ / 2.0));
  if (a.successes == 0) {
    CHECK(a.mean_time_success == 0.0);
    CHECK(a.audit_points == 0);
  } else {
    CHECK(a.audit_points > 0);
  }

  const std::string text = a.toText();
  CHECK(text.find("scenario = dense_walls") != std::string::npos);
  CHECK(text.find("profile = corb_f") != std::string::npos);
  CHECK(text.find("k_f = 8") != std::string::npos);
  CHECK(text.find("# [summary]") != std::string::npos);
  CHECK(text.find("external baseline") != std::string::npos);
}
