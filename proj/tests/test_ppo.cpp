#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "losc/ppo.hpp"
#include "ppo_fixtures.hpp"

using namespace losc;

namespace {

std::string temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("losc_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

Transition step_with(double shaping, double terminal, double value) {
  Transition t;
  t.reward.shaping = shaping;
  t.reward.terminal = terminal;
  t.value = value;
  return t;
}

}  // namespace

TEST(ObsScaler, MatchesTwoPassStatistics) {
  Rng rng(1);
  ObsScaler s(3, 10.0);
  std::vector<VecX> xs;
  for (int i = 0; i < 500; ++i) {
    VecX x(3);
    x << uniform(rng, -5, 5), uniform(rng, 100, 200), 7.0;
    xs.push_back(x);
    s.update(x);
  }
  VecX mean = VecX::Zero(3);
  for (const auto& x : xs) mean += x;
  mean /= 500.0;
  VecX var = VecX::Zero(3);
  for (const auto& x : xs) var += (x - mean).cwiseAbs2();
  var /= 500.0;
  EXPECT_LT((s.mean() - mean).norm(), 1e-10);
  EXPECT_NEAR(s.variance()[0], var[0], 1e-9);
  EXPECT_NEAR(s.variance()[1], var[1], 1e-9);
  EXPECT_EQ(s.variance()[2], ObsScaler::kVarFloor);  // constant component hits the floor
  const VecX n = s.normalize(xs[0]);
  EXPECT_NEAR(n[0], (xs[0][0] - mean[0]) / std::sqrt(var[0]), 1e-9);
  EXPECT_EQ(n[2], 0.0);
  VecX far = xs[0];
  far[0] = 1e6;
  EXPECT_EQ(s.normalize(far)[0], 10.0);
}

TEST(ObsScaler, FreshScalerIsIdentity) {
  const ObsScaler s(2, 10.0);
  const VecX x = (VecX(2) << 1.5, -3.0).finished();
  EXPECT_EQ(s.normalize(x), x);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Adam adam;
  VecX p = VecX::Zero(3);
  const VecX g = (VecX(3) << 2.0, -0.5, 0.0).finished();
  adam.step(p, g, 0.01);
  EXPECT_NEAR(p[0], -0.01, 1e-9);
  EXPECT_NEAR(p[1], 0.01, 1e-9);
  EXPECT_EQ(p[2], 0.0);
  EXPECT_EQ(adam.t, 1);
}

TEST(Returns, DualDiscountHandValues) {
  RolloutSet set;
  EpisodeRollout ep;
  ep.steps = {step_with(-0.1, 0.0, 0.5), step_with(-0.2, 0.0, 0.0), step_with(-0.3, 5.0, 1.0)};
  set.episodes.push_back(ep);
  compute_returns_advantages(set, 0.95, 0.995, false);
  const auto& s = set.episodes[0].steps;
  EXPECT_NEAR(s[2].ret, -0.3 + 5.0, 1e-15);
  EXPECT_NEAR(s[1].ret, -0.2 + 0.95 * -0.3 + 0.995 * 5.0, 1e-15);
  EXPECT_NEAR(s[0].ret, -0.1 + 0.95 * -0.2 + 0.95 * 0.95 * -0.3 + 0.995 * 0.995 * 5.0, 1e-14);
  EXPECT_NEAR(s[0].advantage, s[0].ret - 0.5, 1e-15);
  EXPECT_NEAR(s[2].advantage, s[2].ret - 1.0, 1e-15);
}

TEST(Returns, NormalizedAdvantagesAreStandardized) {
  RolloutSet set;
  for (int e = 0; e < 3; ++e) {
    EpisodeRollout ep;
    for (int k = 0; k < 5 + e; ++k) ep.steps.push_back(step_with(-0.01 * k, k == 4 + e ? e : 0.0, 0.1 * k));
    set.episodes.push_back(ep);
  }
  compute_returns_advantages(set, 0.95, 0.995, true);
  double sum = 0, sq = 0, n = 0;
  for (const auto& ep : set.episodes) {
    for (const auto& t : ep.steps) {
      sum += t.advantage;
      sq += t.advantage * t.advantage;
      ++n;
    }
  }
  EXPECT_NEAR(sum / n, 0.0, 1e-12);
  EXPECT_NEAR(sq / n, 1.0, 1e-6);
}

TEST(Surrogate, ClippedObjectiveCases) {
  EXPECT_DOUBLE_EQ(clipped_surrogate(1.5, 2.0, 0.2), 1.2 * 2.0);
  EXPECT_DOUBLE_EQ(clipped_surrogate(0.5, 2.0, 0.2), 0.5 * 2.0);
  EXPECT_DOUBLE_EQ(clipped_surrogate(0.5, -2.0, 0.2), 0.8 * -2.0);
  EXPECT_DOUBLE_EQ(clipped_surrogate(1.5, -2.0, 0.2), 1.5 * -2.0);
  EXPECT_DOUBLE_EQ(clipped_surrogate(1.1, 3.0, 0.2), 1.1 * 3.0);
}

TEST(Servo, Rules) {
  const KlServoConfig servo;
  OptimizerState opt;
  opt.clip = 0.2;
  opt.lr_policy = 1e-4;
  kl_servo(1e-3, 1e-3, servo, opt);
  EXPECT_EQ(opt.clip, 0.2);
  EXPECT_EQ(opt.lr_policy, 1e-4);
  kl_servo(3e-3, 1e-3, servo, opt);
  EXPECT_DOUBLE_EQ(opt.clip, 0.2 / 1.2);
  EXPECT_DOUBLE_EQ(opt.lr_policy, 1e-4 / 1.5);
  kl_servo(1e-4, 1e-3, servo, opt);
  EXPECT_DOUBLE_EQ(opt.clip, 0.2 / 1.2 * 1.1);
  EXPECT_DOUBLE_EQ(opt.lr_policy, 1e-4 / 1.5 * 1.1);
}

TEST(Servo, BoundsUnderAlternatingKl) {
  const KlServoConfig servo;
  OptimizerState opt;
  Rng rng(2);
  double prev_lr = opt.lr_policy;
  for (int i = 0; i < 2000; ++i) {
    const double kl = uniform(rng, 0.0, 1.0) < 0.5 ? 0.0 : 1.0;
    kl_servo(kl, 1e-3, servo, opt);
    EXPECT_GE(opt.clip, 0.05);
    EXPECT_LE(opt.clip, 0.3);
    EXPECT_GE(opt.lr_policy, 1e-6);
    EXPECT_LE(opt.lr_policy, 1e-2);
  }
  for (int i = 0; i < 50; ++i) {
    prev_lr = opt.lr_policy;
    kl_servo(1e-2, 1e-3, servo, opt);
    EXPECT_LE(opt.lr_policy, prev_lr);
  }
  EXPECT_EQ(opt.lr_policy, 1e-6);
}

TEST(PolicyObjective, GradientMatchesFiniteDifferences) {
  const PolicyParams p0 = tiny_params(3);
  const RolloutSet set = tiny_rollouts(p0, 2, 4);
  // Move slightly off the rollout parameters so ratios differ from one but stay unclipped.
  PolicyParams p = p0;
  Rng rng(5);
  for (Eigen::Index i = 0; i < p.policy.size(); ++i) p.policy[i] += uniform(rng, -2e-3, 2e-3);
  VecX grad;
  const SurrogateEval e = policy_objective(set, p, 0.2, 0.01, &grad);
  EXPECT_EQ(e.clip_fraction, 0.0);
  auto f = [&](const VecX& w) {
    PolicyParams q = p;
    q.policy = w;
    return policy_objective(set, q, 0.2, 0.01, nullptr).objective;
  };
  EXPECT_LT(max_fd_error(f, p.policy, grad), 1e-4);
}

TEST(PolicyObjective, ClampedLogStdHasZeroGradient) {
  PolicyParams p = tiny_params(6);
  const RolloutSet set = tiny_rollouts(p, 1, 7);
  p.policy.tail(3).setConstant(-6.0);
  VecX grad;
  policy_objective(set, p, 0.2, 0.0, &grad);
  EXPECT_EQ(VecX(grad.tail(3)), VecX::Zero(3));
}

TEST(PolicyObjective, KlIsZeroAtRolloutParameters) {
  const PolicyParams p = tiny_params(8);
  const RolloutSet set = tiny_rollouts(p, 2, 9);
  const SurrogateEval e = policy_objective(set, p, 0.2, 0.0, nullptr);
  EXPECT_NEAR(e.kl, 0.0, 1e-15);
  EXPECT_NEAR(e.mean_ratio, 1.0, 1e-12);
}

TEST(ValueLoss, GradientMatchesFiniteDifferences) {
  const PolicyParams p = tiny_params(10);
  const RolloutSet set = tiny_rollouts(p, 2, 11);
  VecX grad;
  value_loss(set, p, &grad);
  auto f = [&](const VecX& w) {
    PolicyParams q = p;
    q.value = w;
    return value_loss(set, q, nullptr);
  };
  EXPECT_LT(max_fd_error(f, p.value, grad), 1e-4);
}

TEST(PpoUpdate, ImprovesSurrogateAndReportsKl) {
  PolicyParams p = tiny_params(12);
  const RolloutSet set = tiny_rollouts(p, 4, 13);
  OptimizerState opt;
  TrainerConfig cfg;
  cfg.lr_policy = opt.lr_policy = 1e-3;
  const double before = policy_objective(set, p, opt.clip, 0.0, nullptr).objective;
  const double vloss_before = value_loss(set, p, nullptr);
  const UpdateDiagnostics d = ppo_update(set, p, opt, cfg);
  EXPECT_GT(d.policy_objective, before);
  EXPECT_LT(value_loss(set, p, nullptr), vloss_before);
  EXPECT_GT(d.kl, 0.0);
  EXPECT_GE(d.epochs_run, 1);
  EXPECT_LE(d.epochs_run, 3);
}

TEST(Rollouts, DeterministicAndScalerUpdated) {
  const PolicyParams p = tiny_params(14);
  ObsScaler s1, s2;
  const RolloutSet a = collect_rollouts(short_scenario(), p, s1, 3, 99, 10);
  const RolloutSet b = collect_rollouts(short_scenario(), p, s2, 3, 99, 10);
  ASSERT_EQ(a.transitions(), b.transitions());
  EXPECT_EQ(s1.count(), static_cast<double>(a.transitions()));
  for (std::size_t e = 0; e < 3; ++e) {
    for (std::size_t k = 0; k < a.episodes[e].steps.size(); ++k) {
      EXPECT_EQ(a.episodes[e].steps[k].action, b.episodes[e].steps[k].action);
    }
  }
  EXPECT_THROW(collect_rollouts(short_scenario(), p, s1, 0, 1, 0), Error);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  Checkpoint c;
  c.params = tiny_params(15);
  c.params.policy[3] = 1.0 / 3.0;
  c.scaler.update(VecX::Constant(8, 0.1));
  c.scaler.update(VecX::Constant(8, 0.7));
  c.update = 7;
  c.episodes = 420;
  c.optimizer.clip = 0.123456789;
  c.optimizer.policy.step(c.params.policy, VecX::Ones(c.params.policy.size()), 1e-3);
  const std::string path = temp_dir("ckpt") + "/c.json";
  save_checkpoint(c, path);
  const Checkpoint d = load_checkpoint(path);
  EXPECT_EQ(d.params.policy, c.params.policy);
  EXPECT_EQ(d.params.value, c.params.value);
  EXPECT_EQ(d.params.policy_spec, c.params.policy_spec);
  EXPECT_EQ(d.scaler.mean(), c.scaler.mean());
  EXPECT_EQ(d.scaler.m2(), c.scaler.m2());
  EXPECT_EQ(d.update, 7);
  EXPECT_EQ(d.episodes, 420);
  EXPECT_EQ(d.optimizer.clip, 0.123456789);
  EXPECT_EQ(d.optimizer.policy.m, c.optimizer.policy.m);
  EXPECT_EQ(d.optimizer.policy.t, 1);
}

TEST(Checkpoint, MissingAndMalformed) {
  try {
    load_checkpoint("/nonexistent/ckpt.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingCheckpoint);
  }
  const std::string path = temp_dir("bad") + "/bad.json";
  std::ofstream(path) << "{\"format\": \"losc-checkpoint\", \"version\": 99}";
  EXPECT_THROW(load_checkpoint(path), Error);
}

TEST(Train, HistoryRowsAndResumeEquivalence) {
  TrainerConfig cfg;
  cfg.episodes_per_rollout = 3;
  cfg.total_episodes = 6;
  cfg.lr_policy = 1e-3;
  const ScenarioConfig sc = short_scenario();

  const std::string full_dir = temp_dir("full");
  const TrainResult full = train(sc, cfg, 17, {full_dir, "", {}});
  EXPECT_EQ(full.history.size(), 2u);

  std::ifstream hist(full_dir + "/history.txt");
  int rows = 0;
  for (std::string line; std::getline(hist, line);) rows += line.rfind('#', 0) == 0 ? 0 : 1;
  EXPECT_EQ(rows, 2);

  TrainerConfig half = cfg;
  half.total_episodes = 3;
  const std::string dir = temp_dir("half");
  train(sc, half, 17, {dir, "", {}});
  const TrainResult resumed = train(sc, cfg, 17, {dir, dir + "/checkpoint.json", {}});
  EXPECT_EQ(resumed.checkpoint.params.policy, full.checkpoint.params.policy);
  EXPECT_EQ(resumed.checkpoint.params.value, full.checkpoint.params.value);
  EXPECT_EQ(resumed.checkpoint.episodes, 6);
}

TEST(Train, SameSeedSameResult) {
  TrainerConfig cfg;
  cfg.episodes_per_rollout = 2;
  cfg.total_episodes = 4;
  const TrainResult a = train(short_scenario(), cfg, 5);
  const TrainResult b = train(short_scenario(), cfg, 5);
  EXPECT_EQ(a.checkpoint.params.policy, b.checkpoint.params.policy);
  EXPECT_EQ(a.history.back().reward_mean, b.history.back().reward_mean);
}

TEST(PolicyAgent, DeterministicMeanAction) {
  const PolicyParams p = tiny_params(18);
  const ObsScaler s;
  PolicyAgent a(p, s), b(p, s);
  const Observation o = Observation::Constant(0.3);
  EXPECT_EQ(a.act(o), b.act(o));
  const Vec3 second = a.act(o);
  a.begin_episode();
  EXPECT_NE(a.act(o), second);  // hidden state reset changes the output
}
