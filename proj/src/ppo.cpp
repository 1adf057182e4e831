#include "losc/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

#include "losc/parallel.hpp"
#include "losc/seeds.hpp"

namespace losc {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// ObsScaler

ObsScaler::ObsScaler(int dim, double clip)
    : clip_(clip), mean_(VecX::Zero(dim)), m2_(VecX::Zero(dim)) {}

void ObsScaler::update(const VecX& raw) {
  if (raw.size() != mean_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "ObsScaler::update: dimension mismatch");
  }
  count_ += 1.0;
  const VecX delta = raw - mean_;
  mean_ += delta / count_;
  m2_ += delta.cwiseProduct(raw - mean_);
}

VecX ObsScaler::variance() const {
  if (count_ < 2.0) return VecX::Ones(mean_.size());
  return (m2_ / count_).cwiseMax(kVarFloor);
}

VecX ObsScaler::normalize(const VecX& raw) const {
  const VecX scaled = (raw - mean_).cwiseQuotient(variance().cwiseSqrt());
  return scaled.cwiseMax(-clip_).cwiseMin(clip_);
}

ObsScaler ObsScaler::restore(double clip, double count, VecX mean, VecX m2) {
  ObsScaler s(static_cast<int>(mean.size()), clip);
  s.count_ = count;
  s.mean_ = std::move(mean);
  s.m2_ = std::move(m2);
  return s;
}

// ---------------------------------------------------------------------------
// Adam

void Adam::step(VecX& params, const VecX& grad, double lr) {
  if (m.size() != params.size()) {
    m = VecX::Zero(params.size());
    v = VecX::Zero(params.size());
    t = 0;
  }
  ++t;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  params.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

// ---------------------------------------------------------------------------
// Rollouts

std::size_t RolloutSet::transitions() const {
  std::size_t n = 0;
  for (const auto& e : episodes) n += e.steps.size();
  return n;
}

EpisodeRollout run_policy_episode(const ScenarioConfig& cfg, const PolicyParams& params,
                                  const ObsScaler& scaler, std::uint64_t env_seed,
                                  std::uint64_t action_seed, bool deterministic) {
  EngagementEnv env(cfg);
  Rng action_rng(action_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const GruNet pnet(params.policy_spec);
  const GruNet vnet(params.value_spec);
  const VecX log_std = params.clamped_log_std();

  VecX hp = VecX::Zero(params.policy_spec.hidden2);
  VecX hv = VecX::Zero(params.value_spec.hidden2);
  Observation raw = env.reset(env_seed);

  EpisodeRollout ep;
  while (!env.done()) {
    Transition tr;
    tr.raw_obs = raw;
    tr.obs = scaler.normalize(raw);
    tr.policy_hidden = hp;
    tr.value_hidden = hv;
    tr.mean_old = pnet.step(params.policy, tr.obs, hp);
    tr.log_std_old = log_std;
    tr.value = vnet.step(params.value, tr.obs, hv)[0];
    tr.action = tr.mean_old;
    if (!deterministic) {
      for (Eigen::Index i = 0; i < tr.action.size(); ++i) {
        tr.action[i] += std::exp(log_std[i]) * normal(action_rng);
      }
    }
    tr.log_prob = DiagGaussian::log_prob(tr.action, tr.mean_old, log_std);

    const StepResult sr = env.step(Vec3(tr.action[0], tr.action[1], tr.action[2]));
    tr.reward = sr.reward;
    tr.done = sr.done;
    raw = sr.obs;
    ep.steps.push_back(std::move(tr));
  }
  ep.result = env.result();
  return ep;
}

RolloutSet collect_rollouts(const ScenarioConfig& cfg, const PolicyParams& params,
                            ObsScaler& scaler, int n_episodes, std::uint64_t master_seed,
                            long long first_episode, bool deterministic) {
  if (n_episodes <= 0) throw Error(ErrorCode::kInvalidArgument, "n_episodes must be > 0");
  RolloutSet set;
  set.episodes.resize(static_cast<std::size_t>(n_episodes));
  parallel_for(set.episodes.size(), [&](std::size_t i) {
    const auto index = static_cast<std::uint64_t>(first_episode) + i;
    try {
      set.episodes[i] = run_policy_episode(cfg, params, scaler,
                                           derive_seed(master_seed, seeds::kEnv, index),
                                           derive_seed(master_seed, seeds::kAction, index),
                                           deterministic);
    } catch (const Error& e) {
      throw Error(e.code(), "episode " + std::to_string(index) + ": " + e.what());
    }
  });
  for (const auto& ep : set.episodes) {
    for (const auto& tr : ep.steps) scaler.update(tr.raw_obs);
  }
  return set;
}

void compute_returns_advantages(RolloutSet& rollouts, double gamma_shaping,
                                double gamma_terminal, bool normalize) {
  double sum = 0.0, sum_sq = 0.0;
  std::size_t n = 0;
  for (auto& ep : rollouts.episodes) {
    double shaping = 0.0, terminal = 0.0;
    for (auto it = ep.steps.rbegin(); it != ep.steps.rend(); ++it) {
      shaping = it->reward.shaping + gamma_shaping * shaping;
      terminal = it->reward.terminal + gamma_terminal * terminal;
      it->ret = shaping + terminal;
      it->advantage = it->ret - it->value;
      sum += it->advantage;
      sum_sq += it->advantage * it->advantage;
      ++n;
    }
  }
  if (!normalize || n == 0) return;
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(sum_sq / static_cast<double>(n) - mean * mean, 0.0);
  const double scale = 1.0 / (std::sqrt(var) + 1e-8);
  for (auto& ep : rollouts.episodes) {
    for (auto& tr : ep.steps) tr.advantage = (tr.advantage - mean) * scale;
  }
}

// ---------------------------------------------------------------------------
// Objectives

double clipped_surrogate(double ratio, double advantage, double clip) {
  return std::min(ratio * advantage, std::clamp(ratio, 1.0 - clip, 1.0 + clip) * advantage);
}

namespace {

MatX stack_obs(const EpisodeRollout& ep, int dim) {
  MatX obs(dim, static_cast<Eigen::Index>(ep.steps.size()));
  for (std::size_t t = 0; t < ep.steps.size(); ++t) {
    obs.col(static_cast<Eigen::Index>(t)) = ep.steps[t].obs;
  }
  return obs;
}

struct EpisodeTerms {
  double objective = 0.0;
  double ratio = 0.0;
  double clipped = 0.0;
  double kl = 0.0;
  VecX grad;
};

bool all_finite(const VecX& v) { return v.allFinite(); }

}  // namespace

SurrogateEval policy_objective(const RolloutSet& rollouts, const PolicyParams& params,
                               double clip, double entropy_coef, VecX* grad) {
  const GruNet net(params.policy_spec);
  const int act_dim = params.policy_spec.out_dim;
  const VecX raw_log_std = params.log_std();
  const VecX log_std = params.clamped_log_std();
  const VecX inv_var = (-2.0 * log_std.array()).exp().matrix();
  const double m = static_cast<double>(rollouts.transitions());
  if (m == 0.0) throw Error(ErrorCode::kInvalidArgument, "empty rollout set");

  std::vector<EpisodeTerms> terms(rollouts.episodes.size());
  parallel_for(terms.size(), [&](std::size_t e) {
    const EpisodeRollout& ep = rollouts.episodes[e];
    EpisodeTerms& out = terms[e];
    if (ep.steps.empty()) return;
    GruNet::SequenceCache cache;
    const MatX means = net.forward(params.policy, stack_obs(ep, params.policy_spec.obs_dim),
                                   ep.steps.front().policy_hidden,
                                   grad != nullptr ? &cache : nullptr);
    MatX d_mean = MatX::Zero(act_dim, means.cols());
    VecX d_log_std = VecX::Zero(act_dim);
    for (Eigen::Index t = 0; t < means.cols(); ++t) {
      const Transition& tr = ep.steps[static_cast<std::size_t>(t)];
      const VecX mean = means.col(t);
      const double lp = DiagGaussian::log_prob(tr.action, mean, log_std);
      const double ratio = std::exp(lp - tr.log_prob);
      const double unclipped = ratio * tr.advantage;
      const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip) * tr.advantage;
      out.objective += std::min(unclipped, clipped);
      out.ratio += ratio;
      if (std::abs(ratio - 1.0) > clip) out.clipped += 1.0;
      out.kl += DiagGaussian::kl(tr.mean_old, tr.log_std_old, mean, log_std);
      if (grad != nullptr && unclipped <= clipped) {
        // d/d(log pi) of ratio * A is ratio * A.
        const double coef = unclipped / m;
        const VecX diff = tr.action - mean;
        d_mean.col(t) = coef * diff.cwiseProduct(inv_var);
        d_log_std += coef * (diff.cwiseAbs2().cwiseProduct(inv_var) - VecX::Ones(act_dim));
      }
    }
    if (!std::isfinite(out.objective)) {
      throw Error(ErrorCode::kNonFinite,
                  "non-finite policy objective in episode " + std::to_string(e));
    }
    if (grad != nullptr) {
      out.grad = VecX::Zero(params.policy.size());
      net.backward(params.policy, cache, d_mean, out.grad);
      out.grad.tail(act_dim) += d_log_std;
      if (!all_finite(out.grad)) {
        throw Error(ErrorCode::kNonFinite,
                    "non-finite policy gradient in episode " + std::to_string(e));
      }
    }
  });

  SurrogateEval eval;
  if (grad != nullptr) *grad = VecX::Zero(params.policy.size());
  for (const auto& t : terms) {
    eval.objective += t.objective;
    eval.mean_ratio += t.ratio;
    eval.clip_fraction += t.clipped;
    eval.kl += t.kl;
    if (grad != nullptr && t.grad.size() > 0) *grad += t.grad;
  }
  eval.objective /= m;
  eval.mean_ratio /= m;
  eval.clip_fraction /= m;
  eval.kl /= m;
  eval.entropy = DiagGaussian::entropy(log_std);
  eval.objective += entropy_coef * eval.entropy;
  if (grad != nullptr) {
    grad->tail(act_dim).array() += entropy_coef;
    // The clamp on log-std blocks the gradient outside its range.
    for (int i = 0; i < act_dim; ++i) {
      if (raw_log_std[i] != log_std[i]) (*grad)[grad->size() - act_dim + i] = 0.0;
    }
  }
  return eval;
}

double value_loss(const RolloutSet& rollouts, const PolicyParams& params, VecX* grad) {
  const GruNet net(params.value_spec);
  const double m = static_cast<double>(rollouts.transitions());
  if (m == 0.0) throw Error(ErrorCode::kInvalidArgument, "empty rollout set");

  std::vector<double> losses(rollouts.episodes.size(), 0.0);
  std::vector<VecX> grads(grad != nullptr ? rollouts.episodes.size() : 0);
  parallel_for(rollouts.episodes.size(), [&](std::size_t e) {
    const EpisodeRollout& ep = rollouts.episodes[e];
    if (ep.steps.empty()) return;
    GruNet::SequenceCache cache;
    const MatX values = net.forward(params.value, stack_obs(ep, params.value_spec.obs_dim),
                                    ep.steps.front().value_hidden,
                                    grad != nullptr ? &cache : nullptr);
    MatX d_out(1, values.cols());
    for (Eigen::Index t = 0; t < values.cols(); ++t) {
      const double err = values(0, t) - ep.steps[static_cast<std::size_t>(t)].ret;
      losses[e] += 0.5 * err * err / m;
      d_out(0, t) = err / m;
    }
    if (grad != nullptr) {
      grads[e] = VecX::Zero(params.value.size());
      net.backward(params.value, cache, d_out, grads[e]);
    }
  });

  double loss = 0.0;
  for (double l : losses) loss += l;
  if (grad != nullptr) {
    *grad = VecX::Zero(params.value.size());
    for (const auto& g : grads) {
      if (g.size() > 0) *grad += g;
    }
    if (!all_finite(*grad) || !std::isfinite(loss)) {
      throw Error(ErrorCode::kNonFinite, "non-finite value loss");
    }
  }
  return loss;
}

UpdateDiagnostics ppo_update(const RolloutSet& rollouts, PolicyParams& params,
                             OptimizerState& opt, const TrainerConfig& cfg) {
  UpdateDiagnostics diag;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    VecX pgrad;
    const SurrogateEval eval =
        policy_objective(rollouts, params, opt.clip, cfg.entropy_coef, &pgrad);
    if (epoch > 0 && eval.kl > cfg.early_stop_factor * cfg.kl_target) break;
    opt.policy.step(params.policy, -pgrad, opt.lr_policy);

    VecX vgrad;
    diag.value_loss = value_loss(rollouts, params, &vgrad);
    opt.value.step(params.value, vgrad, cfg.lr_value);
    ++diag.epochs_run;
  }
  const SurrogateEval final_eval =
      policy_objective(rollouts, params, opt.clip, cfg.entropy_coef, nullptr);
  diag.kl = final_eval.kl;
  diag.clip_fraction = final_eval.clip_fraction;
  diag.policy_objective = final_eval.objective;
  diag.entropy = final_eval.entropy;
  return diag;
}

void kl_servo(double measured_kl, double kl_target, const KlServoConfig& servo,
              OptimizerState& opt) {
  if (measured_kl > 2.0 * kl_target) {
    opt.lr_policy /= servo.lr_decrease;
    opt.clip = std::max(opt.clip / servo.clip_decrease, servo.clip_min);
  } else if (measured_kl < 0.5 * kl_target) {
    opt.lr_policy *= servo.increase;
    opt.clip = std::min(opt.clip * servo.increase, servo.clip_max);
  }
  opt.lr_policy = std::clamp(opt.lr_policy, servo.lr_min, servo.lr_max);
}

// ---------------------------------------------------------------------------
// History and checkpoints

void write_history(std::ostream& os, const std::vector<HistoryRow>& rows) {
  for (const HistoryRow& r : rows) {
    os << r.update << ' ' << r.episodes << ' ' << std::setprecision(8) << r.reward_mean << ' '
       << r.reward_std << ' ' << r.reward_min << ' ' << r.steps_mean << ' ' << r.steps_max << ' '
       << r.kl << ' ' << r.clip << ' ' << r.lr_policy << ' ' << r.hit_rate << '\n';
  }
}

namespace {

constexpr const char* kHistoryHeader =
    "# update episodes reward_mean reward_std reward_min steps_mean steps_max kl clip "
    "lr_policy hit_rate\n";

json to_json(const VecX& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

VecX vec_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const VecX>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json to_json(const NetSpec& s) {
  return {{"obs_dim", s.obs_dim}, {"hidden1", s.hidden1}, {"hidden2", s.hidden2},
          {"hidden3", s.hidden3}, {"out_dim", s.out_dim}};
}

NetSpec spec_from_json(const json& j) {
  NetSpec s;
  s.obs_dim = j.at("obs_dim").get<int>();
  s.hidden1 = j.at("hidden1").get<int>();
  s.hidden2 = j.at("hidden2").get<int>();
  s.hidden3 = j.at("hidden3").get<int>();
  s.out_dim = j.at("out_dim").get<int>();
  return s;
}

json to_json(const Adam& a) {
  return {{"t", a.t}, {"m", to_json(a.m)}, {"v", to_json(a.v)}};
}

Adam adam_from_json(const json& j) {
  Adam a;
  a.t = j.at("t").get<long long>();
  a.m = vec_from_json(j.at("m"));
  a.v = vec_from_json(j.at("v"));
  return a;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  json j;
  j["format"] = "losc-checkpoint";
  j["version"] = Checkpoint::kFormatVersion;
  j["policy_spec"] = to_json(ckpt.params.policy_spec);
  j["value_spec"] = to_json(ckpt.params.value_spec);
  j["policy"] = to_json(ckpt.params.policy);
  j["value"] = to_json(ckpt.params.value);
  j["scaler"] = {{"clip", ckpt.scaler.clip()},
                 {"count", ckpt.scaler.count()},
                 {"mean", to_json(ckpt.scaler.mean())},
                 {"m2", to_json(ckpt.scaler.m2())}};
  j["trainer"] = {{"update", ckpt.update},
                  {"episodes", ckpt.episodes},
                  {"clip", ckpt.optimizer.clip},
                  {"lr_policy", ckpt.optimizer.lr_policy},
                  {"adam_policy", to_json(ckpt.optimizer.policy)},
                  {"adam_value", to_json(ckpt.optimizer.value)}};

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error(ErrorCode::kIo, "cannot write checkpoint '" + tmp + "'");
    out << j.dump();
    if (!out) throw Error(ErrorCode::kIo, "failed writing checkpoint '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot move checkpoint into '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingCheckpoint, "cannot open checkpoint '" + path + "'");
  try {
    const json j = json::parse(in);
    if (j.at("format").get<std::string>() != "losc-checkpoint") {
      throw Error(ErrorCode::kConfig, "'" + path + "' is not a checkpoint");
    }
    const int version = j.at("version").get<int>();
    if (version != Checkpoint::kFormatVersion) {
      throw Error(ErrorCode::kConfig,
                  "unsupported checkpoint version " + std::to_string(version));
    }
    Checkpoint c;
    c.params.policy_spec = spec_from_json(j.at("policy_spec"));
    c.params.value_spec = spec_from_json(j.at("value_spec"));
    c.params.policy = vec_from_json(j.at("policy"));
    c.params.value = vec_from_json(j.at("value"));
    if (c.params.policy.size() !=
            GruNet(c.params.policy_spec).num_params() + c.params.policy_spec.out_dim ||
        c.params.value.size() != GruNet(c.params.value_spec).num_params()) {
      throw Error(ErrorCode::kShapeMismatch, "checkpoint tensors do not match their specs");
    }
    const json& s = j.at("scaler");
    c.scaler = ObsScaler::restore(s.at("clip").get<double>(), s.at("count").get<double>(),
                                  vec_from_json(s.at("mean")), vec_from_json(s.at("m2")));
    const json& t = j.at("trainer");
    c.update = t.at("update").get<int>();
    c.episodes = t.at("episodes").get<long long>();
    c.optimizer.clip = t.at("clip").get<double>();
    c.optimizer.lr_policy = t.at("lr_policy").get<double>();
    c.optimizer.policy = adam_from_json(t.at("adam_policy"));
    c.optimizer.value = adam_from_json(t.at("adam_value"));
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, "malformed checkpoint '" + path + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Training loop

namespace {

HistoryRow summarize(const RolloutSet& set, int update, long long episodes,
                     const UpdateDiagnostics& diag, const OptimizerState& opt, double r_lim) {
  HistoryRow row;
  row.update = update;
  row.episodes = episodes;
  std::vector<double> rewards;
  double steps_sum = 0.0, hits = 0.0;
  for (const auto& ep : set.episodes) {
    rewards.push_back(ep.result.total_reward);
    steps_sum += ep.result.steps;
    row.steps_max = std::max(row.steps_max, ep.result.steps);
    if (ep.result.miss < r_lim) hits += 1.0;
  }
  const double n = static_cast<double>(rewards.size());
  row.reward_mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double var = 0.0;
  for (double r : rewards) var += (r - row.reward_mean) * (r - row.reward_mean);
  row.reward_std = std::sqrt(var / n);
  row.reward_min = *std::min_element(rewards.begin(), rewards.end());
  row.steps_mean = steps_sum / n;
  row.kl = diag.kl;
  row.clip = opt.clip;
  row.lr_policy = opt.lr_policy;
  row.hit_rate = hits / n;
  return row;
}

}  // namespace

TrainResult train(const ScenarioConfig& scenario, const TrainerConfig& cfg, std::uint64_t seed,
                  const TrainOptions& options) {
  scenario.validate();
  if (cfg.episodes_per_rollout <= 0 || cfg.epochs <= 0 || cfg.kl_target <= 0.0 ||
      cfg.lr_policy <= 0.0 || cfg.lr_value <= 0.0) {
    throw Error(ErrorCode::kConfig, "trainer rates, epochs and rollout size must be positive");
  }

  TrainResult result;
  Checkpoint& ckpt = result.checkpoint;
  if (!options.resume_from.empty()) {
    ckpt = load_checkpoint(options.resume_from);
  } else {
    Rng init_rng(derive_seed(seed, seeds::kInit, 0));
    ckpt.params = init_params(NetSpec::policy(kObsDim, kActDim), NetSpec::value(kObsDim),
                              init_rng);
    ckpt.scaler = ObsScaler(kObsDim, cfg.obs_clip);
    ckpt.optimizer.clip = cfg.clip_init;
    ckpt.optimizer.lr_policy = cfg.lr_policy;
  }

  std::ofstream history_file;
  std::string ckpt_path;
  if (!options.out_dir.empty()) {
    std::filesystem::create_directories(options.out_dir);
    ckpt_path = (std::filesystem::path(options.out_dir) / "checkpoint.json").string();
    const auto history_path = std::filesystem::path(options.out_dir) / "history.txt";
    const bool append = !options.resume_from.empty() && std::filesystem::exists(history_path);
    history_file.open(history_path, append ? std::ios::app : std::ios::trunc);
    if (!history_file) throw Error(ErrorCode::kIo, "cannot write " + history_path.string());
    if (!append) history_file << kHistoryHeader;
  }

  const int total_updates = cfg.updates();
  for (int u = ckpt.update; u < total_updates; ++u) {
    RolloutSet set = collect_rollouts(scenario, ckpt.params, ckpt.scaler,
                                      cfg.episodes_per_rollout, seed, ckpt.episodes);
    compute_returns_advantages(set, scenario.reward.gamma_shaping,
                               scenario.reward.gamma_terminal);
    const UpdateDiagnostics diag = ppo_update(set, ckpt.params, ckpt.optimizer, cfg);
    kl_servo(diag.kl, cfg.kl_target, cfg.servo, ckpt.optimizer);
    ckpt.episodes += cfg.episodes_per_rollout;
    ckpt.update = u + 1;

    const HistoryRow row =
        summarize(set, u, ckpt.episodes, diag, ckpt.optimizer, scenario.reward.r_lim);
    result.history.push_back(row);
    if (history_file.is_open()) {
      write_history(history_file, {row});
      history_file.flush();
    }
    if (options.on_update) options.on_update(row);
    if (!ckpt_path.empty() && cfg.checkpoint_every > 0 && ckpt.update % cfg.checkpoint_every == 0) {
      save_checkpoint(ckpt, ckpt_path);
    }
  }
  if (!ckpt_path.empty()) save_checkpoint(ckpt, ckpt_path);
  return result;
}

// ---------------------------------------------------------------------------
// PolicyAgent

PolicyAgent::PolicyAgent(PolicyParams params, ObsScaler scaler)
    : params_(std::move(params)), scaler_(std::move(scaler)) {
  begin_episode();
}

void PolicyAgent::begin_episode() { hidden_ = VecX::Zero(params_.policy_spec.hidden2); }

Vec3 PolicyAgent::act(const Observation& obs) {
  const PolicyOutput out = policy_forward(params_, scaler_.normalize(obs), hidden_);
  return {out.mean[0], out.mean[1], out.mean[2]};
}

}  // namespace losc
