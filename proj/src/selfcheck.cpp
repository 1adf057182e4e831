#include "losc/selfcheck.hpp"

#include <cmath>
#include <sstream>

#include "losc/config.hpp"
#include "losc/env.hpp"
#include "losc/geometry.hpp"
#include "losc/harness.hpp"
#include "losc/nets.hpp"
#include "losc/ppo.hpp"
#include "losc/seeker.hpp"

namespace losc {

namespace {

struct Outcome {
  bool ok;
  std::string detail;
};

template <typename T>
std::string fmt_value(const char* label, T value) {
  std::ostringstream os;
  os.precision(3);
  os << label << ' ' << value;
  return os.str();
}

Vec3 random_vec(Rng& rng, double scale) {
  return {uniform(rng, -scale, scale), uniform(rng, -scale, scale), uniform(rng, -scale, scale)};
}

Outcome dcm_orthonormal() {
  Rng rng(11);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Dcm c = euler321_to_dcm({uniform(rng, -kPi, kPi), uniform(rng, -1.5, 1.5),
                                   uniform(rng, -kPi, kPi)});
    worst = std::max(worst, (c * c.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff());
    worst = std::max(worst, std::abs(c.determinant() - 1.0));
  }
  return {worst < 1e-12, fmt_value("max deviation", worst)};
}

Outcome collision_triangle() {
  Rng rng(12);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Vec3 r = random_vec(rng, 5000.0);
    const Vec3 v_t = random_vec(rng, 300.0);
    const Vec3 v_m = collision_velocity_3d(r, v_t, 900.0);
    // Closest approach of straight-line motion.
    const Vec3 v_rel = v_t - v_m;
    const double t = -r.dot(v_rel) / v_rel.squaredNorm();
    worst = std::max(worst, (r + t * v_rel).norm() / r.norm());
  }
  return {worst < 1e-9, fmt_value("max relative miss", worst)};
}

Outcome rk4_constant_accel() {
  MissileDragParams drag{1.0, 450.0, 0.0, 1.0};
  DynamicsParams p{drag, {}};
  const Vec3 v0(800.0, 100.0, -50.0);
  const Vec3 a = -20.0 * v0.normalized();
  EngagementState s = EngagementState::from_velocities(0.0, Vec3::Zero(), v0,
                                                       Vec3(1e5, 0, 0), Vec3::Zero());
  for (int i = 0; i < 100; ++i) s = rk4_step(s, {a, Vec3::Zero()}, p, 0.02);
  const double t = s.t;
  const Vec3 expect = v0 * t + 0.5 * a * t * t;
  const double err = (s.missile_pos - expect).norm() / expect.norm();
  return {err < 1e-9, fmt_value("relative error", err)};
}

Outcome drag_monotone() {
  DynamicsParams p;
  EngagementState s = EngagementState::from_velocities(
      0.0, Vec3(0, 0, 3000), Vec3(900, 0, 0), Vec3(1e6, 0, 3000), Vec3::Zero());
  double prev = s.missile_speed;
  for (int i = 0; i < 200; ++i) {
    s = rk4_step(s, {}, p, 0.02);
    if (s.missile_speed > prev) return {false, "speed increased at step " + std::to_string(i)};
    prev = s.missile_speed;
  }
  return {true, fmt_value("final speed", prev)};
}

Outcome seeker_identity() {
  Rng rng(13);
  Seeker seeker(RadomeParams{}, 0.0, 0.02);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Vec3 los = random_vec(rng, 1.0).normalized();
    seeker.reset();
    const Vec3 out = seeker.apparent_los(los, random_vec(rng, 1.0).normalized(), 0.02, rng);
    worst = std::max(worst, (out - los).norm());
  }
  return {worst < 1e-12, fmt_value("max deviation", worst)};
}

Outcome radome_slope() {
  const RadomeParams p{0.01, 0.01, 2.0, 2.0};
  double worst = 0.0;
  for (double look = 0.1; look < 3.0; look += 0.1) {
    const double h = 1e-6;
    const double fd = (refraction_angles(look + h, p).u - refraction_angles(look - h, p).u) / (2 * h);
    worst = std::max(worst, std::abs(fd - refraction_slope_u(look, p)));
  }
  return {worst < 1e-6, fmt_value("max slope error", worst)};
}

Outcome maneuver_orthogonal() {
  Rng rng(14);
  ManeuverConfig cfg;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const ManeuverSpec spec = sample_maneuver(cfg, 300.0, rng, 10.0);
    const Vec3 v = random_vec(rng, 500.0);
    for (double t = 0.0; t < 15.0; t += 0.37) {
      const Vec3 a = commanded_accel(spec, t, v);
      if (a.norm() > 0.0) worst = std::max(worst, std::abs(a.dot(v.normalized())) / a.norm());
    }
  }
  return {worst < 1e-9, fmt_value("max |a.v|/|a|", worst)};
}

Outcome accel_limit() {
  GuidanceConfig g;
  FlightControl fcs(g);
  Rng rng(15);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const Vec3 a = fcs.update(random_vec(rng, 2000.0), 0.0, 1000.0, 0.02);
    worst = std::max(worst, a.norm());
  }
  return {worst <= g.accel_max * (1.0 + 1e-12), fmt_value("max |a_M|", worst)};
}

Outcome reward_values() {
  const RewardParams p;
  const double hit = reward(0.0, 0.0, true, p).total();
  const double near = reward(0.5, 0.0, true, p).total();
  const double far = reward(10.0, 0.0, true, p).total();
  const double shaping = reward(100.0, 0.5, false, p).total();
  const bool ok = std::abs(hit - 30.0) < 1e-12 &&
                  std::abs(near - (10.0 + 20.0 * std::exp(-0.25))) < 1e-12 &&
                  std::abs(far - 20.0 * std::exp(-100.0)) < 1e-12 &&
                  std::abs(shaping + 0.005) < 1e-12;
  return {ok, fmt_value("r(0)", hit)};
}

Outcome gru_gradient() {
  const NetSpec spec{3, 4, 3, 2, 2};
  const GruNet net(spec);
  Rng rng(16);
  VecX params(net.num_params());
  net.init(params, rng);
  const MatX obs = MatX::Random(3, 6);
  const VecX h0 = VecX::Random(3) * 0.5;
  const MatX target = MatX::Random(2, 6);
  auto loss = [&](const VecX& w) { return 0.5 * (net.forward(w, obs, h0) - target).squaredNorm(); };

  GruNet::SequenceCache cache;
  const MatX out = net.forward(params, obs, h0, &cache);
  VecX grad = VecX::Zero(params.size());
  net.backward(params, cache, out - target, grad);

  double worst = 0.0;
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    VecX wp = params, wm = params;
    wp[i] += 1e-6;
    wm[i] -= 1e-6;
    const double fd = (loss(wp) - loss(wm)) / 2e-6;
    worst = std::max(worst, std::abs(fd - grad[i]) / std::max(1e-6, std::abs(fd) + std::abs(grad[i])));
  }
  return {worst < 1e-4, fmt_value("max relative error", worst)};
}

Outcome servo_bounds() {
  const KlServoConfig servo;
  OptimizerState opt;
  for (int i = 0; i < 200; ++i) kl_servo(1.0, 1e-3, servo, opt);
  const bool low = opt.clip == servo.clip_min && opt.lr_policy == servo.lr_min;
  for (int i = 0; i < 400; ++i) kl_servo(0.0, 1e-3, servo, opt);
  const bool high = opt.clip == servo.clip_max && opt.lr_policy == servo.lr_max;
  return {low && high, fmt_value("final clip", opt.clip)};
}

Outcome zero_curvature_identity() {
  ScenarioConfig pn;
  pn.guidance.law = GuidanceLaw::kPn;
  ScenarioConfig losc = pn;
  losc.guidance.law = GuidanceLaw::kPnLosc;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    ZeroAgent agent;
    std::vector<TraceRow> a, b;
    run_episode(pn, agent, seed, &a);
    run_episode(losc, agent, seed, &b);
    if (a.size() != b.size()) return {false, "trace lengths differ"};
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].missile_pos != b[i].missile_pos || a[i].target_pos != b[i].target_pos) {
        return {false, "traces differ at row " + std::to_string(i)};
      }
    }
  }
  return {true, "3 seeds identical"};
}

Outcome benchmark_determinism() {
  ScenarioConfig cfg;
  cfg.guidance.law = GuidanceLaw::kPn;
  const BenchmarkOptions opts{8, 5, ""};
  const BenchmarkStats a = run_benchmark(cfg, opts);
  const BenchmarkStats b = run_benchmark(cfg, opts);
  const bool same = summary_json(a) == summary_json(b);
  const bool monotone = a.miss_pct[0] <= a.miss_pct[1] && a.miss_pct[1] <= a.miss_pct[2] &&
                        a.miss_pct[0] >= 0.0 && a.miss_pct[2] <= 100.0;
  return {same && monotone, same ? "repeatable" : "stats differ between runs"};
}

Outcome config_round_trip() {
  Config c;
  c.seed = 123456789012345ULL;
  c.scenario.range_m = {1234.5678901234567, 9876.54321};
  c.scenario.guidance.law = GuidanceLaw::kApn;
  c.trainer.lr_policy = 3.0e-5 / 7.0;
  const Config back = parse_config(dump_config(c));
  return {back == c, back == c ? "lossless" : "fields changed"};
}

}  // namespace

std::vector<CheckResult> run_selfcheck(const std::function<void(const CheckResult&)>& on_result) {
  const std::vector<std::pair<const char*, Outcome (*)()>> checks = {
      {"geometry.dcm_orthonormal", dcm_orthonormal},
      {"geometry.collision_triangle", collision_triangle},
      {"dynamics.rk4_constant_accel", rk4_constant_accel},
      {"dynamics.drag_monotone", drag_monotone},
      {"seeker.identity_path", seeker_identity},
      {"seeker.radome_slope", radome_slope},
      {"maneuvers.orthogonal", maneuver_orthogonal},
      {"guidance.accel_limit", accel_limit},
      {"env.reward_values", reward_values},
      {"nets.gru_gradient", gru_gradient},
      {"ppo.servo_bounds", servo_bounds},
      {"env.zero_curvature_identity", zero_curvature_identity},
      {"harness.benchmark_determinism", benchmark_determinism},
      {"config.round_trip", config_round_trip},
  };
  std::vector<CheckResult> results;
  for (const auto& [name, fn] : checks) {
    CheckResult r{name, false, ""};
    try {
      const Outcome o = fn();
      r.passed = o.ok;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    results.push_back(r);
    if (on_result) on_result(r);
    if (!r.passed) break;
  }
  return results;
}

}  // namespace losc
