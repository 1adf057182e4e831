#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "losc/dynamics.hpp"

using namespace losc;

namespace {

EngagementState make_state(const Vec3& rm, const Vec3& vm, const Vec3& rt, const Vec3& vt) {
  return EngagementState::from_velocities(0.0, rm, vm, rt, vt);
}

// Speed after time T under V' = -c V^2 integrated with step dt.
double quadratic_drag_speed(double dt, double T, const DynamicsParams& p) {
  EngagementState s = make_state(Vec3::Zero(), Vec3(1000, 0, 0), Vec3(1e7, 0, 0), Vec3::Zero());
  const int n = static_cast<int>(std::lround(T / dt));
  for (int i = 0; i < n; ++i) s = rk4_step(s, {}, p, dt);
  return s.missile_speed;
}

GuidanceSample hold(const Accelerations& a) {
  GuidanceSample g;
  g.accel = a;
  return g;
}

}  // namespace

TEST(Atmosphere, ExponentialDensity) {
  EXPECT_DOUBLE_EQ(density(0.0), 1.225);
  EXPECT_NEAR(density(8500.0), 1.225 / std::exp(1.0), 1e-15);
  EXPECT_DOUBLE_EQ(density(-100.0), 1.225);
}

TEST(Derivatives, MissileDragAtSeaLevel) {
  const EngagementState s = make_state(Vec3::Zero(), Vec3(1000, 0, 0), Vec3(1e4, 0, 0), Vec3::Zero());
  const BodyDerivative d = missile_derivatives(s, Vec3::Zero(), MissileDragParams{});
  EXPECT_NEAR(d.speed_dot, -(0.5 * 1.225 * 1e6 * 0.35) / 450.0, 1e-9);
  EXPECT_NEAR(d.speed_dot, -476.4, 0.05);
}

TEST(Derivatives, InducedDragOnly) {
  const EngagementState s = make_state(Vec3::Zero(), Vec3(1000, 0, 0), Vec3(1e4, 0, 0), Vec3::Zero());
  MissileDragParams p;
  p.cd0 = 0.0;
  const BodyDerivative d = missile_derivatives(s, Vec3(0, 60, 80), p);
  EXPECT_DOUBLE_EQ(d.speed_dot, -25.0);
  EXPECT_EQ(d.vel_raw_dot, Vec3(0, 60, 80));
}

TEST(Derivatives, TargetWithoutDragKeepsSpeed) {
  const EngagementState s = make_state(Vec3::Zero(), Vec3(1000, 0, 0), Vec3(1e4, 0, 0), Vec3(-500, 0, 0));
  EXPECT_EQ(target_derivatives(s, Vec3(0, 100, 0), TargetDragParams{}).speed_dot, 0.0);
}

TEST(TargetAccel, DynamicPressureScaling) {
  const Vec3 a(0, 100, 0);
  EXPECT_NEAR((realized_target_accel(a, 0.0, 600.0) - a).norm(), 0.0, 1e-12);
  EXPECT_NEAR(realized_target_accel(a, 0.0, 300.0).y(), 25.0, 1e-12);
  EXPECT_NEAR(realized_target_accel(a, 8500.0, 600.0).y(), 100.0 / std::exp(1.0), 1e-12);
}

TEST(Rk4, RejectsNonPositiveStep) {
  const EngagementState s;
  EXPECT_THROW(rk4_step(s, {}, DynamicsParams{}, 0.0), Error);
  EXPECT_THROW(rk4_step(s, {}, DynamicsParams{}, -1e-3), Error);
}

TEST(Rk4, ConstantAccelerationIsExact) {
  DynamicsParams p;
  p.missile = {1.0, 450.0, 0.0, 1.0};  // speed tracks |v| exactly for a along -v
  const Vec3 v0(700, -200, 150);
  const Vec3 a = -35.0 * v0.normalized();
  const Vec3 vt(-300, 40, 0);
  const Vec3 at(0, 20, -10);
  EngagementState s = make_state(Vec3(1, 2, 3), v0, Vec3(9000, 100, -50), vt);
  for (int i = 0; i < 250; ++i) s = rk4_step(s, {a, at}, p, 0.02);
  const double t = s.t;
  const Vec3 rm = Vec3(1, 2, 3) + v0 * t + 0.5 * a * t * t;
  EXPECT_LT((s.missile_pos - rm).norm() / rm.norm(), 1e-9);
  EXPECT_LT((s.missile_vel() - (v0 + a * t)).norm() / v0.norm(), 1e-9);
  // Without target drag its speed is held, so only the no-acceleration case is quadratic.
  EngagementState s2 = make_state(Vec3::Zero(), v0, Vec3(9000, 0, 0), vt);
  for (int i = 0; i < 250; ++i) s2 = rk4_step(s2, {Vec3::Zero(), Vec3::Zero()}, p, 0.02);
  EXPECT_LT((s2.target_pos - (Vec3(9000, 0, 0) + vt * s2.t)).norm() / 9000.0, 1e-12);
}

TEST(Rk4, FourthOrderOnQuadraticDrag) {
  DynamicsParams p;
  p.missile.k = 0.0;
  const double c = 0.5 * 1.225 * p.missile.cd0 * p.missile.s_ref / p.missile.mass;
  const double T = 2.0;
  const double exact = 1000.0 / (1.0 + c * 1000.0 * T);
  const double e1 = std::abs(quadratic_drag_speed(0.2, T, p) - exact);
  const double e2 = std::abs(quadratic_drag_speed(0.1, T, p) - exact);
  const double e3 = std::abs(quadratic_drag_speed(0.05, T, p) - exact);
  EXPECT_GE(e1 / e2, 12.0);
  EXPECT_LE(e1 / e2, 20.0);
  EXPECT_GE(e2 / e3, 12.0);
  EXPECT_LE(e2 / e3, 20.0);
}

TEST(Rk4, SpeedNeverIncreasesWithoutThrust) {
  DynamicsParams p;
  EngagementState s = make_state(Vec3(0, 0, 5000), Vec3(950, 0, 0), Vec3(1e6, 0, 0), Vec3::Zero());
  for (int i = 0; i < 500; ++i) {
    const double before = s.missile_speed;
    s = rk4_step(s, {Vec3(0, 50, 0), Vec3::Zero()}, p, 0.02);
    EXPECT_LE(s.missile_speed, before);
    EXPECT_NEAR(s.missile_vel().norm(), s.missile_speed, 1e-9 * before);
  }
}

TEST(Rk4, LateralAccelerationTurnsAtAOverV) {
  DynamicsParams p;
  p.missile = {0.0, 450.0, 0.0, 1.0};
  EngagementState s = make_state(Vec3::Zero(), Vec3(800, 0, 0), Vec3(1e6, 0, 0), Vec3::Zero());
  // Rotating the acceleration with the velocity gives a circle of radius V^2/a.
  const double a = 80.0, dt = 1e-3;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 v_hat = s.missile_dir();
    s = rk4_step(s, {a * Vec3(-v_hat.y(), v_hat.x(), 0), Vec3::Zero()}, p, dt);
  }
  const double heading = std::atan2(s.missile_vel().y(), s.missile_vel().x());
  EXPECT_NEAR(heading, a / 800.0 * 1.0, 1e-6);
  EXPECT_NEAR(s.missile_speed, 800.0, 1e-12);
}

TEST(Interval, StopsWhenClosingVelocityReverses) {
  DynamicsParams p;
  p.missile = {0.0, 450.0, 0.0, 1.0};
  IntegrationConfig cfg;
  // Head-on with a 3 m lateral offset: miss should be the offset.
  const EngagementState s0 = make_state(Vec3::Zero(), Vec3(1000, 0, 0), Vec3(3000, 3, 0), Vec3(-500, 0, 0));
  const EpisodeTrace tr = integrate_to_termination(
      s0, [](const EngagementState&) { return GuidanceSample{}; }, p, cfg);
  EXPECT_EQ(tr.termination, Termination::kClosingReversed);
  EXPECT_NEAR(tr.miss, 3.0, 1500.0 * cfg.fine_dt);
  // Closest approach falls on an interval boundary, so rounding may open one more.
  EXPECT_GE(tr.rows.size(), 100u);
  EXPECT_LE(tr.rows.size(), 101u);
  EXPECT_NEAR(tr.final_state.t, 2.0, cfg.fine_dt + 1e-12);
}

TEST(Interval, TimeCapEndsCoMovingEngagement) {
  IntegrationConfig cfg;
  cfg.time_cap = 0.5;
  DynamicsParams p;
  p.missile = {0.0, 450.0, 0.0, 1.0};
  const EngagementState s0 = make_state(Vec3::Zero(), Vec3(500, 0, 0), Vec3(0, 1000, 0), Vec3(500, 0, 0));
  const EpisodeTrace tr = integrate_to_termination(
      s0, [](const EngagementState&) { return GuidanceSample{}; }, p, cfg);
  EXPECT_EQ(tr.termination, Termination::kTimeCap);
  EXPECT_NEAR(tr.final_state.t, 0.5, 1e-9);
}

TEST(Interval, AlreadyOpeningGivesOneRow) {
  const EngagementState s0 = make_state(Vec3::Zero(), Vec3(-500, 0, 0), Vec3(1000, 0, 0), Vec3::Zero());
  const EpisodeTrace tr = integrate_to_termination(
      s0, [](const EngagementState&) { return GuidanceSample{}; }, DynamicsParams{},
      IntegrationConfig{});
  EXPECT_EQ(tr.rows.size(), 1u);
  EXPECT_EQ(tr.termination, Termination::kClosingReversed);
}

TEST(Interval, FineStepsMatchFineEverywhereNearIntercept) {
  DynamicsParams p;
  IntegrationConfig dual, fine;
  fine.fine_everywhere = true;
  const EngagementState s0 = make_state(Vec3(0, 0, 3000), Vec3(900, 30, 0), Vec3(4000, 0, 3000), Vec3(-400, 0, 0));
  auto ctrl = [](const EngagementState&) { return hold({Vec3(0, -15, 0), Vec3::Zero()}); };
  const double a = integrate_to_termination(s0, ctrl, p, dual).miss;
  const double b = integrate_to_termination(s0, ctrl, p, fine).miss;
  EXPECT_NEAR(a, b, 0.4);
}

TEST(Trace, HeaderAndColumnCount) {
  std::vector<TraceRow> rows(3);
  rows[1].t = 0.02;
  std::ostringstream os;
  write_trace(os, rows);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  ASSERT_EQ(line.rfind("# t ", 0), 0u);
  std::istringstream header(line.substr(2));
  int n = 0;
  for (std::string tok; header >> tok;) ++n;
  EXPECT_EQ(n, kTraceColumns);
  int count = 0;
  while (std::getline(is, line)) {
    std::istringstream row(line);
    int cols = 0;
    for (double x; row >> x;) ++cols;
    EXPECT_EQ(cols, kTraceColumns);
    ++count;
  }
  EXPECT_EQ(count, 3);
}

TEST(Interval, CoarseAndFineStepsAgreeOnTurningFlight) {
  DynamicsParams p;
  IntegrationConfig coarse;
  coarse.fine_range = -1.0;
  IntegrationConfig fine = coarse;
  fine.fine_everywhere = true;
  const EngagementState s0 =
      make_state(Vec3(0, 0, 5000), Vec3(900, 0, 0), Vec3(1e6, 0, 5000), Vec3(-500, 0, 0));
  EngagementState a = s0, b = s0;
  for (int i = 0; i < 300; ++i) {
    const Vec3 la = Vec3::UnitZ().cross(a.missile_dir()) * 300.0;
    const Vec3 lb = Vec3::UnitZ().cross(b.missile_dir()) * 300.0;
    a = advance_interval(a, {la, Vec3::Zero()}, p, coarse).state;
    b = advance_interval(b, {lb, Vec3::Zero()}, p, fine).state;
  }
  EXPECT_LT((a.missile_pos - b.missile_pos).norm(), 1e-4);
  EXPECT_NEAR(a.missile_speed, b.missile_speed, 1e-9);
}
