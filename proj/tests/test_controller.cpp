#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "vsafe/driver/controller.hpp"
#include "vsafe/driver/delay_line.hpp"
#include "vsafe/driver/distraction.hpp"
#include "vsafe/driver/low_pass.hpp"
#include "vsafe/population.hpp"

using namespace vsafe;
using namespace vsafe::driver;

// ---- delay line -----------------------------------------------------------

TEST(DelayLine, ReturnsSampleOneReactionTimeOld) {
  DelayLine<double> line(1.4);
  for (int k = 0; k <= 20; ++k) line.push(k * 0.1, k * 0.1);
  const auto s = line.at(2.0);
  EXPECT_FALSE(s.stale);
  EXPECT_NEAR(s.t, 0.6, 1e-12);
  EXPECT_NEAR(s.value, 0.6, 1e-12);
}

TEST(DelayLine, ZeroDelayIsIdentity) {
  DelayLine<int> line(0.0);
  for (int k = 0; k < 5; ++k) {
    line.push(k * 0.1, k);
    EXPECT_EQ(line.at(k * 0.1).value, k);
  }
}

TEST(DelayLine, WarmUpReturnsEarliestFlaggedStale) {
  DelayLine<int> line(1.0);
  line.push(0.0, 7);
  line.push(0.1, 8);
  const auto s = line.at(0.5);
  EXPECT_TRUE(s.stale);
  EXPECT_EQ(s.value, 7);
}

TEST(DelayLine, RejectsMisuse) {
  EXPECT_THROW(DelayLine<int>(-1.0), std::invalid_argument);
  DelayLine<int> line(0.5);
  EXPECT_THROW(line.at(0.0), std::logic_error);
  line.push(1.0, 1);
  EXPECT_THROW(line.push(1.0, 2), std::invalid_argument);
}

TEST(DelayLine, RandomSignalIsReplayedExactlyOneDelayLater) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise;
  const double dt = 0.01, delay = 1.4;
  DelayLine<double> line(delay);
  std::vector<double> signal;
  const auto lag = static_cast<std::size_t>(std::llround(delay / dt));
  for (std::size_t k = 0; k < 5000; ++k) {
    const double t = static_cast<double>(k) * dt;
    signal.push_back(noise(rng));
    line.push(t, signal.back());
    const auto s = line.at(t);
    if (k >= lag) {
      ASSERT_FALSE(s.stale);
      ASSERT_NEAR(s.t, t - delay, dt / 2);
      ASSERT_EQ(s.value, signal[k - lag]);
    }
  }
  EXPECT_LE(line.size(), lag + 2);
}

// ---- low-pass filter ------------------------------------------------------

TEST(LowPass, TrailingMean) {
  const std::vector<double> ramp = {0, 1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(low_pass(0.5, ramp, 0.1), 2.0);
  EXPECT_DOUBLE_EQ(low_pass(0.2, ramp, 0.1), 3.5);
  const std::vector<double> one = {4.25};
  EXPECT_DOUBLE_EQ(low_pass(0.5, one, 0.1), 4.25);
  const std::vector<double> flat(50, -1.5);
  EXPECT_DOUBLE_EQ(low_pass(0.3, flat, 0.01), -1.5);
  EXPECT_THROW(low_pass(0.3, std::vector<double>{}, 0.01), std::invalid_argument);
}

TEST(LowPass, StreamingMatchesBatch) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-8.0, 3.0);
  MovingAverage ma(0.3, 0.01);
  std::vector<double> hist;
  for (int k = 0; k < 10000; ++k) {
    hist.push_back(u(rng));
    ma.push(hist.back());
    ASSERT_NEAR(ma.value(), low_pass(0.3, hist, 0.01), 1e-9);
  }
  ma.reset();
  EXPECT_EQ(ma.value(), 0.0);
}

// ---- pedal command --------------------------------------------------------

namespace {

DriverProfile test_profile() {
  DriverProfile p;
  p.idm.alpha = 2.0;
  p.idm.beta_c = 2.0;
  return p;
}

}  // namespace

TEST(Pedal, ZeroErrorGivesZero) {
  DriverState s;
  EXPECT_NEAR(pedal_command(test_profile(), 1.0, 1.0, 0.0, s, 0.0), 0.0, 1e-15);
}

TEST(Pedal, SaturatesAtFullError) {
  auto p = test_profile();
  p.pd.kd = 0.0;
  DriverState s;
  // FIS(1) = 0.9, kp * 1 = 0.2: 1.1 clamps to 1.
  EXPECT_DOUBLE_EQ(pedal_command(p, p.norm_scale(), 0.0, 0.0, s, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(fuzzy_pd_pedal([&](double x) { return fis_evaluate(p.fis, x); }, p.pd,
                                  p.norm_scale(), 0.2, 0.0, 0.0),
                   fis_evaluate(p.fis, 0.1) + 0.02);
}

TEST(Pedal, SwitchFromThrottleToBrakeWaitsSwitchTime) {
  const auto p = test_profile();
  DriverState s;
  const double dt = 0.01;
  double t = 0.0;
  EXPECT_GT(pedal_command(p, 2.0, 0.0, 0.0, s, t), 0.0);
  EXPECT_EQ(s.last_pedal_sign, PedalSign::Throttle);
  // Demand braking from t = 1.0 on; the brake is applied only at t = 1.2.
  double first_brake = -1.0;
  for (int k = 100; k <= 150; ++k) {
    t = k * dt;
    const double u = pedal_command(p, -2.0, 0.0, 0.0, s, t);
    if (t < 1.2 - 1e-9) EXPECT_EQ(u, 0.0) << "t=" << t;
    if (u < 0.0 && first_brake < 0.0) first_brake = t;
  }
  EXPECT_NEAR(first_brake, 1.2, 1e-9);
  EXPECT_EQ(s.last_pedal_sign, PedalSign::Brake);
}

TEST(Pedal, NeutralPassesWithoutLatency) {
  DriverState s;
  s.last_pedal_sign = PedalSign::Throttle;
  EXPECT_DOUBLE_EQ(apply_pedal_switch(s, 0.01, 0.0, 0.2), 0.01);
  EXPECT_FALSE(s.switching());
}

TEST(Pedal, EmergencyBypassesSwitch) {
  DriverState s;
  s.last_pedal_sign = PedalSign::Throttle;
  EXPECT_EQ(emergency_pedal(s), -1.0);
  EXPECT_EQ(s.last_pedal_sign, PedalSign::Brake);
}

// ---- driving-task state machine -------------------------------------------

namespace {

Percept seen(bool leader, double gap, double v, bool warning = false) {
  Percept p;
  p.has_leader = leader;
  p.gap = gap;
  p.own_velocity = v;
  p.warning_active = warning;
  return p;
}

}  // namespace

TEST(StateMachine, LeaderInsideVisionMeansFollowing) {
  const auto p = test_profile();
  auto s = update_driver_state({}, seen(true, 50.0, 20.0), p, 1.0);
  EXPECT_EQ(s.mode, DriverMode::Following);
  EXPECT_EQ(s.mode_entry_time, 1.0);
  s = update_driver_state(s, seen(true, 150.0, 20.0), p, 2.0);
  EXPECT_EQ(s.mode, DriverMode::FreeFlow);
}

TEST(StateMachine, WarningEntersEmergencyAndHoldsUntilClear) {
  const auto p = test_profile();  // s0 2, tau_h 1.5
  DriverState s;
  s = update_driver_state(s, seen(true, 30.0, 20.0), p, 0.0);
  s = update_driver_state(s, seen(true, 30.0, 20.0, true), p, 1.3);
  EXPECT_EQ(s.mode, DriverMode::Emergency);
  EXPECT_EQ(s.mode_entry_time, 1.3);
  // Gap 20 m exceeds s0 + v*tau_h = 17 m, but the warning ended only 1.2 s ago.
  s = update_driver_state(s, seen(true, 20.0, 10.0), p, 2.5);
  EXPECT_EQ(s.mode, DriverMode::Emergency);
  // Hold time over but gap still short.
  s = update_driver_state(s, seen(true, 10.0, 10.0), p, 3.5);
  EXPECT_EQ(s.mode, DriverMode::Emergency);
  s = update_driver_state(s, seen(true, 20.0, 10.0), p, 3.6);
  EXPECT_EQ(s.mode, DriverMode::Following);
}

// ---- distraction ----------------------------------------------------------

TEST(Distraction, CautiousDriversAlwaysFresh) {
  std::mt19937_64 rng(1);
  DriverProfile p;
  DistractionEpisode ep;
  for (int k = 0; k < 1000; ++k)
    EXPECT_EQ(distraction_step(rng, p, {}, ep, k * 1.0, Percept{}), PerceptGate::Fresh);
  std::mt19937_64 untouched(1);
  EXPECT_EQ(rng(), untouched());
}

TEST(Distraction, EpisodeFreezesLeaderButNotOwnState) {
  std::mt19937_64 rng(9);
  DriverProfile p;
  p.attention = Attention::Distracted;
  DistractionParams params{5.0, 3.0, 8.0};
  DistractionEpisode ep;
  double t = 0.0;
  Percept first_frozen;
  bool saw_episode = false;
  double busy = 0.0, total = 0.0;
  for (int k = 0; k < 200000; ++k, t += 0.01) {
    Percept fresh = seen(true, 100.0 - 1e-4 * k, 10.0 + 1e-5 * k);
    fresh.leader_velocity = 5.0;
    const auto gate = distraction_step(rng, p, params, ep, t, fresh);
    const auto out = gate_percept(gate, ep, fresh);
    total += 0.01;
    if (gate == PerceptGate::Frozen) {
      busy += 0.01;
      if (!saw_episode) first_frozen = ep.frozen;
      saw_episode = true;
      EXPECT_EQ(out.gap, ep.frozen.gap);
      EXPECT_EQ(out.own_velocity, fresh.own_velocity);
      EXPECT_TRUE(out.stale);
    } else {
      EXPECT_EQ(out.gap, fresh.gap);
    }
  }
  ASSERT_TRUE(saw_episode);
  // Long-run busy fraction of the renewal process: 5.5 / (5 + 5.5).
  EXPECT_NEAR(busy / total, 5.5 / 10.5, 0.05);
}

TEST(Population, SampledProfilesRespectClassRanges) {
  std::mt19937_64 rng(21);
  PopulationSpec spec;
  DriverProfile base;
  std::array<int, 3> counts{};
  int distracted = 0;
  const int n = 30000;
  for (int i = 0; i < n; ++i) {
    const auto p = sample_driver_profile(rng, spec, base, 0.03);
    const auto c = static_cast<std::size_t>(p.behavior);
    ++counts[c];
    EXPECT_EQ(p.behavior, classify(p.idm.tau_h));
    EXPECT_GE(p.idm.alpha, spec.accel[c].lo);
    EXPECT_LE(p.idm.alpha, spec.accel[c].hi);
    EXPECT_GE(p.idm.beta_c, spec.decel[c].lo);
    EXPECT_LE(p.idm.beta_c, spec.decel[c].hi);
    distracted += p.attention == Attention::Distracted;
  }
  EXPECT_NEAR(counts[0] / double(n), 0.19, 0.03);
  EXPECT_NEAR(counts[1] / double(n), 0.43, 0.03);
  EXPECT_NEAR(counts[2] / double(n), 0.38, 0.03);
  EXPECT_NEAR(distracted / double(n), 0.03, 0.005);
}

TEST(Population, ClassifyBoundaries) {
  EXPECT_EQ(classify(1.9), Behavior::Aggressive);
  EXPECT_EQ(classify(2.0), Behavior::Normal);
  EXPECT_EQ(classify(3.0), Behavior::Normal);
  EXPECT_EQ(classify(3.01), Behavior::Conservative);
}
