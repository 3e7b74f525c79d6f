#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "vsafe/mobility/vehicle.hpp"

using namespace vsafe::mobility;

TEST(PedalToAccel, Mapping) {
  VehicleParams p;
  EXPECT_EQ(pedal_to_accel(p, 0.0, 10.0, 0.0, 0.01), 0.0);
  p.actuator_tau = 0.0;
  EXPECT_DOUBLE_EQ(pedal_to_accel(p, -1.0, 10.0, 0.0, 0.01), -8.0);
  p.actuator_tau = 0.2;
  EXPECT_DOUBLE_EQ(pedal_to_accel(p, 0.5, 10.0, 0.0, 0.2), 1.5);
  EXPECT_DOUBLE_EQ(pedal_to_accel(p, 0.5, 10.0, 0.0, 0.02), 0.15);
}

TEST(PedalToAccel, NoReverseAtStandstill) {
  VehicleParams p;
  EXPECT_EQ(pedal_to_accel(p, -1.0, 0.0, -3.0, 0.01), 0.0);
  EXPECT_GT(pedal_to_accel(p, 1.0, 0.0, 0.0, 0.01), 0.0);
}

TEST(Integrate, WrapsAroundTheRing) {
  VehicleState s{1999.95, 10.0, 0.0, 0.0};
  s = integrate(s, 0.0, 0.01, 2000.0);
  EXPECT_NEAR(s.pos, 0.05, 1e-9);
  EXPECT_DOUBLE_EQ(s.vel, 10.0);
}

TEST(Integrate, VelocityClampReportsEffectiveAcceleration) {
  VehicleState s{100.0, 0.05, 0.0, 0.0};
  s = integrate(s, -8.0, 0.01, 2000.0);
  EXPECT_EQ(s.vel, 0.0);
  EXPECT_NEAR(s.accel, -5.0, 1e-12);
  EXPECT_DOUBLE_EQ(s.pos, 100.0);
}

TEST(Integrate, UniformMotion) {
  VehicleState s{10.0, 12.0, 0.0, 0.0};
  s = integrate(s, 0.0, 0.01, 2000.0);
  EXPECT_NEAR(s.pos, 10.12, 1e-12);
}

TEST(Integrate, FirstOrderConvergence) {
  // Constant acceleration from rest: semi-implicit Euler error is O(dt).
  auto run = [](double dt) {
    VehicleState s{0.0, 0.0, 0.0, 0.0};
    const auto n = std::llround(5.0 / dt);
    for (long long k = 0; k < n; ++k) s = integrate(s, 2.0, dt, 1e9);
    return std::abs(s.pos - 0.5 * 2.0 * 25.0);
  };
  const double e1 = run(0.01), e2 = run(0.005);
  EXPECT_NEAR(e1 / e2, 2.0, 0.01);
}

TEST(Integrate, StaysInRangeAndNonNegative) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> a(-9.0, 4.0);
  VehicleState s{0.0, 5.0, 0.0, 0.0};
  for (int k = 0; k < 100000; ++k) {
    s = integrate(s, a(rng), 0.01, 2000.0);
    ASSERT_GE(s.vel, 0.0);
    ASSERT_GE(s.pos, 0.0);
    ASSERT_LT(s.pos, 2000.0);
  }
}

TEST(GapToLeader, Examples) {
  EXPECT_DOUBLE_EQ(gap_to_leader({100.0}, {152.0}, 4.5, 2000.0), 47.5);
  EXPECT_DOUBLE_EQ(gap_to_leader({1990.0}, {10.0}, 5.0, 2000.0), 15.0);
  EXPECT_DOUBLE_EQ(gap_to_leader({100.0}, {104.5}, 4.5, 2000.0), 0.0);
}

TEST(GapToLeader, RingCircumferenceIsConserved) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 2000.0);
  std::vector<double> pos(40);
  for (auto& p : pos) p = u(rng);
  std::sort(pos.begin(), pos.end());
  double total = 0.0;
  for (std::size_t i = 0; i < pos.size(); ++i)
    total += gap_to_leader({pos[i]}, {pos[(i + 1) % pos.size()]}, 4.5, 2000.0) + 4.5;
  EXPECT_NEAR(total, 2000.0, 1e-9);
}
