#include <gtest/gtest.h>

#include <random>

#include "vsafe/driver/fis.hpp"

using namespace vsafe::driver;

namespace {

// Brute-force Mamdani reference: midpoint-rule centroid of the aggregate on
// a fine grid over the output supports.
double brute_force(const FisConfig& cfg, double x, int n = 400000) {
  std::array<double, 7> w{};
  for (std::size_t i = 0; i < 7; ++i)
    w[static_cast<std::size_t>(cfg.rules[i])] =
        std::max(w[static_cast<std::size_t>(cfg.rules[i])], cfg.input_mfs[i](x));
  double lo = 1e9, hi = -1e9;
  for (const auto& m : cfg.output_mfs) {
    lo = std::min(lo, m.lo());
    hi = std::max(hi, m.hi());
  }
  const double h = (hi - lo) / n;
  double num = 0.0, den = 0.0;
  for (int k = 0; k < n; ++k) {
    const double y = lo + (k + 0.5) * h;
    double mu = 0.0;
    for (std::size_t j = 0; j < 7; ++j) mu = std::max(mu, std::min(w[j], cfg.output_mfs[j](y)));
    num += y * mu;
    den += mu;
  }
  return std::clamp(num / den, -1.0, 1.0);
}

}  // namespace

TEST(Fis, ZeroMapsToZero) { EXPECT_NEAR(fis_evaluate(FisConfig::defaults(), 0.0), 0.0, 1e-15); }

TEST(Fis, FullErrorFiresOnlyPositiveBig) {
  // Only PB fires at x=1 with weight 1/3 on its clipped, symmetric triangle.
  EXPECT_NEAR(fis_evaluate(FisConfig::defaults(), 1.0), 0.9, 1e-12);
  EXPECT_NEAR(fis_evaluate(FisConfig::defaults(), -1.0), -0.9, 1e-12);
}

TEST(Fis, AsymmetricTriangleCentroid) {
  // PB = (center 0.9, left 0.2, right 0.1) fully fired alone: centroid of the
  // triangle with vertices 0.7, 0.9, 1.0.
  auto cfg = FisConfig::defaults();
  cfg.output_mfs[6] = {"PB", 0.9, 0.2, 0.1};
  cfg.input_mfs[6] = {"PB", 1.0, 0.2, 0.2};
  cfg.input_mfs[5] = {"PM", 0.55, 0.3, 0.3};
  EXPECT_NEAR(fis_evaluate(cfg, 1.0), (0.7 + 0.9 + 1.0) / 3.0, 1e-12);
}

TEST(Fis, BoundedMonotoneAndOddOnSweep) {
  const auto cfg = FisConfig::defaults();
  ASSERT_TRUE(cfg.symmetric());
  double prev = -2.0;
  for (int k = 0; k < 1000; ++k) {
    const double x = -1.0 + 2.0 * k / 999.0;
    const double y = fis_evaluate(cfg, x);
    EXPECT_GE(y, -1.0);
    EXPECT_LE(y, 1.0);
    EXPECT_GE(y, prev - 1e-12) << "x=" << x;
    EXPECT_NEAR(fis_evaluate(cfg, -x), -y, 1e-12);
    prev = y;
  }
}

TEST(Fis, InputsOutsideDomainAreClamped) {
  const auto cfg = FisConfig::defaults();
  EXPECT_DOUBLE_EQ(fis_evaluate(cfg, 5.0), fis_evaluate(cfg, 1.0));
  EXPECT_DOUBLE_EQ(fis_evaluate(cfg, -5.0), fis_evaluate(cfg, -1.0));
}

TEST(Fis, ExactCentroidMatchesBruteForce) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto skewed = FisConfig::defaults();
  skewed.output_mfs[4].right = 0.5;
  skewed.output_mfs[1].left = 0.1;
  skewed.rules = {0, 0, 2, 3, 5, 5, 6};
  for (const auto& cfg : {FisConfig::defaults(), skewed}) {
    for (int i = 0; i < 40; ++i) {
      const double x = u(rng);
      EXPECT_NEAR(fis_evaluate(cfg, x), brute_force(cfg, x), 2e-6) << "x=" << x;
    }
  }
}

TEST(Fis, CurveInterpolatesInference) {
  const auto cfg = FisConfig::defaults();
  const FisCurve curve(cfg);
  EXPECT_EQ(curve.size(), 2001u);
  for (int k = 0; k <= 300; ++k) {
    const double x = -1.0 + 2.0 * k / 300.0 + 1e-4 * (k % 3);
    EXPECT_NEAR(curve(x), fis_evaluate(cfg, x), 2e-4);
  }
  EXPECT_NEAR(curve(0.0), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(curve(1.0), fis_evaluate(cfg, 1.0));
}

TEST(Fis, ValidationRejectsBrokenConfigs) {
  EXPECT_NO_THROW(FisConfig::defaults().validate());

  auto gap = FisConfig::defaults();
  for (auto& m : gap.input_mfs) m.left = m.right = 0.05;  // holes between terms
  EXPECT_THROW(gap.validate(), vsafe::ConfigError);

  auto label = FisConfig::defaults();
  label.output_mfs[2].label = "XX";
  EXPECT_THROW(label.validate(), vsafe::ConfigError);

  auto order = FisConfig::defaults();
  std::swap(order.input_mfs[1].center, order.input_mfs[2].center);
  EXPECT_THROW(order.validate(), vsafe::ConfigError);

  auto rule = FisConfig::defaults();
  rule.rules[3] = 9;
  EXPECT_THROW(rule.validate(), vsafe::ConfigError);
}

TEST(Fis, SymmetryDetection) {
  auto cfg = FisConfig::defaults();
  EXPECT_TRUE(cfg.symmetric());
  cfg.output_mfs[6].left = 0.2;
  EXPECT_FALSE(cfg.symmetric());
}
