#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "graphokit/error.hpp"
#include "graphokit/features_basic.hpp"
#include "graphokit/features_spiral.hpp"
#include "graphokit/synth.hpp"
#include "test_util.hpp"

namespace graphokit {
namespace {

constexpr double kPi = std::numbers::pi;

InkRecording ideal_spiral(double duration = 10.0) {
  return gen_spiral(5.0, 3.0, duration, 130.0, {}, {5000.0, 5000.0}).recording;
}

InkRecording rotated(const InkRecording& rec, double angle, double cx, double cy) {
  InkRecording out = rec;
  const double c = std::cos(angle), s = std::sin(angle);
  for (auto& p : out.samples) {
    const double dx = p.x - cx, dy = p.y - cy;
    p.x = cx + c * dx - s * dy;
    p.y = cy + s * dx + c * dy;
  }
  return out;
}

InkRecording scaled(const InkRecording& rec, double k) {
  InkRecording out = rec;
  for (auto& p : out.samples) {
    p.x *= k;
    p.y *= k;
  }
  return out;
}

TEST(UnwrapPolar, IdealSpiral) {
  const auto rec = ideal_spiral();
  const auto trace = unwrap_polar(rec);
  // the first sample sits on the centre and is dropped
  ASSERT_EQ(trace.theta.size(), rec.size() - 1);
  EXPECT_NEAR(trace.center_x, 5000.0, 1e-6);
  EXPECT_NEAR(trace.center_y, 5000.0, 1e-6);
  EXPECT_FALSE(trace.mirrored);
  EXPECT_NEAR(trace.theta.back(), 6.0 * kPi, 1e-6);
  // reconstruction against the generating angle
  for (std::size_t i = 0; i < trace.theta.size(); ++i) {
    EXPECT_NEAR(trace.theta[i], 6.0 * kPi * trace.t[i] / rec.duration(), 1e-6);
    if (i > 0) {
      EXPECT_LT(std::abs(trace.theta[i] - trace.theta[i - 1]), kPi);
    }
  }
  for (std::size_t i = 1; i < trace.r.size(); ++i) {
    if (trace.theta[i] > 2.0 * kPi) {
      EXPECT_GT(trace.r[i], trace.r[i - 1]);
    }
  }
}

TEST(UnwrapPolar, ClockwiseNormalised) {
  const auto ccw = ideal_spiral();
  InkRecording cw = ccw;
  for (auto& p : cw.samples) p.y = 10000.0 - p.y;  // mirror across y = 5000
  const auto a = unwrap_polar(ccw);
  const auto b = unwrap_polar(cw);
  EXPECT_TRUE(b.mirrored);
  ASSERT_EQ(a.r.size(), b.r.size());
  for (std::size_t i = 0; i < a.r.size(); ++i) {
    EXPECT_NEAR(a.r[i], b.r[i], 1e-6);
    EXPECT_NEAR(a.theta[i], b.theta[i], 1e-6);
    EXPECT_EQ(a.t[i], b.t[i]);
  }
  const auto fa = spiral_features(a, ccw);
  const auto fb = spiral_features(b, cw);
  for (const auto& [k, v] : fa) EXPECT_NEAR(fb.at(k), v, 1e-6 * std::max(1.0, std::abs(v))) << k;
}

TEST(UnwrapPolar, StraightLineIsNotASpiral) {
  const auto rec = testing::recording({0, 10, 20, 30, 40}, {0, 0, 0, 0, 0}, {0, 0.01, 0.02, 0.03, 0.04});
  try {
    unwrap_polar(rec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotASpiral);
  }
}

TEST(SpiralFeatures, IdealValues) {
  const auto rec = ideal_spiral();
  const auto trace = unwrap_polar(rec);
  const auto fit = fit_archimedean(trace);
  EXPECT_NEAR(fit.b, 5.0, 1e-6);
  EXPECT_NEAR(fit.a, 0.0, 1e-4);
  const auto f = spiral_features(trace, rec);
  EXPECT_LE(f.at("dos"), 1e-6);
  EXPECT_NEAR(f.at("tightness"), 0.2, 0.002);
  EXPECT_LE(f.at("width_var"), 1e-6);
  EXPECT_GE(f.at("spi"), 99.9);
  EXPECT_LE(f.at("smoothness2"), 1e-6);
}

TEST(SpiralFeatures, MeanSpeedMatchesArcLength) {
  const auto rec = ideal_spiral(10.0);
  const auto f = spiral_features(unwrap_polar(rec), rec);
  // Simpson quadrature of the arc length of r = 5 theta over three turns.
  const int n = 20000;
  const double tmax = 6.0 * kPi, h = tmax / n;
  auto g = [](double th) { return 5.0 * std::sqrt(th * th + 1.0); };
  double sum = g(0.0) + g(tmax);
  for (int i = 1; i < n; ++i) sum += g(i * h) * (i % 2 ? 4.0 : 2.0);
  const double arc = sum * h / 3.0;
  EXPECT_NEAR(f.at("mean_speed") / (arc / 10.0), 1.0, 0.005);
}

TEST(SpiralFeatures, LoopWidthsOfIdealSpiral) {
  const auto trace = unwrap_polar(ideal_spiral());
  const auto widths = loop_widths(trace);
  ASSERT_FALSE(widths.empty());
  for (double w : widths) EXPECT_NEAR(w, 2.0 * kPi * 5.0, 1e-3);
}

TEST(SpiralFeatures, RotationInvariance) {
  const auto rec = gen_spiral(5.0, 3.0, 8.0, 130.0, {.radial_noise_sigma = 1.5, .seed = 3},
                              {5000.0, 5000.0})
                       .recording;
  const auto base = spiral_features(unwrap_polar(rec), rec);
  double cx = 0.0, cy = 0.0;
  for (const auto& p : rec.samples) {
    cx += p.x;
    cy += p.y;
  }
  cx /= static_cast<double>(rec.size());
  cy /= static_cast<double>(rec.size());
  for (double angle : {0.3, 1.0, 2.5}) {
    const auto r = rotated(rec, angle, cx, cy);
    const auto f = spiral_features(unwrap_polar(r), r);
    for (const auto& [k, v] : base) {
      // derivative-based features amplify the residual centre uncertainty
      // left once the fit objective is flat to rounding
      const double rel = (k == "smoothness2" || k == "width_var") ? 1e-6 : 1e-9;
      EXPECT_NEAR(f.at(k), v, rel * std::max(1.0, std::abs(v))) << k << " @ " << angle;
    }
  }
}

TEST(SpiralFeatures, ScaleCovariance) {
  const auto rec = gen_spiral(5.0, 3.0, 8.0, 130.0, {.radial_noise_sigma = 1.0, .seed = 9},
                              {5000.0, 5000.0})
                       .recording;
  const auto base = spiral_features(unwrap_polar(rec), rec);
  const double k = 2.5;
  const auto big = scaled(rec, k);
  const auto f = spiral_features(unwrap_polar(big), big);
  EXPECT_NEAR(f.at("tightness"), base.at("tightness") / k, 1e-6);
  EXPECT_NEAR(f.at("mean_speed"), base.at("mean_speed") * k, 1e-6 * base.at("mean_speed") * k);
  for (const char* key : {"dos", "spi", "width_var", "zcr1", "smoothness2"}) {
    EXPECT_NEAR(f.at(key), base.at(key), 1e-6 * std::max(1.0, std::abs(base.at(key)))) << key;
  }
}

TEST(SpiralFeatures, SpiAtMostHundred) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto rec =
        gen_spiral(5.0, 3.0, 6.0, 130.0, {.radial_noise_sigma = 3.0, .seed = seed}).recording;
    const auto f = spiral_features(unwrap_polar(rec), rec);
    EXPECT_LT(f.at("spi"), 100.0);
    EXPECT_GT(f.at("dos"), 0.0);
  }
}

TEST(SpiralFeatures, ZeroCrossingBasisSelectable) {
  const auto rec =
      gen_spiral(5.0, 3.0, 6.0, 130.0, {.radial_noise_sigma = 2.0, .seed = 1}).recording;
  SpiralOptions raw;
  raw.zcr_basis = ZeroCrossingBasis::RawDerivative;
  const auto a = spiral_features(unwrap_polar(rec), rec);
  const auto b = spiral_features(unwrap_polar(rec, raw), rec, raw);
  EXPECT_GE(a.at("zcr1"), 0.0);
  EXPECT_GE(b.at("zcr1"), 0.0);
  EXPECT_EQ(a.at("dos"), b.at("dos"));
}

TEST(SpiralFeatures, CenterVariants) {
  const auto rec = ideal_spiral();
  for (auto c : {SpiralCenter::Fitted, SpiralCenter::Centroid, SpiralCenter::FirstPoint}) {
    SpiralOptions o;
    o.center = c;
    const auto trace = unwrap_polar(rec, o);
    EXPECT_GT(fit_archimedean(trace).b, 0.0);
  }
  SpiralOptions first;
  first.center = SpiralCenter::FirstPoint;
  EXPECT_NEAR(unwrap_polar(rec, first).center_x, rec.samples.front().x, 1e-12);
}

}  // namespace
}  // namespace graphokit
