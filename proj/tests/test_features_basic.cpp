#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <regex>

#include "graphokit/error.hpp"
#include "graphokit/extract.hpp"
#include "graphokit/features_basic.hpp"
#include "graphokit/svc.hpp"
#include "graphokit/synth.hpp"
#include "test_util.hpp"

namespace graphokit {
namespace {

using testing::recording;

void expect_rel(double got, double want, double rel) {
  if (is_missing(want)) {
    EXPECT_TRUE(is_missing(got));
    return;
  }
  EXPECT_NEAR(got, want, rel * std::max(1.0, std::abs(want)));
}

TEST(Temporal, SingleStrokeRatioMissing) {
  const auto rec = recording({0, 1, 2}, {0, 0, 0}, {0.0, 1.0, 2.0});
  const auto f = temporal_features(rec);
  EXPECT_DOUBLE_EQ(f.scalars.at("duration"), 2.0);
  EXPECT_DOUBLE_EQ(f.scalars.at("duration_onsurf"), 2.0);
  EXPECT_DOUBLE_EQ(f.scalars.at("duration_inair"), 0.0);
  EXPECT_TRUE(is_missing(f.scalars.at("duration_ratio")));
}

TEST(Temporal, ThreeStrokes) {
  // on-surface [0, 1), in-air [1, 1.5), on-surface [1.5, 3]
  const auto rec = recording({0, 1, 2, 3, 4, 5}, {0, 0, 0, 0, 0, 0},
                             {0.0, 0.5, 1.0, 1.25, 1.5, 3.0}, {1, 1, 0, 0, 1, 1});
  const auto f = temporal_features(rec);
  EXPECT_DOUBLE_EQ(f.scalars.at("duration"), 3.0);
  EXPECT_DOUBLE_EQ(f.scalars.at("duration_onsurf"), 2.5);
  EXPECT_DOUBLE_EQ(f.scalars.at("duration_inair"), 0.5);
  EXPECT_DOUBLE_EQ(f.scalars.at("duration_ratio"), 5.0);
  EXPECT_EQ(f.vectors.at("stroke_duration_onsurf"), (std::vector<double>{1.0, 1.5}));
  EXPECT_EQ(f.vectors.at("stroke_duration_inair"), (std::vector<double>{0.5}));
  EXPECT_EQ(f.vectors.at("stroke_duration_ratio"), (std::vector<double>{2.0}));
}

TEST(Temporal, SynthSpiralDuration) {
  const auto s = gen_spiral(5.0, 3.0, 10.0);
  EXPECT_NEAR(temporal_features(s.recording).scalars.at("duration"), 10.0, 1.0 / 130.0);
}

TEST(Temporal, SingleSampleRejected) {
  EXPECT_THROW(temporal_features(recording({0}, {0}, {0})), Error);
}

TEST(Kinematic, UniformMotion) {
  std::vector<double> x, y, t;
  for (int i = 0; i < 20; ++i) {
    t.push_back(0.01 * i);
    x.push_back(10.0 * t.back());
    y.push_back(3.0);
  }
  const auto rec = recording(x, y, t);
  const auto strokes = segment_strokes(rec);
  for (double v : kinematic_profile(strokes[0], Projection::Global, KinematicOrder::Velocity)) {
    EXPECT_NEAR(v, 10.0, 1e-9);
  }
  for (double a : kinematic_profile(strokes[0], Projection::Global, KinematicOrder::Acceleration)) {
    EXPECT_NEAR(a, 0.0, 1e-6);
  }
  for (double v : kinematic_profile(strokes[0], Projection::Vertical, KinematicOrder::Velocity)) {
    EXPECT_EQ(v, 0.0);
  }
}

TEST(Kinematic, QuadraticMatchesAnalyticDerivative) {
  std::vector<double> x, y, t;
  for (int i = 0; i < 30; ++i) {
    t.push_back(0.1 * i);
    x.push_back(t.back() * t.back());
    y.push_back(0.0);
  }
  const auto rec = recording(x, y, t);
  const auto strokes = segment_strokes(rec);
  const auto v = kinematic_profile(strokes[0], Projection::Horizontal, KinematicOrder::Velocity);
  ASSERT_EQ(v.size(), 29u);
  for (std::size_t i = 0; i < v.size(); ++i) {
    // dx/dt = 2t at the interval midpoint
    EXPECT_NEAR(v[i], 2.0 * 0.5 * (t[i] + t[i + 1]), 1e-9);
  }
  const auto a = kinematic_profile(strokes[0], Projection::Horizontal, KinematicOrder::Acceleration);
  ASSERT_EQ(a.size(), 28u);
  for (double ai : a) EXPECT_NEAR(ai, 2.0, 1e-9);
}

TEST(Kinematic, TooShortIsEmpty) {
  const auto rec = recording({0, 1}, {0, 0}, {0, 0.01});
  const auto strokes = segment_strokes(rec);
  EXPECT_EQ(kinematic_profile(strokes[0], Projection::Global, KinematicOrder::Velocity).size(), 1u);
  EXPECT_TRUE(
      kinematic_profile(strokes[0], Projection::Global, KinematicOrder::Acceleration).empty());
}

TEST(Kinematic, EuclideanDominance) {
  const auto s = gen_scribble(4, 6.0, 130.0, {.radial_noise_sigma = 2.0, .seed = 4});
  for (const auto& st : segment_strokes(s.recording)) {
    const auto g = kinematic_profile(st, Projection::Global, KinematicOrder::Velocity);
    const auto h = kinematic_profile(st, Projection::Horizontal, KinematicOrder::Velocity);
    const auto v = kinematic_profile(st, Projection::Vertical, KinematicOrder::Velocity);
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_GE(g[i] + 1e-12, h[i]);
      EXPECT_GE(g[i] + 1e-12, v[i]);
    }
  }
}

TEST(Dynamic, ConstantPressureAndAzimuthConversion) {
  InkRecording rec =
      parse_svc("3\n0 0 0 1 1800 450 512\n1 0 8 1 1800 450 512\n2 0 16 1 1800 450 512\n");
  const auto f = dynamic_features(rec);
  EXPECT_DOUBLE_EQ(aggregate(f.vectors.at("pressure"), Aggregation::Median), 512.0);
  EXPECT_DOUBLE_EQ(aggregate(f.vectors.at("pressure"), Aggregation::NCV), 0.0);
  EXPECT_DOUBLE_EQ(aggregate(f.vectors.at("azimuth"), Aggregation::Median), 180.0);
}

TEST(Dynamic, PressureRampP95) {
  InkRecording rec;
  for (int i = 0; i <= 100; ++i) {
    auto s = testing::sample(i, 0, 0.01 * i);
    s.pressure = 10.0 * i;
    rec.samples.push_back(s);
  }
  const auto f = dynamic_features(rec);
  EXPECT_NEAR(aggregate(f.vectors.at("pressure"), Aggregation::P95), 950.0, 10.0);
}

TEST(Dynamic, InAirSamplesIgnored) {
  auto rec = recording({0, 1, 2}, {0, 0, 0}, {0, 0.01, 0.02}, {1, 0, 1});
  rec.samples[1].pressure = 9999.0;
  EXPECT_EQ(dynamic_features(rec).vectors.at("pressure").size(), 2u);
  const auto air = recording({0, 1}, {0, 0}, {0, 0.01}, {0, 0});
  EXPECT_THROW(dynamic_features(air), Error);
}

TEST(Spatial, UnitSquareAndTriangle) {
  const auto sq = recording({0, 1, 1, 0, 0}, {0, 0, 1, 1, 0}, {0, 1, 2, 3, 4});
  auto f = spatial_features(sq, SurfaceScope::OnSurface);
  EXPECT_DOUBLE_EQ(f.scalars.at("width"), 1.0);
  EXPECT_DOUBLE_EQ(f.scalars.at("height"), 1.0);
  EXPECT_DOUBLE_EQ(f.scalars.at("length"), 4.0);

  const auto seg = recording({0, 3}, {0, 4}, {0, 1});
  f = spatial_features(seg, SurfaceScope::OnSurface);
  EXPECT_DOUBLE_EQ(f.scalars.at("width"), 3.0);
  EXPECT_DOUBLE_EQ(f.scalars.at("height"), 4.0);
  EXPECT_DOUBLE_EQ(f.scalars.at("length"), 5.0);
  EXPECT_THROW(spatial_features(seg, SurfaceScope::InAir), Error);
}

// Composite Simpson rule for the arc length of r = b * theta.
double spiral_arc_length(double b, double theta_max) {
  const int n = 20000;
  const double h = theta_max / n;
  auto f = [&](double th) { return std::sqrt(b * b * th * th + b * b); };
  double sum = f(0.0) + f(theta_max);
  for (int i = 1; i < n; ++i) sum += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

TEST(Spatial, SpiralPathLengthMatchesQuadrature) {
  const auto s = gen_spiral(5.0, 3.0, 10.0);
  const double analytic = spiral_arc_length(5.0, 6.0 * std::numbers::pi);
  const double got = spatial_features(s.recording, SurfaceScope::OnSurface).scalars.at("length");
  EXPECT_NEAR(got / analytic, 1.0, 0.005);
}

TEST(Spatial, LengthAtLeastChord) {
  const auto s = gen_scribble(5, 6.0, 130.0, {.radial_noise_sigma = 3.0, .seed = 8});
  for (const auto& st : segment_strokes(s.recording)) {
    const auto& a = st.samples.front();
    const auto& b = st.samples.back();
    EXPECT_GE(path_length(st.samples) + 1e-9, std::hypot(b.x - a.x, b.y - a.y));
  }
}

TEST(Aggregate, Examples) {
  const std::vector<double> v3{1, 2, 3};
  EXPECT_NEAR(aggregate(v3, Aggregation::Slope), 1.0, 1e-12);
  const std::vector<double> v4{1, 2, 3, 4};
  EXPECT_NEAR(aggregate(v4, Aggregation::NCV), 0.6, 1e-12);
  const std::vector<double> c{7, 7, 7};
  EXPECT_EQ(aggregate(c, Aggregation::Median), 7.0);
  EXPECT_EQ(aggregate(c, Aggregation::NCV), 0.0);
  EXPECT_NEAR(aggregate(c, Aggregation::Slope), 0.0, 1e-12);
  EXPECT_EQ(aggregate(c, Aggregation::P95), 7.0);
}

TEST(Aggregate, Guards) {
  EXPECT_THROW(aggregate(std::vector<double>{}, Aggregation::Median), Error);
  EXPECT_TRUE(is_missing(aggregate_or_missing(std::vector<double>{}, Aggregation::Median)));
  EXPECT_TRUE(is_missing(aggregate(std::vector<double>{-1, 0, 1}, Aggregation::NCV)));
  EXPECT_TRUE(is_missing(aggregate(std::vector<double>{4}, Aggregation::Slope)));
}

// Order-statistic interpolation at p * (n - 1), written independently.
double quantile_oracle(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

TEST(Aggregate, QuantileAgainstOracle) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(5.0, 2.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> v(1 + rng() % 40);
    for (auto& x : v) x = n(rng);
    for (double p : {0.0, 0.25, 0.5, 0.75, 0.95, 1.0}) {
      EXPECT_NEAR(quantile(v, p), quantile_oracle(v, p), 1e-12);
    }
    const double med = quantile_oracle(v, 0.5);
    if (med != 0.0) {
      EXPECT_NEAR(aggregate(v, Aggregation::NCV),
                  (quantile_oracle(v, 0.75) - quantile_oracle(v, 0.25)) / med, 1e-9);
    }
  }
}

TEST(Aggregate, MedianAndP95MonotoneUnderShift) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> v(2 + rng() % 20);
    for (auto& x : v) x = u(rng);
    auto w = v;
    for (auto& x : w) x += 0.5;
    EXPECT_GT(aggregate(w, Aggregation::Median), aggregate(v, Aggregation::Median));
    EXPECT_GT(aggregate(w, Aggregation::P95), aggregate(v, Aggregation::P95));
  }
}

InkRecording transformed(const InkRecording& rec, double dx, double dy, double k) {
  InkRecording out = rec;
  for (auto& s : out.samples) {
    s.x += dx;
    s.y += dy;
    s.t *= k;
  }
  return out;
}

double value_of(const NamedFeatures& f, const std::string& name) {
  for (const auto& [n, v] : f) {
    if (n == name) return v;
  }
  ADD_FAILURE() << "missing feature " << name;
  return kMissing;
}

TEST(Invariance, TranslationLeavesFeaturesUnchanged) {
  const auto s = gen_scribble(4, 6.0, 130.0,
                              {.radial_noise_sigma = 1.0, .pen_stop_count = 2, .seed = 21});
  // On a 1/64 grid an integer shift is exact, so every difference is too.
  InkRecording grid = s.recording;
  for (auto& p : grid.samples) {
    p.x = std::round(p.x * 64.0) / 64.0;
    p.y = std::round(p.y * 64.0) / 64.0;
  }
  const auto base = extract_features(grid);
  const auto moved = extract_features(transformed(grid, 1234.0, -777.0, 1.0));
  ASSERT_EQ(base.size(), moved.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    const auto& name = base[i].first;
    if (name.find(".temporal.") != std::string::npos ||
        name.find(".kinematic.") != std::string::npos ||
        name.find(".spatial.") != std::string::npos) {
      SCOPED_TRACE(name);
      if (is_missing(base[i].second)) {
        EXPECT_TRUE(is_missing(moved[i].second));
      } else {
        EXPECT_EQ(moved[i].second, base[i].second);
      }
    }
  }
}

TEST(Invariance, TimeScalingCovariance) {
  const double k = 1.7;
  const auto s = gen_scribble(3, 5.0, 130.0, {.seed = 2});
  const auto base = extract_features(s.recording);
  const auto slow = extract_features(transformed(s.recording, 0.0, 0.0, k));
  for (std::size_t i = 0; i < base.size(); ++i) {
    const auto& name = base[i].first;
    const double b = base[i].second;
    if (is_missing(b)) continue;
    SCOPED_TRACE(name);
    const bool ncv = name.ends_with("_ncv");
    if (name.find(".kinematic.velocity") != std::string::npos && !ncv) {
      expect_rel(slow[i].second, b / k, 1e-9);
    } else if (name.find(".kinematic.acceleration") != std::string::npos && !ncv) {
      expect_rel(slow[i].second, b / (k * k), 1e-9);
    } else if (name.find(".temporal.duration") != std::string::npos ||
               (name.find(".temporal.stroke_duration_onsurf") != std::string::npos && !ncv) ||
               (name.find(".temporal.stroke_duration_inair") != std::string::npos && !ncv)) {
      if (name.ends_with("duration_ratio")) continue;
      expect_rel(slow[i].second, b * k, 1e-9);
    }
  }
  EXPECT_NEAR(value_of(slow, "sentence.temporal.duration"),
              k * value_of(base, "sentence.temporal.duration"), 1e-9);
}

TEST(FeatureNames, ContractAndStability) {
  const std::regex pattern(R"(^(spiral|sentence|pentagons)\.(temporal|kinematic|dynamic|spatial|other|specific)\.[a-z0-9_]+$)");
  for (Task task : {Task::Spiral, Task::Sentence, Task::Pentagons}) {
    InkRecording a, b;
    if (task == Task::Spiral) {
      a = gen_spiral(5.0, 3.0, 8.0).recording;
      b = recording({0, 1, 2}, {0, 1, 0}, {0, 0.01, 0.02});
    } else if (task == Task::Sentence) {
      a = gen_scribble(4, 6.0).recording;
      b = recording({0, 1}, {0, 1}, {0, 0.01});
    } else {
      a = gen_pentagons(1.0).recording;
      b = recording({0, 5, 0}, {0, 0, 0}, {0, 0.01, 0.02}, {1, 0, 1});
    }
    a.task = task;
    b.task = task;
    const auto fa = extract_features(a);
    const auto fb = extract_features(b);
    ASSERT_EQ(fa.size(), fb.size());
    for (std::size_t i = 0; i < fa.size(); ++i) {
      EXPECT_EQ(fa[i].first, fb[i].first);
      EXPECT_TRUE(std::regex_match(fa[i].first, pattern)) << fa[i].first;
    }
  }
  InkRecording r = gen_scribble(2, 3.0).recording;
  r.task = Task::Sentence;
  bool found = false;
  for (const auto& [n, v] : extract_features(r)) found |= n == "sentence.kinematic.velocity_vert_onsurf_median";
  EXPECT_TRUE(found);
}

}  // namespace
}  // namespace graphokit
