#include "graphokit/features_basic.hpp"

#include <algorithm>
#include <cmath>

#include "graphokit/error.hpp"
#include "graphokit/feature_table.hpp"

namespace graphokit {

std::string_view token(Projection p) noexcept {
  switch (p) {
    case Projection::Global: return "glob";
    case Projection::Horizontal: return "horz";
    case Projection::Vertical: return "vert";
  }
  return "glob";
}

std::string_view token(SurfaceScope s) noexcept {
  switch (s) {
    case SurfaceScope::OnSurface: return "onsurf";
    case SurfaceScope::InAir: return "inair";
    case SurfaceScope::Both: return "both";
  }
  return "both";
}

std::string_view token(Aggregation a) noexcept {
  switch (a) {
    case Aggregation::Median: return "median";
    case Aggregation::NCV: return "ncv";
    case Aggregation::Slope: return "slope";
    case Aggregation::P95: return "p95";
  }
  return "median";
}

double quantile(std::span<const double> values, double p) {
  if (values.empty()) throw Error(ErrorCode::EmptyVector, "quantile of empty vector");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double median(std::span<const double> values) { return quantile(values, 0.5); }

namespace {

double ols_slope(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  const double mean_x = (n - 1.0) / 2.0;
  double mean_y = 0.0;
  for (double y : v) mean_y += y;
  mean_y /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double dx = static_cast<double>(i) - mean_x;
    sxy += dx * (v[i] - mean_y);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace

double aggregate(std::span<const double> values, Aggregation how) {
  if (values.empty()) throw Error(ErrorCode::EmptyVector, "cannot aggregate an empty vector");
  switch (how) {
    case Aggregation::Median:
      return median(values);
    case Aggregation::NCV: {
      const double med = median(values);
      if (med == 0.0) return kMissing;
      return (quantile(values, 0.75) - quantile(values, 0.25)) / med;
    }
    case Aggregation::Slope:
      if (values.size() < 2) return kMissing;
      return ols_slope(values);
    case Aggregation::P95:
      return quantile(values, 0.95);
  }
  return kMissing;
}

double aggregate_or_missing(std::span<const double> values, Aggregation how) {
  return values.empty() ? kMissing : aggregate(values, how);
}

std::vector<double> kinematic_profile(const Stroke& stroke, Projection proj,
                                      KinematicOrder order,
                                      const KinematicOptions& options) {
  const auto& s = stroke.samples;
  const std::size_t need = order == KinematicOrder::Velocity ? 2 : 3;
  if (s.size() < need) return {};

  std::vector<double> velocity;
  velocity.reserve(s.size() - 1);
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double dx = s[i + 1].x - s[i].x;
    const double dy = s[i + 1].y - s[i].y;
    const double dt = s[i + 1].t - s[i].t;
    double disp = 0.0;
    switch (proj) {
      case Projection::Global: disp = std::hypot(dx, dy); break;
      case Projection::Horizontal: disp = options.signed_projection ? dx : std::abs(dx); break;
      case Projection::Vertical: disp = options.signed_projection ? dy : std::abs(dy); break;
    }
    velocity.push_back(disp / dt);
  }
  if (order == KinematicOrder::Velocity) return velocity;

  std::vector<double> accel;
  accel.reserve(velocity.size() - 1);
  for (std::size_t j = 0; j + 1 < velocity.size(); ++j) {
    // velocity[j] lives at the midpoint of (t_j, t_{j+1})
    const double dt_mid = 0.5 * (s[j + 2].t - s[j].t);
    accel.push_back((velocity[j + 1] - velocity[j]) / dt_mid);
  }
  return accel;
}

FeatureSet temporal_features(const InkRecording& rec) {
  if (rec.samples.size() < 2) {
    throw Error(ErrorCode::DegenerateRecording, "temporal features need >= 2 samples",
                rec.subject_id);
  }
  const auto strokes = segment_strokes(rec);
  FeatureSet out;
  std::vector<double> on, air;
  for (const auto& st : strokes) {
    (st.on_surface() ? on : air).push_back(st.duration());
  }
  if (on.empty()) {
    throw Error(ErrorCode::NoOnSurfaceSamples, "no on-surface stroke", rec.subject_id);
  }
  double on_total = 0.0, air_total = 0.0;
  for (double d : on) on_total += d;
  for (double d : air) air_total += d;

  out.scalars["duration"] = rec.duration();
  out.scalars["duration_onsurf"] = on_total;
  out.scalars["duration_inair"] = air_total;
  out.scalars["duration_ratio"] = air_total > 0.0 ? on_total / air_total : kMissing;

  std::vector<double> ratio;
  for (std::size_t i = 0; i < std::min(on.size(), air.size()); ++i) {
    if (air[i] > 0.0) ratio.push_back(on[i] / air[i]);
  }
  out.vectors["stroke_duration_onsurf"] = std::move(on);
  out.vectors["stroke_duration_inair"] = std::move(air);
  out.vectors["stroke_duration_ratio"] = std::move(ratio);
  return out;
}

FeatureSet dynamic_features(const InkRecording& rec) {
  FeatureSet out;
  std::vector<double> pressure, tilt, azimuth;
  for (const auto& s : rec.samples) {
    if (!s.on_surface()) continue;
    pressure.push_back(s.pressure);
    tilt.push_back(s.tilt);
    azimuth.push_back(s.azimuth);
  }
  if (pressure.empty()) {
    throw Error(ErrorCode::NoOnSurfaceSamples, "no on-surface samples", rec.subject_id);
  }
  out.vectors["pressure"] = std::move(pressure);
  out.vectors["tilt"] = std::move(tilt);
  out.vectors["azimuth"] = std::move(azimuth);
  return out;
}

double path_length(std::span<const InkSample> samples) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    len += std::hypot(samples[i + 1].x - samples[i].x, samples[i + 1].y - samples[i].y);
  }
  return len;
}

namespace {

bool in_scope(PenStatus status, SurfaceScope scope) {
  switch (scope) {
    case SurfaceScope::OnSurface: return status == PenStatus::OnSurface;
    case SurfaceScope::InAir: return status == PenStatus::InAir;
    case SurfaceScope::Both: return true;
  }
  return true;
}

struct Extent {
  double min_x = INFINITY, max_x = -INFINITY, min_y = INFINITY, max_y = -INFINITY;
  void add(const InkSample& s) {
    min_x = std::min(min_x, s.x);
    max_x = std::max(max_x, s.x);
    min_y = std::min(min_y, s.y);
    max_y = std::max(max_y, s.y);
  }
};

}  // namespace

FeatureSet spatial_features(const InkRecording& rec, SurfaceScope scope) {
  const auto strokes = segment_strokes(rec);
  Extent product;
  std::size_t count = 0;
  std::vector<double> widths, heights, lengths;
  for (const auto& st : strokes) {
    if (!in_scope(st.surface, scope)) continue;
    Extent e;
    for (const auto& s : st.samples) {
      e.add(s);
      product.add(s);
    }
    count += st.samples.size();
    widths.push_back(e.max_x - e.min_x);
    heights.push_back(e.max_y - e.min_y);
    lengths.push_back(path_length(st.samples));
  }
  if (count < 2) {
    throw Error(ErrorCode::EmptyScope,
                "fewer than 2 samples in scope " + std::string(token(scope)), rec.subject_id);
  }
  FeatureSet out;
  out.scalars["width"] = product.max_x - product.min_x;
  out.scalars["height"] = product.max_y - product.min_y;
  // Both: the whole trace is one polyline, in-air hops included.
  out.scalars["length"] = scope == SurfaceScope::Both
                              ? path_length(rec.samples)
                              : [&] {
                                  double sum = 0.0;
                                  for (double l : lengths) sum += l;
                                  return sum;
                                }();
  out.vectors["stroke_width"] = std::move(widths);
  out.vectors["stroke_height"] = std::move(heights);
  out.vectors["stroke_length"] = std::move(lengths);
  return out;
}

}  // namespace graphokit
