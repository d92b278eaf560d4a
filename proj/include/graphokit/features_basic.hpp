#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "graphokit/ink.hpp"

namespace graphokit {

enum class Projection { Global, Horizontal, Vertical };
enum class SurfaceScope { OnSurface, InAir, Both };
enum class Aggregation { Median, NCV, Slope, P95 };
enum class KinematicOrder { Velocity, Acceleration };

// Name tokens used by the feature-name contract.
std::string_view token(Projection p) noexcept;    // glob, horz, vert
std::string_view token(SurfaceScope s) noexcept;  // onsurf, inair, both
std::string_view token(Aggregation a) noexcept;   // median, ncv, slope, p95

inline constexpr Aggregation kAllAggregations[] = {Aggregation::Median, Aggregation::NCV,
                                                   Aggregation::Slope, Aggregation::P95};

// Quantile with linear interpolation between order statistics at position
// p * (n - 1). `values` need not be sorted.
double quantile(std::span<const double> values, double p);
double median(std::span<const double> values);

// Vector-to-scalar reduction. Throws EmptyVector on empty input. Returns
// kMissing for NCV with a zero median and for Slope with fewer than 2 points.
double aggregate(std::span<const double> values, Aggregation how);

// Same as aggregate() but an empty input yields kMissing.
double aggregate_or_missing(std::span<const double> values, Aggregation how);

struct KinematicOptions {
  // Projected velocities are |dx|/dt and |dy|/dt unless this is set.
  bool signed_projection = false;
};

// Per-sample velocity (n-1 values) or acceleration (n-2 values) of a stroke.
// Acceleration is the first difference of velocity over the midpoint time
// step. Too-short strokes give an empty sequence.
std::vector<double> kinematic_profile(const Stroke& stroke, Projection proj,
                                      KinematicOrder order,
                                      const KinematicOptions& options = {});

// Named scalar and vector outputs of one feature family.
struct FeatureSet {
  std::map<std::string, double> scalars;
  std::map<std::string, std::vector<double>> vectors;
};

// duration, duration_onsurf, duration_inair, duration_ratio (scalars);
// stroke_duration_onsurf, stroke_duration_inair, stroke_duration_ratio (vectors).
FeatureSet temporal_features(const InkRecording& rec);

// pressure, tilt, azimuth sequences over on-surface samples.
FeatureSet dynamic_features(const InkRecording& rec);

// width, height, length (scalars) and stroke_width, stroke_height,
// stroke_length (vectors) over the strokes in scope.
FeatureSet spatial_features(const InkRecording& rec, SurfaceScope scope);

// Point-to-point Euclidean path length of a sample run.
double path_length(std::span<const InkSample> samples);

}  // namespace graphokit
