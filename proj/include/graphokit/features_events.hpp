#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "graphokit/ink.hpp"

namespace graphokit {

struct Point2D {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2D&, const Point2D&) = default;
};

struct Segment2D {
  Point2D p;
  Point2D q;
  std::size_t stroke_index = 0;
  std::size_t position = 0;  // ordinal within its stroke
};

// Segments of a polyline stroke; zero-length segments are skipped but keep
// their position numbering so adjacency is judged on the original polyline.
std::vector<Segment2D> stroke_segments(const Stroke& stroke);

// True when the segments cross: either a proper interior crossing or a
// collinear overlap of positive length. Touching at an endpoint (tangency)
// does not count.
bool segments_cross(const Segment2D& a, const Segment2D& b);

enum class IntersectionMode { IntraStroke, InterStroke };

struct IntersectionCount {
  std::size_t count = 0;
  double relative = 0.0;    // count / number of strokes
  double per_length = 0.0;  // count / total path length
};

// Counts crossings over the given (on-surface) strokes with an x-sorted
// sweep over segment bounding boxes.
IntersectionCount count_intersections(std::span<const Stroke> strokes, IntersectionMode mode);

struct PenStopOptions {
  double min_duration = 0.030;  // seconds
  double radius = 10.0;         // tablet units
};

// Greedy left-to-right count of on-surface runs that stay within `radius` of
// their first sample for at least `min_duration`. Runs never cross a stroke
// boundary.
std::size_t count_pen_stops(const InkRecording& rec, const PenStopOptions& options = {});

// Entropy in bits of a uniform-width histogram over [min, max].
double shannon_entropy(std::span<const double> series, std::size_t bins = 16);

struct ProfileChanges {
  std::size_t count = 0;
  double relative = 0.0;  // count / duration
};

// Strict local extrema of a velocity sequence; flat runs collapse into their
// neighbours. Throws TooShort below 3 values.
ProfileChanges velocity_profile_changes(std::span<const double> velocity, double duration);

struct StrokeSummary {
  std::size_t interruptions = 0;  // on-surface -> in-air transitions
  double tempo = 0.0;             // on-surface strokes per second
};

StrokeSummary stroke_summary(const InkRecording& rec);

}  // namespace graphokit
