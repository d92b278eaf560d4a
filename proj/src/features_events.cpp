#include "graphokit/features_events.hpp"

#include <algorithm>
#include <cmath>

#include "graphokit/error.hpp"
#include "graphokit/features_basic.hpp"

namespace graphokit {

std::vector<Segment2D> stroke_segments(const Stroke& stroke) {
  std::vector<Segment2D> segs;
  const auto& s = stroke.samples;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    Segment2D seg{{s[i].x, s[i].y}, {s[i + 1].x, s[i + 1].y}, stroke.index, i};
    if (seg.p == seg.q) continue;
    segs.push_back(seg);
  }
  return segs;
}

namespace {

double orient(const Point2D& a, const Point2D& b, const Point2D& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

bool segments_cross(const Segment2D& a, const Segment2D& b) {
  const int o1 = sign_of(orient(a.p, a.q, b.p));
  const int o2 = sign_of(orient(a.p, a.q, b.q));
  const int o3 = sign_of(orient(b.p, b.q, a.p));
  const int o4 = sign_of(orient(b.p, b.q, a.q));
  if (o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0) {
    // Collinear: overlap along the dominant axis of `a`.
    const bool use_x = std::abs(a.q.x - a.p.x) >= std::abs(a.q.y - a.p.y);
    auto coord = [use_x](const Point2D& p) { return use_x ? p.x : p.y; };
    const double a_lo = std::min(coord(a.p), coord(a.q)), a_hi = std::max(coord(a.p), coord(a.q));
    const double b_lo = std::min(coord(b.p), coord(b.q)), b_hi = std::max(coord(b.p), coord(b.q));
    return std::min(a_hi, b_hi) - std::max(a_lo, b_lo) > 0.0;
  }
  return o1 * o2 < 0 && o3 * o4 < 0;
}

IntersectionCount count_intersections(std::span<const Stroke> strokes, IntersectionMode mode) {
  std::vector<Segment2D> segs;
  double total_length = 0.0;
  for (const auto& st : strokes) {
    auto s = stroke_segments(st);
    segs.insert(segs.end(), s.begin(), s.end());
    total_length += path_length(st.samples);
  }
  auto min_x = [](const Segment2D& s) { return std::min(s.p.x, s.q.x); };
  auto max_x = [](const Segment2D& s) { return std::max(s.p.x, s.q.x); };
  std::sort(segs.begin(), segs.end(), [&](const Segment2D& a, const Segment2D& b) {
    return min_x(a) < min_x(b);
  });

  std::size_t count = 0;
  std::vector<const Segment2D*> active;
  for (const auto& seg : segs) {
    const double lo = min_x(seg);
    std::erase_if(active, [&](const Segment2D* s) { return max_x(*s) < lo; });
    const double y_lo = std::min(seg.p.y, seg.q.y), y_hi = std::max(seg.p.y, seg.q.y);
    for (const Segment2D* other : active) {
      const bool same = other->stroke_index == seg.stroke_index;
      if (mode == IntersectionMode::IntraStroke) {
        if (!same) continue;
        const auto gap = other->position > seg.position ? other->position - seg.position
                                                        : seg.position - other->position;
        if (gap < 2) continue;
      } else if (same) {
        continue;
      }
      if (std::max(other->p.y, other->q.y) < y_lo || std::min(other->p.y, other->q.y) > y_hi) {
        continue;
      }
      if (segments_cross(*other, seg)) ++count;
    }
    active.push_back(&seg);
  }

  IntersectionCount out;
  out.count = count;
  out.relative = strokes.empty() ? 0.0 : static_cast<double>(count) / strokes.size();
  out.per_length = total_length > 0.0 ? static_cast<double>(count) / total_length : 0.0;
  return out;
}

std::size_t count_pen_stops(const InkRecording& rec, const PenStopOptions& options) {
  std::size_t stops = 0;
  // Slack for binary representation of millisecond timestamps.
  const double min_span = options.min_duration - 1e-9;
  for (const auto& st : segment_strokes(rec)) {
    if (!st.on_surface()) continue;
    const auto& s = st.samples;
    std::size_t i = 0;
    while (i < s.size()) {
      std::size_t j = i;
      while (j + 1 < s.size() &&
             std::hypot(s[j + 1].x - s[i].x, s[j + 1].y - s[i].y) <= options.radius) {
        ++j;
      }
      if (s[j].t - s[i].t >= min_span) {
        ++stops;
        i = j + 1;
      } else {
        ++i;
      }
    }
  }
  return stops;
}

double shannon_entropy(std::span<const double> series, std::size_t bins) {
  if (series.empty()) throw Error(ErrorCode::EmptyVector, "entropy of empty series");
  if (bins == 0) throw Error(ErrorCode::InvalidParams, "bins must be positive");
  const auto [lo_it, hi_it] = std::minmax_element(series.begin(), series.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) return 0.0;
  std::vector<std::size_t> hist(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double v : series) {
    auto k = static_cast<std::size_t>((v - lo) / width);
    hist[std::min(k, bins - 1)]++;
  }
  const double n = static_cast<double>(series.size());
  double h = 0.0;
  for (std::size_t c : hist) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

ProfileChanges velocity_profile_changes(std::span<const double> velocity, double duration) {
  if (velocity.size() < 3) {
    throw Error(ErrorCode::TooShort, "velocity profile needs >= 3 values");
  }
  int state = 0;
  std::size_t changes = 0;
  for (std::size_t i = 0; i + 1 < velocity.size(); ++i) {
    const double d = velocity[i + 1] - velocity[i];
    if (d == 0.0) continue;
    const int sign = d > 0.0 ? 1 : -1;
    if (state != 0 && sign != state) ++changes;
    state = sign;
  }
  ProfileChanges out;
  out.count = changes;
  out.relative = duration > 0.0 ? static_cast<double>(changes) / duration : 0.0;
  return out;
}

StrokeSummary stroke_summary(const InkRecording& rec) {
  if (rec.samples.size() < 2 || !(rec.duration() > 0.0)) {
    throw Error(ErrorCode::DegenerateRecording, "stroke summary needs a positive duration",
                rec.subject_id);
  }
  StrokeSummary out;
  std::size_t on_strokes = 0;
  const auto strokes = segment_strokes(rec);
  for (std::size_t i = 0; i < strokes.size(); ++i) {
    if (!strokes[i].on_surface()) continue;
    ++on_strokes;
    if (i + 1 < strokes.size()) ++out.interruptions;
  }
  out.tempo = static_cast<double>(on_strokes) / rec.duration();
  return out;
}

}  // namespace graphokit
