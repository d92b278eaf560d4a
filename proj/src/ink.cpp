#include "graphokit/ink.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "graphokit/error.hpp"

namespace graphokit {

std::string_view task_name(Task task) noexcept {
  switch (task) {
    case Task::Spiral: return "spiral";
    case Task::Sentence: return "sentence";
    case Task::Pentagons: return "pentagons";
    case Task::Other: return "other";
  }
  return "other";
}

std::optional<Task> parse_task(std::string_view name) noexcept {
  if (name == "spiral") return Task::Spiral;
  if (name == "sentence") return Task::Sentence;
  if (name == "pentagons") return Task::Pentagons;
  if (name == "other") return Task::Other;
  return std::nullopt;
}

namespace {

std::string describe(std::size_t index, std::string_view what) {
  std::ostringstream out;
  out << "sample " << index << ": " << what;
  return out.str();
}

// Returns true when the sample needed a repair.
bool repair_channels(InkSample& s, std::size_t index, bool strict,
                     std::vector<std::string>* warnings) {
  auto fail = [&](std::string_view what) {
    if (strict) {
      throw Error(ErrorCode::ChannelOutOfRange, describe(index, what));
    }
    if (warnings) warnings->push_back(describe(index, what));
  };

  bool repaired = false;
  if (s.pen_status != PenStatus::InAir && s.pen_status != PenStatus::OnSurface) {
    fail("pen_status outside {0, 1}");
    s.pen_status = PenStatus::OnSurface;
    repaired = true;
  }
  if (s.pressure < 0.0) {
    fail("negative pressure clamped to 0");
    s.pressure = 0.0;
    repaired = true;
  }
  if (s.tilt < 0.0 || s.tilt > 90.0) {
    fail("tilt outside [0, 90] clamped");
    s.tilt = std::clamp(s.tilt, 0.0, 90.0);
    repaired = true;
  }
  if (s.azimuth < 0.0 || s.azimuth >= 360.0) {
    fail("azimuth outside [0, 360) wrapped");
    s.azimuth = std::fmod(s.azimuth, 360.0);
    if (s.azimuth < 0.0) s.azimuth += 360.0;
    if (s.azimuth >= 360.0) s.azimuth = 0.0;
    repaired = true;
  }
  return repaired;
}

}  // namespace

InkRecording validate_recording(const InkRecording& raw,
                                const ValidationOptions& options,
                                std::vector<std::string>* warnings) {
  if (raw.samples.empty()) {
    throw Error(ErrorCode::EmptyRecording, "recording has no samples",
                raw.subject_id);
  }
  if (!(raw.sampling_rate_hint > 0.0)) {
    throw Error(ErrorCode::ChannelOutOfRange, "sampling_rate_hint must be > 0",
                raw.subject_id);
  }

  InkRecording out;
  out.sampling_rate_hint = raw.sampling_rate_hint;
  out.task = raw.task;
  out.subject_id = raw.subject_id;
  out.samples.reserve(raw.samples.size());

  for (std::size_t i = 0; i < raw.samples.size(); ++i) {
    InkSample s = raw.samples[i];
    if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.t) ||
        !std::isfinite(s.pressure) || !std::isfinite(s.tilt) ||
        !std::isfinite(s.azimuth)) {
      throw Error(ErrorCode::ChannelOutOfRange,
                  describe(i, "non-finite channel value"), raw.subject_id);
    }
    repair_channels(s, i, options.strict, warnings);

    if (!out.samples.empty()) {
      const double prev = out.samples.back().t;
      if (s.t == prev) {
        if (options.strict) {
          throw Error(ErrorCode::NonMonotoneTime,
                      describe(i, "duplicate timestamp"), raw.subject_id);
        }
        out.samples.back() = s;  // keep last
        continue;
      }
      if (s.t < prev) {
        if (options.strict) {
          throw Error(ErrorCode::NonMonotoneTime,
                      describe(i, "timestamp decreases"), raw.subject_id);
        }
        if (warnings) warnings->push_back(describe(i, "out-of-order sample dropped"));
        continue;
      }
    }
    out.samples.push_back(s);
  }
  return out;
}

std::vector<Stroke> segment_strokes(const InkRecording& rec) {
  std::vector<Stroke> strokes;
  const auto& s = rec.samples;
  std::size_t begin = 0;
  while (begin < s.size()) {
    std::size_t end = begin + 1;
    while (end < s.size() && s[end].pen_status == s[begin].pen_status) ++end;
    Stroke stroke;
    stroke.samples = std::span<const InkSample>(s.data() + begin, end - begin);
    stroke.surface = s[begin].pen_status;
    stroke.index = strokes.size();
    if (end < s.size()) stroke.next_onset = s[end].t;
    strokes.push_back(stroke);
    begin = end;
  }
  return strokes;
}

std::vector<Stroke> strokes_with_surface(std::span<const Stroke> strokes,
                                         PenStatus surface) {
  std::vector<Stroke> out;
  for (const auto& st : strokes) {
    if (st.surface == surface) out.push_back(st);
  }
  return out;
}

}  // namespace graphokit
