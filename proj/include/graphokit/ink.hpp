#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace graphokit {

enum class PenStatus : int { InAir = 0, OnSurface = 1 };

enum class Task { Spiral, Sentence, Pentagons, Other };

std::string_view task_name(Task task) noexcept;
std::optional<Task> parse_task(std::string_view name) noexcept;

// One digitizer tick. Positions in tablet units, time in seconds, angles in
// degrees (converted from device tenths-of-degree at ingestion).
struct InkSample {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
  PenStatus pen_status = PenStatus::OnSurface;
  double pressure = 0.0;
  double tilt = 0.0;
  double azimuth = 0.0;

  bool on_surface() const noexcept { return pen_status == PenStatus::OnSurface; }

  friend bool operator==(const InkSample&, const InkSample&) = default;
};

inline constexpr double kDefaultSamplingRateHz = 130.0;

struct InkRecording {
  std::vector<InkSample> samples;
  double sampling_rate_hint = kDefaultSamplingRateHz;  // metadata only
  Task task = Task::Other;
  std::string subject_id;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  double duration() const noexcept {
    return samples.empty() ? 0.0 : samples.back().t - samples.front().t;
  }

  friend bool operator==(const InkRecording&, const InkRecording&) = default;
};

// A maximal run of samples sharing one pen status. `samples` views into the
// owning recording, which must outlive the stroke.
struct Stroke {
  std::span<const InkSample> samples;
  PenStatus surface = PenStatus::OnSurface;
  std::size_t index = 0;
  // Timestamp of the first sample of the following stroke, if any. Stroke
  // duration runs up to this boundary so that stroke durations partition the
  // recording's total duration.
  std::optional<double> next_onset;

  bool on_surface() const noexcept { return surface == PenStatus::OnSurface; }
  double onset() const noexcept { return samples.front().t; }
  double duration() const noexcept {
    return next_onset.value_or(samples.back().t) - samples.front().t;
  }
  // Time spanned by the stroke's own samples.
  double span() const noexcept { return samples.back().t - samples.front().t; }
};

struct ValidationOptions {
  bool strict = false;
};

// Collapses duplicate timestamps (keep last), drops out-of-order samples and
// clamps channels in lenient mode; rejects both in strict mode. Lenient-mode
// repairs are appended to `warnings` when provided.
InkRecording validate_recording(const InkRecording& raw,
                                const ValidationOptions& options = {},
                                std::vector<std::string>* warnings = nullptr);

std::vector<Stroke> segment_strokes(const InkRecording& rec);

// Convenience filters over a segmentation.
std::vector<Stroke> strokes_with_surface(std::span<const Stroke> strokes,
                                         PenStatus surface);

}  // namespace graphokit
