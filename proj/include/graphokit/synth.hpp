#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include "graphokit/cohort.hpp"
#include "graphokit/ink.hpp"

namespace graphokit {

struct ImpairmentProfile {
  double radial_noise_sigma = 0.0;  // tablet units
  double velocity_scale = 1.0;      // (0, 1]; below 1 slows the writing down
  std::size_t pen_stop_count = 0;
  double pen_stop_duration = 0.040;  // s
  double width_drift = 0.0;          // fractional size loss per second
  std::size_t extra_lift_count = 0;
  double lift_duration = 0.080;  // s
  std::uint64_t seed = 0;

  void validate() const;
};

// Values known by construction, for oracle checks.
struct GroundTruth {
  double arc_length = 0.0;  // noiseless on-surface path length
  double growth_rate = 0.0;
  std::size_t stop_count = 0;
  std::size_t lift_count = 0;
  std::size_t stroke_count = 0;  // on-surface strokes
  std::size_t inter_crossings = 0;
  double width = 0.0;  // noiseless on-surface bounding-box width
};

struct SynthRecording {
  InkRecording recording;
  GroundTruth truth;
};

struct Origin {
  double x = 0.0;
  double y = 0.0;
};

// r = b * theta at constant angular speed, theta in [0, 2*pi*turns], counter-
// clockwise around `origin`. Knobs apply in order: velocity scaling, radial
// noise and width drift, stops, lifts.
SynthRecording gen_spiral(double b, double turns, double duration_s, double rate_hz = 130.0,
                          const ImpairmentProfile& profile = {}, Origin origin = {});

// `word_count` on-surface strokes of summed sinusoids joined by in-air hops.
SynthRecording gen_scribble(std::size_t word_count, double duration_s, double rate_hz = 130.0,
                            const ImpairmentProfile& profile = {}, Origin origin = {});

// Two overlapping regular pentagons, each one closed on-surface stroke.
// `scale` multiplies every coordinate relative to `origin`.
SynthRecording gen_pentagons(double scale, const ImpairmentProfile& profile = {},
                             double duration_s = 5.0, double rate_hz = 130.0,
                             Origin origin = {});

// Circumradius of each pentagon at scale 1, tablet units.
inline constexpr double kPentagonRadius = 300.0;
// Horizontal centre offset between the pentagons, in circumradii.
inline constexpr double kPentagonOffset = 1.2;

struct CohortSpec {
  std::size_t n_hc = 30;
  std::size_t n_lbd = 30;
  double impairment_delta = 0.0;
  std::uint64_t seed = 0;
  double rate_hz = 130.0;
};

// Writes <out>/<subject>/<task>.svc for the three tasks plus
// <out>/manifest.json, and returns the manifest.
CohortManifest gen_cohort(const CohortSpec& spec, const std::filesystem::path& out_dir);

}  // namespace graphokit
