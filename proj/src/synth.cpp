#include "graphokit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "graphokit/error.hpp"
#include "graphokit/seed.hpp"
#include "graphokit/svc.hpp"
#include "graphokit/text.hpp"

namespace graphokit {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidParams, what);
}

// Pressure, tilt and azimuth with slow drifts plus sensor noise.
class ChannelModel {
 public:
  explicit ChannelModel(std::mt19937_64& rng) : rng_(rng) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
    phase_p_ = u(rng);
    phase_t_ = u(rng);
    phase_a_ = u(rng);
  }

  void fill(InkSample& s) {
    std::normal_distribution<double> n(0.0, 1.0);
    if (s.on_surface()) {
      s.pressure = std::max(1.0, 600.0 + 60.0 * std::sin(2.0 * kPi * 0.7 * s.t + phase_p_) + 8.0 * n(rng_));
    } else {
      s.pressure = 0.0;
    }
    s.tilt = std::clamp(45.0 + 5.0 * std::sin(2.0 * kPi * 0.3 * s.t + phase_t_) + 0.5 * n(rng_), 0.0, 90.0);
    double az = 180.0 + 10.0 * std::sin(2.0 * kPi * 0.2 * s.t + phase_a_) + 0.5 * n(rng_);
    az = std::fmod(az, 360.0);
    s.azimuth = az < 0.0 ? az + 360.0 : az;
  }

 private:
  std::mt19937_64& rng_;
  double phase_p_ = 0.0;
  double phase_t_ = 0.0;
  double phase_a_ = 0.0;
};

std::vector<std::size_t> on_surface_indices(const std::vector<InkSample>& s) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].on_surface()) idx.push_back(i);
  }
  return idx;
}

// Stationary holds: sample i is repeated `extra` times and every later sample
// is delayed accordingly.
std::size_t insert_stops(std::vector<InkSample>& s, std::size_t count, double duration,
                         double rate) {
  if (count == 0) return 0;
  const auto on = on_surface_indices(s);
  if (on.size() < 3) return 0;
  const auto extra = static_cast<std::size_t>(std::max(1.0, std::ceil(duration * rate - 1e-9)));
  std::vector<std::size_t> at;
  for (std::size_t j = 0; j < count; ++j) {
    const double q = static_cast<double>(j + 1) / static_cast<double>(count + 1);
    at.push_back(on[static_cast<std::size_t>(q * static_cast<double>(on.size() - 1))]);
  }
  std::sort(at.begin(), at.end());
  at.erase(std::unique(at.begin(), at.end()), at.end());
  for (std::size_t j = at.size(); j-- > 0;) {
    const std::size_t i = at[j];
    const double dt = static_cast<double>(extra) / rate;
    for (std::size_t k = i + 1; k < s.size(); ++k) s[k].t += dt;
    std::vector<InkSample> hold(extra, s[i]);
    for (std::size_t m = 0; m < extra; ++m) hold[m].t = s[i].t + static_cast<double>(m + 1) / rate;
    s.insert(s.begin() + static_cast<std::ptrdiff_t>(i + 1), hold.begin(), hold.end());
  }
  return at.size();
}

// Short in-air runs inside on-surface strokes. A lift is only placed where it
// splits an on-surface run, so each one adds exactly one interruption.
std::size_t insert_lifts(std::vector<InkSample>& s, std::size_t count, double duration,
                         double rate) {
  if (count == 0) return 0;
  const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(duration * rate - 1e-9)));
  std::size_t placed = 0;
  for (std::size_t j = 0; j < count; ++j) {
    const auto on = on_surface_indices(s);
    if (on.size() < m + 4) break;
    const double q = (static_cast<double>(j) + 0.3) / static_cast<double>(count);
    std::size_t start = on[static_cast<std::size_t>(q * static_cast<double>(on.size() - 1))];
    bool ok = false;
    // Slide forward until the run and both neighbours are on-surface.
    for (; start + m + 1 < s.size(); ++start) {
      if (start == 0) continue;
      bool all_on = s[start - 1].on_surface() && s[start + m].on_surface();
      for (std::size_t k = start; k < start + m && all_on; ++k) all_on = s[k].on_surface();
      // Keep two on-surface samples on either side of the lift.
      if (all_on && start >= 2 && s[start - 2].on_surface() && s[start + m + 1].on_surface()) {
        ok = true;
        break;
      }
    }
    if (!ok) continue;
    for (std::size_t k = start; k < start + m; ++k) {
      s[k].pen_status = PenStatus::InAir;
      s[k].pressure = 0.0;
    }
    ++placed;
  }
  return placed;
}

double path_length_on_surface(const std::vector<InkSample>& s) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i].on_surface() && s[i + 1].on_surface()) {
      len += std::hypot(s[i + 1].x - s[i].x, s[i + 1].y - s[i].y);
    }
  }
  return len;
}

std::size_t count_on_strokes(const std::vector<InkSample>& s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].on_surface() && (i == 0 || !s[i - 1].on_surface())) ++n;
  }
  return n;
}

double drift_factor(const ImpairmentProfile& p, double t) {
  return std::max(0.2, 1.0 - p.width_drift * t);
}

}  // namespace

void ImpairmentProfile::validate() const {
  require(radial_noise_sigma >= 0.0, "radial_noise_sigma must be >= 0");
  require(velocity_scale > 0.0 && velocity_scale <= 1.0, "velocity_scale must be in (0, 1]");
  require(pen_stop_duration >= 0.0, "pen_stop_duration must be >= 0");
  require(width_drift >= 0.0, "width_drift must be >= 0");
  require(lift_duration >= 0.0, "lift_duration must be >= 0");
}

SynthRecording gen_spiral(double b, double turns, double duration_s, double rate_hz,
                          const ImpairmentProfile& profile, Origin origin) {
  require(b > 0.0, "b must be > 0");
  require(turns >= 1.0, "turns must be >= 1");
  require(duration_s > 0.0, "duration must be > 0");
  require(rate_hz > 0.0, "rate must be > 0");
  profile.validate();

  std::mt19937_64 rng(profile.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  ChannelModel channels(rng);

  const double duration = duration_s / profile.velocity_scale;
  const auto n = static_cast<std::size_t>(std::max<long long>(2, std::llround(duration * rate_hz)));
  const double theta_max = 2.0 * kPi * turns;

  SynthRecording out;
  auto& s = out.recording.samples;
  s.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    InkSample p;
    p.t = static_cast<double>(k) / rate_hz;
    const double theta = theta_max * static_cast<double>(k) / static_cast<double>(n);
    double r = b * theta * drift_factor(profile, p.t);
    if (profile.radial_noise_sigma > 0.0) r += profile.radial_noise_sigma * noise(rng);
    p.x = origin.x + r * std::cos(theta);
    p.y = origin.y + r * std::sin(theta);
    p.pen_status = PenStatus::OnSurface;
    channels.fill(p);
    s.push_back(p);
  }
  out.truth.stop_count = insert_stops(s, profile.pen_stop_count, profile.pen_stop_duration, rate_hz);
  out.truth.lift_count = insert_lifts(s, profile.extra_lift_count, profile.lift_duration, rate_hz);
  for (auto& p : s) {
    if (!p.on_surface()) p.pressure = 0.0;
  }
  out.truth.growth_rate = b;
  out.truth.arc_length =
      0.5 * b * (theta_max * std::sqrt(1.0 + theta_max * theta_max) + std::asinh(theta_max));
  out.truth.stroke_count = count_on_strokes(s);
  out.truth.width = 0.0;
  out.recording.task = Task::Spiral;
  out.recording.sampling_rate_hint = rate_hz;
  return out;
}

SynthRecording gen_scribble(std::size_t word_count, double duration_s, double rate_hz,
                            const ImpairmentProfile& profile, Origin origin) {
  require(word_count >= 1, "word_count must be >= 1");
  require(duration_s > 0.0, "duration must be > 0");
  require(rate_hz > 0.0, "rate must be > 0");
  profile.validate();

  std::mt19937_64 rng(profile.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ChannelModel channels(rng);

  constexpr double kWordWidth = 400.0;
  constexpr double kGap = 150.0;
  constexpr double kHeight = 60.0;
  std::vector<double> phase(word_count);
  for (auto& ph : phase) ph = 2.0 * kPi * unit(rng);

  const double duration = duration_s / profile.velocity_scale;
  const double hop_total = word_count > 1 ? 0.2 * duration : 0.0;
  const double hop = word_count > 1 ? hop_total / static_cast<double>(word_count - 1) : 0.0;
  const double word = (duration - hop_total) / static_cast<double>(word_count);
  require(word * rate_hz >= 5.0, "too little time per word at this sampling rate");
  if (word_count > 1) require(hop * rate_hz >= 2.0, "too little time per in-air hop");

  auto word_point = [&](std::size_t w, double u, double t, double& x, double& y) {
    const double x0 = origin.x + static_cast<double>(w) * (kWordWidth + kGap);
    const double h = kHeight * drift_factor(profile, t);
    x = x0 + kWordWidth * u + 25.0 * std::sin(2.0 * kPi * 5.0 * u);
    y = origin.y + h * (0.7 * std::sin(2.0 * kPi * 4.0 * u + phase[w]) + 0.3 * std::sin(2.0 * kPi * 9.0 * u));
  };

  const auto n = static_cast<std::size_t>(std::max<long long>(2, std::llround(duration * rate_hz)));
  SynthRecording out;
  auto& s = out.recording.samples;
  std::vector<InkSample> clean;
  for (std::size_t k = 0; k <= n; ++k) {
    InkSample p;
    p.t = static_cast<double>(k) / rate_hz;
    const double t = std::min(p.t, duration);
    const double cycle = word + hop;
    auto w = static_cast<std::size_t>(t / cycle);
    double local = t - static_cast<double>(w) * cycle;
    if (w >= word_count) {
      w = word_count - 1;
      local = word;
    }
    if (local <= word || w + 1 == word_count) {
      const double u = std::min(1.0, local / word);
      word_point(w, u, p.t, p.x, p.y);
      p.pen_status = PenStatus::OnSurface;
    } else {
      // In-air hop from the end of word w to the start of word w + 1.
      const double v = (local - word) / hop;
      double x0, y0, x1, y1;
      word_point(w, 1.0, p.t, x0, y0);
      word_point(w + 1, 0.0, p.t, x1, y1);
      p.x = x0 + (x1 - x0) * v;
      p.y = y0 + (y1 - y0) * v + 80.0 * std::sin(kPi * v);
      p.pen_status = PenStatus::InAir;
    }
    clean.push_back(p);
    if (p.on_surface() && profile.radial_noise_sigma > 0.0) {
      p.x += profile.radial_noise_sigma * noise(rng);
      p.y += profile.radial_noise_sigma * noise(rng);
    }
    channels.fill(p);
    s.push_back(p);
  }
  out.truth.arc_length = path_length_on_surface(clean);
  out.truth.stop_count = insert_stops(s, profile.pen_stop_count, profile.pen_stop_duration, rate_hz);
  out.truth.lift_count = insert_lifts(s, profile.extra_lift_count, profile.lift_duration, rate_hz);
  out.truth.stroke_count = count_on_strokes(s);
  out.recording.task = Task::Sentence;
  out.recording.sampling_rate_hint = rate_hz;
  return out;
}

SynthRecording gen_pentagons(double scale, const ImpairmentProfile& profile, double duration_s,
                             double rate_hz, Origin origin) {
  require(scale > 0.0, "scale must be > 0");
  require(duration_s > 0.0, "duration must be > 0");
  require(rate_hz > 0.0, "rate must be > 0");
  profile.validate();

  std::mt19937_64 rng(profile.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  ChannelModel channels(rng);

  const double duration = duration_s / profile.velocity_scale;
  const auto per_edge = static_cast<std::size_t>(
      std::max<long long>(2, std::llround(0.45 * duration * rate_hz / 5.0)));
  const auto hop_samples = static_cast<std::size_t>(
      std::max<long long>(3, std::llround(0.1 * duration * rate_hz)));

  struct Vertex {
    double x, y;
  };
  auto vertices = [&](double cx) {
    std::vector<Vertex> v;
    for (int k = 0; k <= 5; ++k) {
      const double a = kPi / 2.0 + 2.0 * kPi * static_cast<double>(k % 5) / 5.0;
      v.push_back({cx + kPentagonRadius * std::cos(a), kPentagonRadius * std::sin(a)});
    }
    return v;
  };
  const double centers[2] = {0.0, kPentagonOffset * kPentagonRadius};

  SynthRecording out;
  auto& s = out.recording.samples;
  std::vector<InkSample> clean;
  std::size_t k = 0;
  auto emit = [&](double px, double py, double cx, PenStatus status) {
    InkSample p;
    p.t = static_cast<double>(k++) / rate_hz;
    // Drift shrinks each figure about its own centre.
    const double f = drift_factor(profile, p.t);
    p.x = origin.x + scale * (cx + (px - cx) * f);
    p.y = origin.y + scale * py * f;
    p.pen_status = status;
    clean.push_back(p);
    if (status == PenStatus::OnSurface && profile.radial_noise_sigma > 0.0) {
      p.x += profile.radial_noise_sigma * noise(rng);
      p.y += profile.radial_noise_sigma * noise(rng);
    }
    channels.fill(p);
    s.push_back(p);
  };
  for (int fig = 0; fig < 2; ++fig) {
    const auto v = vertices(centers[fig]);
    if (fig == 1) {
      // In-air hop between the end of the first figure and the second start.
      const auto a = vertices(centers[0]).back();
      for (std::size_t h = 1; h <= hop_samples; ++h) {
        const double u = static_cast<double>(h) / static_cast<double>(hop_samples + 1);
        emit(a.x + (v[0].x - a.x) * u, a.y + (v[0].y - a.y) * u + 60.0 * std::sin(kPi * u),
             centers[fig], PenStatus::InAir);
      }
    }
    for (std::size_t e = 0; e < 5; ++e) {
      for (std::size_t j = 0; j < per_edge; ++j) {
        const double u = static_cast<double>(j) / static_cast<double>(per_edge);
        emit(v[e].x + (v[e + 1].x - v[e].x) * u, v[e].y + (v[e + 1].y - v[e].y) * u, centers[fig],
             PenStatus::OnSurface);
      }
    }
    emit(v[5].x, v[5].y, centers[fig], PenStatus::OnSurface);
  }
  out.truth.arc_length = path_length_on_surface(clean);
  out.truth.stop_count = insert_stops(s, profile.pen_stop_count, profile.pen_stop_duration, rate_hz);
  out.truth.lift_count = insert_lifts(s, profile.extra_lift_count, profile.lift_duration, rate_hz);
  out.truth.stroke_count = count_on_strokes(s);
  out.truth.inter_crossings = 2;
  const double half = kPentagonRadius * std::cos(kPi / 10.0);  // x-extent of a pentagon
  out.truth.width = scale * (kPentagonOffset * kPentagonRadius + 2.0 * half);
  out.recording.task = Task::Pentagons;
  out.recording.sampling_rate_hint = rate_hz;
  return out;
}

CohortManifest gen_cohort(const CohortSpec& spec, const std::filesystem::path& out_dir) {
  require(spec.n_hc >= 5 && spec.n_lbd >= 5, "each group needs at least 5 subjects");
  require(spec.impairment_delta >= 0.0, "impairment_delta must be >= 0");
  const double delta = spec.impairment_delta;

  CohortManifest manifest;
  manifest.base_dir = out_dir;
  manifest.metadata["generator"] = "graphokit synth";
  manifest.metadata["seed"] = std::to_string(spec.seed);
  manifest.metadata["impairment_delta"] = format_number(delta);

  const std::size_t total = spec.n_hc + spec.n_lbd;
  for (std::size_t i = 0; i < total; ++i) {
    const bool lbd = i >= spec.n_hc;
    std::mt19937_64 rng(derive_seed(spec.seed, i));
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_int_distribution<int> few(0, 2);

    // Subject-level baseline, shared by both groups.
    const double size = std::clamp(1.0 + 0.08 * z(rng), 0.7, 1.3);
    double speed = std::clamp(0.85 * std::exp(0.1 * z(rng)), 0.5, 1.0);
    double sigma = 0.5 + 0.5 * std::abs(z(rng));
    auto stops = static_cast<std::size_t>(few(rng));
    const auto lifts = static_cast<std::size_t>(few(rng));
    const double spiral_dur = 8.0 * std::clamp(1.0 + 0.1 * z(rng), 0.7, 1.3);
    const double sentence_dur = 6.0 * std::clamp(1.0 + 0.1 * z(rng), 0.7, 1.3);
    const Origin origin{5000.0 + 200.0 * z(rng), 5000.0 + 200.0 * z(rng)};
    double pentagon_scale = size;
    double drift = 0.0;
    if (lbd) {
      sigma += 2.0 * delta;
      speed *= std::max(0.05, 1.0 - 0.4 * delta);
      stops += static_cast<std::size_t>(std::llround(4.0 * delta));
      drift = 0.03 * delta;
      pentagon_scale *= std::max(0.05, 1.0 - 0.15 * delta);
    }

    char id_buf[32];
    std::snprintf(id_buf, sizeof id_buf, "S%03zu", i + 1);
    ManifestEntry entry;
    entry.subject_id = id_buf;
    entry.label = lbd ? Label::LBD : Label::HC;
    entry.covariates["age"] = std::round(65.0 + 7.0 * z(rng));
    entry.covariates["severity"] = (lbd ? 10.0 * delta : 0.0) + 2.0 * z(rng);

    ImpairmentProfile base;
    base.radial_noise_sigma = sigma;
    base.velocity_scale = speed;
    base.pen_stop_count = stops;
    base.width_drift = drift;

    for (Task task : {Task::Spiral, Task::Sentence, Task::Pentagons}) {
      ImpairmentProfile prof = base;
      prof.seed = derive_seed(derive_seed(spec.seed, i), static_cast<std::uint64_t>(task) + 7);
      SynthRecording rec;
      switch (task) {
        case Task::Spiral:
          rec = gen_spiral(16.0 * size, 3.0, spiral_dur, spec.rate_hz, prof, origin);
          break;
        case Task::Sentence:
          prof.extra_lift_count = lifts;
          rec = gen_scribble(4, sentence_dur, spec.rate_hz, prof, origin);
          break;
        default:
          rec = gen_pentagons(pentagon_scale, prof, 5.0, spec.rate_hz, origin);
          break;
      }
      rec.recording.subject_id = entry.subject_id;
      const std::filesystem::path rel =
          std::filesystem::path(entry.subject_id) / (std::string(task_name(task)) + ".svc");
      write_svc_file(out_dir / rel, rec.recording);
      entry.task_files[task] = rel;
    }
    manifest.entries.push_back(std::move(entry));
  }
  write_text_file(out_dir / "manifest.json", serialize_manifest(manifest));
  return manifest;
}

}  // namespace graphokit
