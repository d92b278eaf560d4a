#include "graphokit/extract.hpp"

#include <functional>

#include "graphokit/error.hpp"

namespace graphokit {

namespace {

class FeatureSink {
 public:
  explicit FeatureSink(std::string task) : task_(std::move(task)) {}

  void scalar(std::string_view family, std::string_view base, double value) {
    out_.emplace_back(task_ + "." + std::string(family) + "." + std::string(base), value);
  }

  void vector(std::string_view family, std::string_view base, std::span<const double> values) {
    for (Aggregation agg : kAllAggregations) {
      scalar(family, std::string(base) + "_" + std::string(token(agg)),
             aggregate_or_missing(values, agg));
    }
  }

  // Runs `body`; any library error leaves the names emitted by `names` as
  // missing.
  void guarded(const std::function<void()>& body, const std::function<void()>& names) {
    const std::size_t mark = out_.size();
    try {
      body();
    } catch (const Error&) {
      out_.resize(mark);
      missing_ = true;
      names();
      missing_ = false;
    }
  }

  bool missing() const { return missing_; }

  NamedFeatures take() { return std::move(out_); }

 private:
  std::string task_;
  NamedFeatures out_;
  bool missing_ = false;
};

std::string join(std::initializer_list<std::string_view> parts) {
  std::string s;
  for (auto p : parts) {
    if (p.empty()) continue;
    if (!s.empty()) s.push_back('_');
    s += p;
  }
  return s;
}

void emit_temporal(FeatureSink& sink, const InkRecording& rec) {
  auto body = [&](bool missing) {
    FeatureSet fs;
    if (!missing) fs = temporal_features(rec);
    for (const char* name : {"duration", "duration_onsurf", "duration_inair", "duration_ratio"}) {
      sink.scalar("temporal", name, missing ? kMissing : fs.scalars.at(name));
    }
    for (const char* name :
         {"stroke_duration_onsurf", "stroke_duration_inair", "stroke_duration_ratio"}) {
      sink.vector("temporal", name,
                  missing ? std::span<const double>{} : std::span<const double>(fs.vectors.at(name)));
    }
  };
  sink.guarded([&] { body(false); }, [&] { body(true); });
}

void emit_kinematic(FeatureSink& sink, const std::vector<Stroke>& strokes,
                    const KinematicOptions& options) {
  for (auto order : {KinematicOrder::Velocity, KinematicOrder::Acceleration}) {
    const std::string_view base = order == KinematicOrder::Velocity ? "velocity" : "acceleration";
    for (auto proj : {Projection::Global, Projection::Horizontal, Projection::Vertical}) {
      for (auto scope : {SurfaceScope::OnSurface, SurfaceScope::InAir}) {
        std::vector<double> values;
        for (const auto& st : strokes) {
          if (st.on_surface() != (scope == SurfaceScope::OnSurface)) continue;
          auto prof = kinematic_profile(st, proj, order, options);
          values.insert(values.end(), prof.begin(), prof.end());
        }
        sink.vector("kinematic", join({base, token(proj), token(scope)}), values);
      }
    }
  }
}

void emit_dynamic(FeatureSink& sink, const InkRecording& rec) {
  auto body = [&](bool missing) {
    FeatureSet fs;
    if (!missing) fs = dynamic_features(rec);
    for (const char* name : {"pressure", "tilt", "azimuth"}) {
      sink.vector("dynamic", name,
                  missing ? std::span<const double>{} : std::span<const double>(fs.vectors.at(name)));
    }
  };
  sink.guarded([&] { body(false); }, [&] { body(true); });
}

void emit_spatial(FeatureSink& sink, const InkRecording& rec) {
  for (auto scope : {SurfaceScope::OnSurface, SurfaceScope::InAir}) {
    auto body = [&](bool missing) {
      FeatureSet fs;
      if (!missing) fs = spatial_features(rec, scope);
      for (const char* name : {"width", "height", "length"}) {
        sink.scalar("spatial", join({name, token(scope)}), missing ? kMissing : fs.scalars.at(name));
      }
      for (const char* name : {"stroke_width", "stroke_height", "stroke_length"}) {
        sink.vector("spatial", join({name, token(scope)}),
                    missing ? std::span<const double>{}
                            : std::span<const double>(fs.vectors.at(name)));
      }
    };
    sink.guarded([&] { body(false); }, [&] { body(true); });
  }
}

void emit_other(FeatureSink& sink, const InkRecording& rec, const std::vector<Stroke>& strokes,
                const FeatureConfig& config) {
  {
    auto body = [&](bool missing) {
      StrokeSummary s;
      if (!missing) s = stroke_summary(rec);
      sink.scalar("other", "interruptions", missing ? kMissing : static_cast<double>(s.interruptions));
      sink.scalar("other", "tempo", missing ? kMissing : s.tempo);
    };
    sink.guarded([&] { body(false); }, [&] { body(true); });
  }

  PenStopOptions stop_opts;
  stop_opts.min_duration = config.pen_stop_min_duration;
  stop_opts.radius = config.pen_stop_radius_mm * config.units_per_mm;
  sink.scalar("other", "pen_stops", static_cast<double>(count_pen_stops(rec, stop_opts)));

  const auto on = strokes_with_surface(strokes, PenStatus::OnSurface);
  for (auto mode : {IntersectionMode::IntraStroke, IntersectionMode::InterStroke}) {
    const std::string base = mode == IntersectionMode::IntraStroke ? "intra_intersections"
                                                                   : "inter_intersections";
    const auto c = count_intersections(on, mode);
    const bool none = on.empty();
    sink.scalar("other", base, none ? kMissing : static_cast<double>(c.count));
    sink.scalar("other", base + "_rel", none ? kMissing : c.relative);
    sink.scalar("other", base + "_per_length", none ? kMissing : c.per_length);
  }

  std::vector<double> ent_glob, ent_vert, changes, changes_rel;
  for (const auto& st : on) {
    const auto& s = st.samples;
    if (s.size() >= 2) {
      std::vector<double> disp, ys;
      for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        disp.push_back(std::hypot(s[i + 1].x - s[i].x, s[i + 1].y - s[i].y));
      }
      for (const auto& p : s) ys.push_back(p.y);
      ent_glob.push_back(shannon_entropy(disp, config.entropy_bins));
      ent_vert.push_back(shannon_entropy(ys, config.entropy_bins));
    }
    const auto vel = kinematic_profile(st, Projection::Global, KinematicOrder::Velocity,
                                       config.kinematics);
    if (vel.size() >= 3) {
      const auto pc = velocity_profile_changes(vel, st.span());
      changes.push_back(static_cast<double>(pc.count));
      if (st.span() > 0.0) changes_rel.push_back(pc.relative);
    }
  }
  sink.scalar("other", "entropy_glob_onsurf_median", aggregate_or_missing(ent_glob, Aggregation::Median));
  sink.scalar("other", "entropy_vert_onsurf_median", aggregate_or_missing(ent_vert, Aggregation::Median));
  sink.scalar("other", "velocity_changes_onsurf_median",
              aggregate_or_missing(changes, Aggregation::Median));
  sink.scalar("other", "velocity_changes_rel_onsurf_median",
              aggregate_or_missing(changes_rel, Aggregation::Median));
}

void emit_spiral(FeatureSink& sink, const InkRecording& rec, const SpiralOptions& options) {
  static const char* kNames[] = {"dos", "mean_speed", "smoothness2", "spi",
                                 "tightness", "width_var", "zcr1"};
  auto body = [&](bool missing) {
    std::map<std::string, double> f;
    if (!missing) f = spiral_features(unwrap_polar(rec, options), rec, options);
    for (const char* name : kNames) sink.scalar("specific", name, missing ? kMissing : f.at(name));
  };
  sink.guarded([&] { body(false); }, [&] { body(true); });
}

}  // namespace

NamedFeatures extract_features(const InkRecording& rec, const FeatureConfig& config) {
  FeatureSink sink{std::string(task_name(rec.task))};
  const auto strokes = segment_strokes(rec);
  emit_temporal(sink, rec);
  emit_kinematic(sink, strokes, config.kinematics);
  emit_dynamic(sink, rec);
  emit_spatial(sink, rec);
  emit_other(sink, rec, strokes, config);
  if (rec.task == Task::Spiral) emit_spiral(sink, rec, config.spiral);
  return sink.take();
}

FeatureTable build_feature_table(std::span<const CohortItem> items, Task task,
                                 const FeatureConfig& config) {
  FeatureTable table;
  bool named = false;
  for (const auto& item : items) {
    InkRecording rec = item.recording;
    rec.task = task;
    auto features = extract_features(rec, config);
    if (!named) {
      for (const auto& [name, v] : features) table.feature_names.push_back(name);
      named = true;
    }
    std::vector<double> values;
    values.reserve(features.size());
    for (const auto& [name, v] : features) values.push_back(v);
    table.add_row(item.subject_id, static_cast<int>(item.label), std::move(values));
  }
  if (!named) {
    // Empty cohort: recover the name list from a throwaway recording.
    InkRecording probe;
    probe.task = task;
    probe.samples = {InkSample{0, 0, 0}, InkSample{1, 0, 0.01}};
    for (const auto& [name, v] : extract_features(probe, config)) {
      table.feature_names.push_back(name);
    }
  }
  return table;
}

}  // namespace graphokit
