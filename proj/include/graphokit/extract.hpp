#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "graphokit/cohort.hpp"
#include "graphokit/feature_table.hpp"
#include "graphokit/features_basic.hpp"
#include "graphokit/features_events.hpp"
#include "graphokit/features_spiral.hpp"
#include "graphokit/ink.hpp"

namespace graphokit {

// Tablet resolution assumed when converting millimetre settings to tablet
// units (0.1 mm per unit).
inline constexpr double kDefaultUnitsPerMm = 10.0;

struct FeatureConfig {
  double units_per_mm = kDefaultUnitsPerMm;
  double pen_stop_min_duration = 0.030;  // s
  double pen_stop_radius_mm = 1.0;
  std::size_t entropy_bins = 16;
  KinematicOptions kinematics;
  SpiralOptions spiral;
};

using NamedFeatures = std::vector<std::pair<std::string, double>>;

// Full feature vector of one recording, in a fixed order. Names follow
// `<task>.<family>.<base>[_<proj>][_<surface>][_<agg>]`. Features that
// cannot be computed on this recording are kMissing; the name list depends
// only on the task.
NamedFeatures extract_features(const InkRecording& rec, const FeatureConfig& config = {});

// One row per cohort item, in input order.
FeatureTable build_feature_table(std::span<const CohortItem> items, Task task,
                                 const FeatureConfig& config = {});

}  // namespace graphokit
