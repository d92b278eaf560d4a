#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "graphokit/ink.hpp"

namespace graphokit {

enum class SvcColumn { X, Y, Timestamp, PenStatus, Azimuth, Tilt, Pressure };

// Order of the seven whitespace-separated fields on each sample line.
// The default is `x y timestamp pen_status azimuth tilt pressure`.
struct SvcLayout {
  std::array<SvcColumn, 7> columns{SvcColumn::X,       SvcColumn::Y,
                                   SvcColumn::Timestamp, SvcColumn::PenStatus,
                                   SvcColumn::Azimuth, SvcColumn::Tilt,
                                   SvcColumn::Pressure};

  // Accepts names x, y, timestamp|t, pen_status|status, azimuth, tilt,
  // pressure; each exactly once.
  static SvcLayout from_names(const std::vector<std::string>& names);

  friend bool operator==(const SvcLayout&, const SvcLayout&) = default;
};

// Device units: timestamps in milliseconds, azimuth and tilt in tenths of a
// degree. Both are converted (to seconds and degrees) while parsing.
inline constexpr double kSvcTimeUnitSeconds = 1e-3;
inline constexpr double kSvcAngleUnitDegrees = 0.1;

// Grammar: a header line holding the integer sample count N, then N lines of
// seven numeric fields. LF and CRLF line endings are accepted; blank trailing
// lines are ignored. The result is not validated (see validate_recording).
InkRecording parse_svc(std::string_view text, const SvcLayout& layout = {});

std::string serialize_svc(const InkRecording& rec, const SvcLayout& layout = {});

InkRecording read_svc_file(const std::filesystem::path& path,
                           const SvcLayout& layout = {});
void write_svc_file(const std::filesystem::path& path, const InkRecording& rec,
                    const SvcLayout& layout = {});

}  // namespace graphokit
