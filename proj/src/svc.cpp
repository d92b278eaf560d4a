#include "graphokit/svc.hpp"

#include <cmath>
#include <sstream>

#include "graphokit/error.hpp"
#include "graphokit/text.hpp"

namespace graphokit {

SvcLayout SvcLayout::from_names(const std::vector<std::string>& names) {
  if (names.size() != 7) {
    throw Error(ErrorCode::MalformedManifest, "svc layout needs exactly 7 column names");
  }
  SvcLayout layout;
  std::array<bool, 7> seen{};
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto& n = names[i];
    SvcColumn col;
    if (n == "x") col = SvcColumn::X;
    else if (n == "y") col = SvcColumn::Y;
    else if (n == "timestamp" || n == "t") col = SvcColumn::Timestamp;
    else if (n == "pen_status" || n == "status") col = SvcColumn::PenStatus;
    else if (n == "azimuth") col = SvcColumn::Azimuth;
    else if (n == "tilt") col = SvcColumn::Tilt;
    else if (n == "pressure") col = SvcColumn::Pressure;
    else throw Error(ErrorCode::MalformedManifest, "unknown svc column '" + n + "'");
    auto slot = static_cast<std::size_t>(col);
    if (seen[slot]) {
      throw Error(ErrorCode::MalformedManifest, "duplicate svc column '" + n + "'");
    }
    seen[slot] = true;
    layout.columns[i] = col;
  }
  return layout;
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  while (!lines.empty() && split_whitespace(lines.back()).empty()) lines.pop_back();
  return lines;
}

std::string line_context(std::size_t line_no) {
  return "line " + std::to_string(line_no);
}

}  // namespace

InkRecording parse_svc(std::string_view text, const SvcLayout& layout) {
  const auto lines = split_lines(text);
  if (lines.empty()) {
    throw Error(ErrorCode::MalformedHeader, "missing sample-count header", line_context(1));
  }
  const auto header = split_whitespace(lines[0]);
  std::size_t count = 0;
  {
    auto value = header.size() == 1 ? parse_number(header[0]) : std::nullopt;
    if (!value || *value < 0 || std::floor(*value) != *value) {
      throw Error(ErrorCode::MalformedHeader,
                  "header must be a single non-negative integer", line_context(1));
    }
    count = static_cast<std::size_t>(*value);
  }
  if (lines.size() - 1 != count) {
    std::ostringstream msg;
    msg << "header declares " << count << " samples, found " << lines.size() - 1;
    throw Error(ErrorCode::SampleCountMismatch, msg.str());
  }

  InkRecording rec;
  rec.samples.reserve(count);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_whitespace(lines[i]);
    if (fields.size() != 7) {
      throw Error(ErrorCode::FieldCountMismatch,
                  "expected 7 fields, found " + std::to_string(fields.size()),
                  line_context(i + 1));
    }
    InkSample s;
    for (std::size_t f = 0; f < 7; ++f) {
      auto value = parse_number(fields[f]);
      if (!value) {
        throw Error(ErrorCode::NonNumericField,
                    "non-numeric field '" + std::string(fields[f]) + "'",
                    line_context(i + 1));
      }
      switch (layout.columns[f]) {
        case SvcColumn::X: s.x = *value; break;
        case SvcColumn::Y: s.y = *value; break;
        case SvcColumn::Timestamp: s.t = *value * kSvcTimeUnitSeconds; break;
        case SvcColumn::PenStatus:
          // Anything but 0/1 becomes an out-of-range marker for validation.
          if (*value == 0.0) s.pen_status = PenStatus::InAir;
          else if (*value == 1.0) s.pen_status = PenStatus::OnSurface;
          else s.pen_status = static_cast<PenStatus>(2);
          break;
        case SvcColumn::Azimuth: s.azimuth = *value * kSvcAngleUnitDegrees; break;
        case SvcColumn::Tilt: s.tilt = *value * kSvcAngleUnitDegrees; break;
        case SvcColumn::Pressure: s.pressure = *value; break;
      }
    }
    rec.samples.push_back(s);
  }
  return rec;
}

std::string serialize_svc(const InkRecording& rec, const SvcLayout& layout) {
  std::string out = std::to_string(rec.samples.size());
  out.push_back('\n');
  for (const auto& s : rec.samples) {
    for (std::size_t f = 0; f < 7; ++f) {
      if (f > 0) out.push_back(' ');
      switch (layout.columns[f]) {
        case SvcColumn::X: out += format_number(s.x); break;
        case SvcColumn::Y: out += format_number(s.y); break;
        case SvcColumn::Timestamp: out += format_number(s.t / kSvcTimeUnitSeconds); break;
        case SvcColumn::PenStatus:
          out += std::to_string(static_cast<int>(s.pen_status));
          break;
        case SvcColumn::Azimuth: out += format_number(s.azimuth / kSvcAngleUnitDegrees); break;
        case SvcColumn::Tilt: out += format_number(s.tilt / kSvcAngleUnitDegrees); break;
        case SvcColumn::Pressure: out += format_number(s.pressure); break;
      }
    }
    out.push_back('\n');
  }
  return out;
}

InkRecording read_svc_file(const std::filesystem::path& path, const SvcLayout& layout) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::FileMissing, "file not found", path.string());
  }
  const std::string text = read_text_file(path);
  try {
    return parse_svc(text, layout);
  } catch (const Error& e) {
    std::string ctx = path.string();
    if (!e.context().empty()) ctx += ":" + e.context();
    throw Error(e.code(), e.what(), ctx);
  }
}

void write_svc_file(const std::filesystem::path& path, const InkRecording& rec,
                    const SvcLayout& layout) {
  write_text_file(path, serialize_svc(rec, layout));
}

}  // namespace graphokit
