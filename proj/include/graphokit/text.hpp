#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace graphokit {

// Shortest round-trip decimal representation. Every text writer goes through
// this so that outputs are byte-stable across runs. NaN formats as "".
std::string format_number(double value);

// Strict full-token parse; nullopt on any trailing garbage.
std::optional<double> parse_number(std::string_view token);

std::vector<std::string_view> split_whitespace(std::string_view line);
std::vector<std::string> split_csv_line(std::string_view line);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace graphokit
