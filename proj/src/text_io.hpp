#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace riskpath::detail {

// Shortest text that round-trips the double exactly.
std::string format_double(double v);
// sep == ' ' splits on runs of whitespace; any other separator splits exactly and trims.
std::vector<std::string_view> split(std::string_view line, char sep);
double to_double(std::string_view tok, int line);
int to_int(std::string_view tok, int line);
bool blank(std::string_view line);
std::vector<std::string_view> lines_of(std::string_view text);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace riskpath::detail
