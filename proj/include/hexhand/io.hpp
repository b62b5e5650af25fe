#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hexhand {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Whole-string decimal parse; returns false on trailing garbage.
bool parse_double(std::string_view s, double& out);
bool parse_int(std::string_view s, long long& out);
bool parse_uint64(std::string_view s, unsigned long long& out);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

/// Reads a whole file; throws IoError.
std::string read_file(const std::string& path);

/// Writes via a sibling temp file and rename so readers never observe a
/// truncated file. Throws IoError.
void write_file_atomic(const std::string& path, std::string_view contents);

} // namespace hexhand
