#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bitext {

/// Reads a whole file into memory. Throws DataError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Splits on '\n'. A trailing newline does not produce an empty last line,
/// and an empty file has no lines.
std::vector<std::string> split_lines(std::string_view content);

std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Shortest decimal string that parses back to exactly `value`.
/// Finite values only; -1 is rendered as "-1".
std::string format_double(double value);

/// Parses a complete string as a double (no surrounding whitespace).
/// Returns false on any trailing garbage or empty input.
bool parse_double(std::string_view text, double& out);

bool parse_index(std::string_view text, std::size_t& out);

std::vector<std::string_view> split(std::string_view text, char sep);

}  // namespace bitext
