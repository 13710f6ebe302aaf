#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace bitext {

/// ASCII whitespace: space, \t, \n, \v, \f, \r.
constexpr bool is_space(char c) noexcept {
  return c == ' ' || (c >= '\t' && c <= '\r');
}

/// Maximal runs of non-whitespace characters.
std::vector<std::string_view> whitespace_tokens(std::string_view text);

/// Byte offset of the first ill-formed UTF-8 sequence, or npos when valid.
std::size_t find_invalid_utf8(std::string_view text);

/// Unicode simple case folding, code point by code point. Ill-formed bytes
/// are passed through unchanged.
std::string case_fold(std::string_view text);

/// Splits valid UTF-8 into one string per code point.
std::vector<std::string> code_points(std::string_view text);

void append_code_point(std::string& out, char32_t c);

}  // namespace bitext
