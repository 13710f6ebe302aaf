#pragma once

namespace bitext {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kScoreFormatVersion = 1;
inline constexpr int kEmbeddingFormatVersion = 1;

}  // namespace bitext
