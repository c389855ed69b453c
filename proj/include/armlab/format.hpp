#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace armlab {

// The four-way action space, ordered by expected verbosity.
enum class ReasoningFormat : int {
  DirectAnswer = 0,
  ShortCoT = 1,
  Code = 2,
  LongCoT = 3,
};

inline constexpr int kFormatCount = 4;

inline constexpr std::array<ReasoningFormat, kFormatCount> kAllFormats = {
    ReasoningFormat::DirectAnswer, ReasoningFormat::ShortCoT,
    ReasoningFormat::Code, ReasoningFormat::LongCoT};

constexpr int format_index(ReasoningFormat f) { return static_cast<int>(f); }

constexpr std::string_view format_name(ReasoningFormat f) {
  switch (f) {
    case ReasoningFormat::DirectAnswer: return "direct";
    case ReasoningFormat::ShortCoT: return "short_cot";
    case ReasoningFormat::Code: return "code";
    case ReasoningFormat::LongCoT: return "long_cot";
  }
  return "?";
}

enum class Difficulty : int {
  Easy = 0,
  Medium = 1,
  Hard = 2,
};

inline constexpr int kDifficultyCount = 3;

inline constexpr std::array<Difficulty, kDifficultyCount> kAllDifficulties = {
    Difficulty::Easy, Difficulty::Medium, Difficulty::Hard};

constexpr int difficulty_index(Difficulty d) { return static_cast<int>(d); }

constexpr std::string_view difficulty_name(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return "easy";
    case Difficulty::Medium: return "medium";
    case Difficulty::Hard: return "hard";
  }
  return "?";
}

}  // namespace armlab
