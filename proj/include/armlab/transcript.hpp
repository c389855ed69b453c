#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "armlab/format.hpp"

namespace armlab {

// One tagged output: `<TAG>rationale</TAG>\n<ANSWER>answer</ANSWER>`.
// DirectAnswer renders as a bare ANSWER block.
struct Transcript {
  ReasoningFormat format = ReasoningFormat::DirectAnswer;
  std::string rationale;  // empty for DirectAnswer
  std::string answer;
  std::string raw;  // full tagged string

  bool operator==(const Transcript& o) const {
    return format == o.format && rationale == o.rationale && answer == o.answer;
  }
};

struct TranscriptError : std::runtime_error {
  size_t offset;  // byte offset into the offending string
  TranscriptError(const std::string& msg, size_t off)
      : std::runtime_error(msg), offset(off) {}
};

// Thrown by render_transcript when rationale/answer contain a reserved tag.
struct TagCollisionError : TranscriptError {
  using TranscriptError::TranscriptError;
};

// Thrown by parse_transcript on malformed input.
struct ParseError : TranscriptError {
  using TranscriptError::TranscriptError;
};

// Thrown by parse_transcript when more than one rationale tag is present.
struct AmbiguityError : TranscriptError {
  using TranscriptError::TranscriptError;
};

std::string render_transcript(ReasoningFormat format, std::string_view rationale,
                              std::string_view answer);

Transcript parse_transcript(std::string_view raw);

enum class AnswerKind { MultipleChoice, Numeric, Literal };

struct GradeSpec {
  std::string ground_truth;
  AnswerKind answer_kind = AnswerKind::Literal;
};

// Eq.-1-style indicator: 1 iff the answer matches the ground truth under the
// kind's normalization (case-fold + trim; numeric compares parsed decimals,
// so "18.0" matches "18"). Unparseable answers grade 0.
int grade(std::string_view answer, const GradeSpec& spec);

// Normalized comparison key used by grade(); exposed for consensus checks.
std::string normalize_answer(std::string_view answer, AnswerKind kind);

// Whitespace-delimited token count.
size_t count_tokens(std::string_view text);

// Appendix-E-style lexicon of backtracking/verification markers.
extern const std::vector<std::string> kReflectiveWords;

bool contains_reflective_word(std::string_view rationale);

struct ReflectiveStats {
  double reflection_ratio = 0.0;                    // N_ref / N
  double correct_ratio_in_reflection_texts = 0.0;   // N_ref+ / N_ref
  bool correct_ratio_defined = false;               // false when N_ref == 0
};

ReflectiveStats reflective_word_stats(const std::vector<Transcript>& transcripts,
                                      const std::vector<int>& rewards);

}  // namespace armlab
