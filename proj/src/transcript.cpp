#include "armlab/transcript.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <optional>

namespace armlab {

namespace {

constexpr std::array<std::string_view, kFormatCount> kRationaleTags = {
    "DIRECT", "SHORT_COT", "CODE", "LONG_COT"};
constexpr std::string_view kAnswerTag = "ANSWER";

std::string open_tag(std::string_view tag) { return "<" + std::string(tag) + ">"; }
std::string close_tag(std::string_view tag) { return "</" + std::string(tag) + ">"; }

char ascii_lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (ascii_lower(a[i]) != ascii_lower(b[i])) return false;
  return true;
}

// First case-insensitive occurrence of needle in hay at or after pos.
size_t ifind(std::string_view hay, std::string_view needle, size_t pos = 0) {
  if (needle.empty() || hay.size() < needle.size()) return std::string_view::npos;
  for (size_t i = pos; i + needle.size() <= hay.size(); ++i) {
    if (iequals(hay.substr(i, needle.size()), needle)) return i;
  }
  return std::string_view::npos;
}

bool contains_any_reserved_tag(std::string_view text) {
  for (auto tag : kRationaleTags) {
    if (ifind(text, open_tag(tag)) != std::string_view::npos) return true;
    if (ifind(text, close_tag(tag)) != std::string_view::npos) return true;
  }
  return ifind(text, open_tag(kAnswerTag)) != std::string_view::npos ||
         ifind(text, close_tag(kAnswerTag)) != std::string_view::npos;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

struct TagBlock {
  size_t open_pos;   // position of '<'
  size_t body_pos;   // first byte of the body
  size_t body_len;
  size_t end_pos;    // one past the closing tag
};

// Locates exactly one <TAG>...</TAG> pair; the body must not contain the
// open tag again (nesting is not part of the grammar).
std::optional<TagBlock> find_block(std::string_view raw, std::string_view tag) {
  const std::string o = open_tag(tag), c = close_tag(tag);
  size_t op = ifind(raw, o);
  if (op == std::string_view::npos) return std::nullopt;
  size_t cl = ifind(raw, c, op + o.size());
  if (cl == std::string_view::npos)
    throw ParseError("missing closing tag " + c, op);
  if (ifind(raw, o, op + o.size()) != std::string_view::npos)
    throw ParseError("repeated tag " + o, ifind(raw, o, op + o.size()));
  return TagBlock{op, op + o.size(), cl - (op + o.size()), cl + c.size()};
}

}  // namespace

std::string render_transcript(ReasoningFormat format, std::string_view rationale,
                              std::string_view answer) {
  if (answer.empty())
    throw std::invalid_argument("render_transcript: answer must be nonempty");
  if (contains_any_reserved_tag(rationale))
    throw TagCollisionError("rationale contains a reserved tag", 0);
  if (contains_any_reserved_tag(answer))
    throw TagCollisionError("answer contains a reserved tag", 0);

  std::string out;
  if (format != ReasoningFormat::DirectAnswer) {
    const auto tag = kRationaleTags[format_index(format)];
    out += open_tag(tag);
    out += rationale;
    out += close_tag(tag);
    out += '\n';
  }
  out += open_tag(kAnswerTag);
  out += answer;
  out += close_tag(kAnswerTag);
  return out;
}

Transcript parse_transcript(std::string_view raw) {
  // A second rationale tag anywhere (even inside another block) makes the
  // transcript ambiguous.
  int rationale_tags_seen = 0;
  size_t second_tag_pos = 0;
  std::optional<ReasoningFormat> tagged_format;
  for (auto f : kAllFormats) {
    size_t p = ifind(raw, open_tag(kRationaleTags[format_index(f)]));
    if (p != std::string_view::npos) {
      if (++rationale_tags_seen == 2) second_tag_pos = p;
      tagged_format = f;
    }
  }
  if (rationale_tags_seen > 1)
    throw AmbiguityError("multiple rationale tags present", second_tag_pos);

  auto answer_block = find_block(raw, kAnswerTag);
  if (!answer_block)
    throw ParseError("missing <ANSWER> block", 0);

  Transcript t;
  t.raw = std::string(raw);
  t.answer = std::string(raw.substr(answer_block->body_pos, answer_block->body_len));

  if (!tagged_format) {
    // Answer-only grammar: DirectAnswer.
    if (!trim(raw.substr(0, answer_block->open_pos)).empty())
      throw ParseError("unexpected text before <ANSWER> block", 0);
    if (!trim(raw.substr(answer_block->end_pos)).empty())
      throw ParseError("unexpected text after </ANSWER>", answer_block->end_pos);
    t.format = ReasoningFormat::DirectAnswer;
    return t;
  }

  const auto tag = kRationaleTags[format_index(*tagged_format)];
  auto block = find_block(raw, tag);
  if (block->open_pos > answer_block->open_pos)
    throw ParseError("rationale block must precede the <ANSWER> block",
                     block->open_pos);
  if (block->end_pos > answer_block->open_pos)
    throw ParseError("rationale and answer blocks overlap", block->open_pos);
  if (!trim(raw.substr(0, block->open_pos)).empty())
    throw ParseError("unexpected text before rationale block", 0);
  if (!trim(raw.substr(block->end_pos, answer_block->open_pos - block->end_pos)).empty())
    throw ParseError("unexpected text between blocks", block->end_pos);
  if (!trim(raw.substr(answer_block->end_pos)).empty())
    throw ParseError("unexpected text after </ANSWER>", answer_block->end_pos);

  t.format = *tagged_format;
  t.rationale = std::string(raw.substr(block->body_pos, block->body_len));
  if (t.format == ReasoningFormat::DirectAnswer && !t.rationale.empty())
    throw ParseError("DirectAnswer transcript carries a rationale", block->body_pos);
  return t;
}

namespace {

std::string fold(std::string_view s) {
  std::string_view t = trim(s);
  std::string out(t);
  std::transform(out.begin(), out.end(), out.begin(), ascii_lower);
  return out;
}

// Parses the whole (trimmed) string as a decimal number; nullopt otherwise.
std::optional<double> parse_decimal(std::string_view s) {
  std::string t(trim(s));
  if (t.empty()) return std::nullopt;
  const char* begin = t.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + t.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string normalize_answer(std::string_view answer, AnswerKind kind) {
  if (kind == AnswerKind::Numeric) {
    if (auto v = parse_decimal(answer)) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", *v);
      return buf;
    }
    return "<unparseable>" + fold(answer);
  }
  return fold(answer);
}

int grade(std::string_view answer, const GradeSpec& spec) {
  if (spec.answer_kind == AnswerKind::Numeric) {
    auto a = parse_decimal(answer);
    auto g = parse_decimal(spec.ground_truth);
    return (a && g && *a == *g) ? 1 : 0;
  }
  return fold(answer) == fold(spec.ground_truth) ? 1 : 0;
}

size_t count_tokens(std::string_view text) {
  size_t n = 0;
  bool in_token = false;
  for (char c : text) {
    if (is_space(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++n;
    }
  }
  return n;
}

const std::vector<std::string> kReflectiveWords = {
    "re-check",     "re-evaluate", "re-examine",  "re-think",
    "recheck",      "reevaluate",  "reexamine",   "reevaluation",
    "rethink",      "check again", "think again", "try again",
    "verify",       "wait",        "yet",         "double-check",
    "double check"};

bool contains_reflective_word(std::string_view rationale) {
  for (const auto& w : kReflectiveWords)
    if (ifind(rationale, w) != std::string_view::npos) return true;
  return false;
}

ReflectiveStats reflective_word_stats(const std::vector<Transcript>& transcripts,
                                      const std::vector<int>& rewards) {
  if (transcripts.size() != rewards.size())
    throw std::invalid_argument("reflective_word_stats: length mismatch");
  if (transcripts.empty())
    throw std::invalid_argument("reflective_word_stats: empty input");

  size_t n_ref = 0, n_ref_correct = 0;
  for (size_t i = 0; i < transcripts.size(); ++i) {
    if (contains_reflective_word(transcripts[i].rationale)) {
      ++n_ref;
      if (rewards[i] == 1) ++n_ref_correct;
    }
  }
  ReflectiveStats s;
  s.reflection_ratio = static_cast<double>(n_ref) / transcripts.size();
  s.correct_ratio_defined = n_ref > 0;
  s.correct_ratio_in_reflection_texts =
      n_ref > 0 ? static_cast<double>(n_ref_correct) / n_ref : 0.0;
  return s;
}

}  // namespace armlab
