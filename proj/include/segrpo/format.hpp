// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace segrpo {

// Half-open character interval [begin, end).
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - begin; }
  bool contains(std::size_t pos) const { return pos >= begin && pos < end; }
  bool operator==(const CharSpan&) const = default;
};

enum class Tag { context, think, answer };

std::string_view tag_name(Tag tag);
std::string_view open_tag(Tag tag);   // e.g. "<context>"
std::string_view close_tag(Tag tag);  // e.g. "</context>"

enum class FormatErrorKind {
  missing_tag,
  duplicate_tag,
  order_violation,
  stray_content,
  unclosed_tag,
};

struct FormatError {
  FormatErrorKind kind;
  std::optional<Tag> tag;  // set for the per-tag error kinds

  std::string message() const;
  bool operator==(const FormatError&) const = default;
};

// One completion split into its context / think / answer segments.
//
// The *_span fields cover the whole tag block including the delimiters, so
// raw.substr(span) == "<tag>" + text + "</tag>". inner_span() strips the
// delimiters and is what token-to-segment assignment works from.
struct TaggedResponse {
  std::string context_text;
  std::string think_text;
  std::string answer_text;
  CharSpan context_span;
  CharSpan think_span;
  CharSpan answer_span;

  const std::string& text(Tag tag) const;
  CharSpan span(Tag tag) const;
  CharSpan inner_span(Tag tag) const;
  bool operator==(const TaggedResponse&) const = default;
};

using ParseResult = std::variant<TaggedResponse, FormatError>;

// Accepts exactly one well-formed occurrence of each tag pair, in the order
// context, think, answer, with only whitespace between and around the blocks.
// Inner segment texts are returned untrimmed. Tags are matched
// case-sensitively and take no attributes.
ParseResult parse_tagged_response(std::string_view raw);

// 1 iff parse_tagged_response succeeds, else 0.
double format_reward(std::string_view raw);

// Canonical rendering: the three blocks concatenated with nothing between.
std::string render_tagged(std::string_view context_text,
                          std::string_view think_text,
                          std::string_view answer_text);
std::string render_tagged(const TaggedResponse& resp);

// Lenient single-block lookup used where a malformed completion still carries
// a recognizable segment (filter accuracy, reward fallback). Returns the
// inner text of the first <tag>...</tag> pair, if any.
std::optional<std::string> find_block(std::string_view raw, Tag tag);

enum class Segment : std::uint8_t { none, context, think, answer };

// Token-index view of the three segments. A token belongs to at most one
// segment; tag-delimiter and inter-block whitespace tokens belong to none.
class SegmentMask {
 public:
  SegmentMask() = default;
  explicit SegmentMask(std::vector<Segment> segments)
      : segments_(std::move(segments)) {}
  static SegmentMask unsegmented(std::size_t num_tokens) {
    return SegmentMask(std::vector<Segment>(num_tokens, Segment::none));
  }

  std::size_t num_tokens() const { return segments_.size(); }
  Segment segment(std::size_t t) const { return segments_.at(t); }
  bool in_context(std::size_t t) const {
    return segments_.at(t) == Segment::context;
  }
  bool in_think(std::size_t t) const {
    return segments_.at(t) == Segment::think;
  }
  bool in_answer(std::size_t t) const {
    return segments_.at(t) == Segment::answer;
  }

  std::vector<std::size_t> tokens_in(Segment s) const;

  bool operator==(const SegmentMask&) const = default;

 private:
  std::vector<Segment> segments_;
};

// Maps a tokenization of the raw response onto segments. token_char_offsets
// must tile the response from offset 0: ordered, contiguous, non-overlapping,
// and covering at least through the end of the answer block. Zero-width
// intervals are permitted and land in no segment. Assignment uses the token's
// first character: the token joins the segment whose inner-text span contains
// that character.
SegmentMask segment_token_spans(const TaggedResponse& resp,
                                std::span<const CharSpan> token_char_offsets);

}  // namespace segrpo
