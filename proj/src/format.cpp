// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#include "segrpo/format.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "segrpo/errors.hpp"

namespace segrpo {

namespace {

constexpr std::array<Tag, 3> kTagOrder = {Tag::context, Tag::think,
                                          Tag::answer};

std::vector<std::size_t> find_all(std::string_view hay,
                                  std::string_view needle) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while ((pos = hay.find(needle, pos)) != std::string_view::npos) {
    out.push_back(pos);
    pos += needle.size();
  }
  return out;
}

bool all_whitespace(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

}  // namespace

std::string_view tag_name(Tag tag) {
  switch (tag) {
    case Tag::context:
      return "context";
    case Tag::think:
      return "think";
    case Tag::answer:
      return "answer";
  }
  return "";
}

std::string_view open_tag(Tag tag) {
  switch (tag) {
    case Tag::context:
      return "<context>";
    case Tag::think:
      return "<think>";
    case Tag::answer:
      return "<answer>";
  }
  return "";
}

std::string_view close_tag(Tag tag) {
  switch (tag) {
    case Tag::context:
      return "</context>";
    case Tag::think:
      return "</think>";
    case Tag::answer:
      return "</answer>";
  }
  return "";
}

std::string FormatError::message() const {
  std::string name = tag ? std::string(tag_name(*tag)) : std::string();
  switch (kind) {
    case FormatErrorKind::missing_tag:
      return "missing tag <" + name + ">";
    case FormatErrorKind::duplicate_tag:
      return "duplicate tag <" + name + ">";
    case FormatErrorKind::order_violation:
      return "tag blocks out of order";
    case FormatErrorKind::stray_content:
      return "non-whitespace content outside tag blocks";
    case FormatErrorKind::unclosed_tag:
      return "unclosed tag <" + name + ">";
  }
  return "format error";
}

const std::string& TaggedResponse::text(Tag tag) const {
  switch (tag) {
    case Tag::context:
      return context_text;
    case Tag::think:
      return think_text;
    default:
      return answer_text;
  }
}

CharSpan TaggedResponse::span(Tag tag) const {
  switch (tag) {
    case Tag::context:
      return context_span;
    case Tag::think:
      return think_span;
    default:
      return answer_span;
  }
}

CharSpan TaggedResponse::inner_span(Tag tag) const {
  CharSpan block = span(tag);
  return CharSpan{block.begin + open_tag(tag).size(),
                  block.end - close_tag(tag).size()};
}

ParseResult parse_tagged_response(std::string_view raw) {
  struct TagPos {
    std::size_t open;
    std::size_t close;
  };
  std::array<TagPos, 3> pos{};

  for (std::size_t i = 0; i < kTagOrder.size(); ++i) {
    Tag tag = kTagOrder[i];
    auto opens = find_all(raw, open_tag(tag));
    auto closes = find_all(raw, close_tag(tag));
    if (opens.empty()) {
      return FormatError{FormatErrorKind::missing_tag, tag};
    }
    if (opens.size() > 1 || closes.size() > 1) {
      return FormatError{FormatErrorKind::duplicate_tag, tag};
    }
    if (closes.empty() || closes[0] < opens[0]) {
      return FormatError{FormatErrorKind::unclosed_tag, tag};
    }
    pos[i] = TagPos{opens[0], closes[0]};
  }

  // Blocks must be strictly ordered and non-overlapping:
  // context block < think block < answer block.
  for (std::size_t i = 0; i + 1 < kTagOrder.size(); ++i) {
    std::size_t block_end = pos[i].close + close_tag(kTagOrder[i]).size();
    if (block_end > pos[i + 1].open) {
      return FormatError{FormatErrorKind::order_violation, std::nullopt};
    }
  }

  // Only whitespace may appear between and around the blocks.
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < kTagOrder.size(); ++i) {
    if (!all_whitespace(raw.substr(cursor, pos[i].open - cursor))) {
      return FormatError{FormatErrorKind::stray_content, std::nullopt};
    }
    cursor = pos[i].close + close_tag(kTagOrder[i]).size();
  }
  if (!all_whitespace(raw.substr(cursor))) {
    return FormatError{FormatErrorKind::stray_content, std::nullopt};
  }

  TaggedResponse resp;
  std::array<std::string*, 3> texts = {&resp.context_text, &resp.think_text,
                                       &resp.answer_text};
  std::array<CharSpan*, 3> spans = {&resp.context_span, &resp.think_span,
                                    &resp.answer_span};
  for (std::size_t i = 0; i < kTagOrder.size(); ++i) {
    Tag tag = kTagOrder[i];
    std::size_t inner_begin = pos[i].open + open_tag(tag).size();
    *texts[i] = std::string(raw.substr(inner_begin, pos[i].close - inner_begin));
    *spans[i] = CharSpan{pos[i].open, pos[i].close + close_tag(tag).size()};
  }
  return resp;
}

double format_reward(std::string_view raw) {
  return std::holds_alternative<TaggedResponse>(parse_tagged_response(raw))
             ? 1.0
             : 0.0;
}

std::string render_tagged(std::string_view context_text,
                          std::string_view think_text,
                          std::string_view answer_text) {
  std::string out;
  out.reserve(context_text.size() + think_text.size() + answer_text.size() +
              64);
  for (Tag tag : kTagOrder) {
    out += open_tag(tag);
    out += tag == Tag::context ? context_text
           : tag == Tag::think ? think_text
                               : answer_text;
    out += close_tag(tag);
  }
  return out;
}

std::string render_tagged(const TaggedResponse& resp) {
  return render_tagged(resp.context_text, resp.think_text, resp.answer_text);
}

std::optional<std::string> find_block(std::string_view raw, Tag tag) {
  std::size_t open = raw.find(open_tag(tag));
  if (open == std::string_view::npos) {
    return std::nullopt;
  }
  std::size_t inner = open + open_tag(tag).size();
  std::size_t close = raw.find(close_tag(tag), inner);
  if (close == std::string_view::npos) {
    return std::nullopt;
  }
  return std::string(raw.substr(inner, close - inner));
}

std::vector<std::size_t> SegmentMask::tokens_in(Segment s) const {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < segments_.size(); ++t) {
    if (segments_[t] == s) {
      out.push_back(t);
    }
  }
  return out;
}

SegmentMask segment_token_spans(const TaggedResponse& resp,
                                std::span<const CharSpan> token_char_offsets) {
  std::size_t cursor = 0;
  for (const CharSpan& span : token_char_offsets) {
    if (span.begin != cursor || span.end < span.begin) {
      throw OffsetMismatch("token offsets are not a contiguous tiling from 0");
    }
    cursor = span.end;
  }
  if (cursor < resp.answer_span.end) {
    throw OffsetMismatch("token offsets end before the answer block does");
  }

  const CharSpan ctx = resp.inner_span(Tag::context);
  const CharSpan think = resp.inner_span(Tag::think);
  const CharSpan ans = resp.inner_span(Tag::answer);

  std::vector<Segment> segments;
  segments.reserve(token_char_offsets.size());
  for (const CharSpan& span : token_char_offsets) {
    Segment s = Segment::none;
    if (span.length() > 0) {
      if (ctx.contains(span.begin)) {
        s = Segment::context;
      } else if (think.contains(span.begin)) {
        s = Segment::think;
      } else if (ans.contains(span.begin)) {
        s = Segment::answer;
      }
    }
    segments.push_back(s);
  }
  return SegmentMask(std::move(segments));
}

}  // namespace segrpo
