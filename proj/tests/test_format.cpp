// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#include "segrpo/format.hpp"

#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "segrpo/errors.hpp"

using namespace segrpo;

namespace {

const std::string kValid =
    "<context>c</context><think>t</think><answer>a</answer>";

TaggedResponse parse_ok(std::string_view raw) {
  ParseResult result = parse_tagged_response(raw);
  REQUIRE(std::holds_alternative<TaggedResponse>(result));
  return std::get<TaggedResponse>(result);
}

FormatError parse_err(std::string_view raw) {
  ParseResult result = parse_tagged_response(raw);
  REQUIRE(std::holds_alternative<FormatError>(result));
  return std::get<FormatError>(result);
}

// Random inner text that cannot fabricate tag tokens.
std::string random_inner(std::mt19937_64& rng, std::size_t max_len) {
  static const std::string alphabet =
      "abcdefghijklmnopqrstuvwxyz ABC.,!?0123456789>";
  std::size_t len = rng() % (max_len + 1);
  std::string out;
  for (std::size_t i = 0; i < len; ++i) {
    out.push_back(alphabet[rng() % alphabet.size()]);
  }
  return out;
}

std::vector<CharSpan> random_tiling(std::mt19937_64& rng,
                                    std::size_t length) {
  std::vector<CharSpan> spans;
  std::size_t cursor = 0;
  while (cursor < length) {
    std::size_t len = 1 + rng() % 5;
    len = std::min(len, length - cursor);
    spans.push_back(CharSpan{cursor, cursor + len});
    cursor += len;
  }
  return spans;
}

}  // namespace

TEST_CASE("parse accepts the canonical three-tag response") {
  TaggedResponse resp = parse_ok(kValid);
  CHECK(resp.context_text == "c");
  CHECK(resp.think_text == "t");
  CHECK(resp.answer_text == "a");
  CHECK(resp.context_span == CharSpan{0, 20});
  CHECK(resp.inner_span(Tag::context) == CharSpan{9, 10});
}

TEST_CASE("parse reports missing and duplicated tags") {
  FormatError e = parse_err("<think>t</think><answer>a</answer>");
  CHECK(e.kind == FormatErrorKind::missing_tag);
  CHECK(e.tag == Tag::context);

  e = parse_err(kValid + "<answer>b</answer>");
  CHECK(e.kind == FormatErrorKind::duplicate_tag);
  CHECK(e.tag == Tag::answer);

  e = parse_err("<context>c</context><think>t<answer>a</answer>");
  CHECK(e.kind == FormatErrorKind::unclosed_tag);
  CHECK(e.tag == Tag::think);

  e = parse_err("</context>c<context><think>t</think><answer>a</answer>");
  CHECK(e.kind == FormatErrorKind::unclosed_tag);
  CHECK(e.tag == Tag::context);
}

TEST_CASE("parse rejects out-of-order blocks") {
  FormatError e =
      parse_err("<context>c</context><answer>a</answer><think>t</think>");
  CHECK(e.kind == FormatErrorKind::order_violation);

  e = parse_err("<context><think>t</think>c</context><answer>a</answer>");
  CHECK(e.kind == FormatErrorKind::order_violation);
}

TEST_CASE("whitespace between blocks is fine, stray text is not") {
  TaggedResponse resp = parse_ok(
      "  <context>c</context>\n\t<think>t</think> <answer>a</answer>\n");
  CHECK(resp.context_text == "c");

  CHECK(parse_err(kValid + "x").kind == FormatErrorKind::stray_content);
  CHECK(parse_err("pre " + kValid).kind == FormatErrorKind::stray_content);
  CHECK(parse_err("<context>c</context>x<think>t</think><answer>a</answer>")
            .kind == FormatErrorKind::stray_content);
}

TEST_CASE("tags are case-sensitive and attribute-free") {
  CHECK(parse_err("<Context>c</Context><think>t</think><answer>a</answer>")
            .kind == FormatErrorKind::missing_tag);
  CHECK(parse_err("<context id=1>c</context><think>t</think><answer>a</answer>")
            .kind == FormatErrorKind::missing_tag);
}

TEST_CASE("inner text is untrimmed") {
  TaggedResponse resp =
      parse_ok("<context> c </context><think>\nt\n</think><answer>a </answer>");
  CHECK(resp.context_text == " c ");
  CHECK(resp.think_text == "\nt\n");
  CHECK(resp.answer_text == "a ");
}

TEST_CASE("format reward is the parse indicator") {
  CHECK(format_reward(kValid) == 1.0);
  CHECK(format_reward("") == 0.0);
  CHECK(format_reward(kValid + "<answer>b</answer>") == 0.0);
}

TEST_CASE("parse-print identity on random responses") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    std::string ctx = random_inner(rng, 12);
    std::string think = random_inner(rng, 12);
    std::string ans = random_inner(rng, 12);
    std::string raw = render_tagged(ctx, think, ans);
    TaggedResponse resp = parse_ok(raw);
    CHECK(resp.context_text == ctx);
    CHECK(resp.think_text == think);
    CHECK(resp.answer_text == ans);
    CHECK(render_tagged(resp) == raw);
  }
}

TEST_CASE("deleting any single tag flips the reward to 0") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    std::string raw = render_tagged(random_inner(rng, 8),
                                    random_inner(rng, 8),
                                    random_inner(rng, 8));
    REQUIRE(format_reward(raw) == 1.0);
    for (Tag tag : {Tag::context, Tag::think, Tag::answer}) {
      for (std::string_view piece : {open_tag(tag), close_tag(tag)}) {
        std::string mutated = raw;
        mutated.erase(mutated.find(piece), piece.size());
        CHECK(format_reward(mutated) == 0.0);
      }
    }
  }
}

TEST_CASE("segment assignment follows the first-character rule") {
  TaggedResponse resp = parse_ok(kValid);

  SUBCASE("one character per token") {
    std::vector<CharSpan> offsets;
    for (std::size_t i = 0; i < kValid.size(); ++i) {
      offsets.push_back(CharSpan{i, i + 1});
    }
    SegmentMask mask = segment_token_spans(resp, offsets);
    CHECK(mask.tokens_in(Segment::context) == std::vector<std::size_t>{9});
    CHECK(mask.tokens_in(Segment::think) == std::vector<std::size_t>{27});
    CHECK(mask.tokens_in(Segment::answer) == std::vector<std::size_t>{44});
  }

  SUBCASE("aligned block boundaries give one token per segment") {
    std::vector<CharSpan> offsets = {
        {0, 9},  {9, 10},  {10, 20}, {20, 27}, {27, 28},
        {28, 36}, {36, 44}, {44, 45}, {45, 54},
    };
    SegmentMask mask = segment_token_spans(resp, offsets);
    CHECK(mask.tokens_in(Segment::context) == std::vector<std::size_t>{1});
    CHECK(mask.tokens_in(Segment::think) == std::vector<std::size_t>{4});
    CHECK(mask.tokens_in(Segment::answer) == std::vector<std::size_t>{7});
  }

  SUBCASE("token straddling a boundary joins its first character's segment") {
    std::vector<CharSpan> offsets = {{0, 9}, {9, 36}, {36, 54}};
    SegmentMask mask = segment_token_spans(resp, offsets);
    CHECK(mask.segment(0) == Segment::none);
    CHECK(mask.segment(1) == Segment::context);
    CHECK(mask.segment(2) == Segment::none);
  }

  SUBCASE("zero-width tokens join no segment") {
    std::vector<CharSpan> offsets = {{0, 54}, {54, 54}};
    SegmentMask mask = segment_token_spans(resp, offsets);
    CHECK(mask.segment(1) == Segment::none);
  }

  SUBCASE("non-contiguous offsets are rejected") {
    std::vector<CharSpan> gap = {{0, 10}, {11, 54}};
    CHECK_THROWS_AS(segment_token_spans(resp, gap), OffsetMismatch);
    std::vector<CharSpan> late = {{1, 54}};
    CHECK_THROWS_AS(segment_token_spans(resp, late), OffsetMismatch);
    std::vector<CharSpan> shortfall = {{0, 40}};
    CHECK_THROWS_AS(segment_token_spans(resp, shortfall), OffsetMismatch);
  }
}

TEST_CASE("segment sets stay disjoint over random tokenizations") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 100; ++i) {
    std::string raw = render_tagged(random_inner(rng, 10),
                                    random_inner(rng, 10),
                                    random_inner(rng, 10));
    TaggedResponse resp = parse_ok(raw);
    std::vector<CharSpan> offsets = random_tiling(rng, raw.size());
    SegmentMask mask = segment_token_spans(resp, offsets);

    std::size_t total = mask.tokens_in(Segment::context).size() +
                        mask.tokens_in(Segment::think).size() +
                        mask.tokens_in(Segment::answer).size() +
                        mask.tokens_in(Segment::none).size();
    CHECK(total == offsets.size());
    for (std::size_t t : mask.tokens_in(Segment::context)) {
      CHECK(t < mask.num_tokens());
    }
  }
}

TEST_CASE("refining a tokenization keeps token-start assignments") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    std::string raw = render_tagged(random_inner(rng, 10),
                                    random_inner(rng, 10),
                                    random_inner(rng, 10));
    TaggedResponse resp = parse_ok(raw);
    std::vector<CharSpan> coarse = random_tiling(rng, raw.size());
    SegmentMask before = segment_token_spans(resp, coarse);

    // Split one multi-character token in two.
    std::vector<CharSpan> fine;
    bool split_done = false;
    for (const CharSpan& span : coarse) {
      if (!split_done && span.length() > 1) {
        std::size_t cut = span.begin + 1 + rng() % (span.length() - 1);
        fine.push_back(CharSpan{span.begin, cut});
        fine.push_back(CharSpan{cut, span.end});
        split_done = true;
      } else {
        fine.push_back(span);
      }
    }
    SegmentMask after = segment_token_spans(resp, fine);

    std::size_t fi = 0;
    for (std::size_t ci = 0; ci < coarse.size(); ++ci) {
      REQUIRE(fine[fi].begin == coarse[ci].begin);
      CHECK(after.segment(fi) == before.segment(ci));
      fi += fine[fi].end == coarse[ci].end ? 1 : 2;
    }
  }
}

TEST_CASE("lenient block lookup for malformed completions") {
  CHECK(find_block("junk <answer> B</answer> junk", Tag::answer) == " B");
  CHECK(find_block("<answer>no close", Tag::answer) == std::nullopt);
  CHECK(find_block("nothing here", Tag::context) == std::nullopt);
}
