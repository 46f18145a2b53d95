// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "segrpo/judge_types.hpp"

namespace segrpo {

// Versioned prompt templates. The canonical copies live under
// assets/prompts/; the constants here must stay byte-identical to them
// (enforced by a test). Templates carry {reference} and {hypothesis}
// placeholders.
inline constexpr std::string_view kPromptVersion = "v1";

std::string_view prompt_template(Rubric rubric);

// System prompt handed to a real policy backend so completions follow the
// context/think/answer layout.
std::string_view system_prompt();

// Fills {reference} and {hypothesis} in the rubric's template.
std::string render_prompt(Rubric rubric, std::string_view reference,
                          std::string_view hypothesis);

}  // namespace segrpo
