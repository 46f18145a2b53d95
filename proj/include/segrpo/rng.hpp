// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace segrpo {

// All randomness in the project flows from one root seed through named
// sub-streams, so any component (rollout, filter, task-gen) can be rerun in
// isolation with the same draws.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

constexpr std::uint64_t hash_str(std::string_view s) {
  // FNV-1a, 64 bit.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view label) {
  return mix_seed(root, hash_str(label));
}

template <typename... Idx>
std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                          Idx... indices) {
  std::uint64_t h = derive_seed(root, label);
  ((h = mix_seed(h, static_cast<std::uint64_t>(indices))), ...);
  return h;
}

// Uniform double in [0, 1) with 53 random bits; used instead of
// std::uniform_real_distribution to keep draws identical across platforms.
inline double canonical_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace segrpo
