// Copyright 2026 The Engram Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "engram/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "engram/error.hpp"
#include "engram/text.hpp"

namespace engram {
namespace {

// Byte offsets of UTF-8 code point starts, plus the end offset.
std::vector<std::size_t> code_point_offsets(std::string_view s) {
  std::vector<std::size_t> offsets;
  offsets.reserve(s.size() + 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) offsets.push_back(i);
  }
  offsets.push_back(s.size());
  return offsets;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw Error(ErrorCode::kInvalidArgument, "embedding dimension must be > 0");
}

Embedding HashingEmbedder::embed(std::string_view text) const {
  const std::string normalized = normalize_text(text);
  if (normalized.empty()) throw Error(ErrorCode::kEmptyText, "cannot embed empty text");

  const std::string padded = " " + normalized + " ";
  const auto offsets = code_point_offsets(padded);
  std::vector<double> acc(dimension_, 0.0);
  const std::size_t points = offsets.size() - 1;
  for (std::size_t i = 0; i + 3 <= points; ++i) {
    std::string_view gram(padded.data() + offsets[i], offsets[i + 3] - offsets[i]);
    const std::uint64_t h = fnv1a64(gram);
    const double sign = ((h >> 32) & 1u) ? -1.0 : 1.0;
    acc[h % dimension_] += sign;
  }

  double norm2 = 0.0;
  for (double v : acc) norm2 += v * v;
  if (norm2 == 0.0) {
    // Every trigram cancelled against another; fall back to a whole-string bucket.
    acc[fnv1a64(normalized) % dimension_] = 1.0;
    norm2 = 1.0;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  Embedding out(dimension_);
  for (std::size_t i = 0; i < dimension_; ++i) out[i] = static_cast<float>(acc[i] * inv);
  return out;
}

double dot(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
  return s;
}

double cosine(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cosine of vectors with dimensions " + std::to_string(a.size()) + " and " +
                    std::to_string(b.size()));
  }
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += static_cast<double>(a[i]) * b[i];
    aa += static_cast<double>(a[i]) * a[i];
    bb += static_cast<double>(b[i]) * b[i];
  }
  if (aa == 0.0 || bb == 0.0) throw Error(ErrorCode::kZeroVector, "cosine of a zero vector");
  const double c = ab / std::sqrt(aa * bb);
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace engram
