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

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace engram {

using Embedding = std::vector<float>;

inline constexpr std::size_t kDefaultDimension = 256;

// Embedding provider contract: a pure function of the normalized text that
// returns a unit-norm vector of dimension() components.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dimension() const = 0;
  virtual Embedding embed(std::string_view text) const = 0;
};

// Default provider. Character trigrams of " text " (padded with one space on
// each side) are FNV-1a hashed; the low bits pick the bucket and bit 32 the
// sign. The bucket vector is L2-normalized. Throws kEmptyText when the
// normalized text is empty.
class HashingEmbedder final : public Embedder {
 public:
  explicit HashingEmbedder(std::size_t dimension = kDefaultDimension);

  std::size_t dimension() const override { return dimension_; }
  Embedding embed(std::string_view text) const override;

 private:
  std::size_t dimension_;
};

// 64-bit FNV-1a; part of the embedding contract so it must not change.
std::uint64_t fnv1a64(std::string_view bytes);

// Cosine similarity in double precision. Throws kDimensionMismatch or
// kZeroVector.
double cosine(std::span<const float> a, std::span<const float> b);

// Dot product for vectors already known to be unit-norm and equal length.
double dot(std::span<const float> a, std::span<const float> b);

}  // namespace engram
