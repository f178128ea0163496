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

// Memory strength.
//
// Base-level activation of a unit with retrieval ages t_1..t_n:
//
//   B = ln( sum_k t_k^-d )
//
// Retention t time-units after the most recent retrieval:
//
//   R = offset + (1 - offset) * exp( -lambda * t / sum_k t_k^-d )
//
// R drives forgetting (a unit below forget_threshold becomes PendingForget);
// B feeds the retrieval score. The pure functions below take ages in
// whatever unit the caller chooses. The trace helpers convert second-based
// timestamps into ActivationParams::time_unit_seconds and clamp every age at
// one second first.

#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "engram/core.hpp"

namespace engram {

struct ActivationParams {
  double decay = 0.5;              // d
  double lambda = 1.0;             // forgetting-rate coefficient
  double offset = 0.1;             // residual retention floor
  double forget_threshold = 0.35;  // R below this => PendingForget
  double time_unit_seconds = static_cast<double>(kDay);

  // Throws kInvalidArgument when the parameters are unusable.
  void validate() const;
  // Soft problems, e.g. decay outside the usual [0.3, 0.7] band.
  std::vector<std::string> warnings() const;
};

inline constexpr double kMinAgeSeconds = 1.0;

// ln(sum ages^-d). Ages must be positive. Throws kEmptyHistory.
double base_level_activation(std::span<const double> ages, double decay);

// sum ages^-d with compensated summation. Throws kEmptyHistory.
double strength_sum(std::span<const double> ages, double decay);

// offset + (1-offset) * exp(-lambda * t / sum ages^-d). Throws kEmptyHistory.
double retention(std::span<const double> ages, double t_since_last, const ActivationParams& params);

enum class ActivationState { kActive, kPendingForget };

// Boundary is Active: only r strictly below the threshold is PendingForget.
ActivationState classify_state(double r, const ActivationParams& params);

// Appends `now`. Throws kClockSkew if now precedes the last access. Events
// beyond kMaxRecentEvents move into folded spans; when there are too many
// spans, the adjacent pair whose combined width is smallest relative to its
// age is merged. Each span contributes count * mean(a^-d) over its evenly
// spaced ages, integrated in closed form.
ActivationTrace record_access(const ActivationTrace& trace, Timestamp now);

// Union of two histories as multisets; used when units merge.
ActivationTrace merge_traces(const ActivationTrace& a, const ActivationTrace& b, Timestamp now);

// Weighted strength sum for a trace at `now`, ages in time units.
double trace_strength(const ActivationTrace& trace, Timestamp now, const ActivationParams& params);
double trace_activation(const ActivationTrace& trace, Timestamp now, const ActivationParams& params);
double trace_retention(const ActivationTrace& trace, Timestamp now, const ActivationParams& params);

// Exact (uncapped) history, e.g. for tests measuring folding error.
double exact_strength(std::span<const Timestamp> events, Timestamp now,
                      const ActivationParams& params);

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace engram
