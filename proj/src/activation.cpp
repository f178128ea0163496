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

#include "engram/activation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <sstream>

#include "engram/error.hpp"

namespace engram {
namespace {

// Neumaier compensated sum.
class Accumulator {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double age_seconds(Timestamp now, double event_seconds) {
  return std::max(static_cast<double>(now.seconds) - event_seconds, kMinAgeSeconds);
}

double decayed(double age, double decay) { return std::pow(age, -decay); }

// count * mean of a^-d over `count` evenly spaced events from first to last,
// using the midpoint rule: each event owns one gap-wide cell of age.
double span_strength(const FoldedSpan& s, Timestamp now, double unit, double decay) {
  const double last = static_cast<double>(s.last.seconds);
  const double first = static_cast<double>(s.first.seconds);
  const double n = static_cast<double>(s.count);
  if (s.count == 1 || s.last == s.first) return n * decayed(age_seconds(now, last) / unit, decay);
  const double half_gap = (last - first) / (2.0 * (n - 1.0));
  const double young = static_cast<double>(now.seconds) - last - half_gap;
  if (young < kMinAgeSeconds) {
    return n * decayed(age_seconds(now, 0.5 * (first + last)) / unit, decay);
  }
  const double a1 = young / unit;
  const double a0 = (static_cast<double>(now.seconds) - first + half_gap) / unit;
  const double integral = std::abs(decay - 1.0) < 1e-12
                              ? std::log(a0 / a1)
                              : (std::pow(a0, 1.0 - decay) - std::pow(a1, 1.0 - decay)) / (1.0 - decay);
  return n * integral / (a0 - a1);
}

// Merges adjacent spans until at most kMaxFoldedSpans remain, always taking
// the pair whose combined width is smallest relative to its age at `now`.
void compact_spans(std::vector<FoldedSpan>& spans, Timestamp now) {
  while (spans.size() > ActivationTrace::kMaxFoldedSpans) {
    std::size_t best = 0;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < spans.size(); ++i) {
      const double width = static_cast<double>(std::max(spans[i].last, spans[i + 1].last) - spans[i].first);
      const double ratio = width / age_seconds(now, static_cast<double>(spans[i + 1].last.seconds));
      if (ratio < best_ratio) {
        best_ratio = ratio;
        best = i;
      }
    }
    FoldedSpan& a = spans[best];
    const FoldedSpan& b = spans[best + 1];
    a.count += b.count;
    a.first = std::min(a.first, b.first);
    a.last = std::max(a.last, b.last);
    spans.erase(spans.begin() + static_cast<std::ptrdiff_t>(best) + 1);
  }
}

void fold_overflow(ActivationTrace& trace, Timestamp now) {
  if (trace.recent.size() <= ActivationTrace::kMaxRecentEvents) return;
  const std::size_t excess = trace.recent.size() - ActivationTrace::kMaxRecentEvents;
  for (std::size_t i = 0; i < excess; ++i) {
    trace.folded.push_back(FoldedSpan{1, trace.recent[i], trace.recent[i]});
  }
  trace.recent.erase(trace.recent.begin(), trace.recent.begin() + static_cast<std::ptrdiff_t>(excess));
  compact_spans(trace.folded, now);
}

void check_ages(std::span<const double> ages) {
  if (ages.empty()) throw Error(ErrorCode::kEmptyHistory, "activation needs at least one retrieval");
  for (double a : ages) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw Error(ErrorCode::kInvalidArgument, "retrieval ages must be positive and finite");
    }
  }
}

}  // namespace

void ActivationParams::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (!(decay > 0.0) || !std::isfinite(decay)) fail("decay must be positive");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail("lambda must be positive");
  if (!(offset >= 0.0 && offset < 1.0)) fail("offset must lie in [0, 1)");
  if (!(forget_threshold > offset && forget_threshold < 1.0)) {
    fail("forget_threshold must lie in (offset, 1)");
  }
  if (!(time_unit_seconds > 0.0) || !std::isfinite(time_unit_seconds)) {
    fail("time_unit_seconds must be positive");
  }
}

std::vector<std::string> ActivationParams::warnings() const {
  std::vector<std::string> out;
  if (decay < 0.3 || decay > 0.7) {
    std::ostringstream msg;
    msg << "decay " << decay << " is outside the usual [0.3, 0.7] range";
    out.push_back(msg.str());
  }
  return out;
}

double strength_sum(std::span<const double> ages, double decay) {
  check_ages(ages);
  Accumulator acc;
  for (double a : ages) acc.add(decayed(a, decay));
  return acc.value();
}

double base_level_activation(std::span<const double> ages, double decay) {
  return std::log(strength_sum(ages, decay));
}

double retention(std::span<const double> ages, double t_since_last, const ActivationParams& params) {
  const double sum = strength_sum(ages, params.decay);
  if (!(t_since_last >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "elapsed time must be non-negative");
  }
  return params.offset + (1.0 - params.offset) * std::exp(-params.lambda * t_since_last / sum);
}

ActivationState classify_state(double r, const ActivationParams& params) {
  return r < params.forget_threshold ? ActivationState::kPendingForget : ActivationState::kActive;
}

ActivationTrace record_access(const ActivationTrace& trace, Timestamp now) {
  if (trace.recent.empty()) return ActivationTrace::created_at(now);
  if (now < trace.last_access()) {
    throw Error(ErrorCode::kClockSkew, "access at " + std::to_string(now.seconds) +
                                           " precedes last access " +
                                           std::to_string(trace.last_access().seconds));
  }
  ActivationTrace out = trace;
  out.recent.push_back(now);
  out.total_count += 1;
  fold_overflow(out, now);
  return out;
}

ActivationTrace merge_traces(const ActivationTrace& a, const ActivationTrace& b, Timestamp now) {
  if (a.recent.empty()) return b;
  if (b.recent.empty()) return a;
  now = std::max({now, a.last_access(), b.last_access()});

  ActivationTrace out;
  out.total_count = a.total_count + b.total_count;
  std::merge(a.recent.begin(), a.recent.end(), b.recent.begin(), b.recent.end(),
             std::back_inserter(out.recent));
  out.folded = a.folded;
  out.folded.insert(out.folded.end(), b.folded.begin(), b.folded.end());
  std::sort(out.folded.begin(), out.folded.end(), [](const FoldedSpan& x, const FoldedSpan& y) {
    return std::tie(x.first, x.last, x.count) < std::tie(y.first, y.last, y.count);
  });
  // Recent events older than a folded span of the other trace stay exact;
  // only the overflow beyond the window is folded.
  fold_overflow(out, now);
  std::sort(out.folded.begin(), out.folded.end(), [](const FoldedSpan& x, const FoldedSpan& y) {
    return std::tie(x.first, x.last, x.count) < std::tie(y.first, y.last, y.count);
  });
  compact_spans(out.folded, now);
  return out;
}

double trace_strength(const ActivationTrace& trace, Timestamp now, const ActivationParams& params) {
  if (trace.recent.empty()) throw Error(ErrorCode::kEmptyHistory, "trace has no events");
  const double unit = params.time_unit_seconds;
  Accumulator acc;
  for (Timestamp t : trace.recent) {
    acc.add(decayed(age_seconds(now, static_cast<double>(t.seconds)) / unit, params.decay));
  }
  for (const FoldedSpan& s : trace.folded) acc.add(span_strength(s, now, unit, params.decay));
  return acc.value();
}

double trace_activation(const ActivationTrace& trace, Timestamp now, const ActivationParams& params) {
  return std::log(trace_strength(trace, now, params));
}

double trace_retention(const ActivationTrace& trace, Timestamp now, const ActivationParams& params) {
  const double sum = trace_strength(trace, now, params);
  const double t =
      std::max<double>(0.0, static_cast<double>(now - trace.last_access())) / params.time_unit_seconds;
  return params.offset + (1.0 - params.offset) * std::exp(-params.lambda * t / sum);
}

double exact_strength(std::span<const Timestamp> events, Timestamp now,
                      const ActivationParams& params) {
  if (events.empty()) throw Error(ErrorCode::kEmptyHistory, "no events");
  Accumulator acc;
  for (Timestamp t : events) {
    acc.add(decayed(age_seconds(now, static_cast<double>(t.seconds)) / params.time_unit_seconds,
                    params.decay));
  }
  return acc.value();
}

}  // namespace engram
