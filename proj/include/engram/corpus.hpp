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
// Synthetic dialogue generator with known answers.
//
// Every fact is "The <attribute> of <Entity> is <value>." about a unique
// invented entity, so the corpus has exactly `facts` distinct fact keys. Each
// statement is repeated `dup` times (identical wording) and the repeats are
// shuffled through the dialogue; with probability ack_rate a statement is
// followed by an acknowledgment. `filler` chit-chat turns carry no facts.
// `contradictions` facts are restated with a new value after a gap, and
// their probes expect the new value.
//
// The output is a pure function of the options.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "engram/core.hpp"

namespace engram {

struct CorpusOptions {
  std::size_t facts = 100;
  std::size_t dup = 1;
  double ack_rate = 0.0;
  std::size_t contradictions = 0;
  std::size_t filler = 0;
  std::uint64_t seed = 1;
  Timestamp start{1'700'000'000};
  Duration step = kMinute;
  Duration contradiction_gap = 2 * kDay;

  // Throws kInvalidArgument (facts = 0, dup = 0, ack_rate outside [0,1],
  // contradictions > facts, step <= 0).
  void validate() const;
};

struct CorpusTurn {
  std::string utterance;
  std::string speaker;
  Timestamp ts;
};

struct Probe {
  std::string question;
  std::string key;    // fact key as the annotator normalizes it
  std::string value;  // expected (latest) value
  std::string label;  // relation label
};

struct Corpus {
  std::vector<CorpusTurn> turns;
  std::vector<Probe> probes;  // one per fact, in fact order
  std::size_t total_tokens = 0;
  // Tokens of repeated statements beyond the first copy plus acknowledgment
  // turns: what a perfect deduplicator could remove.
  std::size_t redundant_tokens = 0;
};

Corpus generate_corpus(const CorpusOptions& options);

// JSONL in the ingest format {utterance, speaker, ts}, one turn per line.
std::string turns_jsonl(const Corpus& corpus);
// JSONL of {question, key, value, label}.
std::string probes_jsonl(const Corpus& corpus);

// Filler lines the generator draws from (for tests).
const std::vector<std::string>& filler_lines();

}  // namespace engram
