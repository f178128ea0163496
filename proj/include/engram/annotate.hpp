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

// Semantic anchor annotation and structured memory unit generation.
//
// The default annotator is rule based and deterministic. Strong entities are
// gazetteer terms, capitalized spans, quantity(+unit) spans and first-person
// pronouns (mapped to "user"); other content tokens are Weak. Facts come from
// three clause shapes:
//
//   <subject> is|are|was|were|will be <object>       copular fact
//   <subject> <verb> [<prep>] <object>               verb relation
//   <fragment>, answering "what is <X>?" in context  elliptical answer
//
// Copular subjects of the form "<attr> of <E>" or "<E>'s <attr>" key the
// fact as "<attr> of <e>" with relation label "<attr>" (spaces become '_').
// Verb relations are labelled "<verb, 3rd person>[_<prep>]", e.g. "lives_in".

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "engram/core.hpp"
#include "engram/embedding.hpp"

namespace engram {

inline constexpr std::string_view kRuleTableVersion = "engram-rules/1";

struct LexiconEntry {
  EmotionLabel label = EmotionLabel::kNeutral;
  double weight = 0.0;
};

struct RuleTables {
  std::string version = std::string(kRuleTableVersion);
  // Multi-word terms (space separated, lowercase) -> topic tag.
  std::map<std::string, std::string> gazetteer;
  // Word or phrase -> emotion contribution. Unknown words contribute 0.
  std::map<std::string, LexiconEntry> emotion_lexicon;
  std::set<std::string> acknowledgment_words;

  // Tables compiled from data/*.
  static RuleTables defaults();
  // Loads tables from files; an empty path keeps the compiled default.
  static RuleTables load(const std::string& gazetteer_path, const std::string& lexicon_path,
                         const std::string& acknowledgment_path);

  static std::map<std::string, std::string> parse_gazetteer(std::string_view text);
  static std::map<std::string, LexiconEntry> parse_lexicon(std::string_view text);
  static std::set<std::string> parse_word_list(std::string_view text);
};

// Anything that turns an utterance into anchors: the rule annotator, or an
// adapter around an external model.
class AnchorSource {
 public:
  virtual ~AnchorSource() = default;
  virtual SemanticAnchorSet annotate(std::string_view utterance,
                                     const std::vector<std::string>& context) const = 0;
};

class Annotator final : public AnchorSource {
 public:
  explicit Annotator(RuleTables tables = RuleTables::defaults());

  // Throws kEmptyUtterance when the utterance is blank.
  SemanticAnchorSet annotate(std::string_view utterance,
                             const std::vector<std::string>& context) const override;

  const RuleTables& tables() const { return tables_; }

 private:
  RuleTables tables_;
  std::size_t longest_gazetteer_term_ = 1;
  std::size_t longest_lexicon_phrase_ = 1;
};

// Delegates to an external annotation service over HTTP and falls back to the
// rule annotator on timeout, transport error or malformed response (unless
// fallback is disabled, in which case the failure propagates).
//
// Wire contract: POST <path> with {"utterance": str, "context": [str]};
// the response body is a SemanticAnchorSet as JSON (see json_io.hpp).
class HttpAnnotatorAdapter final : public AnchorSource {
 public:
  struct Options {
    std::string host = "127.0.0.1";
    int port = 8088;
    std::string path = "/annotate";
    int timeout_ms = 2000;
    bool fallback_to_default = true;
  };

  HttpAnnotatorAdapter(Options options, const Annotator& fallback);

  SemanticAnchorSet annotate(std::string_view utterance,
                             const std::vector<std::string>& context) const override;

 private:
  Options options_;
  const Annotator& fallback_;
};

// Identity of the utterance a unit is generated from.
struct UtteranceRef {
  std::string id;
  std::int64_t turn = -1;
  std::string speaker;
};

// The anchors restricted to what fact `index` mentions.
SemanticAnchorSet anchors_for_fact(const SemanticAnchorSet& anchors, std::size_t index);

// One unit per distinct fact (by normalized statement). Acknowledgments and
// fact-free utterances yield nothing. Ids are left zero for the store to
// assign.
std::vector<MemoryUnit> generate_units(const SemanticAnchorSet& anchors, std::string_view raw,
                                       Timestamp now, const std::string& space_id,
                                       const UtteranceRef& source, const Embedder& embedder);

// Dialogue-turn unit for an utterance that produced no facts (questions,
// acknowledgments, remarks), so the pruner can see conversational redundancy.
std::optional<MemoryUnit> generate_turn_unit(const SemanticAnchorSet& anchors, std::string_view raw,
                                             Timestamp now, const std::string& space_id,
                                             const UtteranceRef& source, const Embedder& embedder);

}  // namespace engram
