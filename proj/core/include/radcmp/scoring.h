// Copyright 2026 The radcmp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RADCMP_SCORING_H_
#define RADCMP_SCORING_H_

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "radcmp/core_model.h"
#include "radcmp/extraction.h"

namespace radcmp {

// Penalty weights of the entity agreement score. All strictly positive.
struct Weights {
  double mismatch = 1.5;
  double missing = 2.0;
  double surplus = 1.0;

  // Throws InputError unless every weight is finite and > 0.
  void Validate() const;

  // Parses "missing=2,mismatch=1.5,surplus=1"; keys may be given in any
  // order or omitted, omitted keys keep the value from `base`.
  static Weights Parse(std::string_view spec, const Weights& base);
  static Weights Parse(std::string_view spec) { return Parse(spec, Weights{}); }
  std::string ToString() const;

  bool operator==(const Weights&) const = default;
};

// Four-way partition of the distinct entities of a report pair.
struct Classification {
  TermSet matched;
  TermSet mismatched;
  TermSet missing;
  TermSet surplus;

  bool operator==(const Classification&) const = default;
};

struct CategoryCounts {
  std::size_t matched = 0;
  std::size_t mismatched = 0;
  std::size_t missing = 0;
  std::size_t surplus = 0;
};

CategoryCounts Counts(const Classification& c);

// Entity-to-entity similarity in [0, 1].
using SimilarityFn = std::function<double(std::string_view, std::string_view)>;

// Cosine of character-trigram count vectors over " " + a + " " and
// " " + b + " ". Symmetric; 1 exactly when a == b.
double TrigramCosine(std::string_view a, std::string_view b);

// Cosine similarity over caller-supplied embeddings, clamped to [0, 1].
SimilarityFn EmbeddingCosine(
    std::function<std::vector<double>(std::string_view)> embed);

// Share of the final report's word types that also occur in the preliminary
// report. Throws InputError when the final text has no words.
double WordForWord(std::string_view final_text, std::string_view prelim_text);

struct BestMatch {
  std::string partner;  // empty when the preliminary side has no candidates
  double similarity = 0.0;
};

struct NerCosineBreakdown {
  std::size_t matched = 0;                         // exact matches
  std::map<std::string, BestMatch> per_entity_best;  // unmatched final entities
  std::size_t total = 0;                           // distinct final entities
  double score = 0.0;
  bool empty_final = false;  // total == 0; score reported as 1
};

// (matched + sum over unmatched final entities of the best similarity to any
// unmatched preliminary entity) / total. Ties pick the lexicographically
// smallest preliminary entity.
NerCosineBreakdown NerCosineScore(const TermSet& final_terms,
                                  const TermSet& prelim_terms,
                                  const SimilarityFn& similarity = TrigramCosine);
NerCosineBreakdown NerCosineScore(const EntitySet& final_entities,
                                  const EntitySet& prelim_entities,
                                  const SimilarityFn& similarity = TrigramCosine);

enum class ContextValue { kSame, kDifferent };

// Decides whether a shared entity is used in the same context in both texts.
// Must be safe to call concurrently.
using ContextJudge = std::function<ContextValue(
    const std::string& entity, std::string_view final_text,
    std::string_view prelim_text)>;

// Shared entities go to matched/mismatched by `judge` (called once each, up
// to `concurrency` calls at a time); final-only entities are missing and
// preliminary-only entities are surplus.
Classification ClassifyEntities(const EntitySet& final_entities,
                                const EntitySet& prelim_entities,
                                const ContextJudge& judge,
                                std::string_view final_text,
                                std::string_view prelim_text,
                                int concurrency = 1);

// matched / (matched + w_mismatch*mismatched + w_missing*missing +
// w_surplus*surplus). All-zero counts score 1.
double EsasScore(const CategoryCounts& counts, const Weights& weights);
double EsasScore(const Classification& c, const Weights& weights);

enum class Method { kWordForWord, kDirectLlm, kNerCosine, kLlamaEntScore };

std::string_view MethodName(Method m);
// "wfw", "llm", "cosine", "entscore".
std::optional<Method> ParseMethod(std::string_view name);

enum ScoreFlag : unsigned {
  kFlagNone = 0,
  kFlagEmptyFinal = 1u << 0,    // no entities in the final report
  kFlagEmptyReports = 1u << 1,  // no entities on either side
};

struct ScoreResult {
  Method method = Method::kWordForWord;
  std::optional<double> score01;  // absent for kDirectLlm
  double score10 = 0.0;
  std::optional<Classification> classification;
  std::optional<Weights> weights;
  std::optional<std::string> explanation;  // LLM explanation or reasoning
  unsigned flags = kFlagNone;

  static ScoreResult FromUnit(Method method, double score01);
};

struct EntScoreRun {
  ScoreResult result;
  EntitySet final_entities;
  EntitySet prelim_entities;
};

// Produces the narrative explanation for a score in [0, 1].
using Explainer = std::function<std::string(
    double score01, std::string_view final_text, std::string_view prelim_text)>;

struct EntScoreOptions {
  Weights weights;
  SectionSelector section = SectionSelector::kBoth;
  int concurrency = 1;
  const Explainer* explainer = nullptr;  // no explanation when null
};

// Extract both sides, classify, score, and optionally explain. Component
// errors are rethrown with the failing stage in the message.
EntScoreRun LlamaEntScore(const ReportPair& pair, const Extractor& extractor,
                          const ContextJudge& judge,
                          const EntScoreOptions& options);

}  // namespace radcmp

#endif  // RADCMP_SCORING_H_
