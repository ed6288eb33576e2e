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

#ifndef RADCMP_LLM_GATEWAY_H_
#define RADCMP_LLM_GATEWAY_H_

#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "radcmp/extraction.h"
#include "radcmp/scoring.h"

namespace radcmp {

enum class LlmBackendKind { kHttp, kMock };

struct LlmConfig {
  LlmBackendKind backend = LlmBackendKind::kMock;
  std::string base_url;  // e.g. "http://localhost:8000/v1"; Http only
  std::string model_name = "llama-3.1-8b-instruct";
  double temperature = 0.0;
  int max_retries = 3;
  double timeout_seconds = 120.0;
  std::string api_token;  // optional bearer token
  int max_in_flight = 4;

  // Throws InputError on a negative temperature/retry count, a non-positive
  // timeout or in-flight limit, or an Http backend without a base URL.
  void Validate() const;
};

// Applies RADCMP_LLM_BASE_URL (which also selects the Http backend) and
// RADCMP_LLM_TOKEN when they are set and non-empty.
void ApplyLlmEnvironment(LlmConfig& config);

struct ContextJudgment {
  ContextValue value = ContextValue::kSame;
  std::string raw_reply;
};

struct DirectScore {
  double score = 0.0;  // [0, 10]
  std::string reasoning;
};

// Prompt builders. Report 1 is always the final report and Report 2 the
// preliminary report.
namespace prompts {
std::string ContextJudgment(std::string_view entity, std::string_view report1,
                            std::string_view report2);
std::string DirectSimilarity(std::string_view report1, std::string_view report2);
// `score` is rendered with two decimals.
std::string Explanation(double score, std::string_view report1,
                        std::string_view report2);
std::string NegationGeneration(std::string_view report);
}  // namespace prompts

// Looks for standalone "same"/"different" tokens, ignoring case and
// punctuation. std::nullopt when neither or both appear.
std::optional<ContextValue> ParseContextReply(std::string_view reply);

// Finds "Score:" and the first decimal number after it; the reasoning is the
// text after "Reasoning:" (up to a following "Score:"), or, without that
// marker, whatever surrounds the score. std::nullopt when there is no
// "Score:" marker or no number after it. Throws BackendError("score out of
// range") for numbers outside [0, 10].
std::optional<DirectScore> ParseDirectScoreReply(std::string_view reply);

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  // One completion for a single user message. Throws BackendError on
  // transport failure.
  virtual std::string Complete(std::string_view prompt) const = 0;
};

// Deterministic stand-in that recognises the four prompt templates and
// answers each by a fixed rule:
//   context judgment  "different" iff exactly one report has a negation cue
//                     within the 3 tokens before an occurrence of the entity
//   direct score      10 x word overlap, one decimal
//   explanation       fixed template with the score
//   negation          the rule-based injector (first lexicon hit, else first
//                     word)
class MockBackend : public ChatBackend {
 public:
  explicit MockBackend(std::optional<Lexicon> lexicon = std::nullopt)
      : lexicon_(std::move(lexicon)) {}
  std::string Complete(std::string_view prompt) const override;

  static bool NegatedNearEntity(std::string_view report,
                                std::string_view entity);

 private:
  std::optional<Lexicon> lexicon_;
};

// Chat-completion endpoint: POST {base_url}/chat/completions with a single
// user message; the reply is choices[0].message.content (or .text).
class HttpBackend : public ChatBackend {
 public:
  explicit HttpBackend(const LlmConfig& config);
  std::string Complete(std::string_view prompt) const override;

 private:
  LlmConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

class LlmGateway {
 public:
  LlmGateway(LlmConfig config, std::shared_ptr<const ChatBackend> backend);

  // Builds the backend named by `config.backend`. The lexicon feeds the mock
  // negation generator only.
  static LlmGateway FromConfig(const LlmConfig& config,
                               std::optional<Lexicon> mock_lexicon = {});

  // Retries transport failures up to max_retries times, then throws
  // BackendError("retries exhausted: ...").
  std::string Chat(std::string_view prompt) const;

  ContextJudgment JudgeEntityContext(std::string_view entity,
                                     std::string_view final_text,
                                     std::string_view prelim_text) const;
  DirectScore DirectSimilarity(std::string_view final_text,
                               std::string_view prelim_text) const;
  std::string ExplainScore(double score, std::string_view final_text,
                           std::string_view prelim_text) const;

  const LlmConfig& config() const { return config_; }

  ContextJudge AsJudge() const;
  Explainer AsExplainer() const;

 private:
  class Slots;

  LlmConfig config_;
  std::shared_ptr<const ChatBackend> backend_;
  std::shared_ptr<Slots> slots_;
};

}  // namespace radcmp

#endif  // RADCMP_LLM_GATEWAY_H_
