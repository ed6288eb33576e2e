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

#include "radcmp/perturb.h"

#include "radcmp/error.h"
#include "radcmp/llm_gateway.h"
#include "radcmp/text.h"

namespace radcmp {
namespace {

bool IsUpper(char c) { return c >= 'A' && c <= 'Z'; }
bool IsLower(char c) { return c >= 'a' && c <= 'z'; }

// True when only whitespace separates `pos` from the start of the text, a
// sentence terminator, or a line break.
bool AtSentenceStart(std::string_view s, std::size_t pos) {
  std::size_t j = pos;
  while (j > 0 && text::IsSpace(static_cast<unsigned char>(s[j - 1]))) {
    if (s[j - 1] == '\n') return true;
    --j;
  }
  if (j == 0) return true;
  const char c = s[j - 1];
  return c == '.' || c == '!' || c == '?';
}

}  // namespace

std::string_view PerturbationKindName(PerturbationKind k) {
  return k == PerturbationKind::kNegationAdded ? "negation_added"
                                               : "negation_removed";
}

ChangeCheck VerifySingleChange(std::string_view original,
                               std::string_view perturbed) {
  const auto a = text::WordTokens(original);
  const auto b = text::WordTokens(perturbed);
  ChangeCheck out;
  if (a.size() == b.size()) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].text != b[i].text) {
        out.reason = "extra edit";
        return out;
      }
    }
    out.reason = "no change";
    return out;
  }
  const bool added = b.size() > a.size();
  const auto& longer = added ? b : a;
  const auto& shorter = added ? a : b;
  if (longer.size() - shorter.size() >= 2) {
    out.reason = "multiple changes";
    return out;
  }
  std::size_t i = 0;
  while (i < shorter.size() && longer[i].text == shorter[i].text) ++i;
  for (std::size_t k = i; k < shorter.size(); ++k) {
    if (longer[k + 1].text != shorter[k].text) {
      out.reason = "extra edit";
      return out;
    }
  }
  if (!text::IsNegationCue(longer[i].text)) {
    out.reason = "non-negation edit";
    return out;
  }
  out.ok = true;
  out.site = {longer[i].start, longer[i].end};
  out.kind = added ? PerturbationKind::kNegationAdded
                   : PerturbationKind::kNegationRemoved;
  return out;
}

PerturbationRecord InjectNegationRule(std::string_view report,
                                      const EntitySet& entities,
                                      std::size_t index) {
  if (index >= entities.size()) {
    throw InputError("negation index " + std::to_string(index) +
                     " out of range (" + std::to_string(entities.size()) +
                     " entities)");
  }
  const Entity& e = entities.entities()[index];
  if (e.span.start >= e.span.end || e.span.end > report.size()) {
    throw InputError("entity span outside report");
  }
  const std::size_t start = e.span.start;

  std::size_t j = start;
  while (j > 0 && text::IsSpace(static_cast<unsigned char>(report[j - 1]))) --j;
  std::size_t k = j;
  while (k > 0 && text::IsWordByte(static_cast<unsigned char>(report[k - 1]))) {
    --k;
  }

  PerturbationRecord rec;
  rec.original = std::string(report);
  if (j < start && text::Casefold(report.substr(k, j - k)) == "no") {
    std::string entity_head(report.substr(start));
    if (IsUpper(report[k]) && IsLower(entity_head[0])) {
      entity_head[0] = static_cast<char>(entity_head[0] - 'a' + 'A');
    }
    rec.perturbed = std::string(report.substr(0, k)) + entity_head;
    rec.site = {k, k + 2};
    rec.kind = PerturbationKind::kNegationRemoved;
    return rec;
  }

  std::string entity_head(report.substr(start));
  std::string cue = "no ";
  if (AtSentenceStart(report, start)) {
    cue = "No ";
    const bool acronym = entity_head.size() > 1 && IsUpper(entity_head[1]);
    if (IsUpper(entity_head[0]) && !acronym) {
      entity_head[0] = static_cast<char>(entity_head[0] - 'A' + 'a');
    }
  }
  rec.perturbed = std::string(report.substr(0, start)) + cue + entity_head;
  rec.site = {start, start + 2};
  rec.kind = PerturbationKind::kNegationAdded;
  return rec;
}

PerturbationRecord GenerateNegationLlm(const LlmGateway& gateway,
                                       std::string_view report) {
  if (text::Trim(report).empty()) {
    throw InputError("negation generation needs a non-empty report");
  }
  const std::string prompt = prompts::NegationGeneration(report);
  std::string reason;
  const int attempts = gateway.config().max_retries + 1;
  for (int i = 0; i < attempts; ++i) {
    std::string reply(text::Trim(gateway.Chat(prompt)));
    ChangeCheck check = VerifySingleChange(report, reply);
    if (check.ok) {
      return {std::string(report), std::move(reply), check.site, check.kind};
    }
    reason = check.reason;
  }
  throw BackendError("negation generation failed after " +
                     std::to_string(attempts) + " attempts: " + reason);
}

}  // namespace radcmp
