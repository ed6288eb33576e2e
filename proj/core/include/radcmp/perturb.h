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

#ifndef RADCMP_PERTURB_H_
#define RADCMP_PERTURB_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "radcmp/extraction.h"

namespace radcmp {

class LlmGateway;

enum class PerturbationKind { kNegationAdded, kNegationRemoved };

std::string_view PerturbationKindName(PerturbationKind k);

struct PerturbationRecord {
  std::string original;
  std::string perturbed;
  // The negation token: in `perturbed` when added, in `original` when removed.
  Span site;
  PerturbationKind kind = PerturbationKind::kNegationAdded;
};

struct ChangeCheck {
  bool ok = false;
  std::string reason;  // empty when ok
  Span site;           // valid when ok; see PerturbationRecord::site
  PerturbationKind kind = PerturbationKind::kNegationAdded;
};

// Token-level comparison (casefolded words; punctuation and spacing ignored).
// Passes only when the texts differ by exactly one inserted or deleted
// negation cue ("no", "not", "without").
ChangeCheck VerifySingleChange(std::string_view original,
                               std::string_view perturbed);

// Toggles a "no" in front of entities.entities()[index]: an immediately
// preceding standalone "no" is removed, otherwise "no " is inserted. At a
// sentence start the inserted token is "No " and the entity's initial
// capital is lowered (and restored on removal). Throws InputError when
// `index` is out of range.
PerturbationRecord InjectNegationRule(std::string_view report,
                                      const EntitySet& entities,
                                      std::size_t index);

// Asks the LLM for a one-negation variant and accepts it only if it passes
// VerifySingleChange, retrying up to max_retries times.
PerturbationRecord GenerateNegationLlm(const LlmGateway& gateway,
                                       std::string_view report);

}  // namespace radcmp

#endif  // RADCMP_PERTURB_H_
