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

#ifndef RADCMP_TOOLS_ENGINE_CONFIG_H_
#define RADCMP_TOOLS_ENGINE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "radcmp/core_model.h"
#include "radcmp/extraction.h"
#include "radcmp/llm_gateway.h"
#include "radcmp/scoring.h"

namespace radcmp::cli {

// "lexicon:<path>", "external:stdio:<command line>" or
// "external:tcp:<host>:<port>".
struct ExtractorSpec {
  enum class Kind { kLexicon, kStdio, kTcp };
  Kind kind = Kind::kLexicon;
  std::filesystem::path lexicon_path;
  std::vector<std::string> command;
  std::string host;
  std::uint16_t port = 0;

  // Relative lexicon paths resolve against `base_dir`.
  static ExtractorSpec Parse(std::string_view spec,
                             const std::filesystem::path& base_dir = {});
};

struct EngineConfig {
  ExtractorSpec extractor;
  LlmConfig llm;
  Weights weights;
  SectionSelector section = SectionSelector::kBoth;
  int concurrency = 1;
  int worker_timeout_ms = 30000;
};

// Built-in defaults: bundled lexicon, mock LLM, default weights.
EngineConfig DefaultEngineConfig();

// Overlays the keys present in a JSON config file. Unknown keys are errors.
void ApplyConfigFile(EngineConfig& config, const std::filesystem::path& path);
void ApplyConfigJson(EngineConfig& config, std::string_view json_text,
                     const std::filesystem::path& base_dir);

// Referenced files exist, concurrency >= 1, weights and LLM settings valid.
void Validate(const EngineConfig& config);

std::unique_ptr<Extractor> MakeExtractor(const EngineConfig& config);

// The mock backend is given the lexicon when one is configured.
LlmGateway MakeGateway(const EngineConfig& config);

}  // namespace radcmp::cli

#endif  // RADCMP_TOOLS_ENGINE_CONFIG_H_
