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

#include "engine_config.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "radcmp/error.h"
#include "radcmp/text.h"
#include "radcmp/worker.h"

#ifndef RADCMP_DEFAULT_LEXICON
#define RADCMP_DEFAULT_LEXICON "radiology_lexicon.txt"
#endif

namespace radcmp::cli {
namespace {

using nlohmann::json;

std::vector<std::string> SplitWords(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

template <typename T>
T Get(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw InputError("config key " + key + " has the wrong type");
  }
}

}  // namespace

ExtractorSpec ExtractorSpec::Parse(std::string_view spec,
                                   const std::filesystem::path& base_dir) {
  ExtractorSpec out;
  if (spec.starts_with("lexicon:")) {
    std::filesystem::path p(std::string(spec.substr(8)));
    if (p.empty()) throw InputError("extractor: lexicon path is empty");
    out.kind = Kind::kLexicon;
    out.lexicon_path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    return out;
  }
  if (spec.starts_with("external:stdio:")) {
    out.kind = Kind::kStdio;
    out.command = SplitWords(spec.substr(15));
    if (out.command.empty()) throw InputError("extractor: empty command");
    return out;
  }
  if (spec.starts_with("external:tcp:")) {
    std::string_view rest = spec.substr(13);
    const std::size_t colon = rest.rfind(':');
    if (colon == std::string_view::npos || colon == 0) {
      throw InputError("extractor: expected external:tcp:<host>:<port>");
    }
    out.kind = Kind::kTcp;
    out.host = std::string(rest.substr(0, colon));
    std::string_view port = rest.substr(colon + 1);
    unsigned value = 0;
    auto [ptr, ec] =
        std::from_chars(port.data(), port.data() + port.size(), value);
    if (ec != std::errc() || ptr != port.data() + port.size() || value == 0 ||
        value > 65535) {
      throw InputError("extractor: bad port \"" + std::string(port) + "\"");
    }
    out.port = static_cast<std::uint16_t>(value);
    return out;
  }
  throw InputError("extractor: unknown spec \"" + std::string(spec) + "\"");
}

EngineConfig DefaultEngineConfig() {
  EngineConfig c;
  c.extractor.kind = ExtractorSpec::Kind::kLexicon;
  c.extractor.lexicon_path = RADCMP_DEFAULT_LEXICON;
  return c;
}

void ApplyConfigJson(EngineConfig& config, std::string_view json_text,
                     const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw InputError("config must be a JSON object");

  for (auto& [key, value] : root.items()) {
    if (key == "extractor") {
      config.extractor =
          ExtractorSpec::Parse(Get<std::string>(value, key), base_dir);
    } else if (key == "weights") {
      if (value.is_string()) {
        config.weights =
            Weights::Parse(value.get<std::string>(), config.weights);
      } else if (value.is_object()) {
        for (auto& [wk, wv] : value.items()) {
          const double w = Get<double>(wv, "weights." + wk);
          if (wk == "missing") {
            config.weights.missing = w;
          } else if (wk == "mismatch") {
            config.weights.mismatch = w;
          } else if (wk == "surplus") {
            config.weights.surplus = w;
          } else {
            throw InputError("unknown config key weights." + wk);
          }
        }
      } else {
        throw InputError("config key weights has the wrong type");
      }
    } else if (key == "section") {
      auto s = ParseSectionSelector(Get<std::string>(value, key));
      if (!s) throw InputError("config key section has an unknown value");
      config.section = *s;
    } else if (key == "concurrency") {
      config.concurrency = Get<int>(value, key);
    } else if (key == "worker_timeout_ms") {
      config.worker_timeout_ms = Get<int>(value, key);
    } else if (key == "llm") {
      if (!value.is_object()) throw InputError("config key llm must be an object");
      for (auto& [lk, lv] : value.items()) {
        const std::string name = "llm." + lk;
        if (lk == "backend") {
          const std::string b = text::Casefold(Get<std::string>(lv, name));
          if (b == "mock") {
            config.llm.backend = LlmBackendKind::kMock;
          } else if (b == "http") {
            config.llm.backend = LlmBackendKind::kHttp;
          } else {
            throw InputError("config key llm.backend must be mock or http");
          }
        } else if (lk == "base_url") {
          config.llm.base_url = Get<std::string>(lv, name);
        } else if (lk == "model") {
          config.llm.model_name = Get<std::string>(lv, name);
        } else if (lk == "temperature") {
          config.llm.temperature = Get<double>(lv, name);
        } else if (lk == "max_retries") {
          config.llm.max_retries = Get<int>(lv, name);
        } else if (lk == "timeout") {
          config.llm.timeout_seconds = Get<double>(lv, name);
        } else if (lk == "max_in_flight") {
          config.llm.max_in_flight = Get<int>(lv, name);
        } else if (lk == "token") {
          config.llm.api_token = Get<std::string>(lv, name);
        } else {
          throw InputError("unknown config key " + name);
        }
      }
    } else {
      throw InputError("unknown config key " + key);
    }
  }
}

void ApplyConfigFile(EngineConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    ApplyConfigJson(config, ss.str(), path.parent_path());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void Validate(const EngineConfig& config) {
  if (config.concurrency < 1) throw InputError("concurrency must be >= 1");
  if (config.worker_timeout_ms < 1) {
    throw InputError("worker_timeout_ms must be >= 1");
  }
  config.weights.Validate();
  config.llm.Validate();
  if (config.extractor.kind == ExtractorSpec::Kind::kLexicon &&
      !std::filesystem::is_regular_file(config.extractor.lexicon_path)) {
    throw InputError("lexicon not found: " +
                     config.extractor.lexicon_path.string());
  }
}

std::unique_ptr<Extractor> MakeExtractor(const EngineConfig& config) {
  const ExtractorSpec& spec = config.extractor;
  const auto timeout = std::chrono::milliseconds(config.worker_timeout_ms);
  switch (spec.kind) {
    case ExtractorSpec::Kind::kLexicon:
      return std::make_unique<LexiconExtractor>(
          LoadLexicon(spec.lexicon_path.string()));
    case ExtractorSpec::Kind::kStdio:
      return std::make_unique<ExternalExtractor>(
          [spec, timeout] {
            return std::make_unique<NerWorker>(SpawnProcessChannel(spec.command),
                                               timeout);
          },
          config.concurrency);
    case ExtractorSpec::Kind::kTcp:
      break;
  }
  return std::make_unique<ExternalExtractor>(
      [spec, timeout] {
        return std::make_unique<NerWorker>(
            ConnectTcpChannel(spec.host, spec.port), timeout);
      },
      config.concurrency);
}

LlmGateway MakeGateway(const EngineConfig& config) {
  std::optional<Lexicon> lexicon;
  if (config.llm.backend == LlmBackendKind::kMock &&
      config.extractor.kind == ExtractorSpec::Kind::kLexicon) {
    lexicon = LoadLexicon(config.extractor.lexicon_path.string());
  }
  return LlmGateway::FromConfig(config.llm, std::move(lexicon));
}

}  // namespace radcmp::cli
