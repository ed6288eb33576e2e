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

#include "radcmp/llm_gateway.h"

#include <cmath>
#include <cstdlib>
#include <regex>

#include "httplib.h"
#include "json.hpp"
#include "radcmp/error.h"
#include "radcmp/perturb.h"
#include "radcmp/text.h"

namespace radcmp {
namespace {

using nlohmann::json;

// Template pieces shared by the prompt builders and the mock's prompt parser.
constexpr std::string_view kContextHead = "Can you say whether the entity: '";
constexpr std::string_view kContextMid =
    "' is used in the same context or different context in these two "
    "texts?\nText1: '";
constexpr std::string_view kContextSep = "'\nText2: '";
constexpr std::string_view kContextTail =
    "'\nPlease reply with a single-word answer: either 'same' or "
    "'different'.";

constexpr std::string_view kDirectHead =
    "Please provide a similarity score out of 10 for these two reports. "
    "Focus on technical content rather than style or phrasing.\n\n"
    "Score: <score>, Reasoning: <reasoning>\n\n"
    "Report 1: ";
constexpr std::string_view kDirectSep = ", Report 2: ";

constexpr std::string_view kExplainHead =
    "These two reports have a similarity score of ";
constexpr std::string_view kExplainMid =
    ". Report 1 is the final report, and Report 2 is the preliminary "
    "report.\nCan you give a reason for the similarity score? Focus on "
    "technical details rather than structure or style.\nReport 1: ";
constexpr std::string_view kExplainSep = "\nReport 2: ";

constexpr std::string_view kNegationHead =
    "Generate a report identical to this one but with one negation change, "
    "e.g., “broken arm” becomes “no broken arm”. "
    "Please only make one change from the original report.\n\n"
    "Report: ";
constexpr std::string_view kNegationTail =
    "\n\nPlease only output the report, no other text.";

constexpr std::string_view kMockReasoning =
    "Mock assessment from the word overlap between Report 1 and Report 2.";

std::string Concat(std::initializer_list<std::string_view> parts) {
  std::string out;
  std::size_t n = 0;
  for (auto p : parts) n += p.size();
  out.reserve(n);
  for (auto p : parts) out += p;
  return out;
}

// Splits `s` = head + a + sep + b + tail. std::nullopt when the shape differs.
std::optional<std::pair<std::string_view, std::string_view>> SplitTemplate(
    std::string_view s, std::string_view head, std::string_view sep,
    std::string_view tail) {
  if (!s.starts_with(head) || !s.ends_with(tail)) return std::nullopt;
  std::string_view body = s.substr(head.size(), s.size() - head.size() -
                                                    tail.size());
  const std::size_t at = body.find(sep);
  if (at == std::string_view::npos) return std::nullopt;
  return std::make_pair(body.substr(0, at), body.substr(at + sep.size()));
}

std::size_t SharedWordTypes(std::string_view a, std::string_view b) {
  TermSet ta;
  TermSet tb;
  for (auto& t : text::WordTokens(a)) ta.insert(t.text);
  for (auto& t : text::WordTokens(b)) tb.insert(t.text);
  std::size_t n = 0;
  for (const auto& w : ta) n += tb.count(w);
  return n;
}

std::size_t FindCaseInsensitive(std::string_view haystack,
                                std::string_view needle, std::size_t from = 0) {
  const std::string h = text::Casefold(haystack);
  const std::string n = text::Casefold(needle);
  return h.find(n, from);
}

std::string Truncate(std::string_view s, std::size_t n = 200) {
  return s.size() <= n ? std::string(s) : std::string(s.substr(0, n)) + "...";
}

}  // namespace

// Counting semaphore with a runtime limit.
class LlmGateway::Slots {
 public:
  explicit Slots(int n) : free_(n) {}
  void Acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [this] { return free_ > 0; });
    --free_;
  }
  void Release() {
    std::lock_guard lock(mu_);
    ++free_;
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int free_;
};

void LlmConfig::Validate() const {
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw InputError("llm temperature must be >= 0");
  }
  if (max_retries < 0) throw InputError("llm max_retries must be >= 0");
  if (!(timeout_seconds > 0.0)) throw InputError("llm timeout must be > 0");
  if (max_in_flight < 1) throw InputError("llm max_in_flight must be >= 1");
  if (backend == LlmBackendKind::kHttp && base_url.empty()) {
    throw InputError("llm base_url is required for the http backend");
  }
}

void ApplyLlmEnvironment(LlmConfig& config) {
  if (const char* url = std::getenv("RADCMP_LLM_BASE_URL"); url && *url) {
    config.base_url = url;
    config.backend = LlmBackendKind::kHttp;
  }
  if (const char* token = std::getenv("RADCMP_LLM_TOKEN"); token && *token) {
    config.api_token = token;
  }
}

namespace prompts {

std::string ContextJudgment(std::string_view entity, std::string_view report1,
                            std::string_view report2) {
  return Concat({kContextHead, entity, kContextMid, report1, kContextSep,
                 report2, kContextTail});
}

std::string DirectSimilarity(std::string_view report1,
                             std::string_view report2) {
  return Concat({kDirectHead, report1, kDirectSep, report2});
}

std::string Explanation(double score, std::string_view report1,
                        std::string_view report2) {
  const std::string s = text::FormatFixed(score, 2);
  return Concat({kExplainHead, s, kExplainMid, report1, kExplainSep, report2});
}

std::string NegationGeneration(std::string_view report) {
  return Concat({kNegationHead, report, kNegationTail});
}

}  // namespace prompts

std::optional<ContextValue> ParseContextReply(std::string_view reply) {
  bool same = false;
  bool different = false;
  for (const auto& t : text::WordTokens(reply)) {
    if (t.text == "same") same = true;
    if (t.text == "different") different = true;
  }
  if (same == different) return std::nullopt;
  return same ? ContextValue::kSame : ContextValue::kDifferent;
}

std::optional<DirectScore> ParseDirectScoreReply(std::string_view reply) {
  constexpr std::string_view kScore = "score:";
  constexpr std::string_view kReasoning = "reasoning:";
  const std::size_t at = FindCaseInsensitive(reply, kScore);
  if (at == std::string::npos) return std::nullopt;

  static const std::regex kNumber(R"([-+]?(\d+(\.\d+)?|\.\d+))");
  const std::string after(reply.substr(at + kScore.size()));
  std::smatch m;
  if (!std::regex_search(after, m, kNumber)) return std::nullopt;
  const double value = std::stod(m.str());
  if (!(value >= 0.0 && value <= 10.0)) {
    throw BackendError("score out of range: " + m.str());
  }
  const std::size_t number_end =
      at + kScore.size() + static_cast<std::size_t>(m.position(0) + m.length(0));

  DirectScore out;
  out.score = value;
  const std::size_t r = FindCaseInsensitive(reply, kReasoning);
  if (r != std::string::npos) {
    const std::size_t start = r + kReasoning.size();
    const std::size_t end = at > r ? at : reply.size();
    out.reasoning = std::string(text::Trim(reply.substr(start, end - start)));
  } else {
    std::string_view before = text::Trim(reply.substr(0, at));
    std::string_view rest = reply.substr(number_end);
    while (!rest.empty() &&
           (text::IsSpace(static_cast<unsigned char>(rest.front())) ||
            rest.front() == ',' || rest.front() == ';' || rest.front() == '.')) {
      rest.remove_prefix(1);
    }
    rest = text::Trim(rest);
    out.reasoning = std::string(before);
    if (!before.empty() && !rest.empty()) out.reasoning += ' ';
    out.reasoning += rest;
  }
  return out;
}

bool MockBackend::NegatedNearEntity(std::string_view report,
                                    std::string_view entity) {
  const auto tokens = text::WordTokens(report);
  const auto target = text::WordTokens(entity);
  if (target.empty() || target.size() > tokens.size()) return false;
  for (std::size_t i = 0; i + target.size() <= tokens.size(); ++i) {
    bool hit = true;
    for (std::size_t k = 0; k < target.size() && hit; ++k) {
      hit = tokens[i + k].text == target[k].text;
    }
    if (!hit) continue;
    // Look back up to 3 tokens, stopping at a sentence boundary.
    for (std::size_t k = i; k > 0 && i - k < 3; --k) {
      const std::string_view gap =
          report.substr(tokens[k - 1].end, tokens[k].start - tokens[k - 1].end);
      if (gap.find_first_of(".!?;\n") != std::string_view::npos) break;
      if (text::IsNegationCue(tokens[k - 1].text)) return true;
    }
  }
  return false;
}

std::string MockBackend::Complete(std::string_view prompt) const {
  if (prompt.starts_with(kContextHead)) {
    auto head = SplitTemplate(prompt, kContextHead, kContextMid, "");
    if (head) {
      auto texts = SplitTemplate(head->second, "", kContextSep, kContextTail);
      if (texts) {
        const bool n1 = NegatedNearEntity(texts->first, head->first);
        const bool n2 = NegatedNearEntity(texts->second, head->first);
        return n1 != n2 ? "different" : "same";
      }
    }
  }
  if (auto r = SplitTemplate(prompt, kDirectHead, kDirectSep, "")) {
    double overlap = 0.0;
    try {
      overlap = WordForWord(r->first, r->second);
    } catch (const InputError&) {
      overlap = 0.0;
    }
    const double score = std::round(100.0 * overlap) / 10.0;
    return "Score: " + text::FormatFixed(score, 1) +
           ", Reasoning: " + std::string(kMockReasoning);
  }
  if (auto head = SplitTemplate(prompt, kExplainHead, kExplainMid, "")) {
    if (auto texts = SplitTemplate(head->second, "", kExplainSep, "")) {
      return "Reports share " +
             std::to_string(SharedWordTypes(texts->first, texts->second)) +
             " matched findings. The similarity score of " +
             std::string(head->first) +
             " reflects how closely Report 2 (preliminary) agrees with "
             "Report 1 (final).";
    }
  }
  if (prompt.starts_with(kNegationHead) && prompt.ends_with(kNegationTail)) {
    std::string_view report = prompt.substr(
        kNegationHead.size(),
        prompt.size() - kNegationHead.size() - kNegationTail.size());
    EntitySet entities;
    if (lexicon_) entities = LexiconExtract(*lexicon_, report);
    if (entities.empty()) {
      const auto words = text::WordTokens(report);
      if (words.empty()) return std::string(report);
      const auto& w = words.front();
      std::string surface(report.substr(w.start, w.end - w.start));
      entities = EntitySet({Entity{surface, w.text, {w.start, w.end}, {}}});
    }
    return InjectNegationRule(report, entities, 0).perturbed;
  }
  return "mock backend: unrecognized prompt";
}

HttpBackend::HttpBackend(const LlmConfig& config) : config_(config) {
  const std::string& url = config_.base_url;
  if (url.starts_with("https://")) {
    throw InputError("https endpoints are not supported; use http://");
  }
  if (!url.starts_with("http://")) {
    throw InputError("llm base_url must start with http://: " + url);
  }
  const std::size_t slash = url.find('/', 7);
  scheme_host_port_ = url.substr(0, slash);
  path_ = slash == std::string::npos ? "" : url.substr(slash);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
}

std::string HttpBackend::Complete(std::string_view prompt) const {
  httplib::Client client(scheme_host_port_);
  const auto secs = static_cast<time_t>(config_.timeout_seconds);
  const auto usecs = static_cast<time_t>(
      (config_.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  httplib::Headers headers;
  if (!config_.api_token.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_token);
  }
  json body = {
      {"model", config_.model_name},
      {"temperature", config_.temperature},
      {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
  };
  auto res = client.Post(path_ + "/chat/completions", headers, body.dump(),
                         "application/json");
  if (!res) {
    throw BackendError("transport error: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw BackendError("HTTP status " + std::to_string(res->status));
  }
  try {
    const json reply = json::parse(res->body);
    const json& choice = reply.at("choices").at(0);
    if (auto msg = choice.find("message"); msg != choice.end()) {
      return msg->at("content").get<std::string>();
    }
    return choice.at("text").get<std::string>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed completion response: ") +
                       e.what());
  }
}

LlmGateway::LlmGateway(LlmConfig config,
                       std::shared_ptr<const ChatBackend> backend)
    : config_(std::move(config)),
      backend_(std::move(backend)),
      slots_(std::make_shared<Slots>(config_.max_in_flight)) {
  config_.Validate();
  if (!backend_) throw InputError("llm gateway needs a backend");
}

LlmGateway LlmGateway::FromConfig(const LlmConfig& config,
                                  std::optional<Lexicon> mock_lexicon) {
  config.Validate();
  std::shared_ptr<const ChatBackend> backend;
  if (config.backend == LlmBackendKind::kHttp) {
    backend = std::make_shared<HttpBackend>(config);
  } else {
    backend = std::make_shared<MockBackend>(std::move(mock_lexicon));
  }
  return LlmGateway(config, std::move(backend));
}

std::string LlmGateway::Chat(std::string_view prompt) const {
  std::string last_error;
  const int attempts = config_.max_retries + 1;
  for (int i = 0; i < attempts; ++i) {
    slots_->Acquire();
    try {
      std::string reply = backend_->Complete(prompt);
      slots_->Release();
      return reply;
    } catch (const BackendError& e) {
      slots_->Release();
      last_error = e.what();
    } catch (...) {
      slots_->Release();
      throw;
    }
  }
  throw BackendError("retries exhausted after " + std::to_string(attempts) +
                     " attempts: " + last_error);
}

ContextJudgment LlmGateway::JudgeEntityContext(
    std::string_view entity, std::string_view final_text,
    std::string_view prelim_text) const {
  const std::string prompt =
      prompts::ContextJudgment(entity, final_text, prelim_text);
  std::string reply;
  const int attempts = config_.max_retries + 1;
  for (int i = 0; i < attempts; ++i) {
    reply = Chat(prompt);
    if (auto v = ParseContextReply(reply)) return {*v, reply};
  }
  throw BackendError("unparseable context reply after " +
                     std::to_string(attempts) + " attempts: \"" +
                     Truncate(reply) + "\"");
}

DirectScore LlmGateway::DirectSimilarity(std::string_view final_text,
                                         std::string_view prelim_text) const {
  if (text::Trim(final_text).empty() || text::Trim(prelim_text).empty()) {
    throw InputError("direct similarity needs two non-empty reports");
  }
  const std::string prompt = prompts::DirectSimilarity(final_text, prelim_text);
  std::string reply;
  const int attempts = config_.max_retries + 1;
  for (int i = 0; i < attempts; ++i) {
    reply = Chat(prompt);
    if (auto s = ParseDirectScoreReply(reply)) return *s;
  }
  throw BackendError("no \"Score:\" in reply after " +
                     std::to_string(attempts) + " attempts: \"" +
                     Truncate(reply) + "\"");
}

std::string LlmGateway::ExplainScore(double score, std::string_view final_text,
                                     std::string_view prelim_text) const {
  if (text::Trim(final_text).empty() || text::Trim(prelim_text).empty()) {
    throw InputError("explanation needs two non-empty reports");
  }
  return Chat(prompts::Explanation(score, final_text, prelim_text));
}

ContextJudge LlmGateway::AsJudge() const {
  return [gw = *this](const std::string& entity, std::string_view final_text,
                      std::string_view prelim_text) {
    return gw.JudgeEntityContext(entity, final_text, prelim_text).value;
  };
}

Explainer LlmGateway::AsExplainer() const {
  return [gw = *this](double score, std::string_view final_text,
                      std::string_view prelim_text) {
    return gw.ExplainScore(score, final_text, prelim_text);
  };
}

}  // namespace radcmp
