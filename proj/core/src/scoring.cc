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

#include "radcmp/scoring.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <thread>

#include "radcmp/error.h"
#include "radcmp/text.h"

namespace radcmp {
namespace {

// Sorted trigram codes of " " + s + " ", three bytes packed per code.
std::vector<std::uint32_t> Trigrams(std::string_view s) {
  auto at = [&](std::size_t i) -> std::uint32_t {
    return i == 0 || i > s.size() ? ' ' : static_cast<unsigned char>(s[i - 1]);
  };
  std::vector<std::uint32_t> grams;
  grams.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    grams.push_back(at(i) << 16 | at(i + 1) << 8 | at(i + 2));
  }
  std::sort(grams.begin(), grams.end());
  return grams;
}

// Sum of squared run lengths of a sorted sequence.
std::int64_t SquaredNorm(const std::vector<std::uint32_t>& g) {
  std::int64_t n = 0;
  for (std::size_t i = 0; i < g.size();) {
    std::size_t j = i;
    while (j < g.size() && g[j] == g[i]) ++j;
    n += static_cast<std::int64_t>((j - i) * (j - i));
    i = j;
  }
  return n;
}

double ParseWeightValue(std::string_view key, std::string_view value) {
  double v = 0.0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw InputError("weight " + std::string(key) + ": not a number: \"" +
                     std::string(value) + "\"");
  }
  return v;
}

template <typename E>
std::exception_ptr Annotated(const std::string& prefix, const E& e) {
  return std::make_exception_ptr(E(prefix + e.what()));
}

}  // namespace

void Weights::Validate() const {
  auto check = [](double w, const char* name) {
    if (!std::isfinite(w) || w <= 0.0) {
      throw InputError(std::string("weight ") + name + " must be > 0");
    }
  };
  check(mismatch, "mismatch");
  check(missing, "missing");
  check(surplus, "surplus");
}

Weights Weights::Parse(std::string_view spec, const Weights& base) {
  Weights w = base;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    std::size_t comma = spec.find(',', pos);
    if (comma == std::string_view::npos) comma = spec.size();
    std::string_view item = text::Trim(spec.substr(pos, comma - pos));
    pos = comma + 1;
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("weights: expected key=value, got \"" +
                       std::string(item) + "\"");
    }
    const std::string_view key = text::Trim(item.substr(0, eq));
    const std::string_view value = text::Trim(item.substr(eq + 1));
    if (key == "missing") {
      w.missing = ParseWeightValue(key, value);
    } else if (key == "mismatch") {
      w.mismatch = ParseWeightValue(key, value);
    } else if (key == "surplus") {
      w.surplus = ParseWeightValue(key, value);
    } else {
      throw InputError("weights: unknown key \"" + std::string(key) + "\"");
    }
  }
  w.Validate();
  return w;
}

std::string Weights::ToString() const {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "missing=%g,mismatch=%g,surplus=%g", missing,
                mismatch, surplus);
  return buf;
}

CategoryCounts Counts(const Classification& c) {
  return {c.matched.size(), c.mismatched.size(), c.missing.size(),
          c.surplus.size()};
}

double TrigramCosine(std::string_view a, std::string_view b) {
  if (a == b) return 1.0;
  const auto ta = Trigrams(a);
  const auto tb = Trigrams(b);
  const std::int64_t na = SquaredNorm(ta);
  const std::int64_t nb = SquaredNorm(tb);
  std::int64_t dot = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ta.size() && j < tb.size()) {
    if (ta[i] < tb[j]) {
      ++i;
    } else if (tb[j] < ta[i]) {
      ++j;
    } else {
      std::size_t ri = i;
      std::size_t rj = j;
      while (ri < ta.size() && ta[ri] == ta[i]) ++ri;
      while (rj < tb.size() && tb[rj] == tb[j]) ++rj;
      dot += static_cast<std::int64_t>((ri - i) * (rj - j));
      i = ri;
      j = rj;
    }
  }
  if (dot == 0 || na == 0 || nb == 0) return 0.0;
  const double cos = static_cast<double>(dot) /
                     std::sqrt(static_cast<double>(na) * static_cast<double>(nb));
  // Distinct strings never report a perfect match.
  return std::min(cos, std::nextafter(1.0, 0.0));
}

SimilarityFn EmbeddingCosine(
    std::function<std::vector<double>(std::string_view)> embed) {
  return [embed = std::move(embed)](std::string_view a, std::string_view b) {
    if (a == b) return 1.0;
    const auto va = embed(a);
    const auto vb = embed(b);
    if (va.size() != vb.size() || va.empty()) {
      throw BackendError("embedding dimension mismatch");
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) {
      dot += va[i] * vb[i];
      na += va[i] * va[i];
      nb += vb[i] * vb[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
  };
}

double WordForWord(std::string_view final_text, std::string_view prelim_text) {
  TermSet final_types;
  for (auto& t : text::WordTokens(final_text)) final_types.insert(t.text);
  if (final_types.empty()) {
    throw InputError("word-for-word: final text has no words");
  }
  TermSet prelim_types;
  for (auto& t : text::WordTokens(prelim_text)) prelim_types.insert(t.text);
  std::size_t shared = 0;
  for (const auto& w : final_types) shared += prelim_types.count(w);
  return static_cast<double>(shared) / static_cast<double>(final_types.size());
}

NerCosineBreakdown NerCosineScore(const TermSet& final_terms,
                                  const TermSet& prelim_terms,
                                  const SimilarityFn& similarity) {
  NerCosineBreakdown out;
  out.total = final_terms.size();
  if (out.total == 0) {
    out.empty_final = true;
    out.score = 1.0;
    return out;
  }
  std::vector<std::string_view> unmatched_prelim;
  for (const auto& p : prelim_terms) {
    if (!final_terms.count(p)) unmatched_prelim.push_back(p);
  }
  double total = 0.0;
  for (const auto& f : final_terms) {
    if (prelim_terms.count(f)) ++out.matched;
  }
  total = static_cast<double>(out.matched);
  for (const auto& f : final_terms) {
    if (prelim_terms.count(f)) continue;
    BestMatch best;
    std::optional<std::string_view> partner;
    for (auto p : unmatched_prelim) {
      const double s = similarity(f, p);
      if (!partner || s > best.similarity) {
        partner = p;
        best.similarity = s;
      }
    }
    if (partner) best.partner = std::string(*partner);
    total += best.similarity;
    out.per_entity_best.emplace(f, std::move(best));
  }
  out.score = total / static_cast<double>(out.total);
  return out;
}

NerCosineBreakdown NerCosineScore(const EntitySet& final_entities,
                                  const EntitySet& prelim_entities,
                                  const SimilarityFn& similarity) {
  return NerCosineScore(final_entities.distinct(), prelim_entities.distinct(),
                        similarity);
}

Classification ClassifyEntities(const EntitySet& final_entities,
                                const EntitySet& prelim_entities,
                                const ContextJudge& judge,
                                std::string_view final_text,
                                std::string_view prelim_text,
                                int concurrency) {
  const TermSet& fin = final_entities.distinct();
  const TermSet& pre = prelim_entities.distinct();
  Classification out;
  std::vector<std::string> shared;
  for (const auto& e : fin) {
    if (pre.count(e)) {
      shared.push_back(e);
    } else {
      out.missing.insert(e);
    }
  }
  for (const auto& e : pre) {
    if (!fin.count(e)) out.surplus.insert(e);
  }

  std::vector<std::optional<ContextValue>> verdicts(shared.size());
  std::vector<std::exception_ptr> errors(shared.size());
  auto judge_one = [&](std::size_t i) {
    const std::string prefix = "entity \"" + shared[i] + "\": ";
    try {
      verdicts[i] = judge(shared[i], final_text, prelim_text);
    } catch (const InputError& e) {
      errors[i] = Annotated(prefix, e);
    } catch (const BackendError& e) {
      errors[i] = Annotated(prefix, e);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const std::size_t threads = std::min<std::size_t>(
      static_cast<std::size_t>(std::max(concurrency, 1)), shared.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < shared.size(); ++i) judge_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < shared.size(); i = next++) {
          judge_one(i);
        }
      });
    }
  }

  // The lowest-index failure wins so errors do not depend on timing.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (std::size_t i = 0; i < shared.size(); ++i) {
    (*verdicts[i] == ContextValue::kSame ? out.matched : out.mismatched)
        .insert(shared[i]);
  }
  return out;
}

double EsasScore(const CategoryCounts& counts, const Weights& weights) {
  weights.Validate();
  if (counts.matched + counts.mismatched + counts.missing + counts.surplus ==
      0) {
    return 1.0;
  }
  if (counts.matched == 0) return 0.0;
  const double m = static_cast<double>(counts.matched);
  const double penalty =
      weights.mismatch * static_cast<double>(counts.mismatched) +
      weights.missing * static_cast<double>(counts.missing) +
      weights.surplus * static_cast<double>(counts.surplus);
  return m / (m + penalty);
}

double EsasScore(const Classification& c, const Weights& weights) {
  return EsasScore(Counts(c), weights);
}

std::string_view MethodName(Method m) {
  switch (m) {
    case Method::kWordForWord:
      return "wfw";
    case Method::kDirectLlm:
      return "llm";
    case Method::kNerCosine:
      return "cosine";
    case Method::kLlamaEntScore:
      break;
  }
  return "entscore";
}

std::optional<Method> ParseMethod(std::string_view name) {
  for (Method m : {Method::kWordForWord, Method::kDirectLlm, Method::kNerCosine,
                   Method::kLlamaEntScore}) {
    if (MethodName(m) == name) return m;
  }
  return std::nullopt;
}

ScoreResult ScoreResult::FromUnit(Method method, double score01) {
  ScoreResult r;
  r.method = method;
  r.score01 = score01;
  r.score10 = 10.0 * score01;
  return r;
}

EntScoreRun LlamaEntScore(const ReportPair& pair, const Extractor& extractor,
                          const ContextJudge& judge,
                          const EntScoreOptions& options) {
  options.weights.Validate();
  const std::string final_text =
      PairText(pair, Side::kFinal, options.section);
  const std::string prelim_text =
      PairText(pair, Side::kPreliminary, options.section);

  auto stage = [&pair](const char* name, auto&& fn) {
    try {
      return fn();
    } catch (const InputError& e) {
      throw InputError("pair " + pair.id + ", " + name + ": " + e.what());
    } catch (const BackendError& e) {
      throw BackendError("pair " + pair.id + ", " + name + ": " + e.what());
    }
  };

  EntScoreRun run;
  run.final_entities =
      stage("extraction (final)", [&] { return extractor.Extract(final_text); });
  run.prelim_entities = stage("extraction (preliminary)", [&] {
    return extractor.Extract(prelim_text);
  });
  Classification cls = stage("classification", [&] {
    return ClassifyEntities(run.final_entities, run.prelim_entities, judge,
                            final_text, prelim_text, options.concurrency);
  });

  const double score = EsasScore(cls, options.weights);
  run.result = ScoreResult::FromUnit(Method::kLlamaEntScore, score);
  const CategoryCounts n = Counts(cls);
  if (n.matched + n.mismatched + n.missing + n.surplus == 0) {
    run.result.flags |= kFlagEmptyReports;
  }
  if (run.final_entities.empty()) run.result.flags |= kFlagEmptyFinal;
  run.result.classification = std::move(cls);
  run.result.weights = options.weights;
  if (options.explainer != nullptr) {
    run.result.explanation = stage("explanation", [&] {
      return (*options.explainer)(score, final_text, prelim_text);
    });
  }
  return run;
}

}  // namespace radcmp
