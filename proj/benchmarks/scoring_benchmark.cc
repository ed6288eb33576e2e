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
// Micro-benchmarks for extraction, similarity and the scoring pipeline.

#include <benchmark/benchmark.h>

#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "radcmp/core_model.h"
#include "radcmp/extraction.h"
#include "radcmp/llm_gateway.h"
#include "radcmp/scoring.h"

namespace radcmp {
namespace {

const Lexicon& BenchLexicon() {
  static const Lexicon lexicon =
      LoadLexicon(RADCMP_BENCH_DATA_DIR "/radiology_lexicon.txt");
  return lexicon;
}

const std::vector<ReportPair>& BenchCorpus() {
  static const std::vector<ReportPair> corpus = [] {
    std::ifstream in(RADCMP_BENCH_DATA_DIR "/synthetic_corpus.jsonl");
    std::stringstream ss;
    ss << in.rdbuf();
    return ParseCorpus(ss.str());
  }();
  return corpus;
}

// Concatenation of every final report in the corpus, repeated n times.
std::string CorpusText(int n) {
  std::string text;
  for (int i = 0; i < n; ++i) {
    for (const auto& pair : BenchCorpus()) {
      text += PairText(pair, Side::kFinal) + "\n";
    }
  }
  return text;
}

void BM_LexiconExtract(benchmark::State& state) {
  const std::string text = CorpusText(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(LexiconExtract(BenchLexicon(), text));
  }
  state.SetBytesProcessed(state.iterations() *
                          static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_LexiconExtract)->Arg(1)->Arg(8)->Arg(64);

void BM_TrigramCosine(benchmark::State& state) {
  const std::string a(static_cast<std::size_t>(state.range(0)), 'x');
  std::string b = "spinal canal stenosis with nerve root compression";
  b.resize(static_cast<std::size_t>(state.range(0)), 'y');
  for (auto _ : state) {
    benchmark::DoNotOptimize(TrigramCosine(a, b));
  }
}
BENCHMARK(BM_TrigramCosine)->Arg(8)->Arg(32)->Arg(128);

void BM_NerCosine(benchmark::State& state) {
  const auto& pair = BenchCorpus()[6];
  const TermSet fin =
      LexiconExtract(BenchLexicon(), PairText(pair, Side::kFinal)).distinct();
  const TermSet pre =
      LexiconExtract(BenchLexicon(), PairText(pair, Side::kPreliminary))
          .distinct();
  for (auto _ : state) {
    benchmark::DoNotOptimize(NerCosineScore(fin, pre));
  }
}
BENCHMARK(BM_NerCosine);

void BM_Esas(benchmark::State& state) {
  Classification cls;
  for (int i = 0; i < state.range(0); ++i) {
    cls.matched.insert("m" + std::to_string(i));
    cls.mismatched.insert("x" + std::to_string(i));
    cls.missing.insert("i" + std::to_string(i));
    cls.surplus.insert("s" + std::to_string(i));
  }
  const Weights weights;
  for (auto _ : state) {
    benchmark::DoNotOptimize(EsasScore(cls, weights));
  }
}
BENCHMARK(BM_Esas)->Arg(4)->Arg(64);

void BM_MockPipeline(benchmark::State& state) {
  const LlmGateway gateway(LlmConfig{},
                           std::make_shared<MockBackend>(BenchLexicon()));
  const LexiconExtractor extractor(BenchLexicon());
  EntScoreOptions options;
  options.concurrency = static_cast<int>(state.range(0));
  for (auto _ : state) {
    for (const auto& pair : BenchCorpus()) {
      benchmark::DoNotOptimize(
          LlamaEntScore(pair, extractor, gateway.AsJudge(), options));
    }
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(BenchCorpus().size()));
}
BENCHMARK(BM_MockPipeline)->Arg(1)->Arg(4)->UseRealTime();

}  // namespace
}  // namespace radcmp

BENCHMARK_MAIN();
