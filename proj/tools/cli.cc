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

#include "cli.h"

#include <atomic>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "engine_config.h"
#include "json.hpp"
#include "radcmp/core_model.h"
#include "radcmp/error.h"
#include "radcmp/eval.h"
#include "radcmp/perturb.h"
#include "radcmp/report_output.h"
#include "radcmp/scoring.h"

namespace radcmp::cli {
namespace {

using nlohmann::json;

// Flags shared by every command. Unset flags leave config values alone.
struct CommonFlags {
  std::string config;
  std::string corpus;
  std::string out;
  std::string weights;
  std::string extractor;
  std::string llm;
  std::string llm_model;
  double llm_temperature = 0.0;
  int llm_retries = 0;
  double llm_timeout = 0.0;
  std::string section;
  int concurrency = 0;

  CLI::Option* opt_temperature = nullptr;
  CLI::Option* opt_retries = nullptr;
  CLI::Option* opt_timeout = nullptr;
  CLI::Option* opt_concurrency = nullptr;
};

void AddCommonFlags(CLI::App* cmd, CommonFlags& f, bool corpus_flag = true) {
  cmd->add_option("--config", f.config, "JSON config file");
  if (corpus_flag) {
    cmd->add_option("--corpus", f.corpus, "corpus file (JSON lines)")
        ->required();
  }
  cmd->add_option("--out", f.out, "output file (default: stdout)");
  cmd->add_option("--weights", f.weights,
                  "penalty weights, e.g. missing=2,mismatch=1.5,surplus=1");
  cmd->add_option("--extractor", f.extractor,
                  "lexicon:<path> | external:stdio:<cmd> | "
                  "external:tcp:<host>:<port>");
  cmd->add_option("--llm", f.llm, "mock | http://host:port/prefix");
  cmd->add_option("--llm-model", f.llm_model, "model name for the http backend");
  f.opt_temperature =
      cmd->add_option("--llm-temperature", f.llm_temperature, "temperature");
  f.opt_retries =
      cmd->add_option("--llm-retries", f.llm_retries, "max retries");
  f.opt_timeout =
      cmd->add_option("--llm-timeout", f.llm_timeout, "timeout in seconds");
  cmd->add_option("--section", f.section, "findings | impression | both");
  f.opt_concurrency =
      cmd->add_option("--concurrency", f.concurrency, "parallel requests");
}

EngineConfig ResolveConfig(const CommonFlags& f) {
  EngineConfig c = DefaultEngineConfig();
  if (!f.config.empty()) ApplyConfigFile(c, f.config);
  ApplyLlmEnvironment(c.llm);
  if (!f.extractor.empty()) {
    c.extractor =
        ExtractorSpec::Parse(f.extractor, std::filesystem::current_path());
  }
  if (!f.weights.empty()) c.weights = Weights::Parse(f.weights, c.weights);
  if (!f.llm.empty()) {
    if (f.llm == "mock") {
      c.llm.backend = LlmBackendKind::kMock;
    } else {
      c.llm.backend = LlmBackendKind::kHttp;
      c.llm.base_url = f.llm;
    }
  }
  if (!f.llm_model.empty()) c.llm.model_name = f.llm_model;
  if (f.opt_temperature->count()) c.llm.temperature = f.llm_temperature;
  if (f.opt_retries->count()) c.llm.max_retries = f.llm_retries;
  if (f.opt_timeout->count()) c.llm.timeout_seconds = f.llm_timeout;
  if (!f.section.empty()) {
    auto s = ParseSectionSelector(f.section);
    if (!s) throw InputError("unknown --section " + f.section);
    c.section = *s;
  }
  if (f.opt_concurrency->count()) c.concurrency = f.concurrency;
  c.llm.max_in_flight = std::max(c.llm.max_in_flight, c.concurrency);
  Validate(c);
  return c;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<ReportPair> LoadCorpus(const std::string& path) {
  try {
    return ParseCorpus(ReadFile(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void WriteOutput(const std::string& path, const std::string& content,
                 std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot write " + path);
  f << content;
}

std::vector<const ReportPair*> SelectPairs(const std::vector<ReportPair>& corpus,
                                           const std::string& pair_id) {
  std::vector<const ReportPair*> out;
  if (pair_id.empty()) {
    for (const auto& p : corpus) out.push_back(&p);
    return out;
  }
  const ReportPair* p = FindPair(corpus, pair_id);
  if (p == nullptr) throw InputError("no pair with id \"" + pair_id + "\"");
  out.push_back(p);
  return out;
}

// Everything needed to score pairs with any method.
struct Engine {
  EngineConfig config;
  std::unique_ptr<Extractor> extractor;
  std::optional<LlmGateway> gateway;

  explicit Engine(EngineConfig c) : config(std::move(c)) {}

  const Extractor& GetExtractor() {
    if (!extractor) extractor = MakeExtractor(config);
    return *extractor;
  }
  const LlmGateway& GetGateway() {
    if (!gateway) gateway.emplace(MakeGateway(config));
    return *gateway;
  }
};

EntScoreRun RunEntScore(Engine& engine, const ReportPair& pair, bool explain,
                        int concurrency) {
  const ContextJudge judge = engine.GetGateway().AsJudge();
  const Explainer explainer = engine.GetGateway().AsExplainer();
  EntScoreOptions options;
  options.weights = engine.config.weights;
  options.section = engine.config.section;
  options.concurrency = concurrency;
  options.explainer = explain ? &explainer : nullptr;
  return LlamaEntScore(pair, engine.GetExtractor(), judge, options);
}

ScoreResult ScorePair(Engine& engine, Method method, const ReportPair& pair,
                      bool explain, int concurrency) {
  const SectionSelector section = engine.config.section;
  switch (method) {
    case Method::kWordForWord:
      return ScoreResult::FromUnit(
          method, WordForWord(PairText(pair, Side::kFinal, section),
                              PairText(pair, Side::kPreliminary, section)));
    case Method::kDirectLlm: {
      const DirectScore d = engine.GetGateway().DirectSimilarity(
          PairText(pair, Side::kFinal, section),
          PairText(pair, Side::kPreliminary, section));
      ScoreResult r;
      r.method = method;
      r.score10 = d.score;
      r.explanation = d.reasoning;
      return r;
    }
    case Method::kNerCosine: {
      const Extractor& ex = engine.GetExtractor();
      const auto f = ex.Extract(PairText(pair, Side::kFinal, section));
      const auto p = ex.Extract(PairText(pair, Side::kPreliminary, section));
      const NerCosineBreakdown b = NerCosineScore(f, p);
      ScoreResult r = ScoreResult::FromUnit(method, b.score);
      if (b.empty_final) r.flags |= kFlagEmptyFinal;
      return r;
    }
    case Method::kLlamaEntScore:
      break;
  }
  return RunEntScore(engine, pair, explain, concurrency).result;
}

Method ParseMethodFlag(const std::string& name) {
  auto m = ParseMethod(name);
  if (!m) {
    throw InputError("unknown --method \"" + name +
                     "\" (expected wfw, llm, cosine or entscore)");
  }
  return *m;
}

json EntitiesJson(const EntitySet& es) {
  json list = json::array();
  for (const auto& e : es.entities()) {
    list.push_back({{"text", e.surface},
                    {"normalized", e.normalized},
                    {"start", e.span.start},
                    {"end", e.span.end},
                    {"label", e.label ? json(*e.label) : json(nullptr)}});
  }
  json distinct = json::array();
  for (const auto& d : es.distinct()) distinct.push_back(d);
  return {{"entities", list}, {"distinct", distinct}};
}

int CmdExtract(const CommonFlags& f, const std::string& pair_id,
               const std::string& side, std::ostream& out) {
  Engine engine(ResolveConfig(f));
  const auto corpus = LoadCorpus(f.corpus);
  std::vector<Side> sides;
  if (side == "final" || side == "both") sides.push_back(Side::kFinal);
  if (side == "preliminary" || side == "both") {
    sides.push_back(Side::kPreliminary);
  }
  if (sides.empty()) throw InputError("unknown --side " + side);
  std::string result;
  for (const ReportPair* pair : SelectPairs(corpus, pair_id)) {
    for (Side s : sides) {
      json line = EntitiesJson(engine.GetExtractor().Extract(
          PairText(*pair, s, engine.config.section)));
      line["pair_id"] = pair->id;
      line["side"] = s == Side::kFinal ? "final" : "preliminary";
      result += line.dump() + "\n";
    }
  }
  WriteOutput(f.out, result, out);
  return kExitOk;
}

int CmdCompare(const CommonFlags& f, const std::string& pair_id,
               const std::string& method_name, bool explain,
               std::ostream& out) {
  const Method method = ParseMethodFlag(method_name);
  Engine engine(ResolveConfig(f));
  const auto corpus = LoadCorpus(f.corpus);
  std::string result;
  for (const ReportPair* pair : SelectPairs(corpus, pair_id)) {
    result += ScoreResultJson(
                  ScorePair(engine, method, *pair, explain,
                            engine.config.concurrency),
                  pair->id) +
              "\n";
  }
  WriteOutput(f.out, result, out);
  return kExitOk;
}

std::string SiblingPath(const std::string& out, const std::string& suffix) {
  std::filesystem::path p(out);
  p.replace_extension(suffix);
  return p.string();
}

int CmdEvaluate(const CommonFlags& f, const std::string& method_name,
                std::ostream& out, std::ostream& err) {
  const Method method = ParseMethodFlag(method_name);
  Engine engine(ResolveConfig(f));
  const auto corpus = LoadCorpus(f.corpus);
  if (corpus.empty()) throw InputError("corpus is empty");

  // Build shared components up front so worker threads only read them.
  if (method == Method::kNerCosine || method == Method::kLlamaEntScore) {
    engine.GetExtractor();
  }
  if (method == Method::kDirectLlm || method == Method::kLlamaEntScore) {
    engine.GetGateway();
  }

  struct Row {
    std::optional<ScoreResult> result;
    std::string error;
    bool input_error = false;
  };
  std::vector<Row> rows(corpus.size());
  auto score_one = [&](std::size_t i) {
    try {
      rows[i].result = ScorePair(engine, method, corpus[i], false, 1);
    } catch (const BackendError& e) {
      rows[i].error = e.what();
    } catch (const InputError& e) {
      rows[i].error = e.what();
      rows[i].input_error = true;
    }
  };
  const std::size_t threads = std::min<std::size_t>(
      static_cast<std::size_t>(engine.config.concurrency), corpus.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < corpus.size(); ++i) score_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < corpus.size(); i = next++) {
          score_one(i);
        }
      });
    }
  }

  for (const Row& r : rows) {
    if (r.input_error) throw InputError(r.error);
  }

  const ScoreScale scale =
      method == Method::kDirectLlm ? ScoreScale::kTen : ScoreScale::kUnit;
  std::vector<ScaledScore> preds;
  std::vector<double> truths;
  json pairs = json::array();
  std::size_t failures = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const ReportPair& pair = corpus[i];
    json row = {{"pair_id", pair.id}};
    row["ground_truth"] = pair.ground_truth_score
                              ? json(*pair.ground_truth_score)
                              : json(nullptr);
    if (!rows[i].result) {
      ++failures;
      row["error"] = rows[i].error;
      err << "pair " << pair.id << ": " << rows[i].error << "\n";
      pairs.push_back(row);
      continue;
    }
    const ScoreResult& r = *rows[i].result;
    const double value = scale == ScoreScale::kUnit ? *r.score01 : r.score10;
    row["score01"] = r.score01 ? json(*r.score01) : json(nullptr);
    row["score10"] = r.score10;
    row["predicted_class"] = RoundToClass(value, scale);
    if (pair.ground_truth_score) {
      row["truth_class"] =
          RoundToClass(*pair.ground_truth_score, ScoreScale::kTen);
      preds.push_back({value, scale});
      truths.push_back(*pair.ground_truth_score);
    }
    pairs.push_back(row);
  }

  json summary = {{"method", std::string(MethodName(method))},
                  {"pairs_total", corpus.size()},
                  {"pairs_failed", failures}};
  std::optional<EvalSummary> eval;
  if (!preds.empty()) {
    eval = Evaluate(preds, truths);
    summary["n"] = eval->n;
    summary["accuracy"] = eval->accuracy;
    summary["accuracy_pm1"] = eval->accuracy_pm1;
    summary["precision"] = eval->precision;
    summary["recall"] = eval->recall;
    summary["f1"] = eval->f1;
    summary["confusion"] = eval->confusion;
    summary["histogram"] = {{"predicted", eval->predicted_histogram},
                            {"truth", eval->truth_histogram}};
  } else {
    summary["n"] = 0;
  }
  summary["pairs"] = pairs;
  WriteOutput(f.out, summary.dump(2) + "\n", out);
  if (eval && !f.out.empty()) {
    WriteOutput(SiblingPath(f.out, ".confusion.csv"),
                ConfusionCsv(eval->confusion), out);
    WriteOutput(SiblingPath(f.out, ".histogram.csv"), HistogramCsv(*eval),
                out);
  }

  // Tolerate isolated backend failures; more than 10% fails the run.
  if (failures * 10 > corpus.size()) {
    err << failures << " of " << corpus.size()
        << " pairs failed; results are partial\n";
    return kExitBackendError;
  }
  return kExitOk;
}

// The section the perturbation targets: impression when present.
std::string& TargetSection(std::optional<std::string>& findings,
                           std::optional<std::string>& impression) {
  return impression ? *impression : *findings;
}

int CmdPerturb(const CommonFlags& f, const std::string& in_path,
               const std::string& mode, std::optional<std::size_t> index,
               std::optional<std::uint64_t> seed, bool include_identical,
               std::ostream& out, std::ostream& err) {
  if (mode != "llm" && mode != "rule") {
    throw InputError("unknown --mode " + mode + " (expected llm or rule)");
  }
  Engine engine(ResolveConfig(f));
  const auto corpus = LoadCorpus(in_path);
  std::optional<std::mt19937_64> rng;
  if (!index && seed) rng.emplace(*seed);

  std::vector<ReportPair> produced;
  std::size_t failures = 0;
  for (const ReportPair& pair : corpus) {
    std::optional<std::string> findings = pair.final_report.findings();
    std::optional<std::string> impression = pair.final_report.impression();
    std::string& target = TargetSection(findings, impression);
    try {
      PerturbationRecord rec;
      if (mode == "rule") {
        const EntitySet entities = engine.GetExtractor().Extract(target);
        if (entities.empty()) {
          throw InputError("no entities to negate");
        }
        std::size_t i = index.value_or(0);
        if (rng) {
          i = std::uniform_int_distribution<std::size_t>(
              0, entities.size() - 1)(*rng);
        }
        rec = InjectNegationRule(target, entities, i);
      } else {
        rec = GenerateNegationLlm(engine.GetGateway(), target);
      }
      target = rec.perturbed;
    } catch (const InputError& e) {
      ++failures;
      err << "pair " << pair.id << ": skipped: " << e.what() << "\n";
      continue;
    } catch (const BackendError& e) {
      ++failures;
      err << "pair " << pair.id << ": skipped: " << e.what() << "\n";
      continue;
    }
    if (include_identical) {
      produced.push_back({pair.id + "-ident", pair.modality, pair.final_report,
                          pair.final_report, std::nullopt});
    }
    produced.push_back({pair.id + "-neg", pair.modality,
                        Report::Make(findings, impression), pair.final_report,
                        std::nullopt});
  }
  WriteOutput(f.out, SerializeCorpus(produced), out);
  if (failures * 10 > corpus.size()) {
    err << failures << " of " << corpus.size() << " pairs failed\n";
    return mode == "llm" ? kExitBackendError : kExitInputError;
  }
  return kExitOk;
}

int CmdVisualize(const CommonFlags& f, const std::string& pair_id,
                 bool explain, bool full_report, std::ostream& out) {
  Engine engine(ResolveConfig(f));
  const auto corpus = LoadCorpus(f.corpus);
  const ReportPair* pair = FindPair(corpus, pair_id);
  if (pair == nullptr) throw InputError("no pair with id \"" + pair_id + "\"");
  const EntScoreRun run =
      RunEntScore(engine, *pair, explain, engine.config.concurrency);
  const VisualizationDoc doc =
      RenderEntityHtml(*pair, run.final_entities, run.prelim_entities,
                       *run.result.classification, engine.config.section);
  WriteOutput(f.out,
              full_report || explain ? RenderComparisonReport(run.result, doc)
                                     : doc.html,
              out);
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Semantic comparison of preliminary and final radiology reports",
               "radcmp"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string pair_id;
  std::string method = "entscore";
  std::string side = "both";
  bool explain = false;
  bool full_report = false;
  std::string in_path;
  std::string mode = "rule";
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool include_identical = false;

  CLI::App* extract = app.add_subcommand("extract", "extract entities");
  AddCommonFlags(extract, flags);
  extract->add_option("--pair-id", pair_id, "pair to process (default: all)");
  extract->add_option("--side", side, "final | preliminary | both");

  CommonFlags compare_flags;
  CLI::App* compare = app.add_subcommand("compare", "score report pairs");
  AddCommonFlags(compare, compare_flags);
  compare->add_option("--pair-id", pair_id, "pair to score (default: all)");
  compare->add_option("--method", method, "wfw | llm | cosine | entscore");
  compare->add_flag("--explain", explain, "ask the LLM to explain the score");

  CommonFlags evaluate_flags;
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "score a corpus against ground truth");
  AddCommonFlags(evaluate, evaluate_flags);
  evaluate->add_option("--method", method, "wfw | llm | cosine | entscore");

  CommonFlags perturb_flags;
  CLI::App* perturb =
      app.add_subcommand("perturb", "generate single-negation variants");
  AddCommonFlags(perturb, perturb_flags, /*corpus_flag=*/false);
  perturb->add_option("--in,--corpus", in_path, "input corpus")->required();
  perturb->add_option("--mode", mode, "llm | rule");
  CLI::Option* index_opt =
      perturb->add_option("--index", index, "entity occurrence to negate");
  CLI::Option* seed_opt =
      perturb->add_option("--seed", seed, "pick the entity at random");
  perturb->add_flag("--include-identical", include_identical,
                    "also emit an identical pair per input pair");

  CommonFlags visualize_flags;
  CLI::App* visualize =
      app.add_subcommand("visualize", "render the entity comparison");
  AddCommonFlags(visualize, visualize_flags);
  visualize->add_option("--pair-id", pair_id, "pair to render")->required();
  visualize->add_flag("--explain", explain, "include the LLM explanation");
  visualize->add_flag("--report", full_report,
                      "full comparison report instead of the entity view");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*extract) return CmdExtract(flags, pair_id, side, out);
    if (*compare) return CmdCompare(compare_flags, pair_id, method, explain, out);
    if (*evaluate) return CmdEvaluate(evaluate_flags, method, out, err);
    if (*perturb) {
      return CmdPerturb(
          perturb_flags, in_path, mode,
          index_opt->count() ? std::optional<std::size_t>(index) : std::nullopt,
          seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt,
          include_identical, out, err);
    }
    if (*visualize) {
      return CmdVisualize(visualize_flags, pair_id, explain, full_report, out);
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const BackendError& e) {
    err << "backend error: " << e.what() << "\n";
    return kExitBackendError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace radcmp::cli
