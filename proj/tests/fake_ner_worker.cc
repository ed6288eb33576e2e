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

// Stand-in NER worker for tests. Speaks the line protocol on stdin/stdout and
// tags terms from a lexicon file. Flags select deliberate misbehaviour.
//
//   fake_ner_worker --lexicon PATH [--protocol N] [--no-handshake]
//                   [--bad-span] [--error] [--wrong-id] [--hold N]
//                   [--exit-after N] [--silent] [--garbage]

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "radcmp/extraction.h"

namespace {

using nlohmann::json;

std::size_t CodePoints(const std::string& s, std::size_t byte_end) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < byte_end; ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) ++n;
  }
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fake NER worker"};
  std::string lexicon_path;
  int protocol = 1;
  bool no_handshake = false;
  bool bad_span = false;
  bool error = false;
  bool wrong_id = false;
  std::size_t hold = 1;
  int exit_after = -1;
  bool silent = false;
  bool garbage = false;
  app.add_option("--lexicon", lexicon_path)->required();
  app.add_option("--protocol", protocol);
  app.add_flag("--no-handshake", no_handshake);
  app.add_flag("--bad-span", bad_span);
  app.add_flag("--error", error);
  app.add_flag("--wrong-id", wrong_id);
  app.add_option("--hold", hold, "buffer N requests, answer in reverse");
  app.add_option("--exit-after", exit_after);
  app.add_flag("--silent", silent);
  app.add_flag("--garbage", garbage);
  CLI11_PARSE(app, argc, argv);

  const radcmp::Lexicon lexicon = radcmp::LoadLexicon(lexicon_path);
  if (!no_handshake) {
    std::cout << json{{"ready", true}, {"protocol", protocol}}.dump() << "\n"
              << std::flush;
  }

  std::vector<json> held;
  int answered = 0;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (exit_after >= 0 && answered >= exit_after) return 3;
    json req = json::parse(line, nullptr, false);
    if (req.is_discarded() || !req.is_object()) {
      std::cout << json{{"id", nullptr}, {"error", "malformed request"}}.dump()
                << "\n"
                << std::flush;
      continue;
    }
    const std::string id = req.value("id", "");
    const std::string text = req.value("text", "");
    json resp = {{"id", wrong_id ? id + "-x" : id}};
    if (error) {
      resp["error"] = "model failure";
    } else {
      json list = json::array();
      const radcmp::EntitySet found = radcmp::LexiconExtract(lexicon, text);
      for (const auto& e : found.entities()) {
        std::size_t start = CodePoints(text, e.span.start);
        std::size_t end = CodePoints(text, e.span.end);
        if (bad_span) end = CodePoints(text, text.size()) + 5;
        list.push_back(
            {{"text", e.surface}, {"start", start}, {"end", end},
             {"label", "FINDING"}});
      }
      resp["entities"] = list;
    }
    ++answered;
    if (silent) continue;
    held.push_back(resp);
    if (held.size() < hold) continue;
    for (auto it = held.rbegin(); it != held.rend(); ++it) {
      std::cout << (garbage ? std::string("not json") : it->dump()) << "\n";
    }
    std::cout << std::flush;
    held.clear();
  }
  return 0;
}
