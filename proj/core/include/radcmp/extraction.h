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

#ifndef RADCMP_EXTRACTION_H_
#define RADCMP_EXTRACTION_H_

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace radcmp {

// Half-open byte range [start, end) into a UTF-8 source text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
};

struct Entity {
  std::string surface;
  std::string normalized;
  Span span;
  std::optional<std::string> label;

  bool operator==(const Entity&) const = default;
};

// Deduplicated, sorted normalized entity forms.
using TermSet = std::set<std::string>;

// Entities ordered by span start, plus the set of distinct normalized forms.
class EntitySet {
 public:
  EntitySet() = default;
  explicit EntitySet(std::vector<Entity> entities);

  const std::vector<Entity>& entities() const { return entities_; }
  const TermSet& distinct() const { return distinct_; }
  std::size_t size() const { return entities_.size(); }
  bool empty() const { return entities_.empty(); }

 private:
  std::vector<Entity> entities_;
  TermSet distinct_;
};

// Casefolds, collapses internal whitespace to single spaces, and strips
// leading/trailing punctuation. Throws InputError("degenerate entity") when
// nothing is left.
std::string NormalizeEntity(std::string_view raw);

class Lexicon {
 public:
  // Each term is normalized on insertion. Throws InputError on an empty list
  // or a term that normalizes to nothing.
  explicit Lexicon(const std::vector<std::string>& terms);

  const TermSet& terms() const { return terms_; }

  // Longest term starting at `pos` of `projected` whose end lies on a word
  // boundary; returns its end offset.
  std::optional<std::size_t> LongestMatch(std::string_view projected,
                                          std::size_t pos) const;

 private:
  struct Node {
    std::vector<std::pair<unsigned char, int>> next;  // sorted by byte
    bool terminal = false;
  };
  int Child(int node, unsigned char c) const;

  TermSet terms_;
  std::vector<Node> trie_;
};

// One term per line; blank lines and lines starting with '#' are ignored.
Lexicon LoadLexicon(const std::string& path);
Lexicon ParseLexicon(std::string_view content);

// Greedy left-to-right longest match over the casefolded, whitespace-collapsed
// projection of `text`. Matches start and end on word boundaries and never
// overlap; spans refer to `text`.
EntitySet LexiconExtract(const Lexicon& lexicon, std::string_view text);

class Extractor {
 public:
  virtual ~Extractor() = default;
  virtual EntitySet Extract(std::string_view text) const = 0;
};

class LexiconExtractor : public Extractor {
 public:
  explicit LexiconExtractor(Lexicon lexicon) : lexicon_(std::move(lexicon)) {}
  EntitySet Extract(std::string_view text) const override {
    return LexiconExtract(lexicon_, text);
  }
  const Lexicon& lexicon() const { return lexicon_; }

 private:
  Lexicon lexicon_;
};

}  // namespace radcmp

#endif  // RADCMP_EXTRACTION_H_
