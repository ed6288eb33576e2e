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

#include "radcmp/extraction.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "radcmp/error.h"
#include "radcmp/text.h"

namespace radcmp {
namespace {

bool WordAt(std::string_view s, std::size_t i) {
  return i < s.size() && text::IsWordByte(static_cast<unsigned char>(s[i]));
}

// A match may not begin or end inside a word.
bool BoundaryAt(std::string_view s, std::size_t i) {
  if (i == 0 || i >= s.size()) return true;
  return !(WordAt(s, i - 1) && WordAt(s, i));
}

}  // namespace

EntitySet::EntitySet(std::vector<Entity> entities)
    : entities_(std::move(entities)) {
  std::stable_sort(entities_.begin(), entities_.end(),
                   [](const Entity& a, const Entity& b) {
                     return a.span.start < b.span.start;
                   });
  for (const auto& e : entities_) distinct_.insert(e.normalized);
}

std::string NormalizeEntity(std::string_view raw) {
  std::string collapsed;
  collapsed.reserve(raw.size());
  bool pending_space = false;
  for (unsigned char c : raw) {
    if (text::IsSpace(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !collapsed.empty()) collapsed += ' ';
    pending_space = false;
    collapsed += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a')
                                        : static_cast<char>(c);
  }
  auto outer = [](char ch) {
    const auto c = static_cast<unsigned char>(ch);
    return text::IsSpace(c) || text::IsPunct(c);
  };
  std::size_t b = 0;
  std::size_t e = collapsed.size();
  while (b < e && outer(collapsed[b])) ++b;
  while (e > b && outer(collapsed[e - 1])) --e;
  if (b == e) throw InputError("degenerate entity");
  return collapsed.substr(b, e - b);
}

Lexicon::Lexicon(const std::vector<std::string>& terms) {
  for (const auto& t : terms) terms_.insert(NormalizeEntity(t));
  if (terms_.empty()) throw InputError("lexicon is empty");
  trie_.emplace_back();
  for (const auto& term : terms_) {
    int node = 0;
    for (unsigned char c : term) {
      int child = Child(node, c);
      if (child < 0) {
        child = static_cast<int>(trie_.size());
        trie_.emplace_back();
        auto& next = trie_[node].next;
        next.insert(std::upper_bound(next.begin(), next.end(),
                                     std::make_pair(c, -1)),
                    {c, child});
      }
      node = child;
    }
    trie_[node].terminal = true;
  }
}

int Lexicon::Child(int node, unsigned char c) const {
  const auto& next = trie_[node].next;
  auto it = std::lower_bound(
      next.begin(), next.end(), c,
      [](const std::pair<unsigned char, int>& p, unsigned char v) {
        return p.first < v;
      });
  return (it != next.end() && it->first == c) ? it->second : -1;
}

std::optional<std::size_t> Lexicon::LongestMatch(std::string_view projected,
                                                 std::size_t pos) const {
  std::optional<std::size_t> best;
  int node = 0;
  for (std::size_t i = pos; i < projected.size(); ++i) {
    node = Child(node, static_cast<unsigned char>(projected[i]));
    if (node < 0) break;
    if (trie_[node].terminal && BoundaryAt(projected, i + 1)) best = i + 1;
  }
  return best;
}

Lexicon ParseLexicon(std::string_view content) {
  std::vector<std::string> terms;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::Trim(line);
    if (t.empty() || t.front() == '#') continue;
    terms.emplace_back(t);
  }
  return Lexicon(terms);
}

Lexicon LoadLexicon(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open lexicon " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return ParseLexicon(ss.str());
  } catch (const InputError& e) {
    throw InputError("lexicon " + path + ": " + e.what());
  }
}

EntitySet LexiconExtract(const Lexicon& lexicon, std::string_view text) {
  // Projection: casefolded, each whitespace run collapsed to one space.
  // origin[k] is the source offset of projected byte k.
  std::string projected;
  std::vector<std::size_t> origin;
  projected.reserve(text.size());
  origin.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (text::IsSpace(c)) {
      if (!projected.empty() && projected.back() == ' ') continue;
      projected += ' ';
    } else {
      projected +=
          (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : text[i];
    }
    origin.push_back(i);
  }

  std::vector<Entity> found;
  std::size_t k = 0;
  while (k < projected.size()) {
    if (projected[k] == ' ' || !BoundaryAt(projected, k)) {
      ++k;
      continue;
    }
    auto end = lexicon.LongestMatch(projected, k);
    if (!end) {
      ++k;
      continue;
    }
    const Span span{origin[k], origin[*end - 1] + 1};
    std::string surface(text.substr(span.start, span.end - span.start));
    std::string normalized = NormalizeEntity(surface);
    found.push_back({std::move(surface), std::move(normalized), span,
                     std::nullopt});
    k = *end;
  }
  return EntitySet(std::move(found));
}

}  // namespace radcmp
