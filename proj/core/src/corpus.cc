// Copyright 2026 The groundvec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "groundvec/corpus.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "groundvec/error.h"

namespace groundvec {
namespace {

bool IsWordByte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c >= 0x80;
}

char LowerAscii(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::ifstream OpenOrThrow(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

void StripCarriageReturn(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<std::string_view> SplitOn(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(line.substr(start));
      return parts;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view Trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string Where(const std::filesystem::path& path, std::size_t row) {
  return path.string() + " row " + std::to_string(row);
}

}  // namespace

TokenList Tokenize(std::string_view text) {
  TokenList tokens;
  std::string current;
  for (char c : text) {
    if (IsWordByte(static_cast<unsigned char>(c))) {
      current.push_back(LowerAscii(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

LemmaTable LemmaTable::Load(const std::filesystem::path& path) {
  auto in = OpenOrThrow(path);
  std::unordered_map<std::string, std::string> entries;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    StripCarriageReturn(line);
    if (Trim(line).empty()) continue;
    const auto parts = SplitOn(line, '\t');
    if (parts.size() != 2 || Trim(parts[0]).empty() || Trim(parts[1]).empty()) {
      throw Error(Where(path, row) + ": expected word<TAB>lemma");
    }
    entries.insert_or_assign(std::string(Trim(parts[0])),
                             std::string(Trim(parts[1])));
  }
  return LemmaTable(std::move(entries));
}

void LemmaTable::Apply(TokenList& tokens) const {
  if (entries_.empty()) return;
  for (auto& token : tokens) {
    if (auto it = entries_.find(token); it != entries_.end()) token = it->second;
  }
}

TokenList Preprocess(std::string_view text, const LemmaTable* lemmas) {
  TokenList tokens = Tokenize(text);
  if (lemmas != nullptr) lemmas->Apply(tokens);
  return tokens;
}

Vocabulary::Vocabulary(std::vector<std::string> words,
                       std::vector<std::uint64_t> counts)
    : words_(std::move(words)), counts_(std::move(counts)) {
  if (counts_.empty()) counts_.assign(words_.size(), 0);
  if (counts_.size() != words_.size()) {
    throw Error("vocabulary: " + std::to_string(words_.size()) + " words but " +
                std::to_string(counts_.size()) + " counts");
  }
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i].empty()) throw Error("vocabulary: empty word at index " +
                                       std::to_string(i));
    if (!index_.emplace(words_[i], static_cast<WordId>(i)).second) {
      throw Error("vocabulary: duplicate word '" + words_[i] + "'");
    }
  }
}

std::optional<WordId> Vocabulary::Find(std::string_view word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

WordId Vocabulary::IndexOf(std::string_view word) const {
  if (auto id = Find(word)) return *id;
  throw Error("unknown word '" + std::string(word) + "'");
}

std::vector<WordId> Vocabulary::Encode(std::span<const std::string> tokens) const {
  std::vector<WordId> ids;
  ids.reserve(tokens.size());
  for (const auto& token : tokens) {
    if (auto id = Find(token)) ids.push_back(*id);
  }
  return ids;
}

Vocabulary BuildVocab(std::span<const TokenList> streams,
                      std::uint64_t min_count) {
  if (min_count < 1) throw Error("min_count must be at least 1");
  std::map<std::string, std::uint64_t, std::less<>> counts;
  for (const auto& stream : streams) {
    for (const auto& token : stream) ++counts[token];
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [word, count] : counts) {
    if (count >= min_count) kept.emplace_back(word, count);
  }
  if (kept.empty()) {
    throw Error("vocabulary is empty with min_count " +
                std::to_string(min_count));
  }
  // std::map iteration is already lexicographic; a stable sort on count keeps
  // that as the tie order.
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  std::vector<std::string> words;
  std::vector<std::uint64_t> word_counts;
  words.reserve(kept.size());
  word_counts.reserve(kept.size());
  for (auto& [word, count] : kept) {
    words.push_back(std::move(word));
    word_counts.push_back(count);
  }
  return Vocabulary(std::move(words), std::move(word_counts));
}

TokenList MultimodalPair::Tokens() const {
  TokenList all;
  for (const auto& segment : segments) {
    all.insert(all.end(), segment.begin(), segment.end());
  }
  return all;
}

const TokenList& Tuple::element(std::size_t role) const {
  switch (role) {
    case 0:
      return primary;
    case 1:
      return relation;
    case 2:
      return secondary;
  }
  throw Error("tuple role out of range: " + std::to_string(role));
}

TokenList Tuple::Tokens() const {
  TokenList all = primary;
  all.insert(all.end(), relation.begin(), relation.end());
  all.insert(all.end(), secondary.begin(), secondary.end());
  return all;
}

WindowStrategy WindowStrategy::Parse(std::string_view text) {
  if (text == "words") return Words();
  if (text == "phrases") return Phrases();
  if (text == "sents") return Sents();
  if (text == "descs") return Descs();
  if (text == "winds") return Winds(5);
  constexpr std::string_view kPrefix = "winds:";
  if (text.starts_with(kPrefix)) {
    const std::string_view digits = text.substr(kPrefix.size());
    std::size_t width = 0;
    const auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), width);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || width < 1) {
      throw Error("invalid window width in '" + std::string(text) + "'");
    }
    return Winds(width);
  }
  throw Error("unknown window strategy '" + std::string(text) + "'");
}

std::string WindowStrategy::ToString() const {
  switch (kind) {
    case Kind::kWords:
      return "words";
    case Kind::kPhrases:
      return "phrases";
    case Kind::kSents:
      return "sents";
    case Kind::kWinds:
      return "winds:" + std::to_string(width);
    case Kind::kDescs:
      return "descs";
  }
  return "unknown";
}

std::vector<std::vector<WordId>> WindowsOrEmpty(const MultimodalPair& pair,
                                                const WindowStrategy& strategy,
                                                const Vocabulary& vocab) {
  std::vector<TokenList> raw;
  switch (strategy.kind) {
    case WindowStrategy::Kind::kWords:
      for (const auto& segment : pair.segments) {
        for (const auto& token : segment) raw.push_back({token});
      }
      break;
    case WindowStrategy::Kind::kPhrases:
    case WindowStrategy::Kind::kSents:
      raw = pair.segments;
      break;
    case WindowStrategy::Kind::kWinds: {
      if (strategy.width < 1) throw Error("window width must be at least 1");
      const std::size_t n = strategy.width;
      for (const auto& segment : pair.segments) {
        if (segment.size() <= n) {
          raw.push_back(segment);
          continue;
        }
        for (std::size_t start = 0; start + n <= segment.size(); ++start) {
          raw.emplace_back(segment.begin() + start, segment.begin() + start + n);
        }
      }
      break;
    }
    case WindowStrategy::Kind::kDescs:
      raw.push_back(pair.Tokens());
      break;
  }

  std::vector<std::vector<WordId>> windows;
  windows.reserve(raw.size());
  for (const auto& tokens : raw) {
    auto ids = vocab.Encode(tokens);
    if (!ids.empty()) windows.push_back(std::move(ids));
  }
  return windows;
}

std::vector<std::vector<WordId>> Windows(const MultimodalPair& pair,
                                         const WindowStrategy& strategy,
                                         const Vocabulary& vocab) {
  if (pair.Tokens().empty()) throw Error("pair has no text tokens");
  auto windows = WindowsOrEmpty(pair, strategy, vocab);
  if (windows.empty()) {
    throw Error("every window is empty after dropping out-of-vocabulary tokens");
  }
  return windows;
}

RowMatrix LoadFeatures(const std::filesystem::path& path) {
  auto in = OpenOrThrow(path);
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    StripCarriageReturn(line);
    if (Trim(line).empty()) continue;
    ++rows;
    const auto fields = SplitOn(line, ',');
    if (rows == 1) {
      width = fields.size();
    } else if (fields.size() != width) {
      throw Error(Where(path, line_no) + ": dimension mismatch, expected " +
                  std::to_string(width) + " values, found " +
                  std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const std::string field(Trim(fields[j]));
      double value = 0.0;
      std::size_t consumed = 0;
      try {
        value = std::stod(field, &consumed);
      } catch (const std::exception&) {
        consumed = 0;
      }
      if (field.empty() || consumed != field.size()) {
        throw Error(Where(path, line_no) + ": malformed value '" + field +
                    "' in column " + std::to_string(j + 1));
      }
      if (!std::isfinite(value)) {
        throw Error(Where(path, line_no) + ": non-finite value in column " +
                    std::to_string(j + 1));
      }
      values.push_back(value);
    }
  }
  if (rows == 0) throw Error(path.string() + ": no feature rows");
  RowMatrix features(static_cast<Eigen::Index>(rows),
                     static_cast<Eigen::Index>(width));
  std::copy(values.begin(), values.end(), features.data());
  return features;
}

std::vector<std::vector<TokenList>> LoadSegmentedText(
    const std::filesystem::path& path, const LemmaTable* lemmas) {
  auto in = OpenOrThrow(path);
  std::vector<std::vector<TokenList>> records;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    StripCarriageReturn(line);
    std::vector<TokenList> segments;
    std::size_t total = 0;
    for (std::string_view part : SplitOn(line, '\t')) {
      segments.push_back(Preprocess(part, lemmas));
      total += segments.back().size();
    }
    if (total == 0) throw Error(Where(path, row) + ": empty text record");
    records.push_back(std::move(segments));
  }
  return records;
}

std::vector<MultimodalPair> LoadMultimodal(
    const std::filesystem::path& features_path,
    const std::filesystem::path& text_path, const LemmaTable* lemmas) {
  RowMatrix features = LoadFeatures(features_path);
  auto texts = LoadSegmentedText(text_path, lemmas);
  if (static_cast<std::size_t>(features.rows()) != texts.size()) {
    throw Error("count mismatch: " + features_path.string() + " has " +
                std::to_string(features.rows()) + " rows but " +
                text_path.string() + " has " + std::to_string(texts.size()) +
                " records");
  }
  std::vector<MultimodalPair> pairs(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto row = features.row(static_cast<Eigen::Index>(i));
    pairs[i].features.assign(row.data(), row.data() + row.size());
    pairs[i].segments = std::move(texts[i]);
  }
  return pairs;
}

std::vector<TokenList> LoadCorpus(const std::filesystem::path& path,
                                  const LemmaTable* lemmas) {
  auto in = OpenOrThrow(path);
  std::vector<TokenList> docs;
  std::string line;
  while (std::getline(in, line)) {
    StripCarriageReturn(line);
    auto tokens = Preprocess(line, lemmas);
    if (!tokens.empty()) docs.push_back(std::move(tokens));
  }
  return docs;
}

std::vector<Tuple> LoadTuples(const std::filesystem::path& path,
                              const LemmaTable* lemmas) {
  auto in = OpenOrThrow(path);
  std::vector<Tuple> tuples;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    StripCarriageReturn(line);
    if (Trim(line).empty()) continue;
    const auto fields = SplitOn(line, '\t');
    if (fields.size() != 3 && fields.size() != 4) {
      throw Error(Where(path, row) + ": expected 3 or 4 tab-separated columns");
    }
    Tuple tuple;
    tuple.primary = Preprocess(fields[0], lemmas);
    tuple.relation = Preprocess(fields[1], lemmas);
    tuple.secondary = Preprocess(fields[2], lemmas);
    if (tuple.primary.empty() || tuple.relation.empty() ||
        tuple.secondary.empty()) {
      throw Error(Where(path, row) + ": tuple element is empty");
    }
    if (fields.size() == 4) {
      const auto label = Trim(fields[3]);
      if (label == "1") {
        tuple.label = true;
      } else if (label == "0") {
        tuple.label = false;
      } else {
        throw Error(Where(path, row) + ": label must be 0 or 1");
      }
    }
    tuples.push_back(std::move(tuple));
  }
  return tuples;
}

}  // namespace groundvec
