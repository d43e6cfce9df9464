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

#ifndef GROUNDVEC_CORPUS_H_
#define GROUNDVEC_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace groundvec {

using WordId = std::uint32_t;
using TokenList = std::vector<std::string>;
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Lowercases ASCII letters and splits on every run of ASCII characters that
// are not letters or digits. Bytes >= 0x80 are kept as word characters so
// UTF-8 words survive intact.
TokenList Tokenize(std::string_view text);

// Word -> lemma substitutions applied after tokenization.
class LemmaTable {
 public:
  LemmaTable() = default;
  explicit LemmaTable(std::unordered_map<std::string, std::string> entries)
      : entries_(std::move(entries)) {}

  // Reads "word<TAB>lemma" lines; blank lines are skipped.
  static LemmaTable Load(const std::filesystem::path& path);

  void Apply(TokenList& tokens) const;
  bool empty() const { return entries_.empty(); }

 private:
  std::unordered_map<std::string, std::string> entries_;
};

// Tokenize followed by an optional lemma pass.
TokenList Preprocess(std::string_view text, const LemmaTable* lemmas);

// Bidirectional word <-> index map. Index order is fixed at construction.
class Vocabulary {
 public:
  Vocabulary() = default;

  // Builds from an explicit word list in index order. Counts default to 0.
  // Throws on duplicate or empty words.
  explicit Vocabulary(std::vector<std::string> words,
                      std::vector<std::uint64_t> counts = {});

  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

  std::optional<WordId> Find(std::string_view word) const;
  bool Contains(std::string_view word) const { return Find(word).has_value(); }
  // Throws if the word is unknown.
  WordId IndexOf(std::string_view word) const;

  const std::string& Word(WordId id) const { return words_.at(id); }
  std::uint64_t Count(WordId id) const { return counts_.at(id); }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  // Maps tokens to ids, dropping out-of-vocabulary tokens.
  std::vector<WordId> Encode(std::span<const std::string> tokens) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.words_ == b.words_ && a.counts_ == b.counts_;
  }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, WordId, Hash, std::equal_to<>> index_;
};

// Keeps tokens occurring at least min_count times across all streams.
// Indices follow descending count, ties broken lexicographically.
Vocabulary BuildVocab(std::span<const TokenList> streams,
                      std::uint64_t min_count);

// One visual feature vector plus its text, split into segments (sentences,
// or the P/R/S elements of a tuple).
struct MultimodalPair {
  std::vector<double> features;
  std::vector<TokenList> segments;

  // Every token across all segments, in order.
  TokenList Tokens() const;
};

// (primary, relation, secondary) phrase triple with optional label.
struct Tuple {
  TokenList primary;
  TokenList relation;
  TokenList secondary;
  std::optional<bool> label;

  const TokenList& element(std::size_t role) const;
  TokenList Tokens() const;
};

struct WindowStrategy {
  enum class Kind { kWords, kPhrases, kSents, kWinds, kDescs };

  Kind kind = Kind::kWords;
  std::size_t width = 5;  // used by kWinds only

  static WindowStrategy Words() { return {Kind::kWords, 5}; }
  static WindowStrategy Phrases() { return {Kind::kPhrases, 5}; }
  static WindowStrategy Sents() { return {Kind::kSents, 5}; }
  static WindowStrategy Winds(std::size_t n) { return {Kind::kWinds, n}; }
  static WindowStrategy Descs() { return {Kind::kDescs, 5}; }

  // Accepts words | phrases | sents | winds | winds:<n> | descs.
  static WindowStrategy Parse(std::string_view text);
  std::string ToString() const;
};

// Splits a pair's text into training windows of in-vocabulary word ids.
// Throws if every window is empty after dropping OOV tokens.
std::vector<std::vector<WordId>> Windows(const MultimodalPair& pair,
                                         const WindowStrategy& strategy,
                                         const Vocabulary& vocab);

// Same as Windows but returns an empty list instead of throwing.
std::vector<std::vector<WordId>> WindowsOrEmpty(const MultimodalPair& pair,
                                                const WindowStrategy& strategy,
                                                const Vocabulary& vocab);

// Headerless CSV of reals, one row per vector. Rows must share one width and
// contain only finite values.
RowMatrix LoadFeatures(const std::filesystem::path& path);

// One record per line; tab characters separate segments.
std::vector<std::vector<TokenList>> LoadSegmentedText(
    const std::filesystem::path& path, const LemmaTable* lemmas = nullptr);

// Pairs features row i with text line i.
std::vector<MultimodalPair> LoadMultimodal(
    const std::filesystem::path& features_path,
    const std::filesystem::path& text_path, const LemmaTable* lemmas = nullptr);

// One document per line.
std::vector<TokenList> LoadCorpus(const std::filesystem::path& path,
                                  const LemmaTable* lemmas = nullptr);

// TSV: primary, relation, secondary, optional 0/1 label.
std::vector<Tuple> LoadTuples(const std::filesystem::path& path,
                              const LemmaTable* lemmas = nullptr);

}  // namespace groundvec

#endif  // GROUNDVEC_CORPUS_H_
