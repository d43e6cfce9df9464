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

#include "groundvec/embedding.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>
#include <vector>

#include "groundvec/error.h"

namespace groundvec {
namespace {

void AppendDouble(std::string& out, double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value,
                                       std::chars_format::general, 17);
  if (ec != std::errc()) throw Error("failed to format value");
  out.append(buf, ptr);
}

std::vector<std::string_view> SplitSpaces(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ') ++j;
    parts.push_back(line.substr(i, j - i));
    i = j;
  }
  return parts;
}

bool ParseDouble(std::string_view text, double& value) {
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool ParseSize(std::string_view text, std::size_t& value) {
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

EmbeddingModel::EmbeddingModel(Vocabulary vocab, RowMatrix input)
    : vocab_(std::move(vocab)), input_(std::move(input)) {
  if (static_cast<std::size_t>(input_.rows()) != vocab_.size()) {
    throw Error("embedding: " + std::to_string(input_.rows()) +
                " rows for a vocabulary of " + std::to_string(vocab_.size()));
  }
  if (!input_.allFinite()) throw Error("embedding: non-finite input weight");
}

const RowMatrix& EmbeddingModel::output() const {
  if (!output_) throw Error("model has no output layer");
  return *output_;
}

RowMatrix& EmbeddingModel::mutable_output() {
  if (!output_) throw Error("model has no output layer");
  return *output_;
}

void EmbeddingModel::InitOutput(std::size_t num_classes, Rng& rng) {
  if (num_classes < 1) throw Error("output layer needs at least one class");
  const auto rows = input_.cols();
  if (rows < 1) throw Error("cannot add an output layer to an empty model");
  const double scale = 1.0 / static_cast<double>(rows);
  RowMatrix output(rows, static_cast<Eigen::Index>(num_classes));
  for (Eigen::Index i = 0; i < output.size(); ++i) {
    output.data()[i] = (UniformUnit(rng) - 0.5) * scale;
  }
  output_ = std::move(output);
}

void EmbeddingModel::SetOutput(RowMatrix output) {
  if (output.rows() != input_.cols()) {
    throw Error("output layer has " + std::to_string(output.rows()) +
                " rows, expected N_H = " + std::to_string(input_.cols()));
  }
  output_ = std::move(output);
}

Eigen::VectorXd EmbeddingModel::Hidden(std::span<const WordId> window) const {
  if (window.empty()) throw Error("hidden: empty window");
  // Summing in id order makes the mean bitwise independent of token order.
  std::vector<WordId> ids(window.begin(), window.end());
  std::sort(ids.begin(), ids.end());
  if (ids.back() >= vocab_.size()) throw Error("hidden: word id out of range");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(input_.cols());
  for (WordId id : ids) sum += input_.row(id).transpose();
  return sum / static_cast<double>(window.size());
}

Eigen::VectorXd EmbeddingModel::Hidden(std::span<const std::string> window) const {
  if (window.empty()) throw Error("hidden: empty window");
  std::vector<WordId> ids;
  ids.reserve(window.size());
  for (const auto& token : window) ids.push_back(vocab_.IndexOf(token));
  return Hidden(std::span<const WordId>(ids));
}

std::optional<Eigen::VectorXd> EmbeddingModel::MeanOfKnown(
    std::span<const std::string> tokens) const {
  const auto ids = vocab_.Encode(tokens);
  if (ids.empty()) return std::nullopt;
  return Hidden(std::span<const WordId>(ids));
}

void EmbeddingModel::CheckFinite() const {
  if (!input_.allFinite()) throw Error("embedding: non-finite input weight");
  if (output_ && !output_->allFinite()) {
    throw Error("embedding: non-finite output weight");
  }
}

double Dot(const Eigen::Ref<const Eigen::VectorXd>& u,
           const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (u.size() != v.size()) throw Error("dot: length mismatch");
  return u.dot(v);
}

double Cosine(const Eigen::Ref<const Eigen::VectorXd>& u,
              const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (u.size() != v.size()) throw Error("cosine: length mismatch");
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw Error("cosine: zero-norm vector");
  const double c = u.dot(v) / (nu * nv);
  return std::clamp(c, -1.0, 1.0);
}

void WriteText(const EmbeddingModel& model, std::ostream& out) {
  const auto& input = model.input();
  std::string line;
  line.reserve(32 + 24 * static_cast<std::size_t>(input.cols()));
  out << model.vocab_size() << ' ' << model.hidden_size() << '\n';
  for (std::size_t i = 0; i < model.vocab_size(); ++i) {
    line.clear();
    line += model.vocab().Word(static_cast<WordId>(i));
    for (Eigen::Index j = 0; j < input.cols(); ++j) {
      line.push_back(' ');
      AppendDouble(line, input(static_cast<Eigen::Index>(i), j));
    }
    line.push_back('\n');
    out << line;
  }
}

void SaveText(const EmbeddingModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  WriteText(model, out);
  if (!out) throw Error("write failed for " + path.string());
}

EmbeddingModel ReadText(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw Error(source + ": empty embedding file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = SplitSpaces(line);
  std::size_t num_words = 0;
  std::size_t dim = 0;
  if (header.size() != 2 || !ParseSize(header[0], num_words) ||
      !ParseSize(header[1], dim) || num_words == 0 || dim == 0) {
    throw Error(source + ": malformed header '" + line +
                "', expected \"N_V N_H\"");
  }

  std::vector<std::string> words;
  words.reserve(num_words);
  RowMatrix input(static_cast<Eigen::Index>(num_words),
                  static_cast<Eigen::Index>(dim));
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t line_no = row + 2;
    if (row >= num_words) {
      throw Error(source + " line " + std::to_string(line_no) +
                  ": more rows than the header's " + std::to_string(num_words));
    }
    const auto parts = SplitSpaces(line);
    if (parts.size() != dim + 1) {
      throw Error(source + " line " + std::to_string(line_no) +
                  ": row length mismatch, expected " + std::to_string(dim) +
                  " values, found " +
                  std::to_string(parts.empty() ? 0 : parts.size() - 1));
    }
    for (std::size_t j = 0; j < dim; ++j) {
      double value = 0.0;
      if (!ParseDouble(parts[j + 1], value) || !std::isfinite(value)) {
        throw Error(source + " line " + std::to_string(line_no) +
                    ": bad value '" + std::string(parts[j + 1]) + "'");
      }
      input(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) = value;
    }
    words.emplace_back(parts[0]);
    ++row;
  }
  if (row != num_words) {
    throw Error(source + ": header declares " + std::to_string(num_words) +
                " words but file has " + std::to_string(row) + " rows");
  }
  try {
    return EmbeddingModel(Vocabulary(std::move(words)), std::move(input));
  } catch (const Error& e) {
    throw Error(source + ": " + e.what());
  }
}

EmbeddingModel LoadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return ReadText(in, path.string());
}

RoleMode ParseRoleMode(std::string_view text) {
  if (text == "shared") return RoleMode::kShared;
  if (text == "separate") return RoleMode::kSeparate;
  throw Error("unknown mode '" + std::string(text) + "'");
}

std::string_view ToString(RoleMode mode) {
  return mode == RoleMode::kShared ? "shared" : "separate";
}

char RoleSuffix(Role role) {
  switch (role) {
    case Role::kPrimary:
      return 'P';
    case Role::kRelation:
      return 'R';
    case Role::kSecondary:
      return 'S';
  }
  return '?';
}

RoleModels::RoleModels(
    RoleMode mode, std::array<std::shared_ptr<const EmbeddingModel>, 3> models)
    : mode_(mode), models_(std::move(models)) {
  for (const auto& model : models_) {
    if (!model) throw Error("role model is null");
  }
}

RoleModels RoleModels::Shared(std::shared_ptr<const EmbeddingModel> model) {
  return RoleModels(RoleMode::kShared, {model, model, model});
}

RoleModels RoleModels::Separate(std::shared_ptr<const EmbeddingModel> primary,
                                std::shared_ptr<const EmbeddingModel> relation,
                                std::shared_ptr<const EmbeddingModel> secondary) {
  return RoleModels(RoleMode::kSeparate,
                    {std::move(primary), std::move(relation), std::move(secondary)});
}

}  // namespace groundvec
