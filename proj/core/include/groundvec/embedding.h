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

#ifndef GROUNDVEC_EMBEDDING_H_
#define GROUNDVEC_EMBEDDING_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Core>

#include "groundvec/corpus.h"
#include "groundvec/random.h"

namespace groundvec {

// Word embeddings (input weights, one row per vocabulary word) plus the
// optional hidden-to-output layer used while grounding.
class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  // Throws unless input.rows() == vocab.size() and all entries are finite.
  EmbeddingModel(Vocabulary vocab, RowMatrix input);

  const Vocabulary& vocab() const { return vocab_; }
  std::size_t vocab_size() const { return vocab_.size(); }
  std::size_t hidden_size() const { return static_cast<std::size_t>(input_.cols()); }

  const RowMatrix& input() const { return input_; }
  RowMatrix& mutable_input() { return input_; }

  bool has_output() const { return output_.has_value(); }
  std::size_t num_classes() const {
    return output_ ? static_cast<std::size_t>(output_->cols()) : 0;
  }
  // N_H x N_K. Throws if absent.
  const RowMatrix& output() const;
  RowMatrix& mutable_output();

  // Fresh output layer drawn uniformly from [-0.5/N_H, 0.5/N_H].
  void InitOutput(std::size_t num_classes, Rng& rng);
  void SetOutput(RowMatrix output);
  void ClearOutput() { output_.reset(); }

  Eigen::Map<const Eigen::VectorXd> Row(WordId id) const {
    return {input_.row(id).data(), input_.cols()};
  }

  // Mean of the input rows of `window`. Duplicates count with multiplicity.
  Eigen::VectorXd Hidden(std::span<const WordId> window) const;
  // Token version; throws on an unknown token or an empty window.
  Eigen::VectorXd Hidden(std::span<const std::string> window) const;

  // Mean row over the in-vocabulary tokens; nullopt when all are OOV.
  std::optional<Eigen::VectorXd> MeanOfKnown(
      std::span<const std::string> tokens) const;

  // Throws if any W_I or W_O entry is NaN or infinite.
  void CheckFinite() const;

 private:
  Vocabulary vocab_;
  RowMatrix input_;
  std::optional<RowMatrix> output_;
};

double Dot(const Eigen::Ref<const Eigen::VectorXd>& u,
           const Eigen::Ref<const Eigen::VectorXd>& v);

// dot(u, v) / (|u| |v|). Throws on length mismatch or a zero-norm input.
double Cosine(const Eigen::Ref<const Eigen::VectorXd>& u,
              const Eigen::Ref<const Eigen::VectorXd>& v);

// Text interchange format: "N_V N_H" header, then one line per word in index
// order holding the word and N_H space-separated reals.
void WriteText(const EmbeddingModel& model, std::ostream& out);
void SaveText(const EmbeddingModel& model, const std::filesystem::path& path);
EmbeddingModel ReadText(std::istream& in, const std::string& source = "<stream>");
EmbeddingModel LoadText(const std::filesystem::path& path);

enum class Role : std::size_t { kPrimary = 0, kRelation = 1, kSecondary = 2 };
enum class RoleMode { kShared, kSeparate };

RoleMode ParseRoleMode(std::string_view text);
std::string_view ToString(RoleMode mode);
char RoleSuffix(Role role);  // 'P', 'R' or 'S'

// Embedding spaces for the primary/relation/secondary tuple roles. In shared
// mode all three roles resolve to the same model object.
class RoleModels {
 public:
  static RoleModels Shared(std::shared_ptr<const EmbeddingModel> model);
  static RoleModels Separate(std::shared_ptr<const EmbeddingModel> primary,
                             std::shared_ptr<const EmbeddingModel> relation,
                             std::shared_ptr<const EmbeddingModel> secondary);

  RoleMode mode() const { return mode_; }
  const EmbeddingModel& For(Role role) const {
    return *models_[static_cast<std::size_t>(role)];
  }
  const EmbeddingModel& For(std::size_t role) const { return *models_.at(role); }

 private:
  RoleModels(RoleMode mode,
             std::array<std::shared_ptr<const EmbeddingModel>, 3> models);

  RoleMode mode_ = RoleMode::kShared;
  std::array<std::shared_ptr<const EmbeddingModel>, 3> models_;
};

}  // namespace groundvec

#endif  // GROUNDVEC_EMBEDDING_H_
