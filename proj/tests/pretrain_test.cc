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

#include "groundvec/pretrain.h"

#include <gtest/gtest.h>

#include <cmath>

#include "groundvec/error.h"
#include "groundvec/random.h"
#include "support/oracles.h"
#include "support/synthetic.h"

namespace groundvec {
namespace {

RowMatrix RandomMatrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double scale) {
  RowMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = (UniformUnit(rng) - 0.5) * scale;
  return m;
}

TEST(NegSamplingTest, GradientMatchesFiniteDifferences) {
  constexpr double kEps = 1e-5;
  Rng rng = MakeRng(21, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    RowMatrix output = RandomMatrix(10, 6, rng, 2.0);
    Eigen::VectorXd hidden = RandomMatrix(6, 1, rng, 2.0);
    const auto target = static_cast<WordId>(UniformIndex(rng, 10));
    std::vector<WordId> negatives;
    for (int i = 0; i < 5; ++i) negatives.push_back(static_cast<WordId>(UniformIndex(rng, 10)));

    const NegSamplingGradient grad = NegSamplingGrad(hidden, output, target, negatives);
    EXPECT_DOUBLE_EQ(grad.loss, NegSamplingLoss(hidden, output, target, negatives));
    for (Eigen::Index j = 0; j < hidden.size(); ++j) {
      Eigen::VectorXd plus = hidden, minus = hidden;
      plus(j) += kEps;
      minus(j) -= kEps;
      const double numeric = (NegSamplingLoss(plus, output, target, negatives) -
                              NegSamplingLoss(minus, output, target, negatives)) / (2 * kEps);
      worst = std::max(worst, testing::RelativeError(grad.hidden(j), numeric));
    }
    RowMatrix dense = RowMatrix::Zero(output.rows(), output.cols());
    for (const auto& [id, row] : grad.output_rows) dense.row(id) = row.transpose();
    for (Eigen::Index r = 0; r < output.rows(); ++r) {
      for (Eigen::Index c = 0; c < output.cols(); ++c) {
        RowMatrix plus = output, minus = output;
        plus(r, c) += kEps;
        minus(r, c) -= kEps;
        const double numeric = (NegSamplingLoss(hidden, plus, target, negatives) -
                                NegSamplingLoss(hidden, minus, target, negatives)) / (2 * kEps);
        worst = std::max(worst, testing::RelativeError(dense(r, c), numeric));
      }
    }
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(UnigramSamplerTest, EmpiricalFrequenciesMatchAnalytic) {
  const std::vector<std::uint64_t> counts = {1, 2, 3, 5, 8, 13, 21, 34, 55, 89};
  const UnigramSampler sampler(counts);
  double total = 0.0;
  for (auto c : counts) total += std::pow(static_cast<double>(c), 0.75);
  std::vector<std::size_t> hits(counts.size(), 0);
  Rng rng = MakeRng(5, 0);
  constexpr std::size_t kDraws = 1000000;
  for (std::size_t i = 0; i < kDraws; ++i) ++hits[sampler.Sample(rng)];
  for (std::size_t w = 0; w < counts.size(); ++w) {
    const double analytic = std::pow(static_cast<double>(counts[w]), 0.75) / total;
    EXPECT_NEAR(sampler.Probability(static_cast<WordId>(w)), analytic, 1e-12);
    EXPECT_NEAR(static_cast<double>(hits[w]) / kDraws, analytic, 0.01) << "word " << w;
  }
}

TEST(CbowStepTest, ReducesLossForSmallStep) {
  Rng rng = MakeRng(8, 0);
  CbowState state{RandomMatrix(12, 5, rng, 1.0), RandomMatrix(12, 5, rng, 1.0)};
  const std::vector<WordId> context = {1, 2, 2, 7};
  const std::vector<WordId> negatives = {3, 4, 5};
  const double before = CbowStep(state, context, 0, negatives, 1e-3);
  Eigen::VectorXd hidden = Eigen::VectorXd::Zero(5);
  for (WordId w : context) hidden += state.input.row(w).transpose();
  hidden /= static_cast<double>(context.size());
  EXPECT_LT(NegSamplingLoss(hidden, state.output, 0, negatives), before);
}

// Block one: a and b appear in the same contexts. Block two: c and d do, with
// a disjoint context vocabulary.
std::vector<TokenList> SharedContextBlocks() {
  std::vector<TokenList> docs;
  for (int i = 0; i < 500; ++i) {
    docs.push_back({"p", "a", "q"});
    docs.push_back({"p", "b", "q"});
    docs.push_back({"r", "c", "s"});
    docs.push_back({"r", "d", "s"});
  }
  return docs;
}

TEST(TrainCbowTest, SharedContextWordsAreCloserThanDisjointBlocks) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    PretrainConfig config;
    config.hidden_size = 8;
    config.seed = seed;
    const EmbeddingModel model = TrainCbow(SharedContextBlocks(), config);
    const auto row = [&](const char* w) -> Eigen::VectorXd {
      return model.Row(model.vocab().IndexOf(w));
    };
    const double same = Cosine(row("a"), row("b"));
    for (const char* other : {"c", "d"}) {
      EXPECT_GT(same, Cosine(row("a"), row(other)));
      EXPECT_GT(same, Cosine(row("b"), row(other)));
    }
    EXPECT_TRUE(model.input().allFinite());
  }
}

TEST(TrainCbowTest, FiniteAfterTrainingOnAlternatingStream) {
  TokenList stream;
  for (int i = 0; i < 500; ++i) stream.insert(stream.end(), {"a", "b"});
  PretrainConfig config;
  config.hidden_size = 8;
  const EmbeddingModel model = TrainCbow(std::vector<TokenList>{stream}, config);
  EXPECT_TRUE(model.input().allFinite());
  EXPECT_EQ(model.vocab_size(), 2u);
}

TEST(TrainCbowTest, DeterministicForSeed) {
  const auto set = testing::MakeGroundingSet(1);
  PretrainConfig config;
  config.hidden_size = 10;
  config.epochs = 1;
  const EmbeddingModel a = TrainCbow(set.corpus, config);
  const EmbeddingModel b = TrainCbow(set.corpus, config);
  EXPECT_EQ(a.input(), b.input());
  config.seed = 2;
  const EmbeddingModel c = TrainCbow(set.corpus, config);
  EXPECT_NE(a.input(), c.input());
}

TEST(TrainCbowTest, Errors) {
  PretrainConfig config;
  EXPECT_THROW(TrainCbow(std::vector<TokenList>{}, config), Error);
  const std::vector<TokenList> tiny = {{"a", "b"}};
  config.min_count = 5;
  EXPECT_THROW(TrainCbow(tiny, config), Error);
  config.min_count = 1;
  config.learning_rate = 0.0;
  EXPECT_THROW(config.Validate(), Error);
  config.learning_rate = 0.05;
  config.context_radius = 0;
  EXPECT_THROW(config.Validate(), Error);
}

TEST(ImportPretrainedTest, RoundTripAndEmptyFile) {
  testing::TempDir dir("import");
  Rng rng = MakeRng(1, 0);
  const EmbeddingModel model(Vocabulary({"x", "y", "z"}), RandomMatrix(3, 4, rng, 1.0));
  SaveText(model, dir / "m.txt");
  EXPECT_EQ(ImportPretrained(dir / "m.txt").input(), model.input());
  testing::WriteLines(dir / "empty.txt", {});
  EXPECT_THROW(ImportPretrained(dir / "empty.txt"), Error);
}

}  // namespace
}  // namespace groundvec
