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

#include "groundvec/clustering.h"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "groundvec/error.h"
#include "groundvec/random.h"
#include "support/oracles.h"
#include "support/synthetic.h"

namespace groundvec {
namespace {

using testing::AdjustedRandIndex;
using testing::MakeBlobs;

RowMatrix Column(std::initializer_list<double> values) {
  RowMatrix m(static_cast<Eigen::Index>(values.size()), 1);
  Eigen::Index i = 0;
  for (double v : values) m(i++, 0) = v;
  return m;
}

testing::Mat ToMat(const RowMatrix& m) {
  testing::Mat out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)].push_back(m(i, j));
  return out;
}

double OrthonormalityError(const RowMatrix& components) {
  const RowMatrix gram = components * components.transpose();
  return (gram - RowMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

TEST(KMeansTest, SeparatedPairs) {
  const RowMatrix x = Column({0, 0, 10, 10});
  const KMeansResult result = KMeansFit(x, {.k = 2, .seed = 3});
  EXPECT_EQ(result.wcss, 0.0);
  std::vector<double> centroids = {result.model.centroids(0, 0), result.model.centroids(1, 0)};
  std::sort(centroids.begin(), centroids.end());
  EXPECT_EQ(centroids, (std::vector<double>{0, 10}));
  EXPECT_EQ(result.labels[0], result.labels[1]);
  EXPECT_NE(result.labels[0], result.labels[2]);
}

TEST(KMeansTest, EveryPointItsOwnCentroidWhenKEqualsN) {
  const RowMatrix x = Column({1, 4, 9, 16, 25});
  const KMeansResult result = KMeansFit(x, {.k = 5});
  EXPECT_EQ(result.wcss, 0.0);
  std::vector<std::size_t> labels = result.labels;
  std::sort(labels.begin(), labels.end());
  EXPECT_EQ(labels, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(KMeansTest, Errors) {
  const RowMatrix x = Column({1, 2, 3});
  try {
    KMeansFit(x, {.k = 4});
    FAIL();
  } catch (const Error& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("4"), std::string::npos) << what;
    EXPECT_NE(what.find("3"), std::string::npos) << what;
  }
  EXPECT_THROW(KMeansFit(x, {.k = 1}), Error);
  EXPECT_THROW(KMeansFit(x, {.k = 2, .max_iter = 0}), Error);
  RowMatrix bad = x;
  bad(1, 0) = INFINITY;
  EXPECT_THROW(KMeansFit(bad, {.k = 2}), Error);
  EXPECT_THROW(KMeansFit(Column({5, 5, 5}), {.k = 2}), Error);
}

TEST(KMeansTest, BlobRecoveryAndMonotoneWcss) {
  const auto blobs = MakeBlobs({{0, 0}, {10, 0}, {0, 10}}, 50, 0.1, 4);
  const KMeansResult result = KMeansFit(blobs.points, {.k = 3, .seed = 9, .restarts = 10});
  EXPECT_EQ(AdjustedRandIndex(result.labels, blobs.labels), 1.0);
  ASSERT_EQ(result.runs.size(), 10u);
  for (const auto& run : result.runs) {
    for (std::size_t i = 1; i < run.wcss_history.size(); ++i) {
      EXPECT_LE(run.wcss_history[i], run.wcss_history[i - 1]);
    }
  }
}

TEST(KMeansTest, ConvergedPointsSitAtNearestCentroid) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto blobs = MakeBlobs({{0, 0, 0}, {1, 1, 0}, {0, 2, 1}, {3, 0, 1}}, 20, 0.8, seed);
    const KMeansResult result = KMeansFit(blobs.points, {.k = 4, .seed = seed, .restarts = 3});
    for (Eigen::Index i = 0; i < blobs.points.rows(); ++i) {
      EXPECT_EQ(result.labels[static_cast<std::size_t>(i)],
                NearestCentroid(result.model.centroids, blobs.points.row(i).transpose()));
    }
    EXPECT_NEAR(result.wcss, Wcss(blobs.points, result.model.centroids, result.labels), 1e-9);
  }
}

TEST(KMeansTest, DeterministicForSeed) {
  const auto blobs = MakeBlobs({{0, 0}, {3, 0}, {0, 3}}, 30, 1.0, 1);
  const KMeansResult a = KMeansFit(blobs.points, {.k = 3, .seed = 42});
  const KMeansResult b = KMeansFit(blobs.points, {.k = 3, .seed = 42});
  EXPECT_EQ(a.model.centroids, b.model.centroids);
  EXPECT_EQ(a.labels, b.labels);
}

TEST(AssignTest, NearestAndTieRule) {
  ClusterModel model;
  model.centroids = Column({0, 10});
  EXPECT_EQ(Assign(model, std::vector<double>{4.9}), 0u);
  EXPECT_EQ(Assign(model, std::vector<double>{5.0}), 0u);
  EXPECT_EQ(Assign(model, std::vector<double>{5.1}), 1u);
  EXPECT_EQ(Assign(model, std::vector<double>{10.0}), 1u);
  EXPECT_THROW(Assign(model, std::vector<double>{1.0, 2.0}), Error);

  model.centroids = Column({10, 0});
  EXPECT_EQ(Assign(model, std::vector<double>{5.0}), 0u);
}

TEST(PcaTest, LineInThreeDimensionsKeepsOneComponent) {
  RowMatrix x(6, 3);
  for (int i = 0; i < 6; ++i) x.row(i) << 1 + i, 2 - 2.0 * i, 0.5 * i;
  const PcaModel pca = PcaFit(x, 0.95);
  EXPECT_EQ(pca.output_dim(), 1u);
  EXPECT_LE(OrthonormalityError(pca.components), 1e-6);
}

TEST(PcaTest, IsotropicSampleWithFullRetention) {
  const auto blobs = MakeBlobs({{0, 0}}, 200, 1.0, 2);
  const PcaModel pca = PcaFit(blobs.points, 1.0);
  EXPECT_EQ(pca.output_dim(), 2u);
  EXPECT_LE(OrthonormalityError(pca.components), 1e-6);
}

TEST(PcaTest, RectangleMatchesJacobiOracle) {
  RowMatrix x(4, 3);
  x << 0, 0, 1, 2, 0, 1, 2, 1, 1, 0, 1, 1;
  const auto eigen = testing::JacobiEigenvalues(testing::Covariance(ToMat(x)));
  const std::size_t expected = testing::ComponentsForRetention(eigen, 0.99);
  EXPECT_EQ(expected, 2u);
  const PcaModel pca = PcaFit(x, 0.99);
  EXPECT_EQ(pca.output_dim(), expected);
  // Variance along each component equals the oracle eigenvalue.
  const RowMatrix projected = pca.ProjectRows(x);
  for (Eigen::Index c = 0; c < projected.cols(); ++c) {
    const double var = projected.col(c).squaredNorm() / 3.0;
    EXPECT_NEAR(var, eigen[static_cast<std::size_t>(c)], 1e-9);
  }
}

TEST(PcaTest, RandomRetentionMatchesOracle) {
  Rng rng = MakeRng(17, 0);
  for (int trial = 0; trial < 30; ++trial) {
    RowMatrix x(12, 5);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = UniformUnit(rng) * (1 + i % 5);
    const double retention = 0.5 + 0.5 * UniformUnit(rng);
    const auto eigen = testing::JacobiEigenvalues(testing::Covariance(ToMat(x)));
    const PcaModel pca = PcaFit(x, retention);
    EXPECT_EQ(pca.output_dim(), testing::ComponentsForRetention(eigen, retention));
    EXPECT_LE(OrthonormalityError(pca.components), 1e-6);
  }
}

TEST(PcaTest, ProjectionIsIdempotentOnSubspace) {
  const auto blobs = MakeBlobs({{0, 0, 0, 0}, {4, 1, 0, 2}}, 25, 0.7, 6);
  const PcaModel pca = PcaFit(blobs.points, 0.8);
  for (Eigen::Index i = 0; i < blobs.points.rows(); ++i) {
    const Eigen::VectorXd once = pca.Project(blobs.points.row(i).transpose());
    const Eigen::VectorXd back = pca.components.transpose() * once + pca.mean;
    EXPECT_LE((pca.Project(back) - once).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(PcaTest, Errors) {
  EXPECT_THROW(PcaFit(RowMatrix::Ones(4, 3), 0.95), Error);
  EXPECT_THROW(PcaFit(RowMatrix::Random(1, 3), 0.95), Error);
  EXPECT_THROW(PcaFit(RowMatrix::Random(5, 3), 0.0), Error);
  EXPECT_THROW(PcaFit(RowMatrix::Random(5, 3), 1.5), Error);
}

TEST(FitClustersTest, AssignUsesProjectedCoordinates) {
  const auto blobs = MakeBlobs({{0, 0, 0}, {5, 5, 0}}, 30, 0.3, 8);
  const KMeansResult result = FitClusters(blobs.points, {.k = 2, .seed = 2}, 0.9);
  ASSERT_TRUE(result.model.pca.has_value());
  const RowMatrix projected = result.model.pca->ProjectRows(blobs.points);
  for (Eigen::Index i = 0; i < blobs.points.rows(); ++i) {
    const Eigen::VectorXd raw = blobs.points.row(i).transpose();
    EXPECT_EQ(Assign(result.model, raw),
              NearestCentroid(result.model.centroids, projected.row(i).transpose()));
    EXPECT_EQ(Assign(result.model, raw), result.labels[static_cast<std::size_t>(i)]);
  }
}

TEST(SerializationTest, RoundTripWithAndWithoutPca) {
  const auto blobs = MakeBlobs({{0, 0, 0}, {5, 5, 0}, {0, 5, 5}}, 20, 0.3, 1);
  for (const std::optional<double> retention : {std::optional<double>(), std::optional<double>(0.95)}) {
    const ClusterModel model = FitClusters(blobs.points, {.k = 3, .seed = 5}, retention).model;
    std::stringstream buffer;
    WriteClusterModel(model, buffer);
    const std::string text = buffer.str();
    const std::string header = text.substr(0, text.find('\n'));
    EXPECT_EQ(header.back(), retention ? '1' : '0');
    const ClusterModel loaded = ReadClusterModel(buffer);
    EXPECT_EQ(loaded.centroids, model.centroids);
    EXPECT_EQ(loaded.pca.has_value(), model.pca.has_value());
    for (Eigen::Index i = 0; i < blobs.points.rows(); ++i) {
      const Eigen::VectorXd raw = blobs.points.row(i).transpose();
      EXPECT_EQ(Assign(loaded, raw), Assign(model, raw));
    }
  }
}

TEST(SerializationTest, MalformedModel) {
  std::stringstream missing_rows("2 1 0\n0\n");
  EXPECT_THROW(ReadClusterModel(missing_rows), Error);
  std::stringstream bad_header("two 1 0\n0\n1\n");
  EXPECT_THROW(ReadClusterModel(bad_header), Error);
  std::stringstream one_cluster("1 1 0\n0\n");
  EXPECT_THROW(ReadClusterModel(one_cluster), Error);
}

}  // namespace
}  // namespace groundvec
