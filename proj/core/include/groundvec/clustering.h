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

#ifndef GROUNDVEC_CLUSTERING_H_
#define GROUNDVEC_CLUSTERING_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "groundvec/corpus.h"

namespace groundvec {

struct PcaModel {
  Eigen::VectorXd mean;   // length d
  RowMatrix components;   // r x d, orthonormal rows, by decreasing variance
  double variance_retained = 1.0;  // explained fraction actually kept

  std::size_t input_dim() const { return static_cast<std::size_t>(mean.size()); }
  std::size_t output_dim() const {
    return static_cast<std::size_t>(components.rows());
  }

  Eigen::VectorXd Project(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  RowMatrix ProjectRows(const RowMatrix& rows) const;
};

// Keeps the smallest number of leading covariance eigenvectors whose
// cumulative explained variance reaches `variance_retained`.
// Requires n >= 2 and 0 < variance_retained <= 1; throws when all rows are
// identical.
PcaModel PcaFit(const RowMatrix& features, double variance_retained);

struct KMeansOptions {
  std::size_t k = 2;
  std::uint64_t seed = 1;
  std::size_t max_iter = 100;
  std::size_t restarts = 10;
};

// Realizes the grouping function: nearest centroid, after the optional PCA.
struct ClusterModel {
  std::optional<PcaModel> pca;
  RowMatrix centroids;  // K x d'
  std::uint64_t seed = 0;

  std::size_t num_clusters() const {
    return static_cast<std::size_t>(centroids.rows());
  }
  // Dimension expected by Assign (raw feature dimension).
  std::size_t input_dim() const;
};

struct KMeansRun {
  double wcss = 0.0;
  std::size_t iterations = 0;
  // Within-cluster sum of squares after each centroid update.
  std::vector<double> wcss_history;
};

struct KMeansResult {
  ClusterModel model;
  std::vector<std::size_t> labels;  // label of each training row
  double wcss = 0.0;
  std::size_t best_restart = 0;
  std::vector<KMeansRun> runs;  // one per restart
};

// Lloyd iterations from k-means++ seeds; the restart with the lowest WCSS
// wins. Each restart draws from its own (seed, restart) generator stream.
KMeansResult KMeansFit(const RowMatrix& features, const KMeansOptions& options);

// PCA (when retention is given) followed by KMeansFit on the projection.
KMeansResult FitClusters(const RowMatrix& features, const KMeansOptions& options,
                         std::optional<double> pca_retention);

// Index of the nearest centroid, lowest index on ties. `feature` has the raw
// dimension; PCA is applied internally.
std::size_t Assign(const ClusterModel& model,
                   const Eigen::Ref<const Eigen::VectorXd>& feature);
std::size_t Assign(const ClusterModel& model, std::span<const double> feature);

// Nearest centroid index in the already-reduced space.
std::size_t NearestCentroid(const RowMatrix& centroids,
                            const Eigen::Ref<const Eigen::VectorXd>& point);

double Wcss(const RowMatrix& points, const RowMatrix& centroids,
            std::span<const std::size_t> labels);

// "K d' pca_flag" header, K centroid rows, then (when pca_flag is 1) the mean
// row followed by d' component rows.
void WriteClusterModel(const ClusterModel& model, std::ostream& out);
void SaveClusterModel(const ClusterModel& model, const std::filesystem::path& path);
ClusterModel ReadClusterModel(std::istream& in, const std::string& source = "<stream>");
ClusterModel LoadClusterModel(const std::filesystem::path& path);

}  // namespace groundvec

#endif  // GROUNDVEC_CLUSTERING_H_
