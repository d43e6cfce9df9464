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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include <Eigen/Eigenvalues>

#include "groundvec/error.h"
#include "groundvec/random.h"

namespace groundvec {
namespace {

// Eigenvalues below this fraction of the largest are treated as zero.
constexpr double kRankTolerance = 1e-12;
// Slack on the cumulative-variance comparison so that round-off does not
// demand an extra component (e.g. retention 1.0 on rank-deficient data).
constexpr double kRetentionSlack = 1e-10;

double SquaredDistance(const Eigen::Ref<const Eigen::VectorXd>& a,
                       const Eigen::Ref<const Eigen::VectorXd>& b) {
  return (a - b).squaredNorm();
}

void CheckFinite(const RowMatrix& features) {
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    if (!features.row(i).allFinite()) {
      throw Error("non-finite feature value in row " + std::to_string(i + 1));
    }
  }
}

RowMatrix KMeansPlusPlus(const RowMatrix& points, std::size_t k, Rng& rng) {
  const auto n = static_cast<std::size_t>(points.rows());
  RowMatrix centroids(static_cast<Eigen::Index>(k), points.cols());
  std::size_t first = UniformIndex(rng, n);
  centroids.row(0) = points.row(static_cast<Eigen::Index>(first));

  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) {
    nearest[i] = SquaredDistance(points.row(static_cast<Eigen::Index>(i)).transpose(),
                                 centroids.row(0).transpose());
  }
  for (std::size_t c = 1; c < k; ++c) {
    const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
    if (!(total > 0.0)) {
      throw Error("k-means: fewer than " + std::to_string(k) +
                  " distinct points");
    }
    const double target = UniformUnit(rng) * total;
    double running = 0.0;
    std::size_t chosen = n;
    for (std::size_t i = 0; i < n; ++i) {
      running += nearest[i];
      if (nearest[i] > 0.0 && running > target) {
        chosen = i;
        break;
      }
    }
    if (chosen == n) {
      // Round-off left target at the very end; take the last positive weight.
      for (std::size_t i = n; i-- > 0;) {
        if (nearest[i] > 0.0) {
          chosen = i;
          break;
        }
      }
    }
    centroids.row(static_cast<Eigen::Index>(c)) =
        points.row(static_cast<Eigen::Index>(chosen));
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(
          nearest[i],
          SquaredDistance(points.row(static_cast<Eigen::Index>(i)).transpose(),
                          centroids.row(static_cast<Eigen::Index>(c)).transpose()));
    }
  }
  return centroids;
}

std::size_t AssignAll(const RowMatrix& points, const RowMatrix& centroids,
                      std::vector<std::size_t>& labels) {
  std::size_t changed = 0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const std::size_t label = NearestCentroid(centroids, points.row(i).transpose());
    if (labels[static_cast<std::size_t>(i)] != label) {
      labels[static_cast<std::size_t>(i)] = label;
      ++changed;
    }
  }
  return changed;
}

std::vector<std::size_t> ClusterSizes(std::span<const std::size_t> labels,
                                      std::size_t k) {
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t label : labels) ++sizes[label];
  return sizes;
}

void UpdateMeans(const RowMatrix& points, std::span<const std::size_t> labels,
                 RowMatrix& centroids) {
  const auto k = static_cast<std::size_t>(centroids.rows());
  const auto sizes = ClusterSizes(labels, k);
  RowMatrix sums = RowMatrix::Zero(centroids.rows(), centroids.cols());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    sums.row(static_cast<Eigen::Index>(labels[static_cast<std::size_t>(i)])) +=
        points.row(i);
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (sizes[c] > 0) {
      centroids.row(static_cast<Eigen::Index>(c)) =
          sums.row(static_cast<Eigen::Index>(c)) / static_cast<double>(sizes[c]);
    }
  }
}

// Moves the point farthest from its own centroid into each empty cluster.
// Donor clusters keep at least one member.
void RepairEmptyClusters(const RowMatrix& points, std::vector<std::size_t>& labels,
                         RowMatrix& centroids) {
  const auto k = static_cast<std::size_t>(centroids.rows());
  auto sizes = ClusterSizes(labels, k);
  bool repaired = false;
  for (std::size_t c = 0; c < k; ++c) {
    if (sizes[c] > 0) continue;
    double worst = -1.0;
    std::size_t pick = labels.size();
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (sizes[labels[i]] < 2) continue;
      const double d = SquaredDistance(
          points.row(static_cast<Eigen::Index>(i)).transpose(),
          centroids.row(static_cast<Eigen::Index>(labels[i])).transpose());
      if (d > worst) {
        worst = d;
        pick = i;
      }
    }
    if (pick == labels.size()) throw Error("k-means: cannot repair empty cluster");
    --sizes[labels[pick]];
    labels[pick] = c;
    sizes[c] = 1;
    centroids.row(static_cast<Eigen::Index>(c)) =
        points.row(static_cast<Eigen::Index>(pick));
    repaired = true;
  }
  if (repaired) UpdateMeans(points, labels, centroids);
}

struct SingleRun {
  RowMatrix centroids;
  std::vector<std::size_t> labels;
  KMeansRun stats;
};

SingleRun RunLloyd(const RowMatrix& points, const KMeansOptions& options,
                   Rng& rng) {
  SingleRun run;
  run.centroids = KMeansPlusPlus(points, options.k, rng);
  run.labels.assign(static_cast<std::size_t>(points.rows()),
                    std::numeric_limits<std::size_t>::max());
  AssignAll(points, run.centroids, run.labels);

  for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
    UpdateMeans(points, run.labels, run.centroids);
    RepairEmptyClusters(points, run.labels, run.centroids);
    run.stats.wcss_history.push_back(Wcss(points, run.centroids, run.labels));
    run.stats.iterations = iter + 1;
    if (AssignAll(points, run.centroids, run.labels) == 0) break;
  }
  run.stats.wcss = Wcss(points, run.centroids, run.labels);
  return run;
}

void CheckDistinctCentroids(const RowMatrix& centroids) {
  for (Eigen::Index a = 0; a < centroids.rows(); ++a) {
    for (Eigen::Index b = a + 1; b < centroids.rows(); ++b) {
      if (centroids.row(a) == centroids.row(b)) {
        throw Error("k-means: centroids " + std::to_string(a) + " and " +
                    std::to_string(b) + " coincide");
      }
    }
  }
}

void AppendDouble(std::string& out, double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value,
                                       std::chars_format::general, 17);
  if (ec != std::errc()) throw Error("failed to format value");
  out.append(buf, ptr);
}

void WriteRow(std::ostream& out, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  std::string line;
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (j > 0) line.push_back(' ');
    AppendDouble(line, row(j));
  }
  line.push_back('\n');
  out << line;
}

std::vector<double> ParseRow(const std::string& line, const std::string& where) {
  std::vector<double> values;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ') ++j;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + j, v);
    if (ec != std::errc() || ptr != line.data() + j || !std::isfinite(v)) {
      throw Error(where + ": bad value '" + line.substr(i, j - i) + "'");
    }
    values.push_back(v);
    i = j;
  }
  return values;
}

}  // namespace

Eigen::VectorXd PcaModel::Project(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != mean.size()) {
    throw Error("pca: expected dimension " + std::to_string(mean.size()) +
                ", got " + std::to_string(x.size()));
  }
  return components * (x - mean);
}

RowMatrix PcaModel::ProjectRows(const RowMatrix& rows) const {
  if (rows.cols() != mean.size()) {
    throw Error("pca: expected dimension " + std::to_string(mean.size()) +
                ", got " + std::to_string(rows.cols()));
  }
  RowMatrix centered = rows.rowwise() - mean.transpose();
  return centered * components.transpose();
}

PcaModel PcaFit(const RowMatrix& features, double variance_retained) {
  if (features.rows() < 2) throw Error("pca: need at least 2 rows");
  if (!(variance_retained > 0.0 && variance_retained <= 1.0)) {
    throw Error("pca: variance retention must be in (0, 1]");
  }
  CheckFinite(features);
  bool all_same = true;
  for (Eigen::Index i = 1; i < features.rows() && all_same; ++i) {
    all_same = features.row(i) == features.row(0);
  }
  if (all_same) throw Error("pca: degenerate input, all rows identical");

  PcaModel pca;
  pca.mean = features.colwise().mean().transpose();
  const RowMatrix centered = features.rowwise() - pca.mean.transpose();
  const Eigen::MatrixXd cov = (centered.transpose() * centered) /
                              static_cast<double>(features.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error("pca: eigensolver failed");

  // Eigen returns ascending eigenvalues; walk from the top.
  const Eigen::VectorXd& values = solver.eigenvalues();
  const Eigen::Index d = values.size();
  const double largest = std::max(values(d - 1), 0.0);
  std::vector<double> kept;
  for (Eigen::Index i = d - 1; i >= 0; --i) {
    const double v = values(i);
    kept.push_back(v > kRankTolerance * largest ? v : 0.0);
  }
  const double total = std::accumulate(kept.begin(), kept.end(), 0.0);
  if (!(total > 0.0)) throw Error("pca: degenerate input, zero variance");

  std::size_t r = 0;
  double cumulative = 0.0;
  while (r < kept.size()) {
    cumulative += kept[r];
    ++r;
    if (cumulative >= variance_retained * total * (1.0 - kRetentionSlack)) break;
  }

  pca.components.resize(static_cast<Eigen::Index>(r), d);
  for (std::size_t c = 0; c < r; ++c) {
    Eigen::VectorXd v = solver.eigenvectors().col(d - 1 - static_cast<Eigen::Index>(c));
    // Sign convention: the largest-magnitude entry is positive.
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    pca.components.row(static_cast<Eigen::Index>(c)) = v.transpose();
  }
  pca.variance_retained = std::min(cumulative / total, 1.0);
  return pca;
}

std::size_t ClusterModel::input_dim() const {
  return pca ? pca->input_dim() : static_cast<std::size_t>(centroids.cols());
}

std::size_t NearestCentroid(const RowMatrix& centroids,
                            const Eigen::Ref<const Eigen::VectorXd>& point) {
  if (point.size() != centroids.cols()) {
    throw Error("assign: dimension mismatch, expected " +
                std::to_string(centroids.cols()) + ", got " +
                std::to_string(point.size()));
  }
  std::size_t best = 0;
  double best_distance = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double d = SquaredDistance(centroids.row(c).transpose(), point);
    if (d < best_distance) {
      best_distance = d;
      best = static_cast<std::size_t>(c);
    }
  }
  return best;
}

double Wcss(const RowMatrix& points, const RowMatrix& centroids,
            std::span<const std::size_t> labels) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    total += SquaredDistance(
        points.row(i).transpose(),
        centroids.row(static_cast<Eigen::Index>(labels[static_cast<std::size_t>(i)]))
            .transpose());
  }
  return total;
}

KMeansResult KMeansFit(const RowMatrix& features, const KMeansOptions& options) {
  const auto n = static_cast<std::size_t>(features.rows());
  if (options.k < 2) throw Error("k-means: K must be at least 2");
  if (options.k > n) {
    throw Error("k-means: K = " + std::to_string(options.k) +
                " exceeds the number of rows n = " + std::to_string(n));
  }
  if (options.max_iter < 1) throw Error("k-means: max_iter must be at least 1");
  if (options.restarts < 1) throw Error("k-means: restarts must be at least 1");
  CheckFinite(features);

  KMeansResult result;
  std::optional<SingleRun> best;
  for (std::size_t r = 0; r < options.restarts; ++r) {
    Rng rng = MakeRng(options.seed, Stream::kClustering, static_cast<std::uint32_t>(r));
    SingleRun run = RunLloyd(features, options, rng);
    result.runs.push_back(run.stats);
    if (!best || run.stats.wcss < best->stats.wcss) {
      result.best_restart = r;
      best = std::move(run);
    }
  }
  CheckDistinctCentroids(best->centroids);
  result.model.centroids = std::move(best->centroids);
  result.model.seed = options.seed;
  result.labels = std::move(best->labels);
  result.wcss = best->stats.wcss;
  return result;
}

KMeansResult FitClusters(const RowMatrix& features, const KMeansOptions& options,
                         std::optional<double> pca_retention) {
  if (!pca_retention) return KMeansFit(features, options);
  PcaModel pca = PcaFit(features, *pca_retention);
  KMeansResult result = KMeansFit(pca.ProjectRows(features), options);
  result.model.pca = std::move(pca);
  return result;
}

std::size_t Assign(const ClusterModel& model,
                   const Eigen::Ref<const Eigen::VectorXd>& feature) {
  if (static_cast<std::size_t>(feature.size()) != model.input_dim()) {
    throw Error("assign: dimension mismatch, expected " +
                std::to_string(model.input_dim()) + ", got " +
                std::to_string(feature.size()));
  }
  if (model.pca) return NearestCentroid(model.centroids, model.pca->Project(feature));
  return NearestCentroid(model.centroids, feature);
}

std::size_t Assign(const ClusterModel& model, std::span<const double> feature) {
  return Assign(model, Eigen::Map<const Eigen::VectorXd>(
                           feature.data(), static_cast<Eigen::Index>(feature.size())));
}

void WriteClusterModel(const ClusterModel& model, std::ostream& out) {
  out << model.centroids.rows() << ' ' << model.centroids.cols() << ' '
      << (model.pca ? 1 : 0) << '\n';
  for (Eigen::Index c = 0; c < model.centroids.rows(); ++c) {
    WriteRow(out, model.centroids.row(c));
  }
  if (model.pca) {
    WriteRow(out, model.pca->mean.transpose());
    for (Eigen::Index r = 0; r < model.pca->components.rows(); ++r) {
      WriteRow(out, model.pca->components.row(r));
    }
  }
}

void SaveClusterModel(const ClusterModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  WriteClusterModel(model, out);
  if (!out) throw Error("write failed for " + path.string());
}

ClusterModel ReadClusterModel(std::istream& in, const std::string& source) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw Error(source + ": empty cluster model");
  const auto header = ParseRow(lines[0], source + " header");
  if (header.size() != 3 || header[0] < 2 || header[1] < 1 ||
      (header[2] != 0 && header[2] != 1) || header[0] != std::floor(header[0]) ||
      header[1] != std::floor(header[1])) {
    throw Error(source + ": malformed header, expected \"K d' pca_flag\"");
  }
  const auto k = static_cast<std::size_t>(header[0]);
  const auto dim = static_cast<std::size_t>(header[1]);
  const bool has_pca = header[2] == 1;
  const std::size_t expected_lines = 1 + k + (has_pca ? 1 + dim : 0);
  if (lines.size() != expected_lines) {
    throw Error(source + ": expected " + std::to_string(expected_lines) +
                " lines, found " + std::to_string(lines.size()));
  }

  ClusterModel model;
  model.centroids.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(dim));
  for (std::size_t c = 0; c < k; ++c) {
    const auto row = ParseRow(lines[1 + c], source + " line " + std::to_string(2 + c));
    if (row.size() != dim) {
      throw Error(source + " line " + std::to_string(2 + c) +
                  ": centroid has wrong dimension");
    }
    for (std::size_t j = 0; j < dim; ++j) {
      model.centroids(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j)) = row[j];
    }
  }
  if (has_pca) {
    const std::size_t mean_line = 1 + k;
    const auto mean = ParseRow(lines[mean_line],
                               source + " line " + std::to_string(mean_line + 1));
    if (mean.empty() || mean.size() < dim) {
      throw Error(source + ": PCA mean row shorter than d'");
    }
    PcaModel pca;
    pca.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(),
                                                 static_cast<Eigen::Index>(mean.size()));
    pca.components.resize(static_cast<Eigen::Index>(dim),
                          static_cast<Eigen::Index>(mean.size()));
    for (std::size_t r = 0; r < dim; ++r) {
      const std::size_t at = mean_line + 1 + r;
      const auto row = ParseRow(lines[at], source + " line " + std::to_string(at + 1));
      if (row.size() != mean.size()) {
        throw Error(source + " line " + std::to_string(at + 1) +
                    ": PCA component has wrong dimension");
      }
      for (std::size_t j = 0; j < row.size(); ++j) {
        pca.components(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = row[j];
      }
    }
    pca.variance_retained = 1.0;  // not serialized
    model.pca = std::move(pca);
  }
  return model;
}

ClusterModel LoadClusterModel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return ReadClusterModel(in, path.string());
}

}  // namespace groundvec
