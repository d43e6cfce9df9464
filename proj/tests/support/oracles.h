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

#ifndef GROUNDVEC_TESTS_SUPPORT_ORACLES_H_
#define GROUNDVEC_TESTS_SUPPORT_ORACLES_H_

// Reference computations used only by tests. Nothing here calls into the
// library's numeric code paths; models are read only through raw rows.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "groundvec/corpus.h"
#include "groundvec/embedding.h"

namespace groundvec::testing {

using Mat = std::vector<std::vector<double>>;

// Cyclic Jacobi rotations on a symmetric matrix; eigenvalues descending.
inline std::vector<double> JacobiEigenvalues(Mat a, int sweeps = 100) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a[i][i];
  std::sort(values.rbegin(), values.rend());
  return values;
}

// Sample covariance (n - 1 denominator) with plain loops.
inline Mat Covariance(const Mat& rows) {
  const std::size_t n = rows.size(), d = rows.front().size();
  std::vector<double> mean(d, 0.0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < d; ++j) mean[j] += r[j] / static_cast<double>(n);
  Mat cov(d, std::vector<double>(d, 0.0));
  for (const auto& r : rows)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        cov[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]) / static_cast<double>(n - 1);
  return cov;
}

// Smallest component count reaching the retention fraction.
inline std::size_t ComponentsForRetention(const std::vector<double>& eigenvalues,
                                          double retention) {
  double total = 0.0;
  for (double v : eigenvalues) total += std::max(v, 0.0);
  double cumulative = 0.0;
  for (std::size_t r = 0; r < eigenvalues.size(); ++r) {
    cumulative += std::max(eigenvalues[r], 0.0);
    if (cumulative >= retention * total * (1.0 - 1e-10)) return r + 1;
  }
  return eigenvalues.size();
}

// For each positive, precision at its rank where rank(i) counts items with a
// strictly higher score or an equal score and smaller index. Summed in rank
// order.
inline double BruteForceAp(std::span<const double> scores, std::span<const int> labels) {
  const std::size_t n = scores.size();
  std::vector<std::pair<std::size_t, std::size_t>> positive_ranks;  // (rank, hits)
  for (std::size_t i = 0; i < n; ++i) {
    if (!labels[i]) continue;
    std::size_t rank = 1, hits = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const bool above = scores[j] > scores[i] || (scores[j] == scores[i] && j < i);
      if (above) {
        ++rank;
        if (labels[j]) ++hits;
      }
    }
    positive_ranks.emplace_back(rank, hits);
  }
  std::sort(positive_ranks.begin(), positive_ranks.end());
  double sum = 0.0;
  for (const auto& [rank, hits] : positive_ranks) {
    sum += static_cast<double>(hits) / static_cast<double>(rank);
  }
  return sum / static_cast<double>(positive_ranks.size());
}

// Adjusted Rand index from explicit pair enumeration.
inline double AdjustedRandIndex(std::span<const std::size_t> a,
                                std::span<const std::size_t> b) {
  const std::size_t n = a.size();
  double both = 0, only_a = 0, only_b = 0, neither = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool same_a = a[i] == a[j], same_b = b[i] == b[j];
      if (same_a && same_b) ++both;
      else if (same_a) ++only_a;
      else if (same_b) ++only_b;
      else ++neither;
    }
  }
  const double pairs = both + only_a + only_b + neither;
  const double sum_a = both + only_a, sum_b = both + only_b;
  const double expected = sum_a * sum_b / pairs;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (both - expected) / (max_index - expected);
}

// NLL of softmax(mean(input rows of window) * output)[label], plain loops.
inline double ReferenceNll(const Mat& input, const Mat& output,
                           std::span<const std::size_t> window, std::size_t label) {
  const std::size_t hidden = output.size(), classes = output.front().size();
  std::vector<double> h(hidden, 0.0);
  for (std::size_t w : window)
    for (std::size_t j = 0; j < hidden; ++j) h[j] += input[w][j];
  for (double& v : h) v /= static_cast<double>(window.size());
  std::vector<double> logits(classes, 0.0);
  for (std::size_t k = 0; k < classes; ++k)
    for (std::size_t j = 0; j < hidden; ++j) logits[k] += h[j] * output[j][k];
  const double top = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - top);
  return -(logits[label] - top - std::log(z));
}

inline double ReferenceCosine(const std::vector<double>& u, const std::vector<double>& v) {
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

// |analytic - numeric| / max(|analytic|, |numeric|, floor).
inline double RelativeError(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), floor});
}

// All-pairs re-scoring with plain loops over the raw matrix. Items with the
// same token multisets share one score, so they tie and keep database order.
inline std::vector<std::size_t> OracleRetrievalOrder(const EmbeddingModel& model, const Tuple& query,
                                     const std::vector<Tuple>& db, RoleMode mode) {
  const auto mean = [&](const TokenList& tokens) {
    std::vector<double> m(static_cast<std::size_t>(model.hidden_size()), 0.0);
    for (const auto& t : tokens) {
      const auto row = model.input().row(model.vocab().IndexOf(t));
      for (std::size_t j = 0; j < m.size(); ++j) m[j] += row(static_cast<Eigen::Index>(j)) / static_cast<double>(tokens.size());
    }
    return m;
  };
  const auto sorted = [](TokenList t) {
    std::sort(t.begin(), t.end());
    return t;
  };
  std::map<std::vector<TokenList>, double> cache;
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 0; i < db.size(); ++i) {
    std::vector<TokenList> key;
    if (mode == RoleMode::kShared) {
      key = {sorted(db[i].Tokens())};
    } else {
      for (std::size_t r = 0; r < 3; ++r) key.push_back(sorted(db[i].element(r)));
    }
    auto it = cache.find(key);
    if (it == cache.end()) {
      double s = 0.0;
      if (mode == RoleMode::kShared) {
        s = ReferenceCosine(mean(query.Tokens()), mean(db[i].Tokens()));
      } else {
        for (std::size_t r = 0; r < 3; ++r) {
          s += ReferenceCosine(mean(query.element(r)), mean(db[i].element(r)));
        }
        s /= 3.0;
      }
      it = cache.emplace(key, s).first;
    }
    scored.emplace_back(it->second, i);
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::size_t> order;
  for (const auto& [s, i] : scored) order.push_back(i);
  return order;
}

}  // namespace groundvec::testing

#endif  // GROUNDVEC_TESTS_SUPPORT_ORACLES_H_
