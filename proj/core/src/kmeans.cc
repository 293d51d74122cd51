// Copyright 2026 The QRewrite Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "qrewrite/errors.h"
#include "qrewrite/index.h"

namespace qrewrite {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

struct Assignment {
  std::vector<int> cluster;
  std::vector<double> dist2;
  double objective = 0.0;
};

// Nearest centroid per point; ties go to the lower centroid index.
Assignment assign(const MatrixXd& points, const MatrixXd& centroids) {
  Assignment a;
  a.cluster.assign(static_cast<std::size_t>(points.rows()), 0);
  a.dist2.assign(static_cast<std::size_t>(points.rows()), 0.0);
  for (Index i = 0; i < points.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_c = 0;
    for (Index c = 0; c < centroids.rows(); ++c) {
      const double d = (points.row(i) - centroids.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        best_c = static_cast<int>(c);
      }
    }
    a.cluster[static_cast<std::size_t>(i)] = best_c;
    a.dist2[static_cast<std::size_t>(i)] = best;
    a.objective += best;
  }
  return a;
}

// Means of the assigned points. A cluster left empty takes the point that is
// currently farthest from its own centroid; each point is used at most once.
// Neither step can raise the objective, so the recorded sequence is
// non-increasing.
MatrixXd update(const MatrixXd& points, const Assignment& a, int n_list) {
  MatrixXd sums = MatrixXd::Zero(n_list, points.cols());
  std::vector<int> counts(static_cast<std::size_t>(n_list), 0);
  for (Index i = 0; i < points.rows(); ++i) {
    const int c = a.cluster[static_cast<std::size_t>(i)];
    sums.row(c) += points.row(i);
    ++counts[static_cast<std::size_t>(c)];
  }
  std::vector<Index> by_distance(static_cast<std::size_t>(points.rows()));
  std::iota(by_distance.begin(), by_distance.end(), Index{0});
  std::stable_sort(by_distance.begin(), by_distance.end(), [&](Index x, Index y) {
    return a.dist2[static_cast<std::size_t>(x)] > a.dist2[static_cast<std::size_t>(y)];
  });
  std::size_t next_far = 0;
  for (int c = 0; c < n_list; ++c) {
    if (counts[static_cast<std::size_t>(c)] > 0) {
      sums.row(c) /= counts[static_cast<std::size_t>(c)];
    } else {
      sums.row(c) = points.row(by_distance[next_far++]);
    }
  }
  return sums;
}

}  // namespace

PartitionStats CandidateIndex::build_partition(const PartitionParams& p) {
  const int n = static_cast<int>(entries_.size());
  const int n_list =
      p.n_list > 0 ? p.n_list : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  if (n_list < 1 || n_list > n) {
    throw ValidationError("n_list must lie in [1, " + std::to_string(n) + "], got " +
                          std::to_string(n_list));
  }
  if (p.kmeans_iters < 0) throw ValidationError("kmeans_iters must be >= 0");

  MatrixXd points(n, dim_);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < dim_; ++j) {
      points(i, j) = static_cast<double>(vectors_[static_cast<std::size_t>(i) * dim_ + j]);
    }
  }

  // Seeded init: n_list distinct entries via a partial Fisher-Yates shuffle.
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(p.seed);
  for (int i = 0; i < n_list; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(pick(rng))]);
  }
  MatrixXd centroids(n_list, dim_);
  for (int c = 0; c < n_list; ++c) centroids.row(c) = points.row(order[static_cast<std::size_t>(c)]);

  PartitionStats stats;
  Assignment a = assign(points, centroids);
  stats.objective.push_back(a.objective);
  for (int it = 0; it < p.kmeans_iters; ++it) {
    centroids = update(points, a, n_list);
    a = assign(points, centroids);
    stats.objective.push_back(a.objective);
  }

  CoarsePartition part;
  part.centroids = std::move(centroids);
  part.lists.resize(static_cast<std::size_t>(n_list));
  for (int i = 0; i < n; ++i) {
    part.lists[static_cast<std::size_t>(a.cluster[static_cast<std::size_t>(i)])].push_back(
        static_cast<std::uint32_t>(i));
  }
  partition_ = std::move(part);
  return stats;
}

}  // namespace qrewrite
