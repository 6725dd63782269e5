#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "twinvanet/rng.hpp"

namespace twinvanet {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

struct KMeansOptions {
  int k = 10;
  int max_iter = 300;
  double tol = 1e-6;  // stop when the largest centroid shift drops below
  int restarts = 10;
  std::uint64_t seed = 0;
};

template <typename Scalar>
struct KMeansModelT {
  MatrixX<Scalar> centroids;  // k x d
  std::vector<int> assignments;
  Scalar inertia = Scalar(0);
  int iterations_run = 0;
  std::uint64_t seed = 0;
  // Inertia measured at each assignment step; non-increasing by
  // construction of Lloyd's algorithm.
  std::vector<Scalar> inertia_history;
};

using KMeansModel = KMeansModelT<double>;

// Index of the nearest centroid row; ties break to the lowest index via a
// strict less-than scan.
template <typename DerivedP, typename DerivedC>
int nearest_row(const Eigen::MatrixBase<DerivedP>& point,
                const Eigen::MatrixBase<DerivedC>& centroids) {
  int best = 0;
  auto best_d = (centroids.row(0) - point).squaredNorm();
  for (int j = 1; j < centroids.rows(); ++j) {
    const auto d = (centroids.row(j) - point).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

template <typename Derived, typename DerivedC>
std::vector<int> assign_labels(const Eigen::MatrixBase<DerivedC>& centroids,
                               const Eigen::MatrixBase<Derived>& points) {
  std::vector<int> labels(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    labels[static_cast<std::size_t>(i)] = nearest_row(points.row(i), centroids);
  }
  return labels;
}

namespace detail {

// k-means++ seeding: first center uniform, then proportional to squared
// distance from the nearest chosen center.
template <typename Scalar>
MatrixX<Scalar> kmeanspp_init(const MatrixX<Scalar>& points, int k,
                              SplitMix64& rng) {
  const Eigen::Index n = points.rows();
  MatrixX<Scalar> centers(k, points.cols());
  centers.row(0) = points.row(static_cast<Eigen::Index>(
      rng.below(static_cast<std::uint64_t>(n))));
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d2(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d2(i) = (points.row(i) - centers.row(0)).squaredNorm();
  }
  for (int c = 1; c < k; ++c) {
    const Scalar total = d2.sum();
    Eigen::Index chosen = 0;
    if (total > Scalar(0)) {
      const Scalar r = static_cast<Scalar>(rng.uniform01()) * total;
      Scalar acc = Scalar(0);
      chosen = n - 1;  // guard against round-off past the end
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (acc > r) {
          chosen = i;
          break;
        }
      }
    } else {
      // All mass at the chosen centers (duplicated data); fall back to
      // uniform choice so we still return k rows.
      chosen = static_cast<Eigen::Index>(
          rng.below(static_cast<std::uint64_t>(n)));
    }
    centers.row(c) = points.row(chosen);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Scalar d = (points.row(i) - centers.row(c)).squaredNorm();
      if (d < d2(i)) d2(i) = d;
    }
  }
  return centers;
}

template <typename Scalar>
KMeansModelT<Scalar> lloyd_once(const MatrixX<Scalar>& points,
                                const KMeansOptions& opts, SplitMix64 rng) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  const int k = opts.k;

  KMeansModelT<Scalar> model;
  model.centroids = kmeanspp_init<Scalar>(points, k, rng);
  model.assignments.assign(static_cast<std::size_t>(n), 0);

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> min_d2(n);
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    // Assignment step.
    Scalar inertia = Scalar(0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int j = nearest_row(points.row(i), model.centroids);
      model.assignments[static_cast<std::size_t>(i)] = j;
      min_d2(i) = (points.row(i) - model.centroids.row(j)).squaredNorm();
      inertia += min_d2(i);
    }
    model.inertia_history.push_back(inertia);
    model.iterations_run = iter + 1;

    // Update step.
    MatrixX<Scalar> sums = MatrixX<Scalar>::Zero(k, d);
    std::vector<long> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int j = model.assignments[static_cast<std::size_t>(i)];
      sums.row(j) += points.row(i);
      ++counts[static_cast<std::size_t>(j)];
    }
    MatrixX<Scalar> next = model.centroids;
    for (int j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) {
        next.row(j) =
            sums.row(j) / Scalar(counts[static_cast<std::size_t>(j)]);
      } else {
        // Empty cluster: reseed at the point farthest from its centroid.
        Eigen::Index far = 0;
        min_d2.maxCoeff(&far);
        next.row(j) = points.row(far);
        min_d2(far) = Scalar(-1);  // don't pick the same point twice
      }
    }
    Scalar shift = Scalar(0);
    for (int j = 0; j < k; ++j) {
      const Scalar s = (next.row(j) - model.centroids.row(j)).norm();
      if (s > shift) shift = s;
    }
    model.centroids = std::move(next);
    if (shift < static_cast<Scalar>(opts.tol)) break;
  }

  // Final assignment against the final centroids.
  Scalar inertia = Scalar(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int j = nearest_row(points.row(i), model.centroids);
    model.assignments[static_cast<std::size_t>(i)] = j;
    inertia += (points.row(i) - model.centroids.row(j)).squaredNorm();
  }
  model.inertia = inertia;
  return model;
}

}  // namespace detail

// Lloyd's algorithm from k-means++ initialization, best of `restarts`
// independent runs by final inertia. Deterministic given (points, options).
template <typename Scalar>
KMeansModelT<Scalar> kmeans_fit(const MatrixX<Scalar>& points,
                                const KMeansOptions& opts = {}) {
  if (opts.k < 1) throw std::invalid_argument("k must be >= 1");
  if (points.rows() < opts.k) {
    throw std::invalid_argument(
        "kmeans needs at least k points: k=" + std::to_string(opts.k) +
        ", points=" + std::to_string(points.rows()));
  }
  const int restarts = opts.restarts < 1 ? 1 : opts.restarts;
  KMeansModelT<Scalar> best;
  bool have_best = false;
  for (int r = 0; r < restarts; ++r) {
    SplitMix64 rng(mix_seed(opts.seed, static_cast<std::uint64_t>(r)));
    KMeansModelT<Scalar> model = detail::lloyd_once(points, opts, rng);
    if (!have_best || model.inertia < best.inertia) {
      best = std::move(model);
      have_best = true;
    }
  }
  best.seed = opts.seed;
  return best;
}

}  // namespace twinvanet
