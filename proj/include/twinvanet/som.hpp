#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "twinvanet/kmeans.hpp"  // MatrixX, nearest_row
#include "twinvanet/rng.hpp"

namespace twinvanet {

struct SomOptions {
  int nodes = 10;  // 10 x 1 line of nodes
  double lr0 = 0.5;
  double sigma0 = 0.1;
  int epochs = 100;
  std::uint64_t seed = 0;
};

template <typename Scalar>
struct SomGridT {
  MatrixX<Scalar> weights;  // nodes x d
  std::uint64_t seed = 0;
};

using SomGrid = SomGridT<double>;

// Online SOM training on a 1-D grid. Per epoch the sample order is
// reshuffled by a seeded generator; learning rate and neighborhood radius
// decay exponentially: lr(t) = lr0*exp(-t/epochs), sigma(t) likewise.
// Neighborhood weight between nodes i and j is the Gaussian
// exp(-(i-j)^2 / (2*sigma^2)). Deterministic given (inputs, options).
template <typename Scalar>
SomGridT<Scalar> som_fit(const MatrixX<Scalar>& points,
                         const SomOptions& opts = {}) {
  if (points.rows() < 1) throw std::invalid_argument("som needs >= 1 point");
  if (opts.nodes < 1) throw std::invalid_argument("som needs >= 1 node");
  const Eigen::Index n = points.rows();

  SomGridT<Scalar> grid;
  grid.seed = opts.seed;
  grid.weights.resize(opts.nodes, points.cols());
  SplitMix64 init_rng(mix_seed(opts.seed, 0));
  for (Eigen::Index i = 0; i < grid.weights.rows(); ++i) {
    for (Eigen::Index j = 0; j < grid.weights.cols(); ++j) {
      grid.weights(i, j) = static_cast<Scalar>(init_rng.uniform01());
    }
  }

  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    const double frac =
        static_cast<double>(epoch) / static_cast<double>(opts.epochs);
    const Scalar lr = static_cast<Scalar>(opts.lr0 * std::exp(-frac));
    const Scalar sigma = static_cast<Scalar>(opts.sigma0 * std::exp(-frac));
    const Scalar denom = Scalar(2) * sigma * sigma;
    SplitMix64 shuffle_rng(
        mix_seed(opts.seed, 1 + static_cast<std::uint64_t>(epoch)));
    shuffle(order, shuffle_rng);
    for (const std::size_t idx : order) {
      const auto x = points.row(static_cast<Eigen::Index>(idx));
      const int bmu = nearest_row(x, grid.weights);
      for (int node = 0; node < opts.nodes; ++node) {
        const Scalar grid_d = static_cast<Scalar>(node - bmu);
        const Scalar h = std::exp(-(grid_d * grid_d) / denom);
        grid.weights.row(node) += lr * h * (x - grid.weights.row(node));
      }
    }
  }
  return grid;
}

// BMU index per input row; ties break to the lowest node index.
template <typename Scalar>
std::vector<int> som_assign(const SomGridT<Scalar>& grid,
                            const MatrixX<Scalar>& points) {
  return assign_labels(grid.weights, points);
}

}  // namespace twinvanet
