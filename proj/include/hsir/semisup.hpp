#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "hsir/error.hpp"
#include "hsir/types.hpp"

namespace hsir {

enum class EdgeWeighting { binary, heat };

/// Undirected graph on the training samples; symmetric, zero diagonal.
struct Graph {
  Matrix adjacency;
  Index size() const noexcept { return static_cast<Index>(adjacency.rows()); }
};

struct LaplacianBundle {
  Vector degree;  // diagonal of D
  Matrix laplacian;
};

/// Symmetrized k-nearest-neighbour graph over the columns of `spectra`
/// (labeled and unlabeled alike). Ties in distance go to the lower index.
/// Heat weights use exp(-|x_i - x_j|^2 / s) with s the mean squared length
/// of the selected edges.
inline Graph knn_adjacency(const Matrix& spectra, int k, EdgeWeighting weighting = EdgeWeighting::binary) {
  const Eigen::Index n = spectra.cols();
  if (k < 1) throw ParameterError("knn_adjacency: k must be >= 1");
  if (n <= k)
    throw ParameterError("knn_adjacency: need more than k=" + std::to_string(k) + " nodes, got " +
                         std::to_string(n));
  Matrix sq = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j + 1; i < n; ++i) sq(i, j) = sq(j, i) = (spectra.col(i) - spectra.col(j)).squaredNorm();

  Matrix a = Matrix::Zero(n, n);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index t = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) order[t++] = j;
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Eigen::Index x, Eigen::Index y) {
      return sq(i, x) < sq(i, y) || (sq(i, x) == sq(i, y) && x < y);
    });
    for (int m = 0; m < k; ++m) a(i, order[m]) = a(order[m], i) = 1.0;
  }

  if (weighting == EdgeWeighting::heat) {
    double total = 0.0, edges = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = j + 1; i < n; ++i)
        if (a(i, j) != 0.0) {
          total += sq(i, j);
          edges += 1.0;
        }
    const double s = total > 0.0 ? total / edges : 1.0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = j + 1; i < n; ++i)
        if (a(i, j) != 0.0) a(i, j) = a(j, i) = std::exp(-sq(i, j) / s);
  }
  return Graph{std::move(a)};
}

/// L = D - A.
inline LaplacianBundle laplacian(const Graph& g) {
  LaplacianBundle out;
  out.degree = g.adjacency.rowwise().sum();
  out.laplacian = -g.adjacency;
  out.laplacian.diagonal() += out.degree;
  return out;
}

/// X L X^T over the training spectra X (D x n).
inline Matrix semisup_penalty(const Matrix& spectra, const LaplacianBundle& bundle) {
  if (spectra.cols() != bundle.laplacian.rows())
    throw ShapeError("semisup_penalty: " + std::to_string(spectra.cols()) + " samples vs graph of " +
                     std::to_string(bundle.laplacian.rows()) + " nodes");
  const Matrix m = spectra * bundle.laplacian * spectra.transpose();
  return 0.5 * (m + m.transpose());
}

}  // namespace hsir
