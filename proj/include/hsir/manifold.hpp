#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hsir/error.hpp"
#include "hsir/types.hpp"

namespace hsir {

struct LinearityParams {
  double theta = 0.05;  // max mean geodesic/Euclidean excess
  int k_graph = 5;
  Index min_patch = 5;

  void validate() const {
    if (!(theta > 0.0)) throw ParameterError("manifold: theta must be > 0");
    if (k_graph < 1) throw ParameterError("manifold: k_graph must be >= 1");
    if (min_patch < 2) throw ParameterError("manifold: min_patch must be >= 2");
  }
};

/// Same-class group of labeled samples; members index the labeled SampleSet.
struct Patch {
  int class_id = 0;
  std::vector<Index> members;
  Vector mean;
};

/// partner[k] is the dissimilar-class patch nearest to patch k.
using PatchPairing = std::vector<Index>;

namespace detail {

inline Matrix pairwise_distances(const Matrix& pts) {
  const Eigen::Index n = pts.cols();
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j + 1; i < n; ++i) d(i, j) = d(j, i) = (pts.col(i) - pts.col(j)).norm();
  return d;
}

}  // namespace detail

/// All-pairs shortest paths over the symmetrized k-nearest-neighbour graph of
/// the columns of `pts` (Euclidean edge weights). Disconnected pairs are +inf.
inline Matrix geodesic_matrix(const Matrix& pts, int k_graph) {
  if (k_graph < 1) throw ParameterError("geodesic_matrix: k_graph must be >= 1");
  const Eigen::Index n = pts.cols();
  const Matrix dist = detail::pairwise_distances(pts);
  const auto k = std::min<Eigen::Index>(k_graph, n - 1);

  std::vector<std::vector<std::pair<Eigen::Index, double>>> adj(static_cast<std::size_t>(n));
  std::vector<std::vector<bool>> linked(n, std::vector<bool>(n, false));
  std::vector<Eigen::Index> order;
  for (Eigen::Index i = 0; i < n; ++i) {
    order.clear();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return dist(i, a) < dist(i, b); });
    for (Eigen::Index t = 0; t < k; ++t) {
      const Eigen::Index j = order[t];
      if (!linked[i][j]) {
        linked[i][j] = linked[j][i] = true;
        adj[i].emplace_back(j, dist(i, j));
        adj[j].emplace_back(i, dist(i, j));
      }
    }
  }

  constexpr double inf = std::numeric_limits<double>::infinity();
  Matrix geo = Matrix::Constant(n, n, inf);
  using Entry = std::pair<double, Eigen::Index>;
  for (Eigen::Index s = 0; s < n; ++s) {
    auto row = geo.row(s);
    row(s) = 0.0;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    heap.emplace(0.0, s);
    while (!heap.empty()) {
      const auto [du, u] = heap.top();
      heap.pop();
      if (du > row(u)) continue;
      for (const auto& [v, w] : adj[u])
        if (du + w < row(v)) {
          row(v) = du + w;
          heap.emplace(row(v), v);
        }
    }
  }
  // Both triangles hold the same path lengths up to summation order; pin exact symmetry.
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) geo(j, i) = geo(i, j);
  return geo;
}

/// Mean over point pairs of (geodesic / Euclidean - 1); +inf when the
/// neighbour graph is disconnected. Coincident pairs count as 0.
inline double nonlinearity_degree(const Matrix& pts, int k_graph) {
  const Eigen::Index n = pts.cols();
  if (n < 2) return 0.0;
  const Matrix geo = geodesic_matrix(pts, k_graph);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::isinf(geo(i, j))) return std::numeric_limits<double>::infinity();
      const double e = (pts.col(i) - pts.col(j)).norm();
      if (e > 0.0) total += geo(i, j) / e - 1.0;
    }
  return total / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

namespace detail {

inline Matrix gather_columns(const Matrix& spectra, std::span<const Index> idx) {
  Matrix out(spectra.rows(), static_cast<Eigen::Index>(idx.size()));
  for (Index j = 0; j < idx.size(); ++j)
    out.col(static_cast<Eigen::Index>(j)) = spectra.col(static_cast<Eigen::Index>(idx[j]));
  return out;
}

inline void divide(const Matrix& spectra, std::vector<Index> members, int class_id,
                   const LinearityParams& params, std::vector<Patch>& out) {
  const Matrix pts = gather_columns(spectra, members);
  if (members.size() <= params.min_patch || nonlinearity_degree(pts, params.k_graph) <= params.theta) {
    out.push_back(Patch{class_id, std::move(members), pts.rowwise().mean()});
    return;
  }
  // Farthest pair become the poles; the first maximal pair in scan order wins.
  Eigen::Index pa = 0, pb = 1;
  double best = -1.0;
  const Eigen::Index n = pts.cols();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (pts.col(i) - pts.col(j)).squaredNorm();
      if (d > best) {
        best = d;
        pa = i;
        pb = j;
      }
    }
  std::vector<Index> left, right;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double da = (pts.col(i) - pts.col(pa)).squaredNorm();
    const double db = (pts.col(i) - pts.col(pb)).squaredNorm();
    (da <= db ? left : right).push_back(members[static_cast<Index>(i)]);
  }
  divide(spectra, std::move(left), class_id, params, out);
  divide(spectra, std::move(right), class_id, params, out);
}

}  // namespace detail

/// Top-down divisive split of one class into maximal linear patches.
/// `members` index columns of `samples`; all must carry `class_id`.
inline std::vector<Patch> hdc_mlp(const SampleSet& samples, std::vector<Index> members, int class_id,
                                  const LinearityParams& params) {
  params.validate();
  if (members.empty()) throw InputError("hdc_mlp: no samples for class " + std::to_string(class_id));
  for (Index m : members)
    if (samples.has_labels() && samples.label(m) != class_id)
      throw InputError("hdc_mlp: sample " + std::to_string(m) + " is not of class " +
                       std::to_string(class_id));
  std::sort(members.begin(), members.end());
  std::vector<Patch> out;
  detail::divide(samples.spectra, std::move(members), class_id, params, out);
  return out;
}

/// Patches for every class of a labeled SampleSet, classes in ascending order.
inline std::vector<Patch> build_patches(const SampleSet& labeled, const LinearityParams& params) {
  if (!labeled.has_labels()) throw InputError("build_patches: samples carry no labels");
  std::map<int, std::vector<Index>> by_class;
  for (Index i = 0; i < labeled.size(); ++i) by_class[labeled.label(i)].push_back(i);
  std::vector<Patch> patches;
  for (auto& [cls, members] : by_class) {
    auto part = hdc_mlp(labeled, std::move(members), cls, params);
    std::move(part.begin(), part.end(), std::back_inserter(patches));
  }
  return patches;
}

/// Directed nearest dissimilar-class pairing by patch-mean distance; ties go
/// to the lower patch index.
inline PatchPairing pair_patches(const std::vector<Patch>& patches) {
  PatchPairing partner(patches.size());
  for (Index k = 0; k < patches.size(); ++k) {
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    for (Index j = 0; j < patches.size(); ++j) {
      if (patches[j].class_id == patches[k].class_id) continue;
      const double d = (patches[k].mean - patches[j].mean).squaredNorm();
      if (!found || d < best) {
        best = d;
        partner[k] = j;
        found = true;
      }
    }
    if (!found) throw PairingError("pair_patches: only one class present");
  }
  return partner;
}

}  // namespace hsir
