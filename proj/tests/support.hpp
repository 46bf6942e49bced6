#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hsir/hsir.hpp"

namespace testing {

using hsir::Index;
using hsir::Matrix;
using hsir::Vector;

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double lo = -1.0,
                            double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

inline Matrix random_symmetric(std::mt19937_64& rng, Eigen::Index n) {
  const Matrix a = random_matrix(rng, n, n);
  return 0.5 * (a + a.transpose());
}

inline Matrix random_spd(std::mt19937_64& rng, Eigen::Index n, double shift = 0.1) {
  const Matrix a = random_matrix(rng, n, n);
  return a * a.transpose() + shift * Matrix::Identity(n, n);
}

inline Matrix random_psd(std::mt19937_64& rng, Eigen::Index n, Eigen::Index rank) {
  const Matrix a = random_matrix(rng, n, rank);
  return a * a.transpose();
}

inline Matrix random_orthogonal(std::mt19937_64& rng, Eigen::Index n, Eigen::Index cols) {
  const Matrix a = random_matrix(rng, n, cols);
  return Eigen::HouseholderQR<Matrix>(a).householderQ() * Matrix::Identity(n, cols);
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline bool symmetric_psd(const Matrix& m) {
  const double norm = std::max(1.0, max_abs(m));
  if (max_abs(m - m.transpose()) > 1e-10 * norm) return false;
  const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  return es.eigenvalues().minCoeff() >= -1e-8 * norm;
}

/// Labeled samples with the given per-class counts, coords laid out row-major on a wide grid.
inline hsir::SampleSet random_labeled(std::mt19937_64& rng, const std::vector<Index>& per_class, Eigen::Index dim,
                                      double spread = 1.0) {
  Index n = 0;
  for (Index c : per_class) n += c;
  Matrix x(dim, static_cast<Eigen::Index>(n));
  std::vector<hsir::PixelCoord> coords;
  std::vector<int> labels;
  std::normal_distribution<double> g(0.0, spread);
  Index col = 0;
  for (Index c = 0; c < per_class.size(); ++c)
    for (Index i = 0; i < per_class[c]; ++i, ++col) {
      for (Eigen::Index b = 0; b < dim; ++b) x(b, static_cast<Eigen::Index>(col)) = g(rng) + 2.0 * static_cast<double>(c);
      coords.push_back({col / 64, col % 64});
      labels.push_back(static_cast<int>(c) + 1);
    }
  return hsir::SampleSet(std::move(x), std::move(coords), std::move(labels));
}

/// Every sample its own patch, pairing from the library.
inline std::vector<hsir::Patch> patches_from_groups(const hsir::SampleSet& s, const std::vector<std::vector<Index>>& groups) {
  std::vector<hsir::Patch> out;
  for (const auto& g : groups) {
    hsir::Patch p;
    p.class_id = s.label(g.front());
    p.members = g;
    p.mean = Vector::Zero(static_cast<Eigen::Index>(s.dim()));
    for (Index m : g) p.mean += s.spectra.col(static_cast<Eigen::Index>(m));
    p.mean /= static_cast<double>(g.size());
    out.push_back(std::move(p));
  }
  return out;
}

// Oracles below work pair by pair with plain loops.

inline Matrix outer_diff(const Vector& a, const Vector& b) { return (a - b) * (a - b).transpose(); }

inline hsir::ScatterPair loop_mlsc(const hsir::SampleSet& s, const std::vector<hsir::Patch>& patches,
                                   const hsir::PatchPairing& pairing) {
  const auto d = static_cast<Eigen::Index>(s.dim());
  Matrix b = Matrix::Zero(d, d), w = Matrix::Zero(d, d);
  for (Index k = 0; k < patches.size(); ++k) {
    const auto& pk = patches[k];
    const auto& pp = patches[pairing[k]];
    const double tk = static_cast<double>(pk.members.size()), tp = static_cast<double>(pp.members.size());
    for (Index i : pk.members)
      for (Index j : pp.members)
        b += outer_diff(s.spectra.col(static_cast<Eigen::Index>(i)), s.spectra.col(static_cast<Eigen::Index>(j))) /
             (tk * tp);
    for (Index i : pk.members)
      for (Index j : pk.members)
        w += outer_diff(s.spectra.col(static_cast<Eigen::Index>(i)), s.spectra.col(static_cast<Eigen::Index>(j))) /
             (tk * tk);
  }
  return hsir::ScatterPair::make(b, w);
}

/// Neighbourhood pixels enumerated window by window with a linear duplicate scan.
inline std::vector<hsir::PixelCoord> loop_neighborhood(const hsir::Patch& p, const hsir::SampleSet& s, Index rows,
                                                       Index cols, int window) {
  std::vector<hsir::PixelCoord> out;
  const int h = window / 2;
  for (Index m : p.members) {
    const auto c = s.coords[m];
    for (int dr = -h; dr <= h; ++dr)
      for (int dc = -h; dc <= h; ++dc) {
        const long r = static_cast<long>(c.row) + dr, q = static_cast<long>(c.col) + dc;
        if (r < 0 || q < 0 || r >= static_cast<long>(rows) || q >= static_cast<long>(cols)) continue;
        const hsir::PixelCoord pc{static_cast<Index>(r), static_cast<Index>(q)};
        if (std::find(out.begin(), out.end(), pc) == out.end()) out.push_back(pc);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline Vector cube_pixel(const hsir::HsiCube& cube, hsir::PixelCoord c) {
  Vector v(static_cast<Eigen::Index>(cube.bands()));
  for (Index b = 0; b < cube.bands(); ++b) v(static_cast<Eigen::Index>(b)) = cube.at(c.row, c.col, b);
  return v;
}

inline hsir::ScatterPair loop_npmlsc(const std::vector<hsir::Patch>& patches, const hsir::PatchPairing& pairing,
                                     const hsir::SampleSet& s, const hsir::HsiCube& cube, int window,
                                     std::optional<double> kernel_width) {
  std::vector<std::vector<Vector>> hoods;
  for (const auto& p : patches) {
    std::vector<Vector> h;
    for (auto c : loop_neighborhood(p, s, cube.rows(), cube.cols(), window)) h.push_back(cube_pixel(cube, c));
    hoods.push_back(std::move(h));
  }
  // Pass 1: mean squared distance over all contributing pairs.
  double sum = 0.0, count = 0.0;
  for (Index k = 0; k < patches.size(); ++k) {
    for (const auto& a : hoods[k])
      for (const auto& b : hoods[pairing[k]]) {
        sum += (a - b).squaredNorm();
        count += 1.0;
      }
    for (Index i = 0; i < hoods[k].size(); ++i)
      for (Index j = 0; j < hoods[k].size(); ++j)
        if (i != j) {
          sum += (hoods[k][i] - hoods[k][j]).squaredNorm();
          count += 1.0;
        }
  }
  const double gw = kernel_width ? *kernel_width : (sum > 0.0 ? count / (2.0 * sum) : 0.0);
  const auto d = static_cast<Eigen::Index>(cube.bands());
  Matrix b = Matrix::Zero(d, d), w = Matrix::Zero(d, d);
  double zb = 0.0, zw = 0.0;
  for (Index k = 0; k < patches.size(); ++k) {
    for (const auto& x : hoods[k])
      for (const auto& y : hoods[pairing[k]]) {
        const double e = std::exp(-gw * (x - y).squaredNorm());
        b += e * outer_diff(x, y);
        zb += e;
      }
    for (Index i = 0; i < hoods[k].size(); ++i)
      for (Index j = 0; j < hoods[k].size(); ++j)
        if (i != j) {
          const double e = std::exp(-gw * (hoods[k][i] - hoods[k][j]).squaredNorm());
          w += e * outer_diff(hoods[k][i], hoods[k][j]);
          zw += e;
        }
  }
  if (zb > 0.0) b /= zb;
  if (zw > 0.0) w /= zw;
  return hsir::ScatterPair::make(b, w);
}

// Mean of f over the in-bounds (2r+1)^2 window at (i, j), summed directly.
template <class F>
inline double window_mean(Index rows, Index cols, Index i, Index j, int r, F f) {
  double s = 0.0;
  int n = 0;
  for (long a = static_cast<long>(i) - r; a <= static_cast<long>(i) + r; ++a)
    for (long b = static_cast<long>(j) - r; b <= static_cast<long>(j) + r; ++b) {
      if (a < 0 || b < 0 || a >= static_cast<long>(rows) || b >= static_cast<long>(cols)) continue;
      s += f(static_cast<Index>(a), static_cast<Index>(b));
      ++n;
    }
  return s / n;
}

inline hsir::Image loop_box(const hsir::Image& img, int r) {
  hsir::Image out(img.rows, img.cols);
  for (Index i = 0; i < img.rows; ++i)
    for (Index j = 0; j < img.cols; ++j)
      out(i, j) = window_mean(img.rows, img.cols, i, j, r, [&](Index a, Index b) { return img(a, b); });
  return out;
}

// Per-window affine fit, then per-pixel average over covering windows.
inline hsir::Image loop_guided(const hsir::Image& p, const hsir::Image& g, int r, double eps) {
  const Index R = p.rows, C = p.cols;
  hsir::Image a(R, C), b(R, C);
  for (Index i = 0; i < R; ++i)
    for (Index j = 0; j < C; ++j) {
      const double mi = window_mean(R, C, i, j, r, [&](Index x, Index y) { return g(x, y); });
      const double mp = window_mean(R, C, i, j, r, [&](Index x, Index y) { return p(x, y); });
      const double cov = window_mean(R, C, i, j, r, [&](Index x, Index y) { return (g(x, y) - mi) * (p(x, y) - mp); });
      const double var = window_mean(R, C, i, j, r, [&](Index x, Index y) { return (g(x, y) - mi) * (g(x, y) - mi); });
      a(i, j) = cov / (var + eps);
      b(i, j) = mp - a(i, j) * mi;
    }
  hsir::Image out(R, C);
  for (Index i = 0; i < R; ++i)
    for (Index j = 0; j < C; ++j)
      out(i, j) = window_mean(R, C, i, j, r, [&](Index x, Index y) { return a(x, y); }) * g(i, j) +
                  window_mean(R, C, i, j, r, [&](Index x, Index y) { return b(x, y); });
  return out;
}

/// All-pairs shortest paths over the symmetrized k-nearest-neighbour graph.
inline Matrix floyd_warshall(const Matrix& pts, int k) {
  const auto n = pts.cols();
  const double inf = std::numeric_limits<double>::infinity();
  Matrix d = Matrix::Constant(n, n, inf);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    std::vector<std::pair<double, Eigen::Index>> order;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) order.push_back({(pts.col(i) - pts.col(j)).norm(), j});
    std::stable_sort(order.begin(), order.end(), [](auto& a, auto& b) { return a.first < b.first; });
    for (int t = 0; t < k && t < static_cast<int>(order.size()); ++t) {
      const auto j = order[static_cast<std::size_t>(t)].second;
      const double e = order[static_cast<std::size_t>(t)].first;
      d(i, j) = std::min(d(i, j), e);
      d(j, i) = std::min(d(j, i), e);
    }
  }
  for (Eigen::Index m = 0; m < n; ++m)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (d(i, m) + d(m, j) < d(i, j)) d(i, j) = d(i, m) + d(m, j);
  return d;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("hsir_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline hsir::HsiCube random_cube(std::mt19937_64& rng, Index rows, Index cols, Index bands) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(rows * cols * bands);
  for (auto& x : v) x = u(rng);
  return hsir::HsiCube(rows, cols, bands, std::move(v));
}

inline hsir::Image random_image(std::mt19937_64& rng, Index rows, Index cols) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  hsir::Image img(rows, cols);
  for (auto& x : img.values) x = u(rng);
  return img;
}

}  // namespace testing
