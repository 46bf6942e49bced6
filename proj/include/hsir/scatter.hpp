#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hsir/error.hpp"
#include "hsir/manifold.hpp"
#include "hsir/preprocess.hpp"
#include "hsir/types.hpp"

namespace hsir {

/// Between/within dissimilarity matrices and their sum.
struct ScatterPair {
  Matrix between;
  Matrix within;
  Matrix total;

  static ScatterPair make(Matrix b, Matrix w) {
    if (b.rows() != w.rows() || b.cols() != w.cols()) throw ShapeError("scatter: B and W differ in shape");
    Matrix t = b + w;
    return ScatterPair{std::move(b), std::move(w), std::move(t)};
  }
  Index dim() const noexcept { return static_cast<Index>(between.rows()); }
};

struct SpatialContext {
  int window = 3;                       // odd side length
  std::optional<double> kernel_width;   // unset: 1 / (2 * mean squared pair distance)

  void validate() const {
    if (window < 3 || window % 2 == 0) throw ParameterError("scatter: window must be odd and >= 3");
    if (kernel_width && !(*kernel_width > 0.0)) throw ParameterError("scatter: kernel width must be > 0");
  }
};

namespace detail {

inline Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

struct PatchMoments {
  Vector mean;
  Matrix cov;  // population covariance
};

inline PatchMoments patch_moments(const SampleSet& samples, const Patch& patch) {
  const Matrix x = gather_columns(samples.spectra, patch.members);
  PatchMoments m;
  m.mean = x.rowwise().mean();
  const Matrix c = x.colwise() - m.mean;
  m.cov = c * c.transpose() / static_cast<double>(x.cols());
  return m;
}

}  // namespace detail

/// Spectral scaling-cut scatters over paired patches:
///   B = sum_k 1/(t_k t_k') sum_{i in S_k, j in S_k'} (x_i - x_j)(x_i - x_j)^T
///   W = sum_k 1/t_k^2      sum_{i, j in S_k}        (x_i - x_j)(x_i - x_j)^T
/// evaluated through the moment identities
///   B_k = C_k + C_k' + (mu_k - mu_k')(mu_k - mu_k')^T,  W_k = 2 C_k.
inline ScatterPair mlsc_scatter(const SampleSet& samples, const std::vector<Patch>& patches,
                                const PatchPairing& pairing) {
  if (pairing.size() != patches.size()) throw ShapeError("mlsc_scatter: pairing size != patch count");
  const auto dim = static_cast<Eigen::Index>(samples.dim());
  std::vector<detail::PatchMoments> moments;
  moments.reserve(patches.size());
  for (const auto& p : patches) {
    if (p.members.empty()) throw InputError("mlsc_scatter: empty patch");
    moments.push_back(detail::patch_moments(samples, p));
  }
  Matrix b = Matrix::Zero(dim, dim), w = Matrix::Zero(dim, dim);
  for (Index k = 0; k < patches.size(); ++k) {
    const auto& mk = moments[k];
    const auto& mp = moments.at(pairing[k]);
    const Vector diff = mk.mean - mp.mean;
    b += mk.cov + mp.cov + diff * diff.transpose();
    w += 2.0 * mk.cov;
  }
  return ScatterPair::make(detail::symmetrized(b), detail::symmetrized(w));
}

/// Shrinks B toward the centered scatter of the labeled spectra and W toward its diagonal.
inline ScatterPair regularize_spectral(const ScatterPair& pair, const SampleSet& labeled, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("regularize_spectral: alpha must lie in [0, 1]");
  if (labeled.dim() != pair.dim()) throw ShapeError("regularize_spectral: sample dim != scatter dim");
  const Matrix centered = labeled.spectra.colwise() - labeled.spectra.rowwise().mean();
  const Matrix rb_reg = centered * centered.transpose();
  const Matrix rw_reg = pair.within.diagonal().asDiagonal();
  return ScatterPair::make(detail::symmetrized((1.0 - alpha) * pair.between + alpha * rb_reg),
                           (1.0 - alpha) * pair.within + alpha * rw_reg);
}

/// Pixels of the window x window neighbourhoods around every member pixel,
/// clipped to the image, deduplicated and in row-major order. Spectra come
/// from `cube` regardless of ground truth.
inline SampleSet spatial_neighborhood(const Patch& patch, const SampleSet& samples, const HsiCube& cube,
                                      int window) {
  if (window < 1 || window % 2 == 0) throw ParameterError("spatial_neighborhood: window must be odd");
  const auto half = static_cast<long long>(window / 2);
  std::set<PixelCoord> pixels;
  for (Index m : patch.members) {
    const PixelCoord c = samples.coords.at(m);
    if (c.row >= cube.rows() || c.col >= cube.cols())
      throw IntegrityError("spatial_neighborhood: sample " + std::to_string(m) + " at (" +
                           std::to_string(c.row) + "," + std::to_string(c.col) + ") outside cube");
    const auto r = static_cast<long long>(c.row), col = static_cast<long long>(c.col);
    for (long long dr = -half; dr <= half; ++dr)
      for (long long dc = -half; dc <= half; ++dc) {
        const long long rr = r + dr, cc = col + dc;
        if (rr < 0 || cc < 0 || rr >= static_cast<long long>(cube.rows()) ||
            cc >= static_cast<long long>(cube.cols()))
          continue;
        pixels.insert({static_cast<Index>(rr), static_cast<Index>(cc)});
      }
  }
  return gather_pixels(cube, std::vector<PixelCoord>(pixels.begin(), pixels.end()));
}

namespace detail {

// Squared distances between the columns of a and b.
inline Matrix squared_distances(const Matrix& a, const Matrix& b) {
  const Matrix g = a.transpose() * b;
  Matrix d = (-2.0 * g).colwise() + a.colwise().squaredNorm().transpose();
  d.rowwise() += b.colwise().squaredNorm();
  return d.cwiseMax(0.0);
}

// sum_{i,j} w_ij (a_i - b_j)(a_i - b_j)^T
inline Matrix weighted_cross_scatter(const Matrix& a, const Matrix& b, const Matrix& w) {
  const Vector rs = w.rowwise().sum();
  const Vector cs = w.colwise().sum().transpose();
  const Matrix cross = a * w * b.transpose();
  return a * rs.asDiagonal() * a.transpose() + b * cs.asDiagonal() * b.transpose() - cross -
         cross.transpose();
}

}  // namespace detail

/// Spatial neighbouring-pixel scatters. Each pair contributes
/// eta_ij (x_i - x_j)(x_i - x_j)^T with eta_ij = d_ij / sum d over the pairs
/// of the same matrix and d_ij = exp(-gamma_w |x_i - x_j|^2).
inline ScatterPair npmlsc_scatter(const std::vector<Patch>& patches, const PatchPairing& pairing,
                                  const SampleSet& samples, const HsiCube& cube, const SpatialContext& ctx) {
  ctx.validate();
  if (pairing.size() != patches.size()) throw ShapeError("npmlsc_scatter: pairing size != patch count");
  const auto dim = static_cast<Eigen::Index>(cube.bands());

  // Neighbourhood spectra centred on the global mean of everything involved,
  // which leaves every difference x_i - x_j unchanged.
  std::vector<Matrix> hoods;
  hoods.reserve(patches.size());
  for (const auto& p : patches) {
    auto s = spatial_neighborhood(p, samples, cube, ctx.window);
    if (s.size() == 0) throw Error("npmlsc_scatter: empty neighbourhood");
    hoods.push_back(std::move(s.spectra));
  }
  Vector center = Vector::Zero(dim);
  Index count = 0;
  for (const auto& h : hoods) {
    center += h.rowwise().sum();
    count += static_cast<Index>(h.cols());
  }
  center /= static_cast<double>(count);
  for (auto& h : hoods) h.colwise() -= center;

  std::vector<Matrix> between_sq(patches.size()), within_sq(patches.size());
  double sum_sq = 0.0;
  double pairs = 0.0;
  for (Index k = 0; k < patches.size(); ++k) {
    const auto& a = hoods[k];
    const auto& b = hoods.at(pairing[k]);
    between_sq[k] = detail::squared_distances(a, b);
    within_sq[k] = detail::squared_distances(a, a);
    within_sq[k].diagonal().setZero();
    sum_sq += between_sq[k].sum() + within_sq[k].sum();
    pairs += static_cast<double>(a.cols()) * static_cast<double>(b.cols() + a.cols() - 1);
  }
  double gamma_w = 1.0;
  if (ctx.kernel_width) {
    gamma_w = *ctx.kernel_width;
  } else if (sum_sq > 0.0) {
    gamma_w = 1.0 / (2.0 * sum_sq / pairs);
  }

  Matrix b = Matrix::Zero(dim, dim), w = Matrix::Zero(dim, dim);
  double zb = 0.0, zw = 0.0;
  for (Index k = 0; k < patches.size(); ++k) {
    const auto& a = hoods[k];
    const auto& other = hoods[pairing[k]];
    const Matrix db = (-gamma_w * between_sq[k].array()).exp().matrix();
    Matrix dw = (-gamma_w * within_sq[k].array()).exp().matrix();
    dw.diagonal().setZero();
    zb += db.sum();
    zw += dw.sum();
    b += detail::weighted_cross_scatter(a, other, db);
    w += detail::weighted_cross_scatter(a, a, dw);
  }
  if (zb > 0.0) b /= zb;
  if (zw > 0.0) w /= zw;
  return ScatterPair::make(detail::symmetrized(b), detail::symmetrized(w));
}

/// beta * spectral + (1 - beta) * spatial, matrix by matrix.
inline ScatterPair fuse(const ScatterPair& spectral, const ScatterPair& spatial, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ParameterError("fuse: beta must lie in [0, 1]");
  if (spectral.dim() != spatial.dim()) throw ShapeError("fuse: scatter dimensions differ");
  return ScatterPair::make(beta * spectral.between + (1.0 - beta) * spatial.between,
                           beta * spectral.within + (1.0 - beta) * spatial.within);
}

}  // namespace hsir
