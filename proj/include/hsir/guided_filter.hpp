#pragma once

#include <string>
#include <vector>

#include "hsir/error.hpp"
#include "hsir/jacobi.hpp"
#include "hsir/types.hpp"

namespace hsir {

struct FilterParams {
  int radius = 2;          // window side is 2*radius + 1
  double epsilon = 0.001;  // blur regularizer
  int levels = 2;          // hierarchy depth

  void validate() const {
    if (radius < 1) throw ParameterError("filter: radius must be >= 1");
    if (!(epsilon > 0.0)) throw ParameterError("filter: epsilon must be > 0");
    if (levels < 1) throw ParameterError("filter: levels must be >= 1");
  }
};

namespace detail {

/// Summed-area table with one row/column of zero padding, accumulated row-major.
class IntegralImage {
 public:
  explicit IntegralImage(const Image& img) : rows_(img.rows), cols_(img.cols), sum_((img.rows + 1) * (img.cols + 1), 0.0) {
    for (Index r = 0; r < rows_; ++r) {
      double row_sum = 0.0;
      for (Index c = 0; c < cols_; ++c) {
        row_sum += img(r, c);
        at(r + 1, c + 1) = at(r, c + 1) + row_sum;
      }
    }
  }

  // Sum over rows [r0, r1) x cols [c0, c1).
  double sum(Index r0, Index c0, Index r1, Index c1) const {
    return at(r1, c1) - at(r0, c1) - at(r1, c0) + at(r0, c0);
  }

 private:
  double& at(Index r, Index c) { return sum_[r * (cols_ + 1) + c]; }
  double at(Index r, Index c) const { return sum_[r * (cols_ + 1) + c]; }
  Index rows_, cols_;
  std::vector<double> sum_;
};

}  // namespace detail

/// Mean over the in-bounds part of the (2r+1)^2 window around every pixel.
inline Image box_mean(const Image& img, int radius) {
  const detail::IntegralImage integral(img);
  Image out(img.rows, img.cols);
  const auto r = static_cast<Index>(radius);
  for (Index i = 0; i < img.rows; ++i) {
    const Index r0 = i >= r ? i - r : 0, r1 = std::min(img.rows, i + r + 1);
    for (Index j = 0; j < img.cols; ++j) {
      const Index c0 = j >= r ? j - r : 0, c1 = std::min(img.cols, j + r + 1);
      const auto count = static_cast<double>((r1 - r0) * (c1 - c0));
      out(i, j) = integral.sum(r0, c0, r1, c1) / count;
    }
  }
  return out;
}

/// Edge-preserving filter of `input` steered by `guide`: per window the
/// ridge-regularized affine fit P ~ a I + b, then the fits of all windows
/// covering a pixel are averaged.
inline Image guided_filter(const Image& input, const Image& guide, const FilterParams& params) {
  params.validate();
  if (!input.same_shape(guide))
    throw ShapeError("guided_filter: input is " + std::to_string(input.rows) + "x" +
                     std::to_string(input.cols) + ", guide is " + std::to_string(guide.rows) + "x" +
                     std::to_string(guide.cols));
  const Index n = input.values.size();
  // Work on offset copies: the filter commutes with shifts of P and I, and a
  // constant input then stays bit-exact.
  const double p0 = input.values[0], i0 = guide.values[0];
  Image p(input.rows, input.cols), g(input.rows, input.cols);
  Image ip(input.rows, input.cols), ii(input.rows, input.cols);
  for (Index k = 0; k < n; ++k) {
    p.values[k] = input.values[k] - p0;
    g.values[k] = guide.values[k] - i0;
    ip.values[k] = g.values[k] * p.values[k];
    ii.values[k] = g.values[k] * g.values[k];
  }
  const Image mean_i = box_mean(g, params.radius);
  const Image mean_p = box_mean(p, params.radius);
  const Image mean_ip = box_mean(ip, params.radius);
  const Image mean_ii = box_mean(ii, params.radius);

  Image a(input.rows, input.cols), b(input.rows, input.cols);
  for (Index k = 0; k < n; ++k) {
    const double cov = mean_ip.values[k] - mean_i.values[k] * mean_p.values[k];
    const double var = mean_ii.values[k] - mean_i.values[k] * mean_i.values[k];
    a.values[k] = cov / (var + params.epsilon);
    b.values[k] = mean_p.values[k] - a.values[k] * mean_i.values[k];
  }
  const Image mean_a = box_mean(a, params.radius);
  const Image mean_b = box_mean(b, params.radius);

  Image out(input.rows, input.cols);
  for (Index k = 0; k < n; ++k)
    out.values[k] = mean_a.values[k] * g.values[k] + mean_b.values[k] + p0;
  return out;
}

/// First principal component of the pixel spectra, as an image.
inline Image pca_guidance(const HsiCube& cube) {
  const Index nb = cube.bands(), np = cube.pixels();
  const auto values = cube.values();
  bool constant = true;
  for (Index k = nb; k < values.size() && constant; ++k) constant = values[k] == values[k % nb];
  if (constant) throw DegenerateInputError("pca_guidance: cube has zero variance");
  const Eigen::Map<const Matrix> x(values.data(), static_cast<Eigen::Index>(nb),
                                   static_cast<Eigen::Index>(np));
  const Vector mean = x.rowwise().mean();
  const Matrix centered = x.colwise() - mean;
  const Matrix cov = centered * centered.transpose() / static_cast<double>(np);

  const SymEig eig = sym_eig_topd(cov, 1);
  const Vector proj = centered.transpose() * eig.vectors.col(0);
  return Image(cube.rows(), cube.cols(), std::vector<double>(proj.data(), proj.data() + proj.size()));
}

/// Guided-filters every band of `cube` against one guidance image.
inline HsiCube filter_bands(const HsiCube& cube, const Image& guide, const FilterParams& params) {
  std::vector<Image> bands(cube.bands());
  for (Index b = 0; b < cube.bands(); ++b) bands[b] = guided_filter(cube.band(b), guide, params);
  return HsiCube::from_bands(bands);
}

/// Hierarchical guided filtering: each level recomputes the PCA guidance of
/// the current cube and filters all bands against it. A zero-variance cube is
/// filtered against a zero guide, which leaves it unchanged.
inline HsiCube hgf(const HsiCube& cube, const FilterParams& params) {
  params.validate();
  HsiCube current = cube;
  for (int level = 0; level < params.levels; ++level) {
    Image guide;
    try {
      guide = pca_guidance(current);
    } catch (const DegenerateInputError&) {
      guide = Image(current.rows(), current.cols(), 0.0);
    }
    current = filter_bands(current, guide, params);
  }
  return current;
}

}  // namespace hsir
