#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hsir/error.hpp"

namespace hsir {

using Index = std::size_t;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct PixelCoord {
  Index row = 0;
  Index col = 0;
  auto operator<=>(const PixelCoord&) const = default;
};

/// Single-channel raster, row-major.
struct Image {
  Index rows = 0;
  Index cols = 0;
  std::vector<double> values;

  Image() = default;
  Image(Index r, Index c, double fill = 0.0) : rows(r), cols(c), values(r * c, fill) {}
  Image(Index r, Index c, std::vector<double> v) : rows(r), cols(c), values(std::move(v)) {
    if (values.size() != rows * cols) throw ShapeError("image: values size != rows*cols");
  }

  double& operator()(Index r, Index c) { return values[r * cols + c]; }
  double operator()(Index r, Index c) const { return values[r * cols + c]; }
  bool same_shape(const Image& o) const { return rows == o.rows && cols == o.cols; }
};

/// rows x cols x bands reflectance raster stored in (row, col, band) order.
class HsiCube {
 public:
  HsiCube() = default;
  HsiCube(Index rows, Index cols, Index bands, std::vector<double> values)
      : rows_(rows), cols_(cols), bands_(bands), values_(std::move(values)) {
    if (rows_ == 0 || cols_ == 0 || bands_ == 0)
      throw ShapeError("cube: rows, cols and bands must be positive");
    if (values_.size() != rows_ * cols_ * bands_)
      throw IntegrityError("cube: expected " + std::to_string(rows_ * cols_ * bands_) +
                           " values, got " + std::to_string(values_.size()));
    for (double v : values_)
      if (!std::isfinite(v)) throw IntegrityError("cube: non-finite value");
  }

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index bands() const noexcept { return bands_; }
  Index pixels() const noexcept { return rows_ * cols_; }
  std::span<const double> values() const noexcept { return values_; }

  double at(Index r, Index c, Index b) const { return values_[(r * cols_ + c) * bands_ + b]; }
  std::span<const double> pixel(Index r, Index c) const {
    return std::span<const double>(values_).subspan((r * cols_ + c) * bands_, bands_);
  }

  Image band(Index b) const {
    Image img(rows_, cols_);
    for (Index p = 0; p < pixels(); ++p) img.values[p] = values_[p * bands_ + b];
    return img;
  }

  static HsiCube from_bands(const std::vector<Image>& bands) {
    if (bands.empty()) throw ShapeError("cube: no bands");
    const Index r = bands[0].rows, c = bands[0].cols, nb = bands.size();
    std::vector<double> v(r * c * nb);
    for (Index b = 0; b < nb; ++b) {
      if (!bands[b].same_shape(bands[0])) throw ShapeError("cube: band shapes differ");
      for (Index p = 0; p < r * c; ++p) v[p * nb + b] = bands[b].values[p];
    }
    return HsiCube(r, c, nb, std::move(v));
  }

  friend bool operator==(const HsiCube&, const HsiCube&) = default;

 private:
  Index rows_ = 0, cols_ = 0, bands_ = 0;
  std::vector<double> values_;
};

/// Ground truth raster; 0 is background, 1..K are classes.
class LabelMap {
 public:
  LabelMap() = default;
  LabelMap(Index rows, Index cols, std::vector<std::uint16_t> labels)
      : rows_(rows), cols_(cols), labels_(std::move(labels)) {
    if (labels_.size() != rows_ * cols_)
      throw IntegrityError("labels: expected " + std::to_string(rows_ * cols_) + " labels, got " +
                           std::to_string(labels_.size()));
    for (auto l : labels_) classes_ = std::max<int>(classes_, l);
    std::vector<bool> seen(classes_ + 1, false);
    for (auto l : labels_) seen[l] = true;
    for (int k = 1; k <= classes_; ++k)
      if (!seen[k]) throw IntegrityError("labels: class " + std::to_string(k) + " has no pixels");
  }

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  int classes() const noexcept { return classes_; }
  std::span<const std::uint16_t> labels() const noexcept { return labels_; }
  int at(Index r, Index c) const { return labels_[r * cols_ + c]; }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  Index rows_ = 0, cols_ = 0;
  std::vector<std::uint16_t> labels_;
  int classes_ = 0;
};

/// dim x N spectra with pixel locations and optional class ids.
struct SampleSet {
  Matrix spectra;
  std::vector<PixelCoord> coords;
  std::optional<std::vector<int>> labels;

  SampleSet() = default;
  SampleSet(Matrix s, std::vector<PixelCoord> c, std::optional<std::vector<int>> l = std::nullopt)
      : spectra(std::move(s)), coords(std::move(c)), labels(std::move(l)) {
    if (static_cast<Index>(spectra.cols()) != coords.size())
      throw ShapeError("samples: spectra columns != coords");
    if (labels && labels->size() != coords.size()) throw ShapeError("samples: labels size != coords");
    if (labels)
      for (int l : *labels)
        if (l < 1) throw IntegrityError("samples: class ids must be >= 1");
    std::set<PixelCoord> uniq(coords.begin(), coords.end());
    if (uniq.size() != coords.size()) throw IntegrityError("samples: duplicate coords");
  }

  Index size() const noexcept { return coords.size(); }
  Index dim() const noexcept { return static_cast<Index>(spectra.rows()); }
  bool has_labels() const noexcept { return labels.has_value(); }
  int label(Index i) const { return (*labels)[i]; }
  int num_classes() const {
    int k = 0;
    if (labels)
      for (int l : *labels) k = std::max(k, l);
    return k;
  }

  SampleSet subset(std::span<const Index> idx) const {
    Matrix s(spectra.rows(), static_cast<Eigen::Index>(idx.size()));
    std::vector<PixelCoord> c;
    c.reserve(idx.size());
    std::optional<std::vector<int>> l;
    if (labels) l.emplace();
    for (Index j = 0; j < idx.size(); ++j) {
      s.col(static_cast<Eigen::Index>(j)) = spectra.col(static_cast<Eigen::Index>(idx[j]));
      c.push_back(coords[idx[j]]);
      if (labels) l->push_back((*labels)[idx[j]]);
    }
    return SampleSet(std::move(s), std::move(c), std::move(l));
  }
};

/// Train/test partition of a labeled SampleSet; unlabeled_idx is drawn from test_idx.
struct Split {
  std::vector<Index> labeled_idx;
  std::vector<Index> unlabeled_idx;
  std::vector<Index> test_idx;
  std::uint64_t seed = 0;

  friend bool operator==(const Split&, const Split&) = default;
};

}  // namespace hsir
