#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hsir/error.hpp"
#include "hsir/types.hpp"

namespace hsir {

/// Maps each band independently onto [0, 1]. Constant bands become zero.
inline HsiCube minmax_normalize(const HsiCube& cube) {
  const Index nb = cube.bands(), np = cube.pixels();
  const auto src = cube.values();
  std::vector<double> lo(nb, std::numeric_limits<double>::infinity());
  std::vector<double> hi(nb, -std::numeric_limits<double>::infinity());
  for (Index p = 0; p < np; ++p)
    for (Index b = 0; b < nb; ++b) {
      lo[b] = std::min(lo[b], src[p * nb + b]);
      hi[b] = std::max(hi[b], src[p * nb + b]);
    }
  std::vector<double> out(src.size());
  for (Index p = 0; p < np; ++p)
    for (Index b = 0; b < nb; ++b) {
      const double range = hi[b] - lo[b];
      // Clamp guards the last ulp so the result stays inside [0, 1].
      out[p * nb + b] = range > 0.0 ? std::clamp((src[p * nb + b] - lo[b]) / range, 0.0, 1.0) : 0.0;
    }
  return HsiCube(cube.rows(), cube.cols(), nb, std::move(out));
}

/// One sample per pixel with a nonzero label, in row-major pixel order.
inline SampleSet flatten(const HsiCube& cube, const LabelMap& labels) {
  if (cube.rows() != labels.rows() || cube.cols() != labels.cols())
    throw ShapeError("flatten: cube is " + std::to_string(cube.rows()) + "x" +
                     std::to_string(cube.cols()) + ", labels are " + std::to_string(labels.rows()) +
                     "x" + std::to_string(labels.cols()));
  std::vector<PixelCoord> coords;
  std::vector<int> ids;
  for (Index r = 0; r < cube.rows(); ++r)
    for (Index c = 0; c < cube.cols(); ++c)
      if (labels.at(r, c) > 0) {
        coords.push_back({r, c});
        ids.push_back(labels.at(r, c));
      }
  Matrix spectra(static_cast<Eigen::Index>(cube.bands()), static_cast<Eigen::Index>(coords.size()));
  for (Index i = 0; i < coords.size(); ++i) {
    const auto px = cube.pixel(coords[i].row, coords[i].col);
    for (Index b = 0; b < cube.bands(); ++b)
      spectra(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(i)) = px[b];
  }
  return SampleSet(std::move(spectra), std::move(coords), std::move(ids));
}

/// Spectra for arbitrary pixel coordinates, unlabeled.
inline SampleSet gather_pixels(const HsiCube& cube, std::vector<PixelCoord> coords) {
  Matrix spectra(static_cast<Eigen::Index>(cube.bands()), static_cast<Eigen::Index>(coords.size()));
  for (Index i = 0; i < coords.size(); ++i) {
    if (coords[i].row >= cube.rows() || coords[i].col >= cube.cols())
      throw IntegrityError("pixel (" + std::to_string(coords[i].row) + "," +
                           std::to_string(coords[i].col) + ") outside cube");
    const auto px = cube.pixel(coords[i].row, coords[i].col);
    for (Index b = 0; b < cube.bands(); ++b)
      spectra(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(i)) = px[b];
  }
  return SampleSet(std::move(spectra), std::move(coords));
}

struct SplitParams {
  double labeled_fraction = 0.10;
  Index min_per_class = 10;
  Index n_unlabeled = 2000;
  std::uint64_t seed = 0;
};

/// Per-class labeled draw of round(fraction * n) (half up), floored at min_per_class;
/// the unlabeled pool is drawn from the test remainder without stratification.
inline Split stratified_split(const SampleSet& samples, const SplitParams& p) {
  if (!samples.has_labels()) throw SplitError("split: samples carry no labels");
  if (!(p.labeled_fraction > 0.0 && p.labeled_fraction <= 1.0))
    throw ParameterError("split: labeled_fraction must lie in (0, 1]");
  if (p.min_per_class < 1) throw ParameterError("split: min_per_class must be positive");

  std::map<int, std::vector<Index>> by_class;
  for (Index i = 0; i < samples.size(); ++i) by_class[samples.label(i)].push_back(i);

  std::mt19937_64 rng(p.seed);
  Split split;
  split.seed = p.seed;
  for (auto& [cls, members] : by_class) {
    const Index n = members.size();
    if (n < p.min_per_class)
      throw SplitError("split: class " + std::to_string(cls) + " has " + std::to_string(n) +
                       " samples, fewer than min_per_class=" + std::to_string(p.min_per_class));
    auto take = static_cast<Index>(std::llround(p.labeled_fraction * static_cast<double>(n)));
    take = std::min(n, std::max(take, p.min_per_class));
    std::shuffle(members.begin(), members.end(), rng);
    split.labeled_idx.insert(split.labeled_idx.end(), members.begin(), members.begin() + take);
    split.test_idx.insert(split.test_idx.end(), members.begin() + take, members.end());
  }
  std::sort(split.labeled_idx.begin(), split.labeled_idx.end());
  std::sort(split.test_idx.begin(), split.test_idx.end());

  if (p.n_unlabeled > split.test_idx.size())
    throw SplitError("split: n_unlabeled=" + std::to_string(p.n_unlabeled) +
                     " exceeds test size " + std::to_string(split.test_idx.size()));
  auto pool = split.test_idx;
  std::shuffle(pool.begin(), pool.end(), rng);
  split.unlabeled_idx.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(p.n_unlabeled));
  std::sort(split.unlabeled_idx.begin(), split.unlabeled_idx.end());
  return split;
}

}  // namespace hsir
