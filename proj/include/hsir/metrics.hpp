#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hsir/error.hpp"
#include "hsir/types.hpp"

namespace hsir {

struct Metrics {
  std::vector<std::vector<std::int64_t>> confusion;  // [truth-1][pred-1]
  std::vector<double> per_class_accuracy;            // NaN for classes absent from truth
  double overall_accuracy = 0.0;
  double average_accuracy = 0.0;
  double kappa = 0.0;
};

/// Confusion matrix, CA, OA, AA (over classes present in `truth`) and Cohen's kappa.
inline Metrics evaluate(std::span<const int> truth, std::span<const int> predicted, int classes) {
  if (truth.size() != predicted.size())
    throw ShapeError("evaluate: " + std::to_string(truth.size()) + " truths vs " +
                     std::to_string(predicted.size()) + " predictions");
  if (classes < 1) throw ParameterError("evaluate: classes must be >= 1");
  const auto k = static_cast<std::size_t>(classes);
  Metrics m;
  m.confusion.assign(k, std::vector<std::int64_t>(k, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 1 || truth[i] > classes || predicted[i] < 1 || predicted[i] > classes)
      throw InputError("evaluate: label outside 1.." + std::to_string(classes));
    ++m.confusion[static_cast<std::size_t>(truth[i] - 1)][static_cast<std::size_t>(predicted[i] - 1)];
  }
  const auto n = static_cast<double>(truth.size());
  double diag = 0.0, chance = 0.0, aa_sum = 0.0;
  int aa_count = 0;
  m.per_class_accuracy.assign(k, std::nan(""));
  for (std::size_t c = 0; c < k; ++c) {
    double row = 0.0, col = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      row += static_cast<double>(m.confusion[c][j]);
      col += static_cast<double>(m.confusion[j][c]);
    }
    diag += static_cast<double>(m.confusion[c][c]);
    chance += row * col;
    if (row > 0.0) {
      m.per_class_accuracy[c] = static_cast<double>(m.confusion[c][c]) / row;
      aa_sum += m.per_class_accuracy[c];
      ++aa_count;
    }
  }
  if (n == 0.0) return m;
  m.overall_accuracy = diag / n;
  m.average_accuracy = aa_count > 0 ? aa_sum / aa_count : 0.0;
  const double pe = chance / (n * n);
  // p_e = 1 only when truth and prediction are one and the same class.
  m.kappa = pe < 1.0 ? (m.overall_accuracy - pe) / (1.0 - pe) : (m.overall_accuracy == 1.0 ? 1.0 : 0.0);
  return m;
}

/// RGB of class c in 1..K: hue 360 (c-1)/K degrees at full saturation and value.
inline std::array<std::uint8_t, 3> palette_color(int c, int classes) {
  const double h = 6.0 * static_cast<double>(c - 1) / static_cast<double>(classes);
  const int sector = static_cast<int>(std::floor(h)) % 6;
  const double f = h - std::floor(h);
  const auto byte = [](double x) { return static_cast<std::uint8_t>(std::lround(255.0 * x)); };
  const std::uint8_t on = 255, off = 0, up = byte(f), down = byte(1.0 - f);
  switch (sector) {
    case 0: return {on, up, off};
    case 1: return {down, on, off};
    case 2: return {off, on, up};
    case 3: return {off, down, on};
    case 4: return {up, off, on};
    default: return {on, off, down};
  }
}

/// Binary PPM (P6) of a row-major label raster; 0 renders black.
inline std::string render_map(std::span<const int> labels, Index rows, Index cols, int classes) {
  if (labels.size() != rows * cols) throw ShapeError("render_map: labels size != rows*cols");
  std::string out = "P6\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
  out.reserve(out.size() + 3 * labels.size());
  for (int l : labels) {
    if (l < 0 || l > classes)
      throw RenderError("render_map: label " + std::to_string(l) + " outside palette of " +
                        std::to_string(classes) + " classes");
    std::array<std::uint8_t, 3> rgb{0, 0, 0};
    if (l > 0) rgb = palette_color(l, classes);
    for (auto v : rgb) out.push_back(static_cast<char>(v));
  }
  return out;
}

}  // namespace hsir
