#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hsir/dataset_io.hpp"
#include "hsir/error.hpp"
#include "hsir/types.hpp"

namespace hsir {

enum class SynthKind { two_moons, swiss_patch, gaussian_blobs };

inline SynthKind parse_synth_kind(const std::string& s) {
  if (s == "two_moons_cube") return SynthKind::two_moons;
  if (s == "swiss_patch_cube") return SynthKind::swiss_patch;
  if (s == "gaussian_blobs_cube") return SynthKind::gaussian_blobs;
  throw ParameterError("synth: unknown kind '" + s + "'");
}

struct SynthParams {
  SynthKind kind = SynthKind::two_moons;
  Index rows = 32;
  Index cols = 32;
  Index bands = 20;
  double noise = 0.05;
  std::uint64_t seed = 0;
  int classes = 3;     // gaussian_blobs only; the manifold kinds are two-class
  int regions = 8;     // Voronoi cells forming the class layout
};

/// Synthetic labeled cube. Pixels are grouped into Voronoi regions assigned
/// to classes round-robin; every pixel carries a low-dimensional latent point
/// on its class manifold that drifts smoothly with image position. Latents are
/// lifted to `bands` channels by a fixed random orthonormal map plus i.i.d.
/// Gaussian noise of standard deviation `noise`.
inline Dataset synth_dataset(const SynthParams& p) {
  if (p.rows < 2 || p.cols < 2 || p.bands < 3) throw ParameterError("synth: need rows, cols >= 2 and bands >= 3");
  if (p.noise < 0.0) throw ParameterError("synth: noise must be >= 0");
  const int k = p.kind == SynthKind::gaussian_blobs ? p.classes : 2;
  if (k < 2) throw ParameterError("synth: need at least two classes");
  if (p.regions < k) throw ParameterError("synth: regions must be >= classes");
  const Eigen::Index latent_dim = p.kind == SynthKind::swiss_patch ? 3 : 2;

  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<std::pair<double, double>> sites(static_cast<std::size_t>(p.regions));
  for (auto& s : sites) s = {unit(rng) * static_cast<double>(p.rows), unit(rng) * static_cast<double>(p.cols)};

  Matrix lift(static_cast<Eigen::Index>(p.bands), latent_dim);
  for (Eigen::Index j = 0; j < lift.cols(); ++j)
    for (Eigen::Index i = 0; i < lift.rows(); ++i) lift(i, j) = gauss(rng);
  const Matrix q = Eigen::HouseholderQR<Matrix>(lift).householderQ() * Matrix::Identity(lift.rows(), latent_dim);

  constexpr double pi = std::numbers::pi;
  std::vector<double> values(p.rows * p.cols * p.bands);
  std::vector<std::uint16_t> labels(p.rows * p.cols);
  Vector z(latent_dim);
  for (Index r = 0; r < p.rows; ++r)
    for (Index c = 0; c < p.cols; ++c) {
      std::size_t region = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s < sites.size(); ++s) {
        const double dr = static_cast<double>(r) + 0.5 - sites[s].first;
        const double dc = static_cast<double>(c) + 0.5 - sites[s].second;
        if (dr * dr + dc * dc < best) {
          best = dr * dr + dc * dc;
          region = s;
        }
      }
      const int cls = static_cast<int>(region % static_cast<std::size_t>(k)) + 1;
      const double v = static_cast<double>(r) / static_cast<double>(p.rows - 1);
      const double h = static_cast<double>(c) / static_cast<double>(p.cols - 1);
      const double u = 0.5 * (v + h);

      switch (p.kind) {
        case SynthKind::two_moons: {
          const double t = pi * u;
          if (cls == 1)
            z << std::cos(t), std::sin(t);
          else
            z << 1.0 - std::cos(t), 0.5 - std::sin(t);
          z *= 0.14;
          break;
        }
        case SynthKind::swiss_patch: {
          const double t = 1.5 * pi * (1.0 + u + (cls == 2 ? 1.0 : 0.0));
          z << t * std::cos(t), 10.0 * (v - 0.5), t * std::sin(t);
          z /= 3.0 * pi;
          break;
        }
        case SynthKind::gaussian_blobs: {
          const double angle = 2.0 * pi * static_cast<double>(cls - 1) / static_cast<double>(k);
          z << 2.0 * std::cos(angle) + 0.5 * (v - 0.5), 2.0 * std::sin(angle) + 0.5 * (h - 0.5);
          break;
        }
      }
      const Vector spectrum = q * z;
      for (Index b = 0; b < p.bands; ++b)
        values[(r * p.cols + c) * p.bands + b] = spectrum(static_cast<Eigen::Index>(b)) + p.noise * gauss(rng);
      labels[r * p.cols + c] = static_cast<std::uint16_t>(cls);
    }
  return Dataset{HsiCube(p.rows, p.cols, p.bands, std::move(values)), LabelMap(p.rows, p.cols, std::move(labels))};
}

}  // namespace hsir
