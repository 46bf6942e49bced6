#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "hsir/error.hpp"
#include "hsir/types.hpp"

namespace hsir {

struct LinearTrainParams {
  double reg = 1e-3;
  int epochs = 50;
  std::uint64_t seed = 0;
};

/// One-vs-rest linear scorer: score_c(x) = weights.row(c-1) . x + bias(c-1).
struct LinearModel {
  Matrix weights;  // K x d
  Vector bias;     // K
  LinearTrainParams params;

  int classes() const noexcept { return static_cast<int>(weights.rows()); }
  Index dim() const noexcept { return static_cast<Index>(weights.cols()); }
};

/// K one-vs-rest hinge-loss classifiers with an L2 penalty, trained by
/// Pegasos-style stochastic subgradient steps (step 1 / (reg t)) over seeded
/// per-epoch shuffles. Features are standardized internally; the returned
/// weights act on raw features.
inline LinearModel train_linear_ovr(const SampleSet& train, const LinearTrainParams& params) {
  if (!train.has_labels()) throw TrainingError("train_linear_ovr: samples carry no labels");
  if (!(params.reg > 0.0) || params.epochs < 1) throw ParameterError("train_linear_ovr: bad reg/epochs");
  const int k = train.num_classes();
  {
    std::vector<bool> seen(static_cast<std::size_t>(k) + 1, false);
    for (int l : *train.labels) seen[static_cast<std::size_t>(l)] = true;
    int present = 0;
    for (int c = 1; c <= k; ++c) present += seen[static_cast<std::size_t>(c)] ? 1 : 0;
    if (present < 2) throw TrainingError("train_linear_ovr: need at least two classes");
  }
  const auto d = static_cast<Eigen::Index>(train.dim());
  const auto n = static_cast<Eigen::Index>(train.size());

  const Vector mean = train.spectra.rowwise().mean();
  Vector scale = ((train.spectra.colwise() - mean).array().square().rowwise().mean()).sqrt().matrix();
  for (Eigen::Index j = 0; j < d; ++j)
    if (!(scale(j) > 0.0)) scale(j) = 1.0;
  // Standardized features with a trailing constant column for the bias.
  Matrix z(d + 1, n);
  z.topRows(d) = (train.spectra.colwise() - mean).array().colwise() / scale.array();
  z.row(d).setOnes();

  Matrix w = Matrix::Zero(k, d + 1);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(params.seed);
  const double radius = 1.0 / std::sqrt(params.reg);
  double t = 0.0;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index i : order) {
      t += 1.0;
      const double eta = 1.0 / (params.reg * t);
      const int label = (*train.labels)[static_cast<std::size_t>(i)];
      for (int c = 0; c < k; ++c) {
        const double y = label == c + 1 ? 1.0 : -1.0;
        const double margin = y * w.row(c).dot(z.col(i));
        w.row(c) *= 1.0 - eta * params.reg;
        if (margin < 1.0) w.row(c) += eta * y * z.col(i).transpose();
        const double norm = w.row(c).norm();
        if (norm > radius) w.row(c) *= radius / norm;
      }
    }
  }

  LinearModel model;
  model.params = params;
  model.weights = w.leftCols(d).array().rowwise() / scale.transpose().array();
  model.bias = w.col(d) - model.weights * mean;
  return model;
}

/// Score matrix K x N.
inline Matrix decision_scores(const LinearModel& model, const Matrix& spectra) {
  if (static_cast<Index>(spectra.rows()) != model.dim())
    throw ShapeError("predict: samples have dim " + std::to_string(spectra.rows()) + ", model expects " +
                     std::to_string(model.dim()));
  return (model.weights * spectra).colwise() + model.bias;
}

/// argmax_c score_c(x); exact ties go to the lower class id.
inline std::vector<int> predict(const LinearModel& model, const Matrix& spectra) {
  const Matrix scores = decision_scores(model, spectra);
  std::vector<int> out(static_cast<std::size_t>(spectra.cols()));
  for (Eigen::Index i = 0; i < scores.cols(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.rows(); ++c)
      if (scores(c, i) > scores(best, i)) best = c;
    out[static_cast<std::size_t>(i)] = static_cast<int>(best) + 1;
  }
  return out;
}

inline std::vector<int> predict(const LinearModel& model, const SampleSet& samples) {
  return predict(model, samples.spectra);
}

/// Label of the nearest training sample; ties go to the lower training index.
inline std::vector<int> predict_1nn(const SampleSet& train, const Matrix& query) {
  if (!train.has_labels() || train.size() == 0) throw TrainingError("1nn: empty or unlabeled training set");
  if (query.rows() != train.spectra.rows()) throw ShapeError("1nn: dimension mismatch");
  std::vector<int> out(static_cast<std::size_t>(query.cols()));
  for (Eigen::Index q = 0; q < query.cols(); ++q) {
    Eigen::Index best = 0;
    double best_d = (train.spectra.col(0) - query.col(q)).squaredNorm();
    for (Eigen::Index i = 1; i < train.spectra.cols(); ++i) {
      const double dist = (train.spectra.col(i) - query.col(q)).squaredNorm();
      if (dist < best_d) {
        best_d = dist;
        best = i;
      }
    }
    out[static_cast<std::size_t>(q)] = train.label(static_cast<Index>(best));
  }
  return out;
}

}  // namespace hsir
