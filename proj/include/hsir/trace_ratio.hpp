#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hsir/error.hpp"
#include "hsir/jacobi.hpp"
#include "hsir/scatter.hpp"
#include "hsir/types.hpp"

namespace hsir {

/// D x d projection with orthonormal columns.
struct Projection {
  Matrix matrix;
  double lambda_star = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> lambda_history;  // lambda_0, lambda_1, ...

  Index input_dim() const noexcept { return static_cast<Index>(matrix.rows()); }
  Index output_dim() const noexcept { return static_cast<Index>(matrix.cols()); }
};

struct TraceRatioParams {
  Index dims = 2;
  double tol = 1e-8;  // relative to tr(T)
  int max_iter = 100;
};

/// Numerator and denominator matrices of the trace ratio.
struct Objective {
  Matrix between;
  Matrix total;
};

/// B = B_ss, T = T_ss + gamma * X L X^T.
inline Objective assemble_objective(const ScatterPair& fused, const Matrix& penalty, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ParameterError("assemble_objective: gamma must lie in [0, 1]");
  if (penalty.rows() != fused.total.rows() || penalty.cols() != fused.total.cols())
    throw ShapeError("assemble_objective: penalty shape differs from scatter shape");
  Matrix t = fused.total + gamma * penalty;
  return Objective{fused.between, 0.5 * (t + t.transpose())};
}

/// Maximizes tr(V^T B V) / tr(V^T T V) over orthonormal D x d V by locating
/// the root of g(lambda) = sum of the top-d eigenvalues of (B - lambda T).
/// Each step takes V from the current trace difference and sets lambda to the
/// ratio it attains, which is the Newton update for g; lambda rises monotonically.
inline Projection trace_ratio_dnm(const Matrix& b, const Matrix& t, const TraceRatioParams& params) {
  if (b.rows() != b.cols() || t.rows() != t.cols() || b.rows() != t.rows())
    throw ShapeError("trace_ratio: B and T must be square and of equal size");
  if (params.dims < 1 || params.dims > static_cast<Index>(b.rows()))
    throw ParameterError("trace_ratio: d=" + std::to_string(params.dims) + " outside [1, " +
                         std::to_string(b.rows()) + "]");
  if (!(params.tol > 0.0) || params.max_iter < 1) throw ParameterError("trace_ratio: bad tol/max_iter");

  const double trace_t = t.trace();
  if (!(trace_t > 0.0))
    throw SingularDenominatorError("trace_ratio: tr(T) <= 0; increase gamma or alpha");
  const double stop = params.tol * trace_t;

  Projection out;
  double lambda = 0.0;
  out.lambda_history.push_back(lambda);
  for (int iter = 0;; ++iter) {
    const SymEig eig = sym_eig_topd(b - lambda * t, params.dims);
    const double g = eig.values.sum();
    const Matrix& v = eig.vectors;
    const double num = (v.transpose() * b * v).trace();
    const double den = (v.transpose() * t * v).trace();
    if (std::abs(g) <= stop) {
      if (den <= 1e-12 * trace_t)
        throw SingularDenominatorError("trace_ratio: tr(V^T T V) vanished; increase gamma or alpha");
      out.matrix = v;
      out.lambda_star = num / den;
      out.iterations = iter;
      out.residual = std::abs(g);
      return out;
    }
    if (iter >= params.max_iter)
      throw ConvergenceError("trace_ratio: no convergence after " + std::to_string(iter) +
                                 " iterations, |g| = " + std::to_string(std::abs(g)),
                             std::abs(g));
    if (den <= 1e-12 * trace_t)
      throw SingularDenominatorError("trace_ratio: tr(V^T T V) vanished; increase gamma or alpha");
    lambda = num / den;
    out.lambda_history.push_back(lambda);
  }
}

inline Projection trace_ratio_dnm(const Objective& obj, const TraceRatioParams& params) {
  return trace_ratio_dnm(obj.between, obj.total, params);
}

/// V^T x for every sample; coords and labels carried through.
inline SampleSet project(const SampleSet& samples, const Projection& proj) {
  if (samples.dim() != proj.input_dim())
    throw ShapeError("project: samples have dim " + std::to_string(samples.dim()) + ", projection expects " +
                     std::to_string(proj.input_dim()));
  return SampleSet(proj.matrix.transpose() * samples.spectra, samples.coords, samples.labels);
}

}  // namespace hsir
