#pragma once

// Cyclic Jacobi eigensolver for dense symmetric matrices.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "hsir/error.hpp"
#include "hsir/types.hpp"

namespace hsir {

struct SymEig {
  Vector values;   // descending
  Matrix vectors;  // columns, unit norm
};

namespace detail {

inline void check_symmetric(const Matrix& s, double tol = 1e-8) {
  if (s.rows() != s.cols()) throw InputError("eigensolver: matrix is not square");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol * scale)
    throw InputError("eigensolver: matrix not symmetric (max |S - S^T| = " + std::to_string(asym) + ")");
}

// Largest-magnitude component positive; the first such component wins ties.
inline void fix_sign(Eigen::Ref<Vector> v) {
  Eigen::Index arg = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(arg))) arg = i;
  if (v.size() > 0 && v(arg) < 0.0) v = -v;
}

inline void jacobi_rotate(Matrix& a, Matrix& v, Eigen::Index p, Eigen::Index q) {
  const double apq = a(p, q);
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  if (theta < 0.0) t = -t;
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const Eigen::Index n = a.rows();

  for (Eigen::Index k = 0; k < n; ++k) {
    const double akp = a(k, p), akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const double apk = a(p, k), aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = a(q, p) = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double vkp = v(k, p), vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace detail

/// Full eigendecomposition of 0.5 (S + S^T). Values descending, ties kept in
/// diagonal order.
inline SymEig sym_eig(const Matrix& s, int max_sweeps = 100) {
  detail::check_symmetric(s);
  const Eigen::Index n = s.rows();
  Matrix a = 0.5 * (s + s.transpose());
  Matrix v = Matrix::Identity(n, n);

  const double norm = a.norm();
  if (norm > 0.0) {
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      double off = 0.0;
      for (Eigen::Index q = 1; q < n; ++q)
        for (Eigen::Index p = 0; p < q; ++p) off += a(p, q) * a(p, q);
      if (std::sqrt(off) <= 1e-15 * norm) break;
      for (Eigen::Index p = 0; p < n - 1; ++p)
        for (Eigen::Index q = p + 1; q < n; ++q) {
          const double apq = std::abs(a(p, q));
          if (apq == 0.0) continue;
          // Negligible against both diagonal entries: drop without rotating.
          if (sweep > 3 && std::abs(a(p, p)) + 1e2 * apq == std::abs(a(p, p)) &&
              std::abs(a(q, q)) + 1e2 * apq == std::abs(a(q, q))) {
            a(p, q) = a(q, p) = 0.0;
            continue;
          }
          detail::jacobi_rotate(a, v, p, q);
        }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });
  SymEig out{Vector(n), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
    detail::fix_sign(out.vectors.col(k));
  }
  return out;
}

/// Leading d eigenpairs of a symmetric matrix.
inline SymEig sym_eig_topd(const Matrix& s, Index d) {
  if (d < 1 || d > static_cast<Index>(s.rows()))
    throw ParameterError("eigensolver: d=" + std::to_string(d) + " outside [1, " +
                         std::to_string(s.rows()) + "]");
  auto full = sym_eig(s);
  const auto k = static_cast<Eigen::Index>(d);
  return SymEig{full.values.head(k), full.vectors.leftCols(k)};
}

}  // namespace hsir
