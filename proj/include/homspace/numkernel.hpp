#pragma once

// Small dense real linear algebra used by the rest of the library: a cyclic
// Jacobi symmetric eigensolver, a one-sided Jacobi null-space routine and a
// scaling-and-squaring matrix exponential. Eigen is only the container here.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "homspace/errors.hpp"

namespace homspace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Tolerance {
  double rel = 1e-9;  // relative rank / zero cutoff
  double abs = 1e-9;  // absolute residual cutoff

  void validate() const {
    if (!(rel > 0.0) || !(abs > 0.0) || !std::isfinite(rel) || !std::isfinite(abs)) {
      throw ParameterError("numkernel", "tolerances must be positive and finite");
    }
  }
};

namespace num {

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw DimensionError("numkernel", std::string(what) + " has non-finite entries");
}

inline void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError("numkernel", std::string(what) + " must be square, got " + std::to_string(m.rows()) +
                                          "x" + std::to_string(m.cols()));
  }
}

struct SymEigen {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns, vectors.col(i) pairs with values(i)
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
inline SymEigen sym_eigendecompose(const Matrix& s, const Tolerance& tol = {}) {
  require_square(s, "symmetric input");
  require_finite(s, "symmetric input");
  const Eigen::Index n = s.rows();
  const double scale = std::max(max_abs(s), 1.0);
  if (max_abs(s - s.transpose()) > tol.abs * scale) {
    throw SymmetryError("numkernel", "input is not symmetric within tolerance");
  }

  Matrix a = 0.5 * (s + s.transpose());
  Matrix v = Matrix::Identity(n, n);
  constexpr double eps = std::numeric_limits<double>::epsilon();

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= eps * std::max(a.norm(), std::numeric_limits<double>::min())) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        if (std::abs(apq) < eps * 1e-3 * std::sqrt(std::abs(a(p, p) * a(q, q)))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
  SymEigen out{Vector(n), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

// Householder reduction to the square upper-triangular factor R of a tall
// matrix. Row space (hence null space) is preserved.
inline Matrix triangular_factor(Matrix a) {
  const Eigen::Index m = a.rows(), n = a.cols();
  const Eigen::Index steps = std::min(m, n);
  for (Eigen::Index k = 0; k < steps; ++k) {
    Vector x = a.col(k).tail(m - k);
    const double alpha = x.norm();
    if (alpha == 0.0) continue;
    const double beta = x(0) > 0 ? -alpha : alpha;
    x(0) -= beta;
    const double xn = x.norm();
    if (xn == 0.0) continue;
    x /= xn;
    a.bottomRightCorner(m - k, n - k) -= 2.0 * x * (x.transpose() * a.bottomRightCorner(m - k, n - k));
  }
  Matrix r = a.topRows(steps).triangularView<Eigen::Upper>();
  return r;
}

struct JacobiSvd {
  Vector singular;  // unsorted, pairs with columns of right
  Matrix right;     // orthogonal
};

// One-sided (Hestenes) Jacobi: orthogonalizes the columns of `a` by plane
// rotations accumulated in `right`.
inline JacobiSvd one_sided_jacobi(Matrix a) {
  const Eigen::Index n = a.cols();
  Matrix v = Matrix::Identity(n, n);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double alpha = a.col(i).squaredNorm();
        const double beta = a.col(j).squaredNorm();
        const double gamma = a.col(i).dot(a.col(j));
        if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        Vector ai = a.col(i);
        a.col(i) = c * ai - s * a.col(j);
        a.col(j) = s * ai + c * a.col(j);
        Vector vi = v.col(i);
        v.col(i) = c * vi - s * v.col(j);
        v.col(j) = s * vi + c * v.col(j);
      }
    }
    if (!rotated) break;
  }
  JacobiSvd out{Vector(n), std::move(v)};
  for (Eigen::Index k = 0; k < n; ++k) out.singular(k) = a.col(k).norm();
  return out;
}

/// Orthonormalizes the columns of `a` (modified Gram-Schmidt, two passes),
/// dropping columns whose residual falls below `drop` times their norm.
inline Matrix orthonormalize(const Matrix& a, double drop = 1e-9, const Matrix* against = nullptr) {
  Matrix out(a.rows(), 0);
  std::vector<Vector> cols;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    Vector v = a.col(j);
    const double n0 = v.norm();
    if (n0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (against != nullptr)
        for (Eigen::Index k = 0; k < against->cols(); ++k) v -= against->col(k).dot(v) * against->col(k);
      for (const auto& q : cols) v -= q.dot(v) * q;
    }
    const double n1 = v.norm();
    if (n1 <= drop * n0) continue;
    cols.push_back(v / n1);
  }
  out.resize(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = cols[k];
  return out;
}

/// Orthonormal basis of the null space of `m`. Singular values at or below
/// tol.rel * max(sigma_max, reference) count as zero; `reference` lets callers
/// whose system may be pure rounding noise supply the scale of its inputs.
inline Matrix kernel_basis(const Matrix& m, const Tolerance& tol = {}, double reference = 0.0) {
  require_finite(m, "kernel input");
  const Eigen::Index n = m.cols();
  if (n == 0) return Matrix(0, 0);
  if (m.rows() == 0 || max_abs(m) == 0.0) return Matrix::Identity(n, n);

  Matrix reduced = m.rows() > n ? triangular_factor(m) : m;
  const JacobiSvd svd = one_sided_jacobi(std::move(reduced));
  const double cutoff = tol.rel * std::max(svd.singular.maxCoeff(), reference);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < n; ++k)
    if (svd.singular(k) <= cutoff) keep.push_back(k);
  Matrix basis(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) basis.col(static_cast<Eigen::Index>(k)) = svd.right.col(keep[k]);
  return orthonormalize(basis, 1e-6);
}

/// Numerical rank with the same cutoff rule as `kernel_basis`.
inline Eigen::Index numerical_rank(const Matrix& m, const Tolerance& tol = {}, double reference = 0.0) {
  return m.cols() - kernel_basis(m, tol, reference).cols();
}

/// exp(t X) by scaling and squaring with a degree-18 Taylor polynomial.
inline Matrix matrix_exp(const Matrix& x, double t = 1.0) {
  require_square(x, "exponent");
  require_finite(x, "exponent");
  const Eigen::Index n = x.rows();
  Matrix id = Matrix::Identity(n, n);
  if (t == 0.0) return id;
  Matrix a = t * x;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 == 0.0) return id;
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  a /= std::ldexp(1.0, squarings);

  Matrix result = id;
  Matrix term = id;
  for (int k = 1; k <= 18; ++k) {
    term = (term * a) / static_cast<double>(k);
    result += term;
  }
  for (int k = 0; k < squarings; ++k) result = result * result;
  return result;
}

/// Groups ascending values into clusters whose consecutive gaps are <= gap.
inline std::vector<std::pair<Eigen::Index, Eigen::Index>> cluster_sorted(const Vector& values, double gap) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> out;  // [begin, end)
  Eigen::Index begin = 0;
  for (Eigen::Index k = 1; k <= values.size(); ++k) {
    if (k == values.size() || values(k) - values(k - 1) > gap) {
      out.emplace_back(begin, k);
      begin = k;
    }
  }
  return out;
}

}  // namespace num
}  // namespace homspace
