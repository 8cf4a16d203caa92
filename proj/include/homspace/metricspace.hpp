#pragma once

// Invariant metrics on G/H as symmetric positive-definite operators on m that
// commute with ad(h). Operators are written in the m basis of the split; the
// adapted frame (m^h, then the summands) is kept alongside for block views.

#include <string>
#include <vector>

#include "homspace/errors.hpp"
#include "homspace/homspace.hpp"
#include "homspace/isotropy.hpp"
#include "homspace/numkernel.hpp"

namespace homspace {

enum class MetricLabel { PhiH, PhiK, PhiFull };

inline std::string metric_label_name(MetricLabel l) {
  switch (l) {
    case MetricLabel::PhiH: return "Phi_H";
    case MetricLabel::PhiK: return "Phi_K";
    case MetricLabel::PhiFull: return "Phi_full (identity component)";
  }
  return "?";
}

struct MetricOperator {
  Matrix matrix;   // m basis
  Vector params;   // coordinates in the originating MetricSubspace
};

struct MetricSubspace {
  MetricLabel label = MetricLabel::PhiH;
  std::vector<Matrix> basis;
  std::vector<std::string> param_names;
  /// One orthonormal block per diagonal parameter (trivial lines, then summands).
  std::vector<Matrix> diagonal_blocks;
  /// Index of the summand class of each diagonal block, -1 for trivial lines.
  std::vector<int> block_class;

  Eigen::Index dim() const { return static_cast<Eigen::Index>(basis.size()); }
  Eigen::Index module_dim() const { return diagonal_blocks.empty() ? 0 : diagonal_blocks.front().rows(); }

  /// Columns: adapted orthonormal frame of m.
  Matrix frame() const {
    Eigen::Index cols = 0;
    for (const auto& b : diagonal_blocks) cols += b.cols();
    Matrix f(module_dim(), cols);
    Eigen::Index c = 0;
    for (const auto& b : diagonal_blocks) {
      f.middleCols(c, b.cols()) = b;
      c += b.cols();
    }
    return f;
  }
};

/// Symmetric-commutant basis of End_H(m) organized by the isotypic report:
/// diagonal projectors x_i first, then trivial-block cross terms, then one
/// operator per equivalent pair (i, j) and End basis element u.
inline MetricSubspace metric_space_basis(const IsotypicReport& report, const CommutantBasis& comm) {
  const Eigen::Index d = report.module_dim;
  if (!comm.operators.empty() && comm.operators.front().rows() != d) {
    throw DimensionError("metricspace", "commutant and report describe modules of different dimension");
  }
  MetricSubspace out;
  out.label = MetricLabel::PhiH;
  out.diagonal_blocks = report.diagonal_blocks();
  for (Eigen::Index k = 0; k < report.trivial_dim(); ++k) out.block_class.push_back(-1);
  for (const auto& s : report.summands) out.block_class.push_back(s.cls);

  for (std::size_t i = 0; i < out.diagonal_blocks.size(); ++i) {
    const Matrix& q = out.diagonal_blocks[i];
    out.basis.push_back(q * q.transpose());
    out.param_names.push_back("x" + std::to_string(i + 1));
  }
  const Matrix& t = report.trivial_basis;
  for (Eigen::Index a = 0; a < t.cols(); ++a)
    for (Eigen::Index b = a + 1; b < t.cols(); ++b) {
      out.basis.push_back(t.col(a) * t.col(b).transpose() + t.col(b) * t.col(a).transpose());
      out.param_names.push_back("y" + std::to_string(a + 1) + "_" + std::to_string(b + 1));
    }
  const auto offset = static_cast<int>(report.trivial_dim());
  for (const auto& cls : report.classes) {
    for (std::size_t p = 0; p < cls.members.size(); ++p)
      for (std::size_t q = p + 1; q < cls.members.size(); ++q) {
        const Matrix& bi = report.summands[static_cast<std::size_t>(cls.members[p])].basis;
        const Matrix& bj = report.summands[static_cast<std::size_t>(cls.members[q])].basis;
        for (std::size_t u = 0; u < cls.end_basis.size(); ++u) {
          const Matrix x = bi * cls.end_basis[u] * bj.transpose();
          out.basis.push_back(x + x.transpose());
          std::string name = "alpha" + std::to_string(offset + cls.members[p] + 1) + "_" +
                             std::to_string(offset + cls.members[q] + 1);
          if (u > 0) name += "_u" + std::to_string(u);
          out.param_names.push_back(name);
        }
      }
  }
  if (out.dim() != comm.sym_dim()) {
    throw ConsistencyError("metricspace", "structured basis has " + std::to_string(out.dim()) +
                                              " elements but the symmetric commutant has dimension " +
                                              std::to_string(comm.sym_dim()));
  }
  return out;
}

inline double commutation_residual(const Matrix& a, const std::vector<Matrix>& generators) {
  double worst = 0.0;
  for (const auto& r : generators) worst = std::max(worst, num::max_abs(a * r - r * a));
  return worst;
}

/// Elements of `space` commuting with ad(X)|m for each X in `generators`.
inline MetricSubspace fixed_set_under_K(const MetricSubspace& space, const ReductiveSplit& split,
                                        const std::vector<AlgebraElement>& generators,
                                        MetricLabel label = MetricLabel::PhiK, const Tolerance& tol = {}) {
  std::vector<Matrix> rs;
  double ref = 1.0;
  for (const auto& x : generators) {
    const double leak = split.m_leakage(x);
    if (leak > std::max(tol.abs, 1e-10) * std::max(1.0, x.coords.norm())) {
      throw ContainmentError("metricspace", "generator is not in the normalizer of h (leakage " +
                                                std::to_string(leak) + ")");
    }
    rs.push_back(split.m_basis().transpose() * split.g().ad(x) * split.m_basis());
    ref = std::max(ref, rs.back().norm());
  }
  MetricSubspace out = space;
  out.label = label;
  if (rs.empty() || space.basis.empty()) return out;

  const Eigen::Index d = space.module_dim();
  Matrix sys(static_cast<Eigen::Index>(rs.size()) * d * d, space.dim());
  for (Eigen::Index c = 0; c < space.dim(); ++c) {
    const Matrix& b = space.basis[static_cast<std::size_t>(c)];
    for (std::size_t k = 0; k < rs.size(); ++k) {
      const Matrix com = b * rs[k] - rs[k] * b;
      sys.block(static_cast<Eigen::Index>(k) * d * d, c, d * d, 1) = Eigen::Map<const Vector>(com.data(), d * d);
    }
  }
  Matrix ker = num::kernel_basis(sys, tol, ref);
  out.basis.clear();
  out.param_names.clear();
  if (ker.cols() == 0) return out;
  ker = detail::canonical_basis(ker);
  for (Eigen::Index k = 0; k < ker.cols(); ++k) {
    Matrix a = Matrix::Zero(d, d);
    Eigen::Index support = 0, last = 0;
    for (Eigen::Index c = 0; c < space.dim(); ++c) {
      if (std::abs(ker(c, k)) < 1e-12) continue;
      a += ker(c, k) * space.basis[static_cast<std::size_t>(c)];
      ++support;
      last = c;
    }
    if (support == 1) {
      a /= ker(last, k);
      out.param_names.push_back(space.param_names[static_cast<std::size_t>(last)]);
    } else {
      out.param_names.push_back("z" + std::to_string(k + 1));
    }
    out.basis.push_back(a);
  }
  return out;
}

/// Sum of params[i] * basis[i]; throws when not positive definite.
inline MetricOperator assemble_metric(const MetricSubspace& space, const Vector& params, const Tolerance& tol = {}) {
  if (params.size() != space.dim()) {
    throw DimensionError("metricspace", "expected " + std::to_string(space.dim()) + " parameters, got " +
                                            std::to_string(params.size()));
  }
  num::require_finite(params, "metric parameters");
  const Eigen::Index d = space.module_dim();
  Matrix a = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < params.size(); ++k) a += params(k) * space.basis[static_cast<std::size_t>(k)];
  a = 0.5 * (a + a.transpose());
  if (d > 0) {
    const auto eig = num::sym_eigendecompose(a, tol);
    const double smallest = eig.values(0);
    if (!(smallest > tol.abs * std::max(1.0, num::max_abs(a)))) {
      throw PositivityError("metricspace", "metric operator is not positive definite", smallest);
    }
  }
  return MetricOperator{a, params};
}

/// Coordinates of an operator in the space (least squares on the Gram system).
inline Vector metric_coordinates(const MetricSubspace& space, const Matrix& a) {
  const Eigen::Index n = space.dim();
  Matrix gram(n, n);
  Vector rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Matrix& bi = space.basis[static_cast<std::size_t>(i)];
    rhs(i) = (bi.array() * a.array()).sum();
    for (Eigen::Index j = 0; j < n; ++j) gram(i, j) = (bi.array() * space.basis[static_cast<std::size_t>(j)].array()).sum();
  }
  const auto eig = num::sym_eigendecompose(gram);
  Vector out = Vector::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (eig.values(k) <= 1e-12 * eig.values.maxCoeff()) continue;
    out += eig.vectors.col(k) * (eig.vectors.col(k).dot(rhs) / eig.values(k));
  }
  return out;
}

/// Largest entry of A outside the diagonal blocks, measured in the adapted frame.
inline double offdiagonal_norm(const MetricSubspace& space, const Matrix& a) {
  double s = 0.0;
  const auto& blocks = space.diagonal_blocks;
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = 0; j < blocks.size(); ++j)
      if (i != j) s += (blocks[i].transpose() * a * blocks[j]).squaredNorm();
  return std::sqrt(s);
}

/// True when A is a scalar on every diagonal block and zero elsewhere.
inline bool is_block_scalar(const MetricSubspace& space, const Matrix& a, double tol = 1e-9) {
  if (offdiagonal_norm(space, a) > tol) return false;
  for (const auto& q : space.diagonal_blocks) {
    const Matrix blk = q.transpose() * a * q;
    const double mean = blk.trace() / static_cast<double>(blk.rows());
    if (num::max_abs(blk - mean * Matrix::Identity(blk.rows(), blk.cols())) > tol) return false;
  }
  return true;
}

}  // namespace homspace
