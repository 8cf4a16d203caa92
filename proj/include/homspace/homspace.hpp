#pragma once

// Homogeneous-space data for G/H with H embedded block-diagonally in the
// standard module of G: the reductive split g = h + m (m = h^perp for -B),
// the normalizer algebra n_g(h), and the split m = a + p induced by an
// intermediate subgroup H < K < N_G(H).
//
// All coordinates on g are taken in the -B-orthonormal basis of the
// LieAlgebra, so -B is the Euclidean inner product on coordinate vectors.

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "homspace/errors.hpp"
#include "homspace/liealg.hpp"
#include "homspace/numkernel.hpp"

namespace homspace {

struct Block {
  Family family = Family::SO;
  int n = 0;
  int offset = 0;
};

struct BlockEmbedding {
  std::vector<Block> blocks;
};

/// A real representation of a Lie algebra on R^dim by skew matrices.
/// `factor[a]` labels the simple or abelian factor generator a belongs to.
struct Module {
  Eigen::Index dim = 0;
  std::vector<Matrix> generators;
  std::vector<int> factor;

  int factor_count() const {
    return factor.empty() ? 0 : *std::max_element(factor.begin(), factor.end()) + 1;
  }

  /// The module restricted to the invariant subspace spanned by the
  /// orthonormal columns of q.
  Module restrict(const Matrix& q) const {
    Module out{q.cols(), {}, factor};
    out.generators.reserve(generators.size());
    for (const auto& r : generators) out.generators.push_back(q.transpose() * r * q);
    return out;
  }

  double scale() const {
    double s = 1.0;
    for (const auto& r : generators) s = std::max(s, r.norm());
    return s;
  }
};

namespace detail {

inline bool block_compatible(Family ambient, Family block) {
  switch (ambient) {
    case Family::SO: return block == Family::SO;
    case Family::SU: return block == Family::SU;
    case Family::Sp: return block == Family::Sp || block == Family::U;
    case Family::U: return false;
  }
  return false;
}

inline int block_min_size(Family f) {
  switch (f) {
    case Family::SO:
    case Family::SU: return 2;
    case Family::Sp:
    case Family::U: return 1;
  }
  return 1;
}

// Orthonormal basis of span(q) built from the projections of the coordinate
// vectors e_0, e_1, ... in order. Deterministic and coordinate-aligned when
// the subspace allows it.
inline Matrix canonical_basis(const Matrix& q, double drop = 1e-8) {
  if (q.cols() == 0) return Matrix(q.rows(), 0);
  const Matrix proj = q * q.transpose();
  Matrix out = num::orthonormalize(proj, drop);
  if (out.cols() != q.cols()) {
    throw ConsistencyError("numkernel", "canonical basis lost rank (" + std::to_string(out.cols()) + " of " +
                                            std::to_string(q.cols()) + ")");
  }
  return out;
}

// Orthonormal basis of the orthogonal complement of span(q) in R^n.
inline Matrix complement_basis(const Matrix& q, Eigen::Index n) {
  const Matrix id = Matrix::Identity(n, n);
  Matrix out = num::orthonormalize(id, 1e-8, &q);
  if (out.cols() + q.cols() != n) throw ConsistencyError("numkernel", "complement has the wrong dimension");
  return out;
}

struct SubalgebraCoords {
  Matrix basis;             // columns: orthonormal coordinate vectors in g
  std::vector<int> factor;  // block index per column
};

inline void validate_embedding(const LieAlgebra& g, const BlockEmbedding& emb, const char* what) {
  std::vector<int> used(static_cast<std::size_t>(g.n()), -1);
  for (std::size_t b = 0; b < emb.blocks.size(); ++b) {
    const Block& blk = emb.blocks[b];
    const std::string name = std::string(what) + " block " + std::to_string(b) + " (" + family_name(blk.family) +
                             "(" + std::to_string(blk.n) + ") at " + std::to_string(blk.offset) + ")";
    if (!block_compatible(g.family(), blk.family)) {
      throw EmbeddingError("split", name + " is not compatible with ambient " + family_name(g.family()));
    }
    if (blk.n < block_min_size(blk.family)) throw EmbeddingError("split", name + " is below the minimum size");
    if (blk.offset < 0 || blk.offset + blk.n > g.n()) {
      throw EmbeddingError("split", name + " does not fit in the standard module of dimension " +
                                        std::to_string(g.n()));
    }
    for (int i = blk.offset; i < blk.offset + blk.n; ++i) {
      if (used[static_cast<std::size_t>(i)] >= 0) {
        throw EmbeddingError("split", name + " overlaps block " + std::to_string(used[static_cast<std::size_t>(i)]));
      }
      used[static_cast<std::size_t>(i)] = static_cast<int>(b);
    }
  }
}

inline SubalgebraCoords subalgebra_coords(const LieAlgebra& g, const BlockEmbedding& emb, const char* what) {
  validate_embedding(g, emb, what);
  std::vector<Vector> cols;
  std::vector<int> factor;
  for (std::size_t b = 0; b < emb.blocks.size(); ++b) {
    const Block& blk = emb.blocks[b];
    for (const Matrix& m : block_generators(blk.family, blk.n, blk.offset, g.n(), g.family())) {
      auto x = g.try_element(m);
      if (!x) throw EmbeddingError("split", std::string(what) + " block generator is not in g");
      cols.push_back(x->coords);
      factor.push_back(static_cast<int>(b));
    }
  }
  Matrix raw(g.dim(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) raw.col(static_cast<Eigen::Index>(k)) = cols[k];
  // Blocks are mutually orthogonal, so Gram-Schmidt keeps factor membership.
  Matrix q = num::orthonormalize(raw, 1e-10);
  if (q.cols() != raw.cols()) throw EmbeddingError("split", std::string(what) + " generators are dependent");
  return {q, factor};
}

}  // namespace detail

class ReductiveSplit {
 public:
  ReductiveSplit(std::shared_ptr<const LieAlgebra> g, BlockEmbedding emb, Matrix h_basis, std::vector<int> h_factor,
                 Matrix m_basis)
      : g_(std::move(g)),
        embedding_(std::move(emb)),
        h_basis_(std::move(h_basis)),
        h_factor_(std::move(h_factor)),
        m_basis_(std::move(m_basis)) {
    ad_h_on_m_.reserve(static_cast<std::size_t>(h_basis_.cols()));
    for (Eigen::Index j = 0; j < h_basis_.cols(); ++j) {
      ad_h_on_m_.push_back(m_basis_.transpose() * g_->ad(AlgebraElement{h_basis_.col(j)}) * m_basis_);
    }
  }

  const LieAlgebra& g() const { return *g_; }
  std::shared_ptr<const LieAlgebra> g_ptr() const { return g_; }
  const BlockEmbedding& embedding() const { return embedding_; }
  /// Columns: -B-orthonormal coordinate vectors (in g) spanning h.
  const Matrix& h_basis() const { return h_basis_; }
  const std::vector<int>& h_factor() const { return h_factor_; }
  /// Columns: -B-orthonormal coordinate vectors (in g) spanning m.
  const Matrix& m_basis() const { return m_basis_; }
  const std::vector<Matrix>& ad_h_on_m() const { return ad_h_on_m_; }

  Eigen::Index dim_g() const { return g_->dim(); }
  Eigen::Index dim_h() const { return h_basis_.cols(); }
  Eigen::Index dim_m() const { return m_basis_.cols(); }

  Module isotropy_module() const { return Module{dim_m(), ad_h_on_m_, h_factor_}; }

  AlgebraElement m_element(const Vector& m_coords) const { return AlgebraElement{m_basis_ * m_coords}; }
  Vector m_coords(const AlgebraElement& x) const { return m_basis_.transpose() * x.coords; }

  /// Norm of the h-component of ad(X)|m, i.e. how far ad(X) fails to
  /// preserve m.
  double m_leakage(const AlgebraElement& x) const {
    if (dim_h() == 0) return 0.0;
    return (h_basis_.transpose() * g_->ad(x) * m_basis_).norm();
  }

  /// ad(X) restricted to m, in the m basis. Throws when X does not preserve m.
  Matrix restricted_ad(const AlgebraElement& x, double tol = 1e-9) const {
    g_->check(x);
    const double leak = m_leakage(x);
    if (leak > tol * std::max(1.0, x.coords.norm())) {
      throw NormalizerMembershipError("reduction", "ad(X) leaks into h by " + std::to_string(leak) +
                                                       "; X is not in the normalizer of h");
    }
    return m_basis_.transpose() * g_->ad(x) * m_basis_;
  }

 private:
  std::shared_ptr<const LieAlgebra> g_;
  BlockEmbedding embedding_;
  Matrix h_basis_;
  std::vector<int> h_factor_;
  Matrix m_basis_;
  std::vector<Matrix> ad_h_on_m_;
};

/// g = h + m with m the -B-orthogonal complement of the block subalgebra h.
inline ReductiveSplit reductive_split(std::shared_ptr<const LieAlgebra> g, const BlockEmbedding& emb,
                                      const Tolerance& tol = {}) {
  auto h = detail::subalgebra_coords(*g, emb, "subgroup");
  const Eigen::Index d = g->dim();
  Matrix m = num::orthonormalize(Matrix::Identity(d, d), 1e-8, &h.basis);
  if (m.cols() + h.basis.cols() != d) throw ConsistencyError("split", "dim h + dim m != dim g");

  ReductiveSplit split(g, emb, h.basis, h.factor, m);
  for (Eigen::Index j = 0; j < split.dim_h(); ++j) {
    const double leak = split.m_leakage(AlgebraElement{split.h_basis().col(j)});
    if (leak > std::max(tol.abs, 1e-10)) {
      throw ConsistencyError("split", "[h, m] is not contained in m (residual " + std::to_string(leak) + ")");
    }
  }
  return split;
}

inline ReductiveSplit reductive_split(const LieAlgebra& g, const BlockEmbedding& emb, const Tolerance& tol = {}) {
  return reductive_split(std::make_shared<const LieAlgebra>(g), emb, tol);
}

struct NormalizerAlgebra {
  Matrix basis;               // coordinates in g, orthonormal, spans n_g(h)
  Matrix complement_in_m;     // coordinates in the m basis, spans n_g(h) intersected with m
  Matrix complement_in_g;     // the same subspace in g coordinates

  Eigen::Index dim() const { return basis.cols(); }
  AlgebraElement complement_element(Eigen::Index k) const { return AlgebraElement{complement_in_g.col(k)}; }
};

/// n_g(h) = {X : [X, h] in h}, solved as the kernel of X -> (P_m [X, H_j])_j.
inline NormalizerAlgebra normalizer_algebra(const ReductiveSplit& split, const Tolerance& tol = {}) {
  const LieAlgebra& g = split.g();
  const Eigen::Index d = g.dim(), dm = split.dim_m(), dh = split.dim_h();
  Matrix system(dm * dh, d);
  for (Eigen::Index j = 0; j < dh; ++j) {
    // [X, H_j] = -ad(H_j) X
    system.middleRows(j * dm, dm) = -split.m_basis().transpose() * g.ad(AlgebraElement{split.h_basis().col(j)});
  }
  NormalizerAlgebra out;
  out.basis = detail::canonical_basis(num::kernel_basis(system, tol));
  Matrix in_m = split.m_basis().transpose() * out.basis;
  out.complement_in_m = num::orthonormalize(in_m, 1e-8);
  if (out.complement_in_m.cols() > 0) out.complement_in_m = detail::canonical_basis(out.complement_in_m);
  out.complement_in_g = split.m_basis() * out.complement_in_m;
  if (out.complement_in_m.cols() + dh != out.dim()) {
    throw ConsistencyError("normalizer", "normalizer does not contain h");
  }
  return out;
}

/// Data of an intermediate subgroup K with h < k: a = k intersect m and
/// p = k^perp, both in m coordinates.
struct KSplit {
  BlockEmbedding embedding;
  Matrix k_basis;                  // coordinates in g
  std::vector<int> k_factor;
  Matrix a_basis;                  // m coordinates
  Matrix p_basis;                  // m coordinates
  std::vector<Matrix> ad_k_on_m;   // one per k_basis column

  Eigen::Index dim_k() const { return k_basis.cols(); }
  Eigen::Index dim_a() const { return a_basis.cols(); }
  Eigen::Index dim_p() const { return p_basis.cols(); }

  std::vector<AlgebraElement> generators() const {
    std::vector<AlgebraElement> out;
    for (Eigen::Index j = 0; j < k_basis.cols(); ++j) out.push_back(AlgebraElement{k_basis.col(j)});
    return out;
  }

  /// a as an h-module.
  Module a_module(const ReductiveSplit& split) const {
    return split.isotropy_module().restrict(a_basis);
  }

  /// p as a k-module.
  Module p_module() const {
    Module m{dim_p(), {}, k_factor};
    for (const auto& r : ad_k_on_m) m.generators.push_back(p_basis.transpose() * r * p_basis);
    return m;
  }
};

inline KSplit k_subgroup_split(const ReductiveSplit& split, const BlockEmbedding& k_emb, const Tolerance& tol = {}) {
  const LieAlgebra& g = split.g();
  auto k = detail::subalgebra_coords(g, k_emb, "K subgroup");
  const double eps = std::max(tol.abs, 1e-10);

  const Matrix& h = split.h_basis();
  if (h.cols() > 0) {
    const double outside = (h - k.basis * (k.basis.transpose() * h)).norm();
    if (outside > eps) {
      throw ContainmentError("ksplit", "h is not contained in k (residual " + std::to_string(outside) + ")");
    }
  }

  KSplit out;
  out.embedding = k_emb;
  out.k_basis = k.basis;
  out.k_factor = k.factor;
  for (Eigen::Index j = 0; j < k.basis.cols(); ++j) {
    const AlgebraElement x{k.basis.col(j)};
    const double leak = split.m_leakage(x);
    if (leak > eps) {
      throw ContainmentError("ksplit", "K is not inside the normalizer of H (leakage " + std::to_string(leak) + ")");
    }
    out.ad_k_on_m.push_back(split.m_basis().transpose() * g.ad(x) * split.m_basis());
  }

  const Matrix a_raw = num::orthonormalize(split.m_basis().transpose() * k.basis, 1e-8);
  out.a_basis = a_raw.cols() > 0 ? detail::canonical_basis(a_raw) : Matrix(split.dim_m(), 0);
  out.p_basis = detail::complement_basis(out.a_basis, split.dim_m());
  if (out.dim_a() + split.dim_h() != out.dim_k()) throw ConsistencyError("ksplit", "dim a + dim h != dim k");

  for (const auto& r : out.ad_k_on_m) {
    const double leak = (out.p_basis.transpose() * r * out.a_basis).norm();
    if (leak > eps) {
      throw InvarianceError("ksplit", "a is not ad(k)-invariant (residual " + std::to_string(leak) + ")");
    }
  }
  return out;
}

}  // namespace homspace
