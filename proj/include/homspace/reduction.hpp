#pragma once

// The normalizer action A -> phi A phi^T on invariant metrics, with
// phi(t) = exp(t ad(X)|m) for X in n_g(h), a search for normalizer elements
// that remove off-diagonal metric parameters, and submersion metrics for
// H < K < N_G(H).

#include <cmath>
#include <string>
#include <vector>

#include "homspace/errors.hpp"
#include "homspace/homspace.hpp"
#include "homspace/isotropy.hpp"
#include "homspace/metricspace.hpp"
#include "homspace/numkernel.hpp"

namespace homspace {

struct NormalizerGenerator {
  AlgebraElement x;
  Matrix ad_m;  // ad(X)|m in the m basis (skew)

  Matrix phi(double t) const { return num::matrix_exp(ad_m, t); }
};

inline NormalizerGenerator normalizer_generator(const ReductiveSplit& split, const AlgebraElement& x,
                                                const Tolerance& tol = {}) {
  return NormalizerGenerator{x, split.restricted_ad(x, std::max(tol.abs, 1e-9))};
}

/// One generator per basis vector of n_g(h) intersected with m.
inline std::vector<NormalizerGenerator> complement_generators(const ReductiveSplit& split,
                                                              const NormalizerAlgebra& norm,
                                                              const Tolerance& tol = {}) {
  std::vector<NormalizerGenerator> out;
  for (Eigen::Index k = 0; k < norm.complement_in_g.cols(); ++k)
    out.push_back(normalizer_generator(split, norm.complement_element(k), tol));
  return out;
}

/// Ad(exp tX)|m. Checks membership of X in n_g(h) and orthogonality of the result.
inline Matrix restricted_ad(const ReductiveSplit& split, const NormalizerAlgebra& norm, const AlgebraElement& x,
                            double t, const Tolerance& tol = {}) {
  const double eps = std::max(tol.abs, 1e-9);
  if (norm.dim() > 0) {
    const Vector outside = x.coords - norm.basis * (norm.basis.transpose() * x.coords);
    if (outside.norm() > eps * std::max(1.0, x.coords.norm())) {
      throw NormalizerMembershipError("reduction", "X has a component of norm " + std::to_string(outside.norm()) +
                                                       " outside n_g(h)");
    }
  }
  const Matrix phi = num::matrix_exp(split.restricted_ad(x, eps), t);
  const double orth = num::max_abs(phi.transpose() * phi - Matrix::Identity(phi.rows(), phi.cols()));
  if (orth > eps) {
    throw ConsistencyError("reduction", "Ad(exp tX)|m is not orthogonal (residual " + std::to_string(orth) + ")");
  }
  return phi;
}

/// phi A phi^T, checked to be symmetric, ad(h)-equivariant, positive definite
/// and isospectral to A.
inline MetricOperator act(const ReductiveSplit& split, const Matrix& phi, const MetricOperator& a,
                          const Tolerance& tol = {}) {
  const Eigen::Index d = split.dim_m();
  if (phi.rows() != d || phi.cols() != d || a.matrix.rows() != d || a.matrix.cols() != d) {
    throw DimensionError("reduction", "operator sizes do not match dim m = " + std::to_string(d));
  }
  const double eps = std::max(tol.abs, 1e-9);
  const double scale = std::max(1.0, num::max_abs(a.matrix));
  Matrix out = phi * a.matrix * phi.transpose();

  if (num::max_abs(out - out.transpose()) > eps * scale) {
    throw WellDefinednessError("reduction", "transformed operator is not symmetric");
  }
  out = 0.5 * (out + out.transpose());
  const double eq = commutation_residual(out, split.ad_h_on_m());
  if (eq > eps * scale * split.isotropy_module().scale()) {
    throw WellDefinednessError("reduction", "transformed operator is not ad(h)-equivariant (residual " +
                                                std::to_string(eq) + ")");
  }
  if (d > 0) {
    const auto before = num::sym_eigendecompose(a.matrix, tol);
    const auto after = num::sym_eigendecompose(out, tol);
    if (!(after.values(0) > 0.0)) {
      throw WellDefinednessError("reduction", "transformed operator is not positive definite");
    }
    const double drift = (before.values - after.values).cwiseAbs().maxCoeff();
    if (drift > eps * scale) {
      throw WellDefinednessError("reduction", "spectrum changed by " + std::to_string(drift));
    }
  }
  return MetricOperator{out, Vector()};
}

inline MetricOperator act(const ReductiveSplit& split, const Matrix& phi, const MetricOperator& a,
                          const MetricSubspace& space, const Tolerance& tol = {}) {
  MetricOperator out = act(split, phi, a, tol);
  out.params = metric_coordinates(space, out.matrix);
  return out;
}

struct EliminationResult {
  std::vector<double> t_star;  // accumulated parameter per generator
  Matrix phi;                  // product of the applied rotations
  MetricOperator reduced;
  double residual = 0.0;       // off-diagonal norm of the reduced operator
  bool converged = false;
  int sweeps = 0;
};

namespace detail {

class OffdiagonalSearch {
 public:
  OffdiagonalSearch(const MetricSubspace& space) : frame_(space.frame()) {
    const Eigen::Index n = frame_.cols();
    block_of_.resize(static_cast<std::size_t>(n));
    Eigen::Index c = 0;
    for (std::size_t b = 0; b < space.diagonal_blocks.size(); ++b)
      for (Eigen::Index k = 0; k < space.diagonal_blocks[b].cols(); ++k) block_of_[static_cast<std::size_t>(c++)] = b;
    blocks_ = space.diagonal_blocks.size();
  }

  // Off-diagonal entries of frame^T A frame (upper triangle).
  Vector offdiag(const Matrix& a) const {
    const Matrix f = frame_.transpose() * a * frame_;
    std::vector<double> v;
    for (Eigen::Index r = 0; r < f.rows(); ++r)
      for (Eigen::Index c = r + 1; c < f.cols(); ++c)
        if (block_of_[static_cast<std::size_t>(r)] != block_of_[static_cast<std::size_t>(c)]) v.push_back(f(r, c));
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  // Prefers larger values on earlier diagonal blocks; selects among exact roots.
  double preference(const Matrix& a) const {
    const Matrix f = frame_.transpose() * a * frame_;
    std::vector<double> sum(blocks_, 0.0), cnt(blocks_, 0.0);
    for (Eigen::Index r = 0; r < f.rows(); ++r) {
      sum[block_of_[static_cast<std::size_t>(r)]] += f(r, r);
      cnt[block_of_[static_cast<std::size_t>(r)]] += 1.0;
    }
    double p = 0.0;
    for (std::size_t b = 0; b < blocks_; ++b) p += static_cast<double>(blocks_ - b) * sum[b] / cnt[b];
    return p;
  }

 private:
  Matrix frame_;
  std::vector<std::size_t> block_of_;
  std::size_t blocks_ = 0;
};

// Principal value in (-h, h].
inline double principal_half(double t, double h) {
  t = std::remainder(t, 2.0 * h);
  if (t <= -h) t += 2.0 * h;
  return t;
}

// Slowest rotation frequency of a skew matrix (smallest nonzero |eigenvalue|).
inline double slowest_frequency(const Matrix& r) {
  const auto eig = num::sym_eigendecompose(Matrix(-(r * r)));
  const double top = eig.values.maxCoeff();
  for (Eigen::Index k = 0; k < eig.values.size(); ++k)
    if (eig.values(k) > 1e-9 * top) return std::sqrt(eig.values(k));
  return 1.0;
}

}  // namespace detail

/// Drives the off-diagonal parameters of A to zero by rotating along
/// normalizer one-parameter subgroups (coordinate descent over generators).
inline EliminationResult eliminate_offdiagonal(const ReductiveSplit& split, const MetricSubspace& space,
                                               const MetricOperator& a,
                                               const std::vector<NormalizerGenerator>& gens,
                                               const Tolerance& tol = {}, int max_sweeps = 50) {
  if (gens.empty()) throw ParameterError("reduction", "no normalizer generators supplied");
  const Eigen::Index d = split.dim_m();
  const detail::OffdiagonalSearch search(space);
  const double scale = std::max(1.0, num::max_abs(a.matrix));
  const double target = 1e-10 * scale;
  const double root = 1e-12 * scale;

  EliminationResult res;
  res.t_star.assign(gens.size(), 0.0);
  res.phi = Matrix::Identity(d, d);
  Matrix cur = a.matrix;
  res.residual = search.offdiag(cur).norm();

  constexpr int grid = 720;
  for (int sweep = 0; sweep < max_sweeps && res.residual > target; ++sweep) {
    res.sweeps = sweep + 1;
    for (std::size_t g = 0; g < gens.size() && res.residual > target; ++g) {
      const Matrix& r = gens[g].ad_m;
      if (num::max_abs(r * cur - cur * r) <= root) continue;  // acts trivially on cur

      auto rotated = [&](double t) {
        const Matrix p = num::matrix_exp(r, t);
        return Matrix(p * cur * p.transpose());
      };
      // Search window (-h, h] with h = pi / (2 omega): for a generator acting
      // with unit frequency, t ranges over (-pi/2, pi/2].
      const double h = M_PI_2 / detail::slowest_frequency(r);
      std::vector<double> energy(grid);
      for (int k = 0; k < grid; ++k) {
        const double t = -h + 2.0 * h * (k + 1) / grid;
        energy[static_cast<std::size_t>(k)] = search.offdiag(rotated(t)).squaredNorm();
      }
      double best_t = 0.0, best_e = res.residual * res.residual, best_pref = -INFINITY;
      bool best_root = res.residual <= root;
      for (int k = 0; k < grid; ++k) {
        const double e = energy[static_cast<std::size_t>(k)];
        const double el = energy[static_cast<std::size_t>((k + grid - 1) % grid)];
        const double er = energy[static_cast<std::size_t>((k + 1) % grid)];
        if (e > el || e > er) continue;
        // Gauss-Newton on the off-diagonal entries, d/dt A(t) = [R, A(t)].
        double t = -h + 2.0 * h * (k + 1) / grid;
        for (int it = 0; it < 60; ++it) {
          const Matrix at = rotated(t);
          const Vector f = search.offdiag(at);
          const Vector df = search.offdiag(r * at - at * r);
          const double den = df.squaredNorm();
          if (den == 0.0) break;
          const double step = f.dot(df) / den;
          t -= std::clamp(step, -8.0 * h / grid, 8.0 * h / grid);
          if (std::abs(step) < 1e-15) break;
        }
        t = detail::principal_half(t, h);
        const Matrix at = rotated(t);
        const double e_ref = search.offdiag(at).squaredNorm();
        const bool is_root = std::sqrt(e_ref) <= root;
        const double pref = search.preference(at);
        const bool better = (is_root && !best_root) || (is_root && best_root && pref > best_pref + 1e-12 * scale) ||
                            (!is_root && !best_root && e_ref < best_e * (1.0 - 1e-12));
        if (better) {
          best_t = t;
          best_e = e_ref;
          best_pref = pref;
          best_root = is_root;
        }
      }
      if (best_t == 0.0) continue;
      const Matrix p = num::matrix_exp(r, best_t);
      cur = p * cur * p.transpose();
      res.phi = p * res.phi;
      res.t_star[g] += best_t;
      res.residual = search.offdiag(cur).norm();
    }
    if (gens.size() == 1) break;  // a second pass along the same curve cannot improve
  }
  res.converged = res.residual <= target;
  res.reduced = act(split, res.phi, a, space, tol);
  res.residual = search.offdiag(res.reduced.matrix).norm();
  res.converged = res.residual <= target;
  return res;
}

/// Closed-form root of m(t) = (x3 - x2) sin t cos t + alpha cos 2t.
inline double pair_rotation_angle(double x2, double x3, double alpha) { return 0.5 * std::atan2(2.0 * alpha, x2 - x3); }

enum class SubmersionParametrization {
  Blocks,  // one scalar per K-factor piece of a and per block pair of p
  Full,    // the complete equivariant symmetric spaces on a and on p
};

/// Parameter spaces for the fiber (on a, in a coordinates) and the base
/// (on p, in p coordinates).
struct SubmersionSpaces {
  MetricSubspace a_space;
  MetricSubspace p_space;
};

struct SubmersionMetric {
  Vector a_params;
  Vector p_params;
  MetricOperator total;  // m basis
  Matrix a_block;        // a coordinates
  Matrix p_block;        // p coordinates
};

namespace detail {

inline MetricSubspace scalar_pieces_space(const std::vector<Matrix>& pieces, const std::vector<std::string>& names,
                                          Eigen::Index dim) {
  MetricSubspace s;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    s.basis.push_back(pieces[k] * pieces[k].transpose());
    s.param_names.push_back(names[k]);
    s.diagonal_blocks.push_back(pieces[k]);
    s.block_class.push_back(static_cast<int>(k));
  }
  if (pieces.empty()) s.diagonal_blocks.clear();
  (void)dim;
  return s;
}

// Splits span(q) (orthonormal columns, `dim` rows) into the given pieces plus
// the orthogonal remainder, if any.
inline void add_remainder(std::vector<Matrix>& pieces, std::vector<std::string>& names, Eigen::Index dim,
                          const char* name) {
  Eigen::Index used = 0;
  for (const auto& p : pieces) used += p.cols();
  if (used == dim) return;
  Matrix all(dim, used);
  Eigen::Index c = 0;
  for (const auto& p : pieces) {
    all.middleCols(c, p.cols()) = p;
    c += p.cols();
  }
  pieces.push_back(complement_basis(all, dim));
  names.emplace_back(name);
}

// Ambient index sets: one per K block, plus the trailing padding.
inline std::vector<std::vector<int>> standard_parts(const LieAlgebra& g, const BlockEmbedding& emb) {
  std::vector<std::vector<int>> parts;
  std::vector<bool> used(static_cast<std::size_t>(g.n()), false);
  for (const auto& b : emb.blocks) {
    parts.emplace_back();
    for (int i = b.offset; i < b.offset + b.n; ++i) {
      parts.back().push_back(i);
      used[static_cast<std::size_t>(i)] = true;
    }
  }
  std::vector<int> pad;
  for (int i = 0; i < g.n(); ++i)
    if (!used[static_cast<std::size_t>(i)]) pad.push_back(i);
  if (!pad.empty()) parts.push_back(pad);
  return parts;
}

// g coordinates of {X in g : mat(X) supported on parts (i,j) and (j,i)}.
inline Matrix supported_subspace(const LieAlgebra& g, const std::vector<int>& pi, const std::vector<int>& pj) {
  const int s = ambient_scale(g.family());
  const Eigen::Index na = g.ambient_dim();
  std::vector<bool> in_i(static_cast<std::size_t>(na), false), in_j(static_cast<std::size_t>(na), false);
  for (int a : pi)
    for (int r = 0; r < s; ++r) in_i[static_cast<std::size_t>(a * s + r)] = true;
  for (int a : pj)
    for (int r = 0; r < s; ++r) in_j[static_cast<std::size_t>(a * s + r)] = true;
  auto allowed = [&](Eigen::Index r, Eigen::Index c) {
    const auto ru = static_cast<std::size_t>(r), cu = static_cast<std::size_t>(c);
    return (in_i[ru] && in_j[cu]) || (in_j[ru] && in_i[cu]);
  };
  std::vector<std::pair<Eigen::Index, Eigen::Index>> banned;
  for (Eigen::Index r = 0; r < na; ++r)
    for (Eigen::Index c = 0; c < na; ++c)
      if (!allowed(r, c)) banned.emplace_back(r, c);
  Matrix sys(static_cast<Eigen::Index>(banned.size()), g.dim());
  for (Eigen::Index k = 0; k < g.dim(); ++k) {
    const Matrix& e = g.basis()[static_cast<std::size_t>(k)];
    for (std::size_t b = 0; b < banned.size(); ++b) sys(static_cast<Eigen::Index>(b), k) = e(banned[b].first, banned[b].second);
  }
  if (banned.empty()) return Matrix::Identity(g.dim(), g.dim());
  return num::kernel_basis(sys, Tolerance{}, 1.0);
}

}  // namespace detail

inline SubmersionSpaces submersion_spaces(const ReductiveSplit& split, const KSplit& ks,
                                          SubmersionParametrization mode = SubmersionParametrization::Blocks,
                                          std::uint64_t seed = 0, const Tolerance& tol = {}) {
  SubmersionSpaces out;
  if (mode == SubmersionParametrization::Full) {
    const Module am = ks.a_module(split);
    const auto arep = decompose(am, seed, tol);
    out.a_space = metric_space_basis(arep, commutant(am, tol));
    const Module pm = ks.p_module();
    const auto prep = decompose(pm, seed, tol);
    out.p_space = metric_space_basis(prep, commutant(pm, tol));
    return out;
  }

  // a: its intersections with the factors of k.
  std::vector<Matrix> a_pieces;
  std::vector<std::string> a_names;
  const Matrix ka = ks.a_basis.transpose() * split.m_basis().transpose();  // g -> a coordinates
  for (std::size_t f = 0; f < ks.embedding.blocks.size(); ++f) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < ks.k_basis.cols(); ++j)
      if (ks.k_factor[static_cast<std::size_t>(j)] == static_cast<int>(f)) cols.push_back(j);
    Matrix raw(ks.dim_a(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) raw.col(static_cast<Eigen::Index>(c)) = ka * ks.k_basis.col(cols[c]);
    Matrix piece = num::orthonormalize(raw, 1e-8);
    if (piece.cols() == 0) continue;
    a_pieces.push_back(detail::canonical_basis(piece));
    a_names.push_back("x" + std::to_string(f + 1));
  }
  detail::add_remainder(a_pieces, a_names, ks.dim_a(), "x_rest");
  out.a_space = detail::scalar_pieces_space(a_pieces, a_names, ks.dim_a());

  // p: pieces supported between pairs of standard-module parts of K.
  std::vector<Matrix> p_pieces;
  std::vector<std::string> p_names;
  const auto parts = detail::standard_parts(split.g(), ks.embedding);
  const Matrix gp = ks.p_basis.transpose() * split.m_basis().transpose();  // g -> p coordinates
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t j = i; j < parts.size(); ++j) {
      const Matrix sub = detail::supported_subspace(split.g(), parts[i], parts[j]);
      if (sub.cols() == 0) continue;
      // Keep the part of the support space lying in p.
      const Matrix in_m = split.m_basis().transpose() * sub;
      const Matrix in_p = gp * sub;
      Matrix piece = num::orthonormalize(in_p, 1e-8);
      if (piece.cols() == 0) continue;
      // Accept only if span(sub) meets p exactly in span(piece): vectors of
      // sub with no k-component.
      const Matrix ksub = ks.a_basis.transpose() * in_m;
      const Matrix hsub = split.h_basis().transpose() * sub;
      Matrix stacked(ksub.rows() + hsub.rows(), sub.cols());
      stacked << ksub, hsub;
      const Matrix inter = num::kernel_basis(stacked, tol, 1.0);
      if (inter.cols() == 0) continue;
      piece = detail::canonical_basis(num::orthonormalize(gp * sub * inter, 1e-8));
      p_pieces.push_back(piece);
      p_names.push_back("x" + std::to_string(i + 1) + std::to_string(j + 1));
    }
  detail::add_remainder(p_pieces, p_names, ks.dim_p(), "x_rest");
  out.p_space = detail::scalar_pieces_space(p_pieces, p_names, ks.dim_p());
  return out;
}

/// g = g_a + g_p on m = a + p. The a block must be ad(h)-equivariant, the p
/// block ad(k)-equivariant; the result is checked to commute with ad(k).
inline SubmersionMetric submersion_metric(const ReductiveSplit& split, const KSplit& ks,
                                          const SubmersionSpaces& spaces, const Vector& a_params,
                                          const Vector& p_params, const Tolerance& tol = {}) {
  SubmersionMetric out;
  out.a_params = a_params;
  out.p_params = p_params;
  const Eigen::Index d = split.dim_m();
  if (ks.dim_a() > 0) {
    out.a_block = assemble_metric(spaces.a_space, a_params, tol).matrix;
  } else {
    if (a_params.size() != 0) throw DimensionError("reduction", "a is zero-dimensional but a parameters were given");
    out.a_block = Matrix(0, 0);
  }
  if (ks.dim_p() > 0) {
    out.p_block = assemble_metric(spaces.p_space, p_params, tol).matrix;
  } else {
    if (p_params.size() != 0) throw DimensionError("reduction", "p is zero-dimensional but p parameters were given");
    out.p_block = Matrix(0, 0);
  }

  const Module am = ks.a_module(split);
  const double eps = std::max(tol.abs, 1e-9);
  if (ks.dim_a() > 0 && commutation_residual(out.a_block, am.generators) > eps * std::max(1.0, am.scale())) {
    throw InvarianceError("reduction", "fiber metric is not ad(h)-equivariant on a");
  }
  const Module pm = ks.p_module();
  if (ks.dim_p() > 0 && commutation_residual(out.p_block, pm.generators) > eps * std::max(1.0, pm.scale())) {
    throw InvarianceError("reduction", "base metric is not ad(k)-equivariant on p");
  }

  Matrix total = Matrix::Zero(d, d);
  if (ks.dim_a() > 0) total += ks.a_basis * out.a_block * ks.a_basis.transpose();
  if (ks.dim_p() > 0) total += ks.p_basis * out.p_block * ks.p_basis.transpose();
  total = 0.5 * (total + total.transpose());
  const double scale = std::max(1.0, num::max_abs(total));
  const double res = commutation_residual(total, ks.ad_k_on_m);
  if (res > eps * scale) {
    throw ConsistencyError("reduction", "submersion metric is not fixed by ad(k) (residual " + std::to_string(res) +
                                            ")");
  }
  out.total = MetricOperator{total, Vector()};
  return out;
}

}  // namespace homspace
