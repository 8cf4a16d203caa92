#pragma once

// Decomposition of an isotropy module into irreducible summands, grouped into
// equivalence classes and classified by Schur type.
//
// Pipeline:
//   1. trivial part m^h = joint kernel of the generators;
//   2. coarse split of its complement by the per-factor Casimir operators;
//   3. refinement: eigenspaces of random symmetric commutant elements, until
//      each piece has a one-dimensional symmetric commutant;
//   4. End / Hom dimensions give types and classes;
//   5. every isotypic component is re-split into cyclic submodules generated
//      by coordinate vectors, and equivalent summands are aligned by isometric
//      intertwiners so that they carry identical generator matrices.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "homspace/errors.hpp"
#include "homspace/homspace.hpp"
#include "homspace/numkernel.hpp"

namespace homspace {

enum class SchurType { Orthogonal = 1, Unitary = 2, Symplectic = 4 };

inline std::string schur_type_name(SchurType t) {
  switch (t) {
    case SchurType::Orthogonal: return "orthogonal";
    case SchurType::Unitary: return "unitary";
    case SchurType::Symplectic: return "symplectic";
  }
  return "?";
}

inline int schur_dim(SchurType t) { return static_cast<int>(t); }

/// splitmix64; the library's only source of pseudo-randomness.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [lo, hi).
  double uniform(double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

namespace detail {

// Linear system for intertwiners T : src -> dst (T rho_s = rho_d T), unknowns
// vec(T) in column-major order.
inline Matrix hom_system(const std::vector<Matrix>& src, const std::vector<Matrix>& dst) {
  const Eigen::Index ds = src.empty() ? 0 : src.front().rows();
  const Eigen::Index dd = dst.empty() ? 0 : dst.front().rows();
  const Eigen::Index nu = ds * dd;
  Matrix sys = Matrix::Zero(static_cast<Eigen::Index>(src.size()) * nu, nu);
  for (std::size_t g = 0; g < src.size(); ++g) {
    const Matrix& rs = src[g];
    const Matrix& rd = dst[g];
    const Eigen::Index row0 = static_cast<Eigen::Index>(g) * nu;
    for (Eigen::Index b = 0; b < ds; ++b)
      for (Eigen::Index a = 0; a < dd; ++a) {
        const Eigen::Index col = a + b * dd;
        for (Eigen::Index c = 0; c < ds; ++c) sys(row0 + a + c * dd, col) += rs(b, c);
        for (Eigen::Index r = 0; r < dd; ++r) sys(row0 + r + b * dd, col) -= rd(r, a);
      }
  }
  return sys;
}

inline std::vector<Matrix> hom_basis(const std::vector<Matrix>& src, Eigen::Index ds, const std::vector<Matrix>& dst,
                                     Eigen::Index dd, const Tolerance& tol, double reference) {
  std::vector<Matrix> out;
  Matrix ker;
  if (src.empty()) {
    ker = Matrix::Identity(ds * dd, ds * dd);
  } else {
    ker = num::kernel_basis(hom_system(src, dst), tol, reference);
  }
  for (Eigen::Index k = 0; k < ker.cols(); ++k) {
    out.push_back(Eigen::Map<const Matrix>(ker.col(k).data(), dd, ds));
  }
  return out;
}

// Symmetric commutant: unknowns are coordinates along the Frobenius-orthonormal
// symmetric basis E_ii, (E_ij + E_ji)/sqrt(2).
inline std::vector<Matrix> symmetric_commutant(const Module& mod, const Tolerance& tol) {
  const Eigen::Index d = mod.dim;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> params;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i; j < d; ++j) params.emplace_back(i, j);
  const auto np = static_cast<Eigen::Index>(params.size());
  auto param_matrix = [&](Eigen::Index p) {
    Matrix s = Matrix::Zero(d, d);
    const auto [i, j] = params[static_cast<std::size_t>(p)];
    if (i == j) {
      s(i, i) = 1.0;
    } else {
      s(i, j) = s(j, i) = M_SQRT1_2;
    }
    return s;
  };

  Matrix ker;
  if (mod.generators.empty()) {
    ker = Matrix::Identity(np, np);
  } else {
    const Eigen::Index eq = d * (d + 1) / 2;
    Matrix sys = Matrix::Zero(static_cast<Eigen::Index>(mod.generators.size()) * eq, np);
    for (Eigen::Index p = 0; p < np; ++p) {
      const auto [i, j] = params[static_cast<std::size_t>(p)];
      for (std::size_t g = 0; g < mod.generators.size(); ++g) {
        const Matrix& r = mod.generators[g];
        Matrix c = Matrix::Zero(d, d);
        const double w = (i == j) ? 1.0 : M_SQRT1_2;
        // S r - r S with S = w (E_ij + E_ji) (or E_ii)
        c.row(i) += w * r.row(j);
        c.col(j) -= w * r.col(i);
        if (i != j) {
          c.row(j) += w * r.row(i);
          c.col(i) -= w * r.col(j);
        }
        Eigen::Index row = static_cast<Eigen::Index>(g) * eq;
        for (Eigen::Index a = 0; a < d; ++a)
          for (Eigen::Index b = a; b < d; ++b) sys(row++, p) = c(a, b);
      }
    }
    ker = num::kernel_basis(sys, tol, mod.scale());
  }
  std::vector<Matrix> out;
  for (Eigen::Index k = 0; k < ker.cols(); ++k) {
    Matrix s = Matrix::Zero(d, d);
    for (Eigen::Index p = 0; p < np; ++p) s += ker(p, k) * param_matrix(p);
    out.push_back(s);
  }
  return out;
}

inline double invariance_residual(const Module& mod, const Matrix& q) {
  double worst = 0.0;
  for (const auto& r : mod.generators) {
    const Matrix rq = r * q;
    worst = std::max(worst, (rq - q * (q.transpose() * rq)).norm());
  }
  return worst;
}

// Smallest invariant subspace containing v, or nullopt once it exceeds `cap`.
inline std::optional<Matrix> cyclic_submodule(const Module& mod, const Vector& v, Eigen::Index cap) {
  std::vector<Vector> basis{v.normalized()};
  for (std::size_t next = 0; next < basis.size(); ++next) {
    for (const auto& r : mod.generators) {
      Vector w = r * basis[next];
      const double w0 = w.norm();
      if (w0 < 1e-12) continue;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : basis) w -= q.dot(w) * q;
      if (w.norm() > 1e-8 * std::max(1.0, w0)) {
        basis.push_back(w.normalized());
        if (static_cast<Eigen::Index>(basis.size()) > cap) return std::nullopt;
      }
    }
  }
  Matrix out(mod.dim, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = basis[k];
  return out;
}

inline Eigen::Index leading_row(const Matrix& q) {
  for (Eigen::Index r = 0; r < q.rows(); ++r)
    if (q.row(r).norm() > 1e-6) return r;
  return q.rows();
}

struct CoarseBlocks {
  Matrix trivial;               // orthonormal basis of m^h
  std::vector<Matrix> blocks;   // Casimir eigenspaces of the complement
};

// Weighted sum of per-factor Casimirs; the weights only need to be generic.
inline CoarseBlocks coarse_blocks(const Module& mod, const Tolerance& tol) {
  CoarseBlocks out;
  const Eigen::Index d = mod.dim;
  if (d == 0) {
    out.trivial = Matrix(0, 0);
    return out;
  }
  if (mod.generators.empty()) {
    out.trivial = Matrix::Identity(d, d);
    return out;
  }
  Matrix stacked(static_cast<Eigen::Index>(mod.generators.size()) * d, d);
  for (std::size_t g = 0; g < mod.generators.size(); ++g)
    stacked.middleRows(static_cast<Eigen::Index>(g) * d, d) = mod.generators[g];
  const Matrix ker = num::kernel_basis(stacked, tol, mod.scale());
  out.trivial = ker.cols() > 0 ? canonical_basis(ker) : Matrix(d, 0);
  const Matrix rest = complement_basis(out.trivial, d);
  if (rest.cols() == 0) return out;

  static constexpr double weights[] = {1.0, 1.4142135623730951, 1.7320508075688772, 2.23606797749979,
                                       2.6457513110645907, 3.3166247903554, 3.605551275463989, 4.123105625617661};
  Matrix casimir = Matrix::Zero(rest.cols(), rest.cols());
  for (std::size_t g = 0; g < mod.generators.size(); ++g) {
    const int f = mod.factor.empty() ? 0 : mod.factor[g];
    const double w = weights[static_cast<std::size_t>(f) % 8] + 0.1 * static_cast<double>(f / 8);
    const Matrix r = rest.transpose() * mod.generators[g] * rest;
    casimir -= w * (r * r);
  }
  casimir = 0.5 * (casimir + casimir.transpose());
  const auto eig = num::sym_eigendecompose(casimir, tol);
  const double gap = 1e-7 * std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  for (const auto& [b, e] : num::cluster_sorted(eig.values, gap)) {
    out.blocks.push_back(rest * eig.vectors.middleCols(b, e - b));
  }
  return out;
}

}  // namespace detail

/// Operators on m commuting with the h-action.
struct CommutantBasis {
  std::vector<Matrix> operators;
  std::vector<Matrix> symmetric;  // basis of the symmetric part
  Eigen::Index dim() const { return static_cast<Eigen::Index>(operators.size()); }
  Eigen::Index sym_dim() const { return static_cast<Eigen::Index>(symmetric.size()); }
};

/// End_H(m), computed blockwise over the Casimir blocks (there are no
/// intertwiners between blocks with distinct Casimir eigenvalues).
inline CommutantBasis commutant(const Module& mod, const Tolerance& tol = {}) {
  CommutantBasis out;
  auto coarse = detail::coarse_blocks(mod, tol);
  std::vector<Matrix> blocks;
  if (coarse.trivial.cols() > 0) blocks.push_back(coarse.trivial);
  for (auto& b : coarse.blocks) blocks.push_back(b);
  for (const Matrix& q : blocks) {
    const Module sub = mod.restrict(q);
    for (const Matrix& t : detail::hom_basis(sub.generators, sub.dim, sub.generators, sub.dim, tol, mod.scale())) {
      out.operators.push_back(q * t * q.transpose());
    }
    for (const Matrix& s : detail::symmetric_commutant(sub, tol)) out.symmetric.push_back(q * s * q.transpose());
  }
  return out;
}

inline CommutantBasis commutant(const ReductiveSplit& split, const Tolerance& tol = {}) {
  return commutant(split.isotropy_module(), tol);
}

/// dim End_H(V) for a module V.
inline Eigen::Index end_dimension(const Module& mod, const Tolerance& tol = {}) {
  return static_cast<Eigen::Index>(
      detail::hom_basis(mod.generators, mod.dim, mod.generators, mod.dim, tol, mod.scale()).size());
}

/// dim Hom_H(src, dst).
inline Eigen::Index hom_dimension(const Module& src, const Module& dst, const Tolerance& tol = {}) {
  return static_cast<Eigen::Index>(
      detail::hom_basis(src.generators, src.dim, dst.generators, dst.dim, tol, std::max(src.scale(), dst.scale()))
          .size());
}

struct Summand {
  Matrix basis;  // orthonormal columns in module coordinates
  int cls = -1;
  Eigen::Index dim() const { return basis.cols(); }
};

struct IsotypicClass {
  Eigen::Index dim = 0;   // of each irreducible
  SchurType type = SchurType::Orthogonal;
  std::vector<int> members;  // indices into IsotypicReport::summands
  /// Basis of End_H of one irreducible in the aligned summand basis: the
  /// identity first, then skew units u with u^T u = Id.
  std::vector<Matrix> end_basis;

  int multiplicity() const { return static_cast<int>(members.size()); }
  /// Off-diagonal metric parameters: r(r-1)/2 pairs times dim End.
  int offdiagonal_params() const { return multiplicity() * (multiplicity() - 1) / 2 * schur_dim(type); }
};

struct MetricParamCounts {
  int diagonal = 0;                    // s, counting trivial lines individually
  int trivial_offdiagonal = 0;         // t(t-1)/2
  std::vector<int> offdiagonal;        // per class
  int total() const {
    return diagonal + trivial_offdiagonal + std::accumulate(offdiagonal.begin(), offdiagonal.end(), 0);
  }
};

struct IsotypicReport {
  Eigen::Index module_dim = 0;
  Matrix trivial_basis;            // m^h
  std::vector<Summand> summands;   // nontrivial irreducibles, grouped by class
  std::vector<IsotypicClass> classes;
  std::vector<std::string> warnings;

  Eigen::Index trivial_dim() const { return trivial_basis.cols(); }
  /// Number of irreducible summands, counting m^h as that many trivial lines.
  Eigen::Index summand_count() const { return trivial_dim() + static_cast<Eigen::Index>(summands.size()); }

  /// Block dimensions: m^h first (when nonzero), then the summands in order.
  std::vector<Eigen::Index> block_dims() const {
    std::vector<Eigen::Index> out;
    if (trivial_dim() > 0) out.push_back(trivial_dim());
    for (const auto& s : summands) out.push_back(s.dim());
    return out;
  }

  MetricParamCounts metric_param_counts() const {
    MetricParamCounts c;
    const auto t = static_cast<int>(trivial_dim());
    c.diagonal = static_cast<int>(summand_count());
    c.trivial_offdiagonal = t * (t - 1) / 2;
    for (const auto& k : classes) c.offdiagonal.push_back(k.offdiagonal_params());
    return c;
  }

  /// One orthonormal block per diagonal metric parameter: each trivial line,
  /// then each summand.
  std::vector<Matrix> diagonal_blocks() const {
    std::vector<Matrix> out;
    for (Eigen::Index k = 0; k < trivial_dim(); ++k) out.push_back(trivial_basis.col(k));
    for (const auto& s : summands) out.push_back(s.basis);
    return out;
  }
};

namespace detail {

class Decomposer {
 public:
  Decomposer(const Module& mod, std::uint64_t seed, const Tolerance& tol) : mod_(mod), rng_(seed), tol_(tol) {}

  IsotypicReport run() {
    IsotypicReport rep;
    rep.module_dim = mod_.dim;
    auto coarse = coarse_blocks(mod_, tol_);
    rep.trivial_basis = coarse.trivial;

    std::vector<Matrix> pieces;
    for (const auto& b : coarse.blocks) refine(b, pieces);

    const double res_tol = 1e-9 * mod_.scale();
    std::vector<SchurType> types;
    for (const auto& q : pieces) {
      const double res = invariance_residual(mod_, q);
      if (res > res_tol) {
        throw DecompositionError("decompose", "summand of dimension " + std::to_string(q.cols()) +
                                                  " is not invariant (residual " + std::to_string(res) + ")");
      }
      const Eigen::Index e = end_dimension(mod_.restrict(q), tol_);
      if (e != 1 && e != 2 && e != 4) {
        throw DecompositionError("decompose", "summand of dimension " + std::to_string(q.cols()) +
                                                  " has End dimension " + std::to_string(e));
      }
      types.push_back(static_cast<SchurType>(e));
    }

    // Equivalence classes by nonzero intertwiner spaces.
    std::vector<int> cls(pieces.size(), -1);
    std::vector<std::vector<int>> groups;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (cls[i] >= 0) continue;
      cls[i] = static_cast<int>(groups.size());
      groups.push_back({static_cast<int>(i)});
      const Module mi = mod_.restrict(pieces[i]);
      for (std::size_t j = i + 1; j < pieces.size(); ++j) {
        if (cls[j] >= 0 || pieces[j].cols() != pieces[i].cols() || types[j] != types[i]) continue;
        const Eigen::Index h = hom_dimension(mi, mod_.restrict(pieces[j]), tol_);
        if (h == 0) continue;
        if (h != schur_dim(types[i])) {
          throw DecompositionError("decompose", "intertwiner space of dimension " + std::to_string(h) +
                                                    " between summands of type " + schur_type_name(types[i]));
        }
        cls[j] = cls[i];
        groups.back().push_back(static_cast<int>(j));
      }
    }

    struct Built {
      IsotypicClass info;
      std::vector<Matrix> bases;
      Eigen::Index lead;
    };
    std::vector<Built> built;
    for (const auto& grp : groups) {
      Built b;
      b.info.dim = pieces[static_cast<std::size_t>(grp.front())].cols();
      b.info.type = types[static_cast<std::size_t>(grp.front())];
      std::vector<Matrix> raw;
      for (int i : grp) raw.push_back(pieces[static_cast<std::size_t>(i)]);
      b.bases = canonicalize(raw, b.info.dim);
      align(b.bases, b.info);
      b.lead = leading_row(b.bases.front());
      built.push_back(std::move(b));
    }
    std::stable_sort(built.begin(), built.end(), [](const Built& x, const Built& y) { return x.lead < y.lead; });

    for (auto& b : built) {
      const int c = static_cast<int>(rep.classes.size());
      for (auto& q : b.bases) {
        b.info.members.push_back(static_cast<int>(rep.summands.size()));
        rep.summands.push_back(Summand{q, c});
      }
      if (b.info.multiplicity() > 1 && b.info.type != SchurType::Orthogonal) {
        rep.warnings.push_back(std::to_string(b.info.multiplicity()) + " equivalent summands of dimension " +
                               std::to_string(b.info.dim) + " and " + schur_type_name(b.info.type) +
                               " type: the intertwiner space between two of them has dimension " +
                               std::to_string(schur_dim(b.info.type)) + ", not 1, so each pair carries " +
                               std::to_string(schur_dim(b.info.type)) + " off-diagonal metric parameters");
      }
      rep.classes.push_back(std::move(b.info));
    }
    return rep;
  }

 private:
  // Eigen-split q with random symmetric commutant elements until every piece
  // has a one-dimensional symmetric commutant.
  void refine(const Matrix& q, std::vector<Matrix>& out) {
    const Module sub = mod_.restrict(q);
    const auto sym = symmetric_commutant(sub, tol_);
    if (sym.size() == 1) {
      out.push_back(q);
      return;
    }
    if (sym.empty()) throw DecompositionError("decompose", "empty symmetric commutant on a block");
    for (int round = 0; round < 10; ++round) {
      Matrix s = Matrix::Zero(q.cols(), q.cols());
      for (const auto& b : sym) s += rng_.uniform(-1.0, 1.0) * b;
      s = 0.5 * (s + s.transpose());
      const auto eig = num::sym_eigendecompose(s, tol_);
      const double spread = eig.values.maxCoeff() - eig.values.minCoeff();
      const auto clusters = num::cluster_sorted(eig.values, 1e-8 * std::max(spread, 1e-3));
      if (clusters.size() < 2) continue;
      for (const auto& [b, e] : clusters) {
        Matrix part = q * eig.vectors.middleCols(b, e - b);
        refine(num::orthonormalize(part, 1e-10), out);
      }
      return;
    }
    throw DecompositionError("decompose", "could not certify irreducibility of a block of dimension " +
                                              std::to_string(q.cols()) + " after 10 refinement rounds");
  }

  // Re-split an isotypic component into cyclic submodules generated by
  // projected coordinate vectors; falls back to the raw pieces.
  std::vector<Matrix> canonicalize(const std::vector<Matrix>& raw, Eigen::Index d) const {
    Matrix iso(mod_.dim, d * static_cast<Eigen::Index>(raw.size()));
    for (std::size_t k = 0; k < raw.size(); ++k) iso.middleCols(static_cast<Eigen::Index>(k) * d, d) = raw[k];
    Matrix remaining = iso;
    std::vector<Matrix> out;
    for (Eigen::Index e = 0; e < mod_.dim && remaining.cols() > 0; ++e) {
      const Vector v = remaining * remaining.row(e).transpose();
      if (v.norm() < 1e-6) continue;
      auto cyc = cyclic_submodule(mod_, v, d);
      if (!cyc || cyc->cols() != d) continue;
      if (invariance_residual(mod_, *cyc) > 1e-8 * mod_.scale()) continue;
      if (symmetric_commutant(mod_.restrict(*cyc), tol_).size() != 1) continue;
      out.push_back(*cyc);
      const Matrix inner = remaining.transpose() * (*cyc);  // cyc inside span(remaining)
      const Matrix rest = complement_basis(num::orthonormalize(inner, 1e-8), remaining.cols());
      remaining = remaining * rest;
    }
    if (remaining.cols() != 0 || out.size() != raw.size()) return raw;
    return out;
  }

  // Re-express summands 1.. through isometric intertwiners from summand 0,
  // and fill the End basis of the class.
  void align(std::vector<Matrix>& bases, IsotypicClass& info) const {
    const Eigen::Index d = info.dim;
    const Module m0 = mod_.restrict(bases.front());
    const double ref = mod_.scale();
    for (std::size_t j = 1; j < bases.size(); ++j) {
      const Module mj = mod_.restrict(bases[j]);
      const auto hom = hom_basis(m0.generators, d, mj.generators, d, tol_, ref);
      if (hom.empty()) throw DecompositionError("decompose", "declared-equivalent summands have no intertwiner");
      Matrix t = Matrix::Zero(d, d);
      for (const auto& h : hom) t += h.trace() * h;  // projection of Id onto Hom
      if (t.norm() < 1e-6) t = hom.front();
      t *= std::sqrt(static_cast<double>(d)) / t.norm();
      if (num::max_abs(t.transpose() * t - Matrix::Identity(d, d)) > 1e-8) {
        throw DecompositionError("decompose", "intertwiner between equivalent summands is not a similarity");
      }
      bases[j] = bases[j] * t;
    }

    const auto end = hom_basis(m0.generators, d, m0.generators, d, tol_, ref);
    const Matrix id = Matrix::Identity(d, d);
    Matrix imag(d * d, static_cast<Eigen::Index>(end.size()));
    for (std::size_t k = 0; k < end.size(); ++k) {
      const Matrix& e = end[k];
      Matrix skew = e - (e.trace() / static_cast<double>(d)) * id;
      if (skew.norm() < 1e-8) skew.setZero();  // e is a multiple of Id
      imag.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Vector>(skew.data(), d * d);
    }
    Matrix units = num::orthonormalize(imag, 1e-8);
    if (units.cols() > 0) units = canonical_basis(units);
    info.end_basis = {id};
    for (Eigen::Index k = 0; k < units.cols(); ++k) {
      Matrix u = Eigen::Map<const Matrix>(units.col(k).data(), d, d);
      u *= std::sqrt(static_cast<double>(d));
      info.end_basis.push_back(u);
    }
    if (static_cast<int>(info.end_basis.size()) != schur_dim(info.type)) {
      throw DecompositionError("decompose", "End basis size disagrees with the Schur type");
    }
  }

  const Module& mod_;
  SplitMix64 rng_;
  Tolerance tol_;
};

}  // namespace detail

/// Irreducible decomposition of a module. Deterministic given the seed; the
/// class structure does not depend on it.
inline IsotypicReport decompose(const Module& mod, std::uint64_t seed = 0, const Tolerance& tol = {}) {
  return detail::Decomposer(mod, seed, tol).run();
}

inline IsotypicReport decompose(const ReductiveSplit& split, std::uint64_t seed = 0, const Tolerance& tol = {}) {
  const Module mod = split.isotropy_module();
  return decompose(mod, seed, tol);
}

/// Rows of the table of isotropy summand counts for SO(k1+k2+k3)/H.
enum class SummandTableRow {
  Wallach = 1,      // H = SO(k1) x SO(k2) x SO(k3)
  ThreeFactor = 2,  // H = SO(l1) x SO(l2) x SO(l3)
  TwoFactor = 3,    // H = SO(m1) x SO(m2)
  OneFactor = 4,    // H = SO(d)
  Stiefel = 5,      // H = SO(k3)
};

struct SummandTableParams {
  SummandTableRow row = SummandTableRow::Wallach;
  int k1 = 0, k2 = 0, k3 = 0;
  std::vector<int> sub;  // l1,l2,l3 | m1,m2 | d, as the row requires
};

/// Closed-form summand count s of a table row.
inline int summand_count_table(const SummandTableParams& p) {
  if (p.k1 < 2 || p.k2 < 2 || p.k3 < 2) throw ParameterError("table", "k1, k2, k3 must be >= 2");
  const int total = p.k1 + p.k2 + p.k3;
  auto choose2 = [](int n) { return n * (n - 1) / 2; };
  auto sub_sum = [&](std::size_t count) {
    if (p.sub.size() != count) {
      throw ParameterError("table", "row needs " + std::to_string(count) + " subgroup parameters");
    }
    int s = 0;
    for (int x : p.sub) {
      if (x < 1) throw ParameterError("table", "subgroup block sizes must be positive");
      s += x;
    }
    if (s >= total - 1) {
      throw ParameterError("table", "subgroup blocks must satisfy sum < k1 + k2 + k3 - 1");
    }
    return s;
  };
  switch (p.row) {
    case SummandTableRow::Wallach: return 3;
    case SummandTableRow::ThreeFactor: {
      const int n = total - sub_sum(3);
      return choose2(n) + 3 * n + 3;
    }
    case SummandTableRow::TwoFactor: {
      const int n = total - sub_sum(2);
      return choose2(n) + 2 * n + 1;
    }
    case SummandTableRow::OneFactor: {
      const int n = total - sub_sum(1);
      return choose2(n) + n;
    }
    case SummandTableRow::Stiefel: {
      const int n = p.k1 + p.k2;
      return choose2(n) + n;
    }
  }
  throw ParameterError("table", "unknown row");
}

}  // namespace homspace
