#pragma once

// Compact classical Lie algebras so(n), su(n), sp(n) realized as real matrix
// algebras, with structure constants and the Killing form computed from
// ad-traces.
//
// Realification conventions:
//   su(n): a + bi  ->  [[a, -b], [b, a]]            (2n x 2n real)
//   sp(n): z + w j ->  [[z, -conj(w)], [w, conj(z)]] then the su rule
//                                                   (4n x 4n real)
// Bases are Frobenius-orthogonal and rescaled so that -B(E_i, E_j) = delta_ij.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "homspace/errors.hpp"
#include "homspace/numkernel.hpp"

namespace homspace {

enum class Family { SO, SU, Sp, U };

inline std::string family_name(Family f) {
  switch (f) {
    case Family::SO: return "SO";
    case Family::SU: return "SU";
    case Family::Sp: return "Sp";
    case Family::U: return "U";
  }
  return "?";
}

inline std::optional<Family> parse_family(std::string_view s) {
  if (s == "SO") return Family::SO;
  if (s == "SU") return Family::SU;
  if (s == "Sp") return Family::Sp;
  if (s == "U") return Family::U;
  return std::nullopt;
}

/// Coefficients of an element of g in the algebra basis.
struct AlgebraElement {
  Vector coords;
};

namespace detail {

// A matrix over the quaternions, stored by real components along 1, i, j, k.
// Real and complex matrices use the leading components only.
struct QuatMatrix {
  std::array<Matrix, 4> part;

  explicit QuatMatrix(Eigen::Index n) {
    for (auto& p : part) p = Matrix::Zero(n, n);
  }
  Eigen::Index size() const { return part[0].rows(); }
};

inline Matrix realify_complex(const Matrix& re, const Matrix& im) {
  const Eigen::Index n = re.rows();
  Matrix out = Matrix::Zero(2 * n, 2 * n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      out(2 * a, 2 * b) = re(a, b);
      out(2 * a, 2 * b + 1) = -im(a, b);
      out(2 * a + 1, 2 * b) = im(a, b);
      out(2 * a + 1, 2 * b + 1) = re(a, b);
    }
  return out;
}

// Realification of a quaternionic matrix into the ambient of `ambient`.
inline Matrix realify(const QuatMatrix& q, Family ambient) {
  const Eigen::Index n = q.size();
  switch (ambient) {
    case Family::SO: return q.part[0];
    case Family::SU: return realify_complex(q.part[0], q.part[1]);
    case Family::Sp: {
      // q = z + w j with z = a + b i, w = c + d i.
      Matrix re = Matrix::Zero(2 * n, 2 * n), im = Matrix::Zero(2 * n, 2 * n);
      for (Eigen::Index x = 0; x < n; ++x)
        for (Eigen::Index y = 0; y < n; ++y) {
          const double a = q.part[0](x, y), b = q.part[1](x, y), c = q.part[2](x, y), d = q.part[3](x, y);
          re(2 * x, 2 * y) = a;
          im(2 * x, 2 * y) = b;
          re(2 * x, 2 * y + 1) = -c;
          im(2 * x, 2 * y + 1) = d;
          re(2 * x + 1, 2 * y) = c;
          im(2 * x + 1, 2 * y) = d;
          re(2 * x + 1, 2 * y + 1) = a;
          im(2 * x + 1, 2 * y + 1) = -b;
        }
      return realify_complex(re, im);
    }
    case Family::U: break;
  }
  throw ConstructionError("liealg", "U is not an ambient family");
}

inline int ambient_scale(Family ambient) {
  switch (ambient) {
    case Family::SO: return 1;
    case Family::SU: return 2;
    case Family::Sp: return 4;
    case Family::U: break;
  }
  throw ConstructionError("liealg", "U is not an ambient family");
}

// Generators of the compact algebra of `family` acting on the coordinates
// [offset, offset + k) of the standard module of size n_ambient, in the
// ambient realification. The list is Frobenius-orthogonal.
inline std::vector<Matrix> block_generators(Family family, int k, int offset, int n_ambient, Family ambient) {
  std::vector<QuatMatrix> gens;
  auto add = [&](auto&& fill) {
    QuatMatrix q(n_ambient);
    fill(q);
    gens.push_back(std::move(q));
  };
  const auto o = static_cast<Eigen::Index>(offset);
  switch (family) {
    case Family::SO:
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
          add([&](QuatMatrix& q) {
            q.part[0](o + i, o + j) = 1.0;
            q.part[0](o + j, o + i) = -1.0;
          });
      break;
    case Family::SU:
    case Family::U:
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
          add([&](QuatMatrix& q) {
            q.part[0](o + i, o + j) = 1.0;
            q.part[0](o + j, o + i) = -1.0;
          });
          add([&](QuatMatrix& q) {
            q.part[1](o + i, o + j) = 1.0;
            q.part[1](o + j, o + i) = 1.0;
          });
        }
      if (family == Family::U) {
        for (int i = 0; i < k; ++i) add([&](QuatMatrix& q) { q.part[1](o + i, o + i) = 1.0; });
      } else {
        // i * diag(1, ..., 1, -m, 0, ...) for m = 1 .. k-1
        for (int m = 1; m < k; ++m)
          add([&](QuatMatrix& q) {
            for (int i = 0; i < m; ++i) q.part[1](o + i, o + i) = 1.0;
            q.part[1](o + m, o + m) = -static_cast<double>(m);
          });
      }
      break;
    case Family::Sp:
      for (int i = 0; i < k; ++i)
        for (int c = 1; c < 4; ++c) add([&](QuatMatrix& q) { q.part[c](o + i, o + i) = 1.0; });
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
          add([&](QuatMatrix& q) {
            q.part[0](o + i, o + j) = 1.0;
            q.part[0](o + j, o + i) = -1.0;
          });
          for (int c = 1; c < 4; ++c)
            add([&](QuatMatrix& q) {
              q.part[c](o + i, o + j) = 1.0;
              q.part[c](o + j, o + i) = 1.0;  // -conj(e_c) = e_c for imaginary units
            });
        }
      break;
  }
  std::vector<Matrix> out;
  out.reserve(gens.size());
  for (const auto& q : gens) {
    Matrix m = realify(q, ambient);
    out.push_back(m / m.norm());
  }
  return out;
}

}  // namespace detail

class LieAlgebra {
 public:
  LieAlgebra(Family family, int n, std::vector<Matrix> basis) : family_(family), n_(n), basis_(std::move(basis)) {
    ambient_dim_ = static_cast<int>(basis_.empty() ? 0 : basis_.front().rows());
    compute_structure();
    // Rescale to a -B-orthonormal basis and recompute.
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      const double b = killing_gram_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
      if (!(b < 0.0)) throw ConstructionError("liealg", "Killing form is not negative definite");
      basis_[i] /= std::sqrt(-b);
    }
    compute_structure();
    const Eigen::Index d = dim();
    if (num::max_abs(killing_gram_ + Matrix::Identity(d, d)) > 1e-10) {
      throw ConstructionError("liealg", "basis is not Killing-orthonormal");
    }
  }

  Family family() const { return family_; }
  int n() const { return n_; }
  int ambient_dim() const { return ambient_dim_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(basis_.size()); }
  const std::vector<Matrix>& basis() const { return basis_; }
  const Matrix& killing_gram() const { return killing_gram_; }

  /// c_{ij}^k with [E_i, E_j] = sum_k c_{ij}^k E_k.
  double structure(Eigen::Index i, Eigen::Index j, Eigen::Index k) const {
    return ad_basis_[static_cast<std::size_t>(i)](k, j);
  }

  /// Matrix of ad(E_i) in the basis.
  const Matrix& ad_basis(Eigen::Index i) const { return ad_basis_[static_cast<std::size_t>(i)]; }

  void check(const AlgebraElement& x) const {
    if (x.coords.size() != dim()) {
      throw DimensionError("liealg", "element has " + std::to_string(x.coords.size()) +
                                         " coordinates, algebra dimension is " + std::to_string(dim()));
    }
  }

  Matrix to_matrix(const AlgebraElement& x) const {
    check(x);
    Matrix out = Matrix::Zero(ambient_dim_, ambient_dim_);
    for (Eigen::Index i = 0; i < dim(); ++i) out += x.coords(i) * basis_[static_cast<std::size_t>(i)];
    return out;
  }

  /// Coordinates of an ambient matrix, or nullopt if it is not in the algebra.
  std::optional<AlgebraElement> try_element(const Matrix& m, double tol = 1e-10) const {
    if (m.rows() != ambient_dim_ || m.cols() != ambient_dim_) {
      throw DimensionError("liealg", "ambient matrix size mismatch");
    }
    AlgebraElement x{Vector(dim())};
    Matrix rest = m;
    for (Eigen::Index i = 0; i < dim(); ++i) {
      const Matrix& e = basis_[static_cast<std::size_t>(i)];
      x.coords(i) = (e.array() * m.array()).sum() / e.squaredNorm();
      rest -= x.coords(i) * e;
    }
    if (rest.norm() > tol * std::max(1.0, m.norm())) return std::nullopt;
    return x;
  }

  AlgebraElement element(const Matrix& m) const {
    auto x = try_element(m);
    if (!x) throw DimensionError("liealg", "matrix is not an element of the algebra");
    return *x;
  }

  Matrix ad(const AlgebraElement& x) const {
    check(x);
    Matrix out = Matrix::Zero(dim(), dim());
    for (Eigen::Index i = 0; i < dim(); ++i)
      if (x.coords(i) != 0.0) out += x.coords(i) * ad_basis_[static_cast<std::size_t>(i)];
    return out;
  }

 private:
  void compute_structure() {
    const Eigen::Index d = dim();
    ad_basis_.assign(static_cast<std::size_t>(d), Matrix::Zero(d, d));
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = i + 1; j < d; ++j) {
        const Matrix& a = basis_[static_cast<std::size_t>(i)];
        const Matrix& b = basis_[static_cast<std::size_t>(j)];
        const Matrix c = a * b - b * a;
        auto coords = try_element(c, 1e-9);
        if (!coords) throw ConstructionError("liealg", "basis is not closed under the bracket");
        ad_basis_[static_cast<std::size_t>(i)].col(j) = coords->coords;
        ad_basis_[static_cast<std::size_t>(j)].col(i) = -coords->coords;
      }
    }
    killing_gram_ = Matrix(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = i; j < d; ++j) {
        const double b = (ad_basis_[static_cast<std::size_t>(i)].transpose().array() *
                          ad_basis_[static_cast<std::size_t>(j)].array())
                             .sum();
        killing_gram_(i, j) = killing_gram_(j, i) = b;
      }
  }

  Family family_;
  int n_;
  int ambient_dim_ = 0;
  std::vector<Matrix> basis_;
  std::vector<Matrix> ad_basis_;
  Matrix killing_gram_;
};

inline int classical_dimension(Family family, int n) {
  switch (family) {
    case Family::SO: return n * (n - 1) / 2;
    case Family::SU: return n * n - 1;
    case Family::Sp: return n * (2 * n + 1);
    case Family::U: return n * n;
  }
  return 0;
}

/// so(n) (n >= 3), su(n) (n >= 2) or sp(n) (n >= 1).
inline LieAlgebra build_classical(Family family, int n) {
  int min_n = 0;
  switch (family) {
    case Family::SO: min_n = 3; break;
    case Family::SU: min_n = 2; break;
    case Family::Sp: min_n = 1; break;
    case Family::U: throw ConstructionError("liealg", "U(n) is not semisimple; use it only as a subgroup block");
  }
  if (n < min_n) {
    throw ConstructionError("liealg", family_name(family) + "(" + std::to_string(n) +
                                          ") is not a compact semisimple algebra (need n >= " +
                                          std::to_string(min_n) + ")");
  }
  return LieAlgebra(family, n, detail::block_generators(family, n, 0, n, family));
}

inline AlgebraElement bracket(const LieAlgebra& g, const AlgebraElement& x, const AlgebraElement& y) {
  g.check(x);
  g.check(y);
  return AlgebraElement{g.ad(x) * y.coords};
}

/// B(X, Y) = trace(ad X ad Y).
inline double killing_form(const LieAlgebra& g, const AlgebraElement& x, const AlgebraElement& y) {
  g.check(x);
  g.check(y);
  return (g.ad(x) * g.ad(y)).trace();
}

}  // namespace homspace
