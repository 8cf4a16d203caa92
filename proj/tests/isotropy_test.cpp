#include <gtest/gtest.h>

#include <random>

#include "homspace/isotropy.hpp"
#include "test_support.hpp"

using namespace homspace;
using hs_test::algebra;
using hs_test::so_blocks;

namespace {

ReductiveSplit split_of(Family f, int n, BlockEmbedding emb) { return reductive_split(algebra(f, n), emb); }

std::vector<Eigen::Index> dims_of(const IsotypicReport& r) {
  std::vector<Eigen::Index> d;
  for (const auto& s : r.summands) d.push_back(s.dim());
  return d;
}

void expect_report_invariants(const ReductiveSplit& s, const IsotypicReport& r) {
  const Module mod = s.isotropy_module();
  Eigen::Index total = r.trivial_dim();
  Matrix all(s.dim_m(), 0);
  auto append = [&](const Matrix& q) {
    Matrix next(all.rows(), all.cols() + q.cols());
    next << all, q;
    all = next;
  };
  append(r.trivial_basis);
  for (const auto& q : r.summands) {
    total += q.dim();
    append(q.basis);
    for (const auto& g : mod.generators) {
      const Matrix gq = g * q.basis;
      EXPECT_LT((gq - q.basis * (q.basis.transpose() * gq)).norm(), 1e-9);
    }
    // irreducibility certificate
    EXPECT_EQ(hs_test::oracle_sym_commutant_dim(mod.restrict(q.basis).generators, q.dim()), 1);
  }
  EXPECT_EQ(total, s.dim_m());
  EXPECT_LT(num::max_abs(all.transpose() * all - Matrix::Identity(all.cols(), all.cols())), 1e-10);
  for (const auto& g : mod.generators) EXPECT_LT((g * r.trivial_basis).norm(), 1e-9);
  for (const auto& c : r.classes) {
    const Module m0 = mod.restrict(r.summands[static_cast<std::size_t>(c.members.front())].basis);
    EXPECT_EQ(hs_test::oracle_commutant_dim(m0.generators, c.dim), schur_dim(c.type));
    // aligned members carry identical generator matrices
    for (int j : c.members) {
      const Module mj = mod.restrict(r.summands[static_cast<std::size_t>(j)].basis);
      for (std::size_t a = 0; a < mj.generators.size(); ++a)
        EXPECT_LT(num::max_abs(mj.generators[a] - m0.generators[a]), 1e-9);
    }
    for (const auto& u : c.end_basis) {
      EXPECT_LT(num::max_abs(u.transpose() * u - Matrix::Identity(c.dim, c.dim)), 1e-9);
      for (const auto& g : m0.generators) EXPECT_LT(num::max_abs(u * g - g * u), 1e-9);
    }
  }
}

}  // namespace

TEST(Commutant, IrreducibleRealType) {
  const auto s = split_of(Family::SO, 4, so_blocks({{3, 1}}));
  EXPECT_EQ(commutant(s).dim(), 1);
}

TEST(Commutant, So4OverSo2) {
  const auto s = split_of(Family::SO, 4, so_blocks({{2, 2}}));
  const auto c = commutant(s);
  EXPECT_EQ(c.dim(), hs_test::oracle_commutant_dim(s.ad_h_on_m(), s.dim_m()));
  EXPECT_EQ(c.dim(), 9);  // 1 + 2 * 2^2
  EXPECT_EQ(c.sym_dim(), hs_test::oracle_sym_commutant_dim(s.ad_h_on_m(), s.dim_m()));
  for (const auto& a : c.operators)
    for (const auto& r : s.ad_h_on_m()) EXPECT_LT(num::max_abs(a * r - r * a), 1e-9);
}

TEST(Commutant, TrivialSubgroupGivesFullMatrixAlgebra) {
  const auto s = split_of(Family::SO, 4, BlockEmbedding{});
  EXPECT_EQ(commutant(s).dim(), 36);
  EXPECT_EQ(commutant(s).sym_dim(), 21);
}

TEST(Commutant, AgreesWithKroneckerOracle) {
  for (const auto& [f, n, emb] : std::vector<std::tuple<Family, int, BlockEmbedding>>{
           {Family::SO, 5, so_blocks({{3, 2}})},
           {Family::SO, 6, so_blocks({{2, 0}, {2, 2}, {2, 4}})},
           {Family::SO, 7, so_blocks({{2, 0}, {2, 2}, {3, 4}})},
           {Family::Sp, 2, BlockEmbedding{{{Family::Sp, 1, 1}}}},
           {Family::Sp, 2, BlockEmbedding{{{Family::U, 1, 0}, {Family::Sp, 1, 1}}}},
           {Family::SU, 3, BlockEmbedding{{{Family::SU, 2, 1}}}}}) {
    const auto s = split_of(f, n, emb);
    const auto c = commutant(s);
    EXPECT_EQ(c.dim(), hs_test::oracle_commutant_dim(s.ad_h_on_m(), s.dim_m())) << family_name(f) << n;
    EXPECT_EQ(c.sym_dim(), hs_test::oracle_sym_commutant_dim(s.ad_h_on_m(), s.dim_m())) << family_name(f) << n;
  }
}

TEST(Decompose, So4OverSo2) {
  const auto s = split_of(Family::SO, 4, so_blocks({{2, 2}}));
  const auto r = decompose(s, 0);
  EXPECT_EQ(r.trivial_dim(), 1);
  EXPECT_EQ(dims_of(r), (std::vector<Eigen::Index>{2, 2}));
  ASSERT_EQ(r.classes.size(), 1u);
  EXPECT_EQ(r.classes[0].multiplicity(), 2);
  EXPECT_EQ(r.classes[0].type, SchurType::Unitary);
  EXPECT_EQ(r.warnings.size(), 1u);
  expect_report_invariants(s, r);
  // summands are span(e13, e14) and span(e23, e24)
  const Matrix& q0 = r.summands[0].basis;
  EXPECT_NEAR(q0.row(1).norm() + q0.row(2).norm(), 2.0, 1e-12);
}

TEST(Decompose, GeneralizedWallach334) {
  const auto s = split_of(Family::SO, 10, so_blocks({{3, 0}, {3, 3}, {4, 6}}));
  const auto r = decompose(s, 0);
  EXPECT_EQ(r.trivial_dim(), 0);
  EXPECT_EQ(dims_of(r), (std::vector<Eigen::Index>{9, 12, 12}));
  EXPECT_EQ(r.classes.size(), 3u);
  for (const auto& c : r.classes) EXPECT_EQ(c.type, SchurType::Orthogonal);
  expect_report_invariants(s, r);
}

TEST(Decompose, SmallWallachSplitsTheSo2So2Piece) {
  // SO(2) x SO(2) acts on R^2 (x) R^2 with the two weights t1 + t2 and t1 - t2
  const auto s = split_of(Family::SO, 7, so_blocks({{2, 0}, {2, 2}, {3, 4}}));
  const auto r = decompose(s, 0);
  EXPECT_EQ(dims_of(r), (std::vector<Eigen::Index>{2, 2, 6, 6}));
  EXPECT_EQ(r.classes.size(), 4u);
  expect_report_invariants(s, r);
}

TEST(Decompose, SymplecticQuotients) {
  for (auto [n, k] : {std::pair{2, 1}, {3, 1}, {3, 2}}) {
    // H = Sp(n - k) in the last block; the centralizer Sp(k) is trivial on m
    const auto s = split_of(Family::Sp, n, BlockEmbedding{{{Family::Sp, n - k, k}}});
    const auto r = decompose(s, 0);
    EXPECT_EQ(r.trivial_dim(), k * (2 * k + 1));
    Eigen::Index rest = 0;
    for (const auto& q : r.summands) rest += q.dim();
    EXPECT_EQ(rest, 4 * k * (n - k));
    for (const auto& c : r.classes) EXPECT_EQ(c.type, SchurType::Symplectic);
    expect_report_invariants(s, r);
  }
}

TEST(Decompose, SpOverSpTimesU1) {
  for (int n : {1, 2}) {
    const auto s = split_of(Family::Sp, n + 1, BlockEmbedding{{{Family::U, 1, 0}, {Family::Sp, n, 1}}});
    const auto r = decompose(s, 0);
    EXPECT_EQ(r.trivial_dim(), 0);
    EXPECT_EQ(dims_of(r), (std::vector<Eigen::Index>{2, 4 * n}));
    EXPECT_EQ(r.classes.size(), 2u);
    expect_report_invariants(s, r);
  }
}

TEST(Decompose, CharacterTest) {
  std::mt19937_64 rng(17);
  for (const auto& [f, n, emb] : std::vector<std::tuple<Family, int, BlockEmbedding>>{
           {Family::SO, 7, so_blocks({{3, 4}})},
           {Family::SO, 4, so_blocks({{2, 2}})},
           {Family::SO, 8, so_blocks({{3, 0}, {3, 3}})},
           {Family::Sp, 3, BlockEmbedding{{{Family::Sp, 1, 2}}}}}) {
    const auto s = split_of(f, n, emb);
    const auto r = decompose(s, 0);
    for (int sample = 0; sample < 20; ++sample) {
      Matrix x = Matrix::Zero(s.dim_m(), s.dim_m());
      const Vector c = hs_test::random_vector(rng, s.dim_h(), 2.0);
      for (Eigen::Index j = 0; j < s.dim_h(); ++j) x += c(j) * s.ad_h_on_m()[static_cast<std::size_t>(j)];
      const Matrix adh = num::matrix_exp(x);
      for (std::size_t i = 0; i < r.summands.size(); ++i)
        for (std::size_t j = i + 1; j < r.summands.size(); ++j) {
          if (r.summands[i].dim() != r.summands[j].dim()) continue;
          const double ti = (r.summands[i].basis.transpose() * adh * r.summands[i].basis).trace();
          const double tj = (r.summands[j].basis.transpose() * adh * r.summands[j].basis).trace();
          if (r.summands[i].cls == r.summands[j].cls) EXPECT_NEAR(ti, tj, 1e-8);
        }
    }
    // inequivalent pairs of equal dimension differ for some sample
    for (std::size_t i = 0; i < r.summands.size(); ++i)
      for (std::size_t j = i + 1; j < r.summands.size(); ++j) {
        if (r.summands[i].cls == r.summands[j].cls || r.summands[i].dim() != r.summands[j].dim()) continue;
        double gap = 0.0;
        for (int sample = 0; sample < 20; ++sample) {
          Matrix x = Matrix::Zero(s.dim_m(), s.dim_m());
          const Vector c = hs_test::random_vector(rng, s.dim_h(), 2.0);
          for (Eigen::Index k = 0; k < s.dim_h(); ++k) x += c(k) * s.ad_h_on_m()[static_cast<std::size_t>(k)];
          const Matrix adh = num::matrix_exp(x);
          gap = std::max(gap, std::abs((r.summands[i].basis.transpose() * adh * r.summands[i].basis).trace() -
                                       (r.summands[j].basis.transpose() * adh * r.summands[j].basis).trace()));
        }
        EXPECT_GT(gap, 1e-8);
      }
  }
}

TEST(Decompose, ClassStructureIndependentOfSeed) {
  const auto s = split_of(Family::SO, 8, so_blocks({{3, 0}, {3, 3}}));
  auto shape = [](const IsotypicReport& r) {
    std::vector<std::tuple<Eigen::Index, int, int>> out;
    for (const auto& c : r.classes) out.emplace_back(c.dim, c.multiplicity(), schur_dim(c.type));
    std::sort(out.begin(), out.end());
    return std::make_pair(r.trivial_dim(), out);
  };
  const auto ref = shape(decompose(s, 0));
  for (std::uint64_t seed : {1ULL, 2ULL, 12345ULL, 0xdeadbeefULL}) EXPECT_EQ(shape(decompose(s, seed)), ref);
}

TEST(Decompose, DeterministicForFixedSeed) {
  const auto s = split_of(Family::SO, 6, so_blocks({{2, 4}}));
  const auto a = decompose(s, 3), b = decompose(s, 3);
  ASSERT_EQ(a.summands.size(), b.summands.size());
  for (std::size_t i = 0; i < a.summands.size(); ++i) EXPECT_EQ(a.summands[i].basis, b.summands[i].basis);
}

TEST(SchurType, StandardModules) {
  auto module_of = [](std::vector<Matrix> gens) {
    Module m{gens.front().rows(), std::move(gens), {}};
    m.factor.assign(m.generators.size(), 0);
    return m;
  };
  EXPECT_EQ(end_dimension(module_of({hs_test::e(3, 0, 1), hs_test::e(3, 0, 2), hs_test::e(3, 1, 2)})), 1);
  EXPECT_EQ(end_dimension(module_of({hs_test::e(2, 0, 1)})), 2);
  // Sp(1) on H = R^4 by left multiplication with i, j, k
  Matrix li(4, 4), lj(4, 4), lk(4, 4);
  li << 0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0;
  lj << 0, 0, -1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, -1, 0, 0;
  lk << 0, 0, 0, -1, 0, 0, -1, 0, 0, 1, 0, 0, 1, 0, 0, 0;
  ASSERT_LT(num::max_abs(li * lj - lk), 1e-15);
  EXPECT_EQ(end_dimension(module_of({li, lj, lk})), 4);
}

TEST(SummandTable, ClosedForms) {
  using R = SummandTableRow;
  EXPECT_EQ(summand_count_table({R::Wallach, 2, 2, 2, {}}), 3);
  EXPECT_EQ(summand_count_table({R::Stiefel, 2, 2, 3, {}}), 10);
  EXPECT_EQ(summand_count_table({R::ThreeFactor, 3, 3, 3, {2, 2, 2}}), 15);
  EXPECT_EQ(summand_count_table({R::TwoFactor, 3, 3, 2, {3, 3}}), 6);
  EXPECT_EQ(summand_count_table({R::OneFactor, 2, 2, 2, {2}}), 10);
}

TEST(SummandTable, ConstraintViolations) {
  using R = SummandTableRow;
  EXPECT_THROW(summand_count_table({R::ThreeFactor, 2, 2, 2, {2, 2, 2}}), ParameterError);  // 6 >= 5
  EXPECT_THROW(summand_count_table({R::TwoFactor, 2, 2, 2, {3}}), ParameterError);          // arity
  EXPECT_THROW(summand_count_table({R::Wallach, 1, 2, 2, {}}), ParameterError);
  EXPECT_THROW(summand_count_table({R::OneFactor, 2, 2, 2, {0}}), ParameterError);
}

TEST(SummandTable, MatchesDecompositionAtConcreteParameters) {
  using R = SummandTableRow;
  struct Row {
    SummandTableParams p;
    int n;
    BlockEmbedding emb;
  };
  const std::vector<Row> rows = {
      {{R::Wallach, 3, 3, 3, {}}, 9, so_blocks({{3, 0}, {3, 3}, {3, 6}})},
      {{R::ThreeFactor, 4, 4, 3, {3, 3, 3}}, 11, so_blocks({{3, 0}, {3, 3}, {3, 6}})},
      {{R::TwoFactor, 3, 3, 2, {3, 3}}, 8, so_blocks({{3, 0}, {3, 3}})},
      {{R::OneFactor, 2, 2, 2, {2}}, 6, so_blocks({{2, 4}})},
      {{R::Stiefel, 2, 2, 3, {}}, 7, so_blocks({{3, 4}})},
  };
  for (const auto& row : rows) {
    const auto r = decompose(split_of(Family::SO, row.n, row.emb), 0);
    EXPECT_EQ(r.summand_count(), summand_count_table(row.p)) << static_cast<int>(row.p.row);
  }
}
