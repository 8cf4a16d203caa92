#include <gtest/gtest.h>

#include <random>

#include "homspace/metricspace.hpp"
#include "test_support.hpp"

using namespace homspace;
using hs_test::algebra;
using hs_test::so_blocks;

namespace {

struct Built {
  ReductiveSplit split;
  IsotypicReport report;
  MetricSubspace space;
};

Built build(Family f, int n, const BlockEmbedding& emb) {
  auto s = reductive_split(algebra(f, n), emb);
  auto r = decompose(s, 0);
  auto sp = metric_space_basis(r, commutant(s));
  return {std::move(s), std::move(r), std::move(sp)};
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

std::vector<Matrix> stacked_generators(const ReductiveSplit& s, const std::vector<AlgebraElement>& xs) {
  std::vector<Matrix> out = s.ad_h_on_m();
  for (const auto& x : xs) out.push_back(s.m_basis().transpose() * s.g().ad(x) * s.m_basis());
  return out;
}

}  // namespace

TEST(MetricSpace, So4OverSo2HasFiveParameters) {
  const auto b = build(Family::SO, 4, so_blocks({{2, 2}}));
  EXPECT_EQ(b.space.dim(), 5);
  EXPECT_EQ(b.space.param_names, (std::vector<std::string>{"x1", "x2", "x3", "alpha2_3", "alpha2_3_u1"}));
}

TEST(MetricSpace, So5OverSo3) {
  const auto b = build(Family::SO, 5, so_blocks({{3, 2}}));
  EXPECT_EQ(b.space.dim(), 4);
  EXPECT_EQ(b.space.dim(), hs_test::oracle_sym_commutant_dim(b.split.ad_h_on_m(), b.split.dim_m()));
}

TEST(MetricSpace, TrivialSubgroupGivesAllSymmetricMatrices) {
  const auto b = build(Family::SO, 4, BlockEmbedding{});
  EXPECT_EQ(b.space.dim(), 21);
}

TEST(MetricSpace, MultiplicityFreeIsBlockScalar) {
  const auto b = build(Family::SO, 10, so_blocks({{3, 0}, {3, 3}, {4, 6}}));
  EXPECT_EQ(b.space.dim(), 3);
  for (const auto& x : b.space.basis) EXPECT_TRUE(is_block_scalar(b.space, x));
}

TEST(MetricSpace, BasisCommutesAndIsLinearlyIndependent) {
  for (const auto& [f, n, emb] : std::vector<std::tuple<Family, int, BlockEmbedding>>{
           {Family::SO, 4, so_blocks({{2, 2}})},
           {Family::SO, 7, so_blocks({{3, 4}})},
           {Family::SO, 8, so_blocks({{3, 0}, {3, 3}})},
           {Family::Sp, 3, BlockEmbedding{{{Family::Sp, 1, 2}}}}}) {
    const auto b = build(f, n, emb);
    EXPECT_EQ(b.space.dim(), hs_test::oracle_sym_commutant_dim(b.split.ad_h_on_m(), b.split.dim_m()));
    Matrix flat(b.split.dim_m() * b.split.dim_m(), b.space.dim());
    for (Eigen::Index k = 0; k < b.space.dim(); ++k) {
      const Matrix& x = b.space.basis[static_cast<std::size_t>(k)];
      EXPECT_LT(num::max_abs(x - x.transpose()), 1e-12);
      EXPECT_LT(commutation_residual(x, b.split.ad_h_on_m()), 1e-9);
      flat.col(k) = Eigen::Map<const Vector>(x.data(), x.size());
    }
    EXPECT_EQ(hs_test::oracle_rank(flat), b.space.dim());
  }
}

TEST(Assemble, So4OverSo2Examples) {
  const auto b = build(Family::SO, 4, so_blocks({{2, 2}}));
  EXPECT_THROW(assemble_metric(b.space, vec({1, 1, 1, 2, 0})), PositivityError);
  const auto a = assemble_metric(b.space, vec({1, 2, 3, 0.5, 0}));
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix);
  const double r = std::sqrt(0.5);
  const Vector expect = vec({1.0, 2.5 - r, 2.5 - r, 2.5 + r, 2.5 + r});
  std::vector<double> got(es.eigenvalues().data(), es.eigenvalues().data() + 5), want(expect.data(), expect.data() + 5);
  std::sort(want.begin(), want.end());
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(got[static_cast<std::size_t>(k)], want[static_cast<std::size_t>(k)], 1e-12);
  EXPECT_LT((metric_coordinates(b.space, a.matrix) - a.params).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Assemble, RejectsWrongLength) {
  const auto b = build(Family::SO, 4, so_blocks({{2, 2}}));
  EXPECT_THROW(assemble_metric(b.space, vec({1, 2, 3})), DimensionError);
}

TEST(Assemble, PositiveConeIsClosedUnderScalingAndSums) {
  const auto b = build(Family::SO, 7, so_blocks({{3, 4}}));
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(1.0, 2.0), c(0.01, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    Vector p(b.space.dim());
    for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = b.space.param_names[static_cast<std::size_t>(k)][0] == 'x' ? u(rng) : 0.0;
    const auto a = assemble_metric(b.space, p);
    const double lam = c(rng);
    const auto scaled = assemble_metric(b.space, lam * p);
    EXPECT_LT(num::max_abs(scaled.matrix - lam * a.matrix), 1e-12 * lam * 4);
    EXPECT_NO_THROW(assemble_metric(b.space, p + scaled.params));
  }
}

TEST(FixedSet, KEqualsHLeavesSpaceUnchanged) {
  const auto b = build(Family::SO, 7, so_blocks({{3, 4}}));
  const auto ks = k_subgroup_split(b.split, so_blocks({{3, 4}}));
  const auto fixed = fixed_set_under_K(b.space, b.split, ks.generators());
  EXPECT_EQ(fixed.dim(), b.space.dim());
}

TEST(FixedSet, StiefelOverWallachMatchesKroneckerOracle) {
  const auto b = build(Family::SO, 7, so_blocks({{3, 4}}));
  EXPECT_EQ(b.space.dim(), 31);
  const auto ks = k_subgroup_split(b.split, so_blocks({{2, 0}, {2, 2}, {3, 4}}));
  const auto fixed = fixed_set_under_K(b.space, b.split, ks.generators());
  // by hand: 3 on a, one scalar for each of the two SO(2) x SO(2) weights on
  // R^2 (x) R^2, and one scalar per R^2 factor on R^4 (x) R^3
  EXPECT_EQ(fixed.dim(), 7);
  EXPECT_EQ(fixed.dim(), hs_test::oracle_sym_commutant_dim(stacked_generators(b.split, ks.generators()), 18));
  for (const auto& x : fixed.basis) EXPECT_LT(commutation_residual(x, ks.ad_k_on_m), 1e-9);
}

TEST(FixedSet, InclusionChain) {
  const auto b = build(Family::SO, 5, so_blocks({{3, 2}}));
  const auto ks = k_subgroup_split(b.split, so_blocks({{2, 0}, {3, 2}}));
  const auto phi_k = fixed_set_under_K(b.space, b.split, ks.generators());
  const auto norm = normalizer_algebra(b.split);
  std::vector<AlgebraElement> ngens;
  for (Eigen::Index k = 0; k < norm.dim(); ++k) ngens.push_back(AlgebraElement{norm.basis.col(k)});
  const auto phi_full = fixed_set_under_K(b.space, b.split, ngens, MetricLabel::PhiFull);
  EXPECT_EQ(b.space.dim(), 4);
  EXPECT_EQ(phi_k.dim(), 2);
  EXPECT_EQ(phi_full.dim(), 2);
  auto inside = [](const MetricSubspace& small, const MetricSubspace& big) {
    for (const auto& x : small.basis) {
      const Vector c = metric_coordinates(big, x);
      Matrix back = Matrix::Zero(x.rows(), x.cols());
      for (Eigen::Index k = 0; k < c.size(); ++k) back += c(k) * big.basis[static_cast<std::size_t>(k)];
      if (num::max_abs(back - x) > 1e-9) return false;
    }
    return true;
  };
  EXPECT_TRUE(inside(phi_full, phi_k));
  EXPECT_TRUE(inside(phi_k, b.space));
}

TEST(FixedSet, RejectsGeneratorsOutsideNormalizer) {
  const auto b = build(Family::SO, 5, so_blocks({{3, 2}}));
  const auto x = b.split.g().element(hs_test::e(5, 0, 2));
  EXPECT_THROW(fixed_set_under_K(b.space, b.split, {x}), ContainmentError);
}
