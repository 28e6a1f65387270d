#include <gtest/gtest.h>

#include <numbers>

#include "sidecomp/decomposition.hpp"
#include "sidecomp/k_invariant.hpp"
#include "sidecomp/errors.hpp"
#include "test_helpers.hpp"

namespace sidecomp {
namespace {

using test::diag;
using test::single;

// Block projections and the cyclic block permutation of inflate(J_2(0), n).
struct Copies {
  OperatorTuple t;
  std::vector<Matrix> blocks;
  Matrix cycle;  // cycle * P_i * cycle^{-1} = P_{i+1 mod n}
};

Copies copies(Index n) {
  Copies c{inflate(single(jordan_block(2, 0.0)), n), {}, Matrix::Zero(2 * n, 2 * n)};
  for (Index i = 0; i < n; ++i) {
    Matrix p = Matrix::Zero(2 * n, 2 * n);
    p.block(2 * i, 2 * i, 2, 2) = Matrix::Identity(2, 2);
    c.blocks.push_back(p);
    c.cycle.block(2 * ((i + 1) % n), 2 * i, 2, 2) = Matrix::Identity(2, 2);
  }
  return c;
}

TEST(StronglyIrreducible, Examples) {
  EXPECT_TRUE(is_strongly_irreducible(single(jordan_block(3, 0.0))));
  EXPECT_FALSE(is_strongly_irreducible(single(diag({1.0, 2.0}))));
  EXPECT_TRUE(is_strongly_irreducible(single(Matrix::Identity(1, 1))));
  EXPECT_FALSE(is_strongly_irreducible(single(Matrix::Identity(2, 2))));
}

TEST(UnitDecomposition, IdentityGivesRankOneResolution) {
  const auto dec = unit_si_decomposition(single(Matrix::Identity(2, 2)));
  ASSERT_EQ(dec.size(), 2);
  Matrix sum = Matrix::Zero(2, 2);
  for (const auto& p : dec.idempotents) {
    EXPECT_EQ(linalg::numerical_rank(p, 1e-10), 1);
    sum += p;
  }
  EXPECT_LT((sum - Matrix::Identity(2, 2)).norm(), 1e-10);
  EXPECT_TRUE(check_unit_decomposition(dec, {}, true).pass);
}

TEST(UnitDecomposition, SpectralBlocks) {
  const auto t = test::j2_0_plus_j2_1();
  const auto dec = unit_si_decomposition(t);
  ASSERT_EQ(dec.size(), 2);
  const Matrix e0 = diag({1.0, 1.0, 0.0, 0.0});
  const Matrix e1 = diag({0.0, 0.0, 1.0, 1.0});
  const bool direct = (dec.idempotents[0] - e0).norm() < 1e-10 && (dec.idempotents[1] - e1).norm() < 1e-10;
  const bool swapped = (dec.idempotents[0] - e1).norm() < 1e-10 && (dec.idempotents[1] - e0).norm() < 1e-10;
  EXPECT_TRUE(direct || swapped);
  EXPECT_NE(dec.block[0], dec.block[1]);
}

TEST(UnitDecomposition, TwoCopies) {
  const auto c = copies(2);
  const auto dec = unit_si_decomposition(c.t);
  ASSERT_EQ(dec.size(), 2);
  EXPECT_EQ(dec.block[0], dec.block[1]);
  const auto res = check_unit_decomposition(dec, {}, true);
  EXPECT_TRUE(res.pass);
  EXPECT_TRUE(res.blocks_si);
  for (const auto& p : dec.idempotents) {
    const auto r = restrict(c.t, p);
    ASSERT_EQ(r.tuple.dim(), 2);
    EXPECT_TRUE(find_similarity(r.tuple, single(jordan_block(2, 0.0))).similar);
  }
}

TEST(UnitDecomposition, CheckDetectsBrokenFamilies) {
  auto dec = unit_si_decomposition(single(diag({1.0, 2.0})));
  dec.idempotents[1] = diag({0.0, 0.5});
  EXPECT_FALSE(check_unit_decomposition(dec).pass);
}

TEST(Transport, IdentityAndPermutation) {
  const auto t = single(diag({1.0, 2.0}));
  const auto dec = unit_si_decomposition(t);
  const auto same = transport_decomposition(dec, Matrix::Identity(2, 2));
  for (Index i = 0; i < dec.size(); ++i)
    EXPECT_LT((same.idempotents[static_cast<std::size_t>(i)] - dec.idempotents[static_cast<std::size_t>(i)]).norm(), 1e-14);

  const auto moved = transport_decomposition(dec, test::swap2());
  EXPECT_LT((moved.tuple[0] - diag({2.0, 1.0})).norm(), 1e-14);
  for (Index i = 0; i < dec.size(); ++i) {
    const Matrix& p = dec.idempotents[static_cast<std::size_t>(i)];
    const Matrix expect = test::swap2() * p * test::swap2();
    EXPECT_LT((moved.idempotents[static_cast<std::size_t>(i)] - expect).norm(), 1e-14);
  }
  EXPECT_TRUE(check_unit_decomposition(moved).pass);
}

TEST(BlockSimilarity, Examples) {
  const auto c = copies(2);
  const auto self = block_similarity(c.t, c.blocks[0], c.blocks[0]);
  ASSERT_TRUE(self.intertwiner.has_value());
  EXPECT_EQ(self.intertwiner->local.rows(), 2);
  EXPECT_GT(linalg::sigma_min(self.intertwiner->local), 1e-6);

  EXPECT_TRUE(block_similarity(c.t, c.blocks[0], c.blocks[1]).intertwiner.has_value());

  const auto t = test::j2_0_plus_j2_1();
  const auto none = block_similarity(t, diag({1.0, 1.0, 0.0, 0.0}), diag({0.0, 0.0, 1.0, 1.0}));
  EXPECT_FALSE(none.intertwiner.has_value());
  EXPECT_FALSE(none.reason.empty());
  EXPECT_FALSE(idempotent_classes_equal(t, diag({1.0, 1.0, 0.0, 0.0}), diag({0.0, 0.0, 1.0, 1.0})));
}

TEST(AssembleGlobal, IdentityPairing) {
  const auto t = single(diag({1.0, 2.0}));
  std::vector<BlockPairing> pairs;
  for (const Matrix& p : {diag({1.0, 0.0}), diag({0.0, 1.0})}) {
    auto bs = block_similarity(t, p, p);
    ASSERT_TRUE(bs.intertwiner.has_value());
    pairs.push_back({p, p, *bs.intertwiner});
  }
  const Matrix x = assemble_global(t, pairs);
  // each local map is a nonzero scalar on its coordinate line
  EXPECT_LT(std::abs(x(0, 1)) + std::abs(x(1, 0)), 1e-12);
  EXPECT_GT(std::abs(x(0, 0)), 1e-6);
  EXPECT_GT(std::abs(x(1, 1)), 1e-6);
}

TEST(AssembleGlobal, DifferentBlocksCannotBeSwapped) {
  const auto t = single(diag({1.0, 2.0}));
  EXPECT_FALSE(block_similarity(t, diag({1.0, 0.0}), diag({0.0, 1.0})).intertwiner.has_value());
}

TEST(AssembleGlobal, CrossPairingOfCopies) {
  const auto c = copies(2);
  std::vector<BlockPairing> pairs;
  for (int i = 0; i < 2; ++i) {
    auto bs = block_similarity(c.t, c.blocks[i], c.blocks[1 - i]);
    ASSERT_TRUE(bs.intertwiner.has_value());
    pairs.push_back({c.blocks[i], c.blocks[1 - i], *bs.intertwiner});
  }
  const Matrix x = assemble_global(c.t, pairs);
  const auto moved = conjugate(c.t, x);
  EXPECT_LT(test::max_tuple_diff(moved, c.t), 1e-10);
  const Matrix xinv = x.inverse();
  EXPECT_LT((x * c.blocks[0] * xinv - c.blocks[1]).norm(), 1e-10);
}

TEST(Align, NothingToAlign) {
  const auto c = copies(2);
  const std::vector<PartialConjugator> partial{{Matrix::Identity(4, 4), {0, 1}}};
  const std::vector<Index> perm{0, 1};
  const auto a = align_decompositions(c.t, c.blocks, c.blocks, partial, Matrix::Identity(4, 4), perm);
  EXPECT_TRUE(a.matches.empty());
  EXPECT_TRUE(a.bijective);
}

TEST(Align, TwoCopiesSwap) {
  const auto c = copies(2);
  const std::vector<Matrix> q{c.blocks[1], c.blocks[0]};
  const std::vector<PartialConjugator> partial{{c.cycle, {0}}};
  const std::vector<Index> perm{0, 1};
  const auto a = align_decompositions(c.t, c.blocks, q, partial, c.cycle, perm);
  ASSERT_EQ(a.matches.size(), 1u);
  EXPECT_EQ(a.matches[0].r, 1);
  EXPECT_EQ(a.matches[0].r_prime, 1);
  EXPECT_EQ(a.matches[0].word, "Y");
  EXPECT_LT((a.matches[0].z - c.cycle).norm(), 1e-14);
  EXPECT_TRUE(a.bijective);
}

TEST(Align, ThreeCycle) {
  const auto c = copies(3);
  const Matrix y = c.cycle.inverse();
  const std::vector<PartialConjugator> partial{{Matrix::Identity(6, 6), {0}}};
  const std::vector<Index> perm{1, 2, 0};
  const auto a = align_decompositions(c.t, c.blocks, c.blocks, partial, y, perm);
  ASSERT_EQ(a.matches.size(), 2u);
  for (const auto& m : a.matches) {
    EXPECT_LE(m.alternations, 3);
    EXPECT_LT(m.residual, 1e-10);
  }
  EXPECT_TRUE(a.bijective);
  EXPECT_NE(a.matches[0].r_prime, a.matches[1].r_prime);
}

TEST(Align, RejectsWrongPermutation) {
  const auto c = copies(2);
  const std::vector<PartialConjugator> partial{{Matrix::Identity(4, 4), {0}}};
  const std::vector<Index> perm{0, 1};
  EXPECT_THROW(align_decompositions(c.t, c.blocks, c.blocks, partial, c.cycle, perm), InputError);
}

TEST(DecompositionsEquivalent, SameDecomposition) {
  const auto t = test::j2_0_plus_j2_1();
  const auto d = unit_si_decomposition(t);
  const auto r = decompositions_equivalent(t, d, d);
  ASSERT_TRUE(r.equivalence.has_value());
  EXPECT_EQ(r.equivalence->permutation, (std::vector<Index>{0, 1}));
  EXPECT_LT(r.equivalence->residual, 1e-10);
}

TEST(DecompositionsEquivalent, RotatedResolutionOfIdentity) {
  const auto t = single(Matrix::Identity(2, 2));
  const auto d1 = unit_si_decomposition(t);
  const double c = std::cos(0.4), s = std::sin(0.4);
  Matrix r(2, 2);
  r << c, -s, s, c;
  UnitDecomposition d2 = d1;
  d2.idempotents = {r * diag({1.0, 0.0}) * r.adjoint(), r * diag({0.0, 1.0}) * r.adjoint()};
  const auto eq = decompositions_equivalent(t, d1, d2);
  ASSERT_TRUE(eq.equivalence.has_value());
  EXPECT_LT(eq.equivalence->residual, 1e-8);
}

TEST(DecompositionsEquivalent, PermutedBlocks) {
  const auto t = test::j2_0_plus_j2_1();
  const auto d1 = unit_si_decomposition(t);
  UnitDecomposition d2 = d1;
  std::swap(d2.idempotents[0], d2.idempotents[1]);
  const auto eq = decompositions_equivalent(t, d1, d2);
  ASSERT_TRUE(eq.equivalence.has_value());
  EXPECT_EQ(eq.equivalence->permutation, (std::vector<Index>{1, 0}));
  EXPECT_LT(eq.equivalence->residual, 1e-10);
}

TEST(DecompositionsEquivalent, CountMismatch) {
  const auto t = single(Matrix::Identity(2, 2));
  const auto d1 = unit_si_decomposition(t);
  UnitDecomposition d2 = d1;
  d2.idempotents = {Matrix::Identity(2, 2)};
  const auto eq = decompositions_equivalent(t, d1, d2);
  EXPECT_FALSE(eq.equivalence.has_value());
  EXPECT_EQ(eq.reason, "count mismatch");
}

}  // namespace
}  // namespace sidecomp
