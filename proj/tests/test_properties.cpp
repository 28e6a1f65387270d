#include <gtest/gtest.h>

#include "sidecomp/commutant.hpp"
#include "sidecomp/decomposition.hpp"
#include "sidecomp/k_invariant.hpp"
#include "sidecomp/planted.hpp"
#include "test_helpers.hpp"

namespace sidecomp {
namespace {

bool same_counts(const SimilarityInvariant& a, const SimilarityInvariant& b) {
  return a.k == b.k && a.multiplicities == b.multiplicities;
}

class PlantedProperty : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(PlantedProperty, RecoversPlantedInvariant) {
  const auto inst = random_planted(GetParam());
  const auto inv = v_semigroup_invariant(inst.tuple);
  EXPECT_EQ(inv.k, inst.k());
  EXPECT_EQ(inv.multiplicities, inst.multiplicities());
  Index total = 0;
  for (std::size_t i = 0; i < inv.representatives.size(); ++i) total += inv.multiplicities[i] * inv.representatives[i].dim();
  EXPECT_EQ(total, inst.dim());
}

TEST_P(PlantedProperty, InvariantUnderFurtherConjugation) {
  const auto inst = random_planted(GetParam());
  Rng rng(Rng::mix(GetParam(), 77));
  const Matrix y = random_conjugator(rng, inst.dim(), 10.0);
  const auto s = conjugate(inst.tuple, y);
  EXPECT_TRUE(same_counts(v_semigroup_invariant(inst.tuple), v_semigroup_invariant(s)));
}

TEST_P(PlantedProperty, SeedIndependence) {
  const auto inst = random_planted(GetParam());
  NumericPolicy a, b;
  a.seed = 1;
  b.seed = Rng::mix(GetParam(), 5);
  EXPECT_TRUE(same_counts(v_semigroup_invariant(inst.tuple, a), v_semigroup_invariant(inst.tuple, b)));
}

TEST_P(PlantedProperty, DecompositionInvariants) {
  const auto inst = random_planted(GetParam());
  const auto dec = unit_si_decomposition(inst.tuple);
  const auto res = check_unit_decomposition(dec, {}, true);
  EXPECT_TRUE(res.pass);
  EXPECT_TRUE(res.blocks_si);
  Index primitive = 0;
  for (const auto& c : inst.classes) primitive += c.multiplicity;
  EXPECT_EQ(dec.size(), primitive);
}

TEST_P(PlantedProperty, TransportedDecompositionStaysValid) {
  const auto inst = random_planted(GetParam());
  const auto dec = unit_si_decomposition(inst.tuple);
  Rng rng(Rng::mix(GetParam(), 91));
  const Matrix y = random_conjugator(rng, inst.dim(), 5.0);
  const auto moved = transport_decomposition(dec, y);
  EXPECT_TRUE(check_unit_decomposition(moved).pass);
  const auto fresh = unit_si_decomposition(moved.tuple);
  EXPECT_EQ(fresh.size(), moved.size());
}

INSTANTIATE_TEST_SUITE_P(Seeds, PlantedProperty, ::testing::Range<std::uint64_t>(100, 112));

class CommutingProperty : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(CommutingProperty, CommutantClosedUnderProducts) {
  const auto t = random_commuting_tuple(GetParam());
  const auto a = joint_commutant(t);
  Rng rng(GetParam());
  Vector c1(a.algebra_dim()), c2(a.algebra_dim());
  for (Index i = 0; i < a.algebra_dim(); ++i) {
    c1(i) = rng.complex_normal();
    c2(i) = rng.complex_normal();
  }
  const Matrix x = a.element(c1), y = a.element(c2);
  const double scale = std::max(1.0, x.norm() * y.norm());
  EXPECT_LT(a.distance(x * y), 1e-8 * scale);
  EXPECT_LT(a.distance(Matrix::Identity(t.dim(), t.dim())), 1e-10);
}

TEST_P(CommutingProperty, InflationIdentity) {
  const auto t = random_commuting_tuple(GetParam());
  for (Index n : {2, 3}) EXPECT_TRUE(inflation_commutant_check(t, n).pass);
}

TEST_P(CommutingProperty, CommutantDimensionUnderConjugation) {
  const auto t = random_commuting_tuple(GetParam());
  Rng rng(Rng::mix(GetParam(), 3));
  const auto s = conjugate(t, random_conjugator(rng, t.dim(), 10.0));
  EXPECT_EQ(joint_commutant(t).algebra_dim(), joint_commutant(s).algebra_dim());
}

TEST_P(CommutingProperty, RadicalIsNilpotent) {
  const auto t = random_commuting_tuple(GetParam());
  const auto a = joint_commutant(t);
  const auto rad = radical(a);
  for (const auto& n : rad.basis) {
    Matrix p = n;
    for (Index k = 1; k < t.dim(); ++k) p = p * n;
    EXPECT_LT(p.norm(), 1e-8);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, CommutingProperty, ::testing::Range<std::uint64_t>(1, 16));

TEST(Determinism, SameSeedSameDecomposition) {
  const auto inst = random_planted(4242);
  const auto a = unit_si_decomposition(inst.tuple);
  const auto b = unit_si_decomposition(inst.tuple);
  ASSERT_EQ(a.size(), b.size());
  for (Index i = 0; i < a.size(); ++i)
    EXPECT_EQ(a.idempotents[static_cast<std::size_t>(i)], b.idempotents[static_cast<std::size_t>(i)]);
}

}  // namespace
}  // namespace sidecomp
