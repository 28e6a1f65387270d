#include <gtest/gtest.h>

#include "brute_force_si.hpp"
#include "sidecomp/decomposition.hpp"
#include "test_helpers.hpp"

namespace sidecomp {
namespace {

TEST(Oracle, CorpusIsSmall) {
  const auto corpus = oracle::small_corpus();
  EXPECT_GE(corpus.size(), 20u);
  for (const auto& nt : corpus) EXPECT_LE(nt.tuple.dim(), 4) << nt.name;
}

TEST(Oracle, VerdictsAreBackedBySearchOrWitness) {
  for (const auto& nt : oracle::small_corpus()) {
    const auto s = oracle::search_idempotent(nt.tuple, kDefaultSeed);
    if (!s.found) {
      // 1x1 tuples have no nontrivial trace to look for
      if (nt.tuple.dim() > 1) EXPECT_GE(s.starts, 200) << nt.name;
      continue;
    }
    EXPECT_LE(s.residual, 1e-10) << nt.name;
    EXPECT_GE(s.trace, 1) << nt.name;
    EXPECT_LE(s.trace, nt.tuple.dim() - 1) << nt.name;
    for (Index i = 0; i < nt.tuple.arity(); ++i)
      EXPECT_LT((s.idempotent * nt.tuple[i] - nt.tuple[i] * s.idempotent).norm(), 1e-8) << nt.name;
  }
}

TEST(Oracle, AgreesWithStructureAlgorithm) {
  for (const auto& nt : oracle::small_corpus())
    EXPECT_EQ(oracle::oracle_strongly_irreducible(nt.tuple, kDefaultSeed), is_strongly_irreducible(nt.tuple)) << nt.name;
}

TEST(Oracle, CommutantDimensionsAgree) {
  for (const auto& nt : oracle::small_corpus())
    EXPECT_EQ(static_cast<Index>(oracle::commutant_by_lu(nt.tuple).size()), joint_commutant(nt.tuple).algebra_dim())
        << nt.name;
}

}  // namespace
}  // namespace sidecomp
