#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sidecomp/decomposition.hpp"
#include "sidecomp/numeric.hpp"
#include "sidecomp/tuple_core.hpp"

namespace sidecomp {

/// (k; n_1 >= ... >= n_k): number of similarity classes of strongly
/// irreducible blocks and how often each occurs.
struct SimilarityInvariant {
  Index k = 0;
  std::vector<Index> multiplicities;
  std::vector<OperatorTuple> representatives;

  bool same_numbers(const SimilarityInvariant& other) const {
    return k == other.k && multiplicities == other.multiplicities;
  }
};

/// K_0 of the commutant: Z^rank with order unit [I] = (n_1, ..., n_k).
struct K0Descriptor {
  Index rank = 0;
  std::vector<Index> order_unit;
};

SimilarityInvariant v_semigroup_invariant(const OperatorTuple& t, const NumericPolicy& policy = {});

K0Descriptor k0_descriptor(const SimilarityInvariant& inv);
K0Descriptor k0_descriptor(const OperatorTuple& t, const NumericPolicy& policy = {});

struct SimilarityVerdict {
  bool similar = false;
  std::string reason;
  SimilarityInvariant invariant_lhs;
  SimilarityInvariant invariant_rhs;
  /// Invariant of T + S assembled from the blocks of both sides.
  SimilarityInvariant invariant_sum;
  std::optional<Matrix> witness;  // X with X T_i X^{-1} = S_i
  double residual = 0.0;          // max_i ||X T_i X^{-1} - S_i||_F, when a witness exists
};

/// Decides T ~ S by counting, for every similarity class of blocks in T + S,
/// the blocks contributed by each side. With want_witness, also assembles and
/// verifies an explicit conjugator.
SimilarityVerdict similar(const OperatorTuple& t, const OperatorTuple& s, const NumericPolicy& policy = {},
                          bool want_witness = false);

/// [P] = [Q] in the idempotent semigroup of A'(T), decided by similarity of
/// the restrictions.
bool idempotent_classes_equal(const OperatorTuple& t, const Matrix& p, const Matrix& q,
                              const NumericPolicy& policy = {});

}  // namespace sidecomp
