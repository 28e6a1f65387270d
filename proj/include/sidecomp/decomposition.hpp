#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sidecomp/commutant.hpp"
#include "sidecomp/numeric.hpp"
#include "sidecomp/tuple_core.hpp"

namespace sidecomp {

/// Mutually annihilating idempotents of A'(T) summing to I.
struct UnitDecomposition {
  OperatorTuple tuple;
  std::vector<Matrix> idempotents;
  /// Block (similarity class) label per idempotent, when known.
  std::vector<Index> block;
  bool strongly_irreducible = false;

  Index size() const { return static_cast<Index>(idempotents.size()); }
};

struct DecompositionResiduals {
  double max_commutator = 0.0;    // max ||P_i T_j - T_j P_i||_F
  double max_idempotent = 0.0;    // max ||P_i^2 - P_i||_F
  double max_annihilation = 0.0;  // max_{i != j} ||P_i P_j||_F
  double sum_residual = 0.0;      // ||sum P_i - I||_F
  bool blocks_si = true;          // only evaluated when requested
  bool pass = false;
};

/// Checks the unit-decomposition invariants; with check_si also restricts to
/// every range and tests strong irreducibility.
DecompositionResiduals check_unit_decomposition(const UnitDecomposition& dec, const NumericPolicy& policy = {},
                                                bool check_si = false);

/// True iff A'(T) is a local algebra (dim A' = dim rad + 1).
bool is_strongly_irreducible(const OperatorTuple& t, const NumericPolicy& policy = {});

/// Primitive idempotents of A'(T) ordered by (block, copy).
UnitDecomposition unit_si_decomposition(const OperatorTuple& t, const NumericPolicy& policy = {});

/// {X P_i X^{-1}} as a decomposition of X T X^{-1}.
UnitDecomposition transport_decomposition(const UnitDecomposition& dec, const Matrix& x,
                                          const NumericPolicy& policy = {});

/// Invertible Y with Y a_i = b_i Y for every i, when one exists.
struct TupleSimilarity {
  bool similar = false;
  std::string reason;
  Matrix intertwiner;  // b.dim() x a.dim()
  Index intertwiner_dim = 0;
};

TupleSimilarity find_similarity(const OperatorTuple& a, const OperatorTuple& b, const NumericPolicy& policy = {});

/// Invertible map between range(P) and range(Q) intertwining the restrictions,
/// stored in the orthonormal range bases produced by restrict().
struct BlockIntertwiner {
  Matrix local;          // rank x rank
  Matrix source_basis;   // d x rank, basis of range(P)
  Matrix target_basis;   // d x rank, basis of range(Q)

  /// The map as a d x d operator: zero on range(I - P), local on range(P).
  Matrix ambient(const Matrix& p) const;
};

struct BlockSimilarity {
  std::optional<BlockIntertwiner> intertwiner;
  std::string reason;  // empty when similar
};

BlockSimilarity block_similarity(const OperatorTuple& t, const Matrix& p, const Matrix& q,
                                 const NumericPolicy& policy = {});

struct BlockPairing {
  Matrix p;
  Matrix q;
  BlockIntertwiner map;
};

/// Direct sum of the block maps as an element of GL(A'(T)); checked to commute
/// with T, to be invertible and to carry each P_i onto Q_i.
Matrix assemble_global(const OperatorTuple& t, std::span<const BlockPairing> pairs,
                       const NumericPolicy& policy = {});

/// A partial conjugator X with X P_i X^{-1} = Q_i for the listed indices.
struct PartialConjugator {
  Matrix x;
  std::vector<Index> indices;
};

struct AlignedIndex {
  Index r = 0;        // index into the Q list (unaligned part)
  Index r_prime = 0;  // matched index into the P list
  std::string word;   // e.g. "Y X1 Y"
  Index alternations = 0;
  Matrix z;           // Z_r with Z_r Q_r Z_r^{-1} = P_{r'}
  double residual = 0.0;
};

struct Alignment {
  std::vector<AlignedIndex> matches;
  bool bijective = false;
  bool word_cap_exceeded = false;
};

/// Chains Q_r -> Y Q_r Y^{-1} = P_j through partial conjugators until j lands
/// outside the aligned set, producing Z_r as a word in {X_s, Y}. `perm` is the
/// permutation with Y^{-1} P_i Y = Q_{perm[i]}.
Alignment align_decompositions(const OperatorTuple& t, std::span<const Matrix> p_list,
                               std::span<const Matrix> q_list, std::span<const PartialConjugator> partial,
                               const Matrix& y, std::span<const Index> perm, const NumericPolicy& policy = {});

struct DecompositionEquivalence {
  std::vector<Index> permutation;  // X P_i X^{-1} = Q_{permutation[i]}
  Matrix conjugator;
  double residual = 0.0;
};

struct EquivalenceResult {
  std::optional<DecompositionEquivalence> equivalence;
  std::string reason;
};

EquivalenceResult decompositions_equivalent(const OperatorTuple& t, const UnitDecomposition& d1,
                                            const UnitDecomposition& d2, const NumericPolicy& policy = {});

}  // namespace sidecomp
