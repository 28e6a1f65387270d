#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sidecomp/numeric.hpp"
#include "sidecomp/tuple_core.hpp"

namespace sidecomp {

/// Frobenius-orthonormal basis of the joint commutant {X : X T_i = T_i X}.
struct CommutantBasis {
  Index dim = 0;              // ambient matrix size d
  std::vector<Matrix> basis;  // each d x d

  Index algebra_dim() const { return static_cast<Index>(basis.size()); }
  /// Coordinates <y, B_j> in the orthonormal basis.
  Vector coordinates(const Matrix& y) const;
  Matrix element(const Vector& coords) const;
  /// ||y - proj(y)||_F, the distance of y from the span.
  double distance(const Matrix& y) const;
};

/// Basis of {X : X T_i = S_i X for all i}; X has shape S.dim() x T.dim().
std::vector<Matrix> intertwiner_space(const OperatorTuple& t, const OperatorTuple& s,
                                      const NumericPolicy& policy = {});

CommutantBasis joint_commutant(const OperatorTuple& t, const NumericPolicy& policy = {});

struct InflationCheck {
  Index inflated_dim = 0;  // dim A'(T^(n))
  Index base_dim = 0;      // dim A'(T)
  Index n = 1;
  bool pass = false;
};

/// dim A'(T^(n)) == n^2 dim A'(T). Throws InputError when n*d exceeds policy.size_cap.
InflationCheck inflation_commutant_check(const OperatorTuple& t, Index n, const NumericPolicy& policy = {});

struct RadicalResult {
  std::vector<Matrix> basis;  // Frobenius-orthonormal, inside the algebra
  Matrix coefficients;        // algebra_dim x radical_dim, orthonormal columns
  RealVector trace_form_singular_values;
  double threshold = 0.0;
  /// Singular values near the threshold (within a factor of 10 on either side).
  bool ambiguous = false;
  Index dim() const { return static_cast<Index>(basis.size()); }
};

/// rad(A) = {x in A : tr(x y) = 0 for all y in A}. Every returned element is
/// checked to be nilpotent; failure raises NumericalDegeneracy.
RadicalResult radical(const CommutantBasis& a, const NumericPolicy& policy = {});

struct AlgebraStructure {
  Index radical_dim = 0;
  /// Sizes n_i of the full matrix blocks of A/rad(A), sorted descending.
  std::vector<Index> block_dims;
  /// One idempotent per block (lifted to A), mutually annihilating, summing to I.
  std::vector<Matrix> central_idempotents;
  /// Primitive idempotents of A, sum n_i in total, grouped by block:
  /// primitive_block[j] is the block of primitive_idempotents[j].
  std::vector<Matrix> primitive_idempotents;
  std::vector<Index> primitive_block;

  Index k() const { return static_cast<Index>(block_dims.size()); }
};

/// Wedderburn analysis of A/rad(A) = sum_i M_{n_i}(C). Primitive idempotents
/// are spectral projections of a random element x of A; they are grouped into
/// blocks by whether e_a A e_b survives modulo the radical. Throws
/// NumericalDegeneracy when no separating x is found or the dimension count
/// sum n_i^2 + dim rad = dim A fails.
AlgebraStructure semisimple_structure(const CommutantBasis& a, const RadicalResult& rad,
                                      const NumericPolicy& policy = {});

struct InvertibleSearch {
  std::optional<Matrix> element;
  /// Largest numerical rank seen over the generic draws.
  Index max_rank = 0;
  int trials = 0;
  /// True when no draw reached full rank, so the whole span is singular.
  bool rank_deficient = false;
};

/// Looks for an invertible element of span(space) by seeded random draws,
/// accepting sigma_min > inv_tol * sigma_max.
InvertibleSearch contains_invertible(std::span<const Matrix> space, const NumericPolicy& policy = {});

}  // namespace sidecomp
