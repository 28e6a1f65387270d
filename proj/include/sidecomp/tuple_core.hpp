#pragma once

#include <span>
#include <vector>

#include "sidecomp/numeric.hpp"

namespace sidecomp {

/// m square matrices of a common size d. Commutativity is not enforced at
/// construction; see validate_commuting().
class OperatorTuple {
 public:
  OperatorTuple() = default;
  /// Throws InputError on empty input, non-square or mismatched matrices,
  /// or non-finite entries.
  explicit OperatorTuple(std::vector<Matrix> matrices);

  static OperatorTuple single(Matrix a) { return OperatorTuple(std::vector<Matrix>{std::move(a)}); }

  Index arity() const { return static_cast<Index>(mats_.size()); }
  Index dim() const { return mats_.empty() ? 0 : mats_.front().rows(); }
  const Matrix& operator[](Index i) const { return mats_[static_cast<std::size_t>(i)]; }
  const std::vector<Matrix>& matrices() const { return mats_; }

 private:
  std::vector<Matrix> mats_;
};

/// Jordan block of size r with eigenvalue lambda (ones on the superdiagonal).
Matrix jordan_block(Index r, Complex lambda);

Matrix block_diagonal(std::span<const Matrix> blocks);

struct CommutationReport {
  double max_commutator = 0.0;  // max_{i<j} ||[T_i, T_j]||_F
  double max_scaled = 0.0;      // same, divided by max(1, ||T_i||_F ||T_j||_F)
  bool pass = true;
};

CommutationReport validate_commuting(const OperatorTuple& t, double tol);
/// Same check on a raw list; throws InputError when sizes disagree.
CommutationReport validate_commuting(std::span<const Matrix> matrices, double tol);

OperatorTuple direct_sum(const OperatorTuple& t, const OperatorTuple& s);
OperatorTuple inflate(const OperatorTuple& t, Index n);

/// (X T_1 X^{-1}, ..., X T_m X^{-1}); requires sigma_min(X) > inv_tol.
OperatorTuple conjugate(const OperatorTuple& t, const Matrix& x, const NumericPolicy& policy = {});

/// Copy of `policy` whose scale covers max_i ||T_i||_F.
NumericPolicy scaled_for(const OperatorTuple& t, NumericPolicy policy);

struct JointKernelBasis {
  std::vector<Complex> point;
  Matrix basis;  // d x dimension, orthonormal columns
  Index dimension = 0;
};

/// Orthonormal basis of the intersection of ker(T_i - w_i). A direction is
/// kept when the stacked (m d) x d operator maps it below kernel_tol.
JointKernelBasis joint_kernel(const OperatorTuple& t, std::span<const Complex> w,
                              const NumericPolicy& policy = {});

struct Restriction {
  OperatorTuple tuple;  // r x r, expressed in `basis`
  Matrix basis;         // d x r orthonormal basis of range(P)
};

/// Restriction of T to the invariant subspace range(P) for an idempotent P
/// in the commutant.
Restriction restrict(const OperatorTuple& t, const Matrix& p, const NumericPolicy& policy = {});

struct CdIndexEntry {
  std::vector<Complex> point;
  Index dimension = 0;
};

struct CdIndexProfile {
  std::vector<CdIndexEntry> entries;
  bool constant = true;
  /// Rank of the union of all sampled kernel bases.
  Index span_rank = 0;
};

CdIndexProfile cd_index_profile(const OperatorTuple& t, std::span<const std::vector<Complex>> grid,
                                const NumericPolicy& policy = {});

}  // namespace sidecomp
