#include "sidecomp/tuple_core.hpp"

#include <algorithm>
#include <string>

#include "sidecomp/errors.hpp"

namespace sidecomp {

OperatorTuple::OperatorTuple(std::vector<Matrix> matrices) : mats_(std::move(matrices)) {
  if (mats_.empty()) throw InputError("operator tuple needs at least one matrix");
  const Index d = mats_.front().rows();
  if (d < 1) throw InputError("operator tuple matrices must be at least 1x1");
  for (std::size_t i = 0; i < mats_.size(); ++i) {
    const Matrix& a = mats_[i];
    if (a.rows() != d || a.cols() != d)
      throw InputError("matrix " + std::to_string(i) + " is " + std::to_string(a.rows()) + "x" +
                       std::to_string(a.cols()) + ", expected " + std::to_string(d) + "x" +
                       std::to_string(d));
    if (!linalg::all_finite(a)) throw InputError("matrix " + std::to_string(i) + " has non-finite entries");
  }
}

Matrix jordan_block(Index r, Complex lambda) {
  Matrix j = lambda * linalg::identity(r);
  for (Index i = 0; i + 1 < r; ++i) j(i, i + 1) = 1.0;
  return j;
}

Matrix block_diagonal(std::span<const Matrix> blocks) {
  Index rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Matrix out = Matrix::Zero(rows, cols);
  Index r = 0, c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

CommutationReport validate_commuting(std::span<const Matrix> matrices, double tol) {
  if (matrices.empty()) throw InputError("empty matrix list");
  const Index d = matrices.front().rows();
  for (const auto& a : matrices)
    if (a.rows() != d || a.cols() != d) throw InputError("dimension mismatch among matrices");
  CommutationReport rep;
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    for (std::size_t j = i + 1; j < matrices.size(); ++j) {
      const Matrix& a = matrices[i];
      const Matrix& b = matrices[j];
      const double c = (a * b - b * a).norm();
      const double scaled = c / std::max(1.0, a.norm() * b.norm());
      rep.max_commutator = std::max(rep.max_commutator, c);
      rep.max_scaled = std::max(rep.max_scaled, scaled);
    }
  }
  rep.pass = rep.max_scaled <= tol;
  return rep;
}

CommutationReport validate_commuting(const OperatorTuple& t, double tol) {
  return validate_commuting(std::span<const Matrix>(t.matrices()), tol);
}

OperatorTuple direct_sum(const OperatorTuple& t, const OperatorTuple& s) {
  if (t.arity() != s.arity())
    throw InputError("direct sum of tuples with arity " + std::to_string(t.arity()) + " and " +
                     std::to_string(s.arity()));
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(t.arity()));
  for (Index i = 0; i < t.arity(); ++i) {
    const Matrix blocks[] = {t[i], s[i]};
    out.push_back(block_diagonal(blocks));
  }
  return OperatorTuple(std::move(out));
}

OperatorTuple inflate(const OperatorTuple& t, Index n) {
  if (n < 1) throw InputError("inflation count must be at least 1");
  std::vector<Matrix> out;
  for (Index i = 0; i < t.arity(); ++i) {
    const std::vector<Matrix> copies(static_cast<std::size_t>(n), t[i]);
    out.push_back(block_diagonal(copies));
  }
  return OperatorTuple(std::move(out));
}

OperatorTuple conjugate(const OperatorTuple& t, const Matrix& x, const NumericPolicy& policy) {
  if (x.rows() != t.dim() || x.cols() != t.dim()) throw InputError("conjugator has wrong size");
  if (linalg::sigma_min(x) <= policy.inv_tol) throw InputError("conjugator is singular");
  Eigen::PartialPivLU<Matrix> lu(x);
  const Matrix xinv = lu.inverse();
  std::vector<Matrix> out;
  for (const auto& a : t.matrices()) out.push_back(x * a * xinv);
  return OperatorTuple(std::move(out));
}

namespace {

Matrix stacked_shift(const OperatorTuple& t, std::span<const Complex> w) {
  const Index d = t.dim();
  Matrix stacked(t.arity() * d, d);
  for (Index i = 0; i < t.arity(); ++i)
    stacked.middleRows(i * d, d) = t[i] - w[static_cast<std::size_t>(i)] * linalg::identity(d);
  return stacked;
}

}  // namespace

JointKernelBasis joint_kernel(const OperatorTuple& t, std::span<const Complex> w,
                              const NumericPolicy& policy) {
  if (static_cast<Index>(w.size()) != t.arity())
    throw InputError("point has " + std::to_string(w.size()) + " coordinates, tuple arity is " +
                     std::to_string(t.arity()));
  JointKernelBasis out;
  out.point.assign(w.begin(), w.end());
  auto ns = linalg::nullspace(stacked_shift(t, w), policy.rank_rel, policy.kernel_tol);
  out.basis = std::move(ns.basis);
  out.dimension = out.basis.cols();
  return out;
}

NumericPolicy scaled_for(const OperatorTuple& t, NumericPolicy policy) {
  for (const auto& a : t.matrices()) policy.scale = std::max(policy.scale, a.norm());
  return policy;
}

Restriction restrict(const OperatorTuple& t, const Matrix& p, const NumericPolicy& policy) {
  const Index d = t.dim();
  if (p.rows() != d || p.cols() != d) throw InputError("idempotent has wrong size");
  const double scale = std::max(1.0, p.squaredNorm());
  if (linalg::idempotent_residual(p) > policy.idem_tol * scale)
    throw InputError("restrict: P is not idempotent");
  for (Index i = 0; i < t.arity(); ++i) {
    const double c = (p * t[i] - t[i] * p).norm();
    if (c > policy.commute_tol * std::max(1.0, p.norm() * t[i].norm()))
      throw InputError("restrict: P does not commute with T_" + std::to_string(i + 1));
  }
  // Nonzero singular values of an idempotent are >= 1, so the rank split is
  // unambiguous at 1/2.
  const auto dec = linalg::svd(p, linalg::SvdVectors::thin);
  Index r = 0;
  for (Index i = 0; i < dec.values.size(); ++i)
    if (dec.values(i) > 0.5) ++r;
  if (r == 0) throw InputError("restrict: P is zero");
  Restriction out;
  out.basis = dec.u.leftCols(r);
  std::vector<Matrix> mats;
  for (const auto& a : t.matrices()) mats.push_back(out.basis.adjoint() * a * out.basis);
  out.tuple = OperatorTuple(std::move(mats));
  return out;
}

CdIndexProfile cd_index_profile(const OperatorTuple& t, std::span<const std::vector<Complex>> grid,
                                const NumericPolicy& policy) {
  CdIndexProfile out;
  Matrix all(t.dim(), 0);
  for (const auto& w : grid) {
    const auto k = joint_kernel(t, w, policy);
    out.entries.push_back({w, k.dimension});
    if (k.dimension > 0) {
      Matrix grown(t.dim(), all.cols() + k.dimension);
      grown << all, k.basis;
      all = std::move(grown);
    }
  }
  for (const auto& e : out.entries)
    if (e.dimension != out.entries.front().dimension) out.constant = false;
  out.span_rank = all.cols() ? linalg::numerical_rank(all, 1e-8) : 0;
  return out;
}

}  // namespace sidecomp
