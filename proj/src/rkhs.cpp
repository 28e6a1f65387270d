#include "sidecomp/rkhs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sidecomp/errors.hpp"

namespace sidecomp {

namespace {

void compositions(int total, Index parts, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (parts == 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int first = total; first >= 0; --first) {
    cur.push_back(first);
    compositions(total - first, parts - 1, cur, out);
    cur.pop_back();
  }
}

MultiIndex raise(MultiIndex a, Index i) {
  ++a[static_cast<std::size_t>(i)];
  return a;
}

}  // namespace

TruncationGrid::TruncationGrid(Index m, Index dmax, GridOrder order) : m_(m), dmax_(dmax), order_(order) {
  if (m < 1) throw InputError("grid arity must be at least 1");
  if (dmax < 0) throw InputError("grid degree must be nonnegative");
  for (int n = 0; n <= dmax; ++n) {
    std::vector<MultiIndex> layer;
    MultiIndex cur;
    compositions(n, m, cur, layer);
    if (order == GridOrder::graded_colex) std::reverse(layer.begin(), layer.end());
    for (auto& a : layer) {
      index_.emplace(a, static_cast<Index>(alphas_.size()));
      alphas_.push_back(std::move(a));
    }
  }
}

std::optional<Index> TruncationGrid::find(const MultiIndex& a) const {
  auto it = index_.find(a);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<bool> TruncationGrid::interior() const {
  std::vector<bool> out;
  out.reserve(alphas_.size());
  for (const auto& a : alphas_) out.push_back(degree(a) < dmax_);
  return out;
}

std::string to_string(KernelPreset p) {
  switch (p) {
    case KernelPreset::drury_arveson: return "drury_arveson";
    case KernelPreset::bergman: return "bergman";
    case KernelPreset::hardy_like: return "hardy";
    case KernelPreset::custom: return "custom";
  }
  return "unknown";
}

DiagonalKernelSpec DiagonalKernelSpec::drury_arveson(Index m) { return {m, KernelPreset::drury_arveson, 0.0}; }

DiagonalKernelSpec DiagonalKernelSpec::bergman(Index m, double k) {
  if (!(k > 0.0)) throw InputError("bergman parameter k must be positive");
  return {m, KernelPreset::bergman, k};
}

DiagonalKernelSpec DiagonalKernelSpec::hardy_like(Index m) { return {m, KernelPreset::hardy_like, 0.0}; }

DiagonalKernelSpec DiagonalKernelSpec::custom(Index m, std::map<MultiIndex, double> table) {
  for (const auto& [a, v] : table) {
    if (static_cast<Index>(a.size()) != m) throw InputError("custom fhat multi-index has wrong arity");
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError("custom fhat must be positive");
  }
  DiagonalKernelSpec s(m, KernelPreset::custom, 0.0);
  s.table_ = std::move(table);
  return s;
}

double DiagonalKernelSpec::log_fhat(const MultiIndex& a) const {
  if (static_cast<Index>(a.size()) != m_) throw InputError("multi-index has wrong arity");
  double log_alpha_fact = 0.0;
  for (int v : a) log_alpha_fact += std::lgamma(v + 1.0);
  const int n = degree(a);
  switch (preset_) {
    case KernelPreset::drury_arveson: return std::lgamma(n + 1.0) - log_alpha_fact;
    case KernelPreset::bergman: return std::lgamma(k_ + n) - log_alpha_fact - std::lgamma(k_);
    case KernelPreset::hardy_like: return 0.0;
    case KernelPreset::custom: {
      auto it = table_.find(a);
      if (it == table_.end()) throw InputError("custom fhat has no value for a required multi-index");
      return std::log(it->second);
    }
  }
  return 0.0;
}

double DiagonalKernelSpec::fhat(const MultiIndex& a) const { return std::exp(log_fhat(a)); }

WeightTable multishift_weights(const DiagonalKernelSpec& spec, const TruncationGrid& grid) {
  if (spec.arity() != grid.arity()) throw InputError("kernel spec and grid have different arity");
  WeightTable out;
  for (Index i = 0; i < grid.arity(); ++i) {
    RealVector w = RealVector::Zero(grid.size());
    for (Index j = 0; j < grid.size(); ++j) {
      const auto& a = grid[j];
      if (degree(a) >= grid.max_degree()) continue;
      w(j) = std::exp(0.5 * (spec.log_fhat(a) - spec.log_fhat(raise(a, i))));
    }
    out.weights.push_back(std::move(w));
  }
  return out;
}

OperatorTuple truncated_tuple(const DiagonalKernelSpec& spec, const TruncationGrid& grid, ShiftMode mode) {
  const auto table = multishift_weights(spec, grid);
  const Index n = grid.size();
  std::vector<Matrix> mats;
  for (Index i = 0; i < grid.arity(); ++i) {
    Matrix m = Matrix::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
      const auto& a = grid[j];
      if (degree(a) >= grid.max_degree()) continue;
      const Index to = *grid.find(raise(a, i));
      m(to, j) = table.weights[static_cast<std::size_t>(i)](j);
    }
    mats.push_back(mode == ShiftMode::forward ? m : Matrix(m.adjoint()));
  }
  return OperatorTuple(std::move(mats));
}

RealVector constructed_monomial_norms(const OperatorTuple& forward, const TruncationGrid& grid) {
  if (forward.dim() != grid.size() || forward.arity() != grid.arity())
    throw InputError("tuple does not match the grid");
  RealVector out(grid.size());
  for (Index j = 0; j < grid.size(); ++j) {
    Vector v = Vector::Zero(grid.size());
    v(0) = 1.0;
    const auto& a = grid[j];
    for (Index i = 0; i < grid.arity(); ++i)
      for (int p = 0; p < a[static_cast<std::size_t>(i)]; ++p) v = forward[i] * v;
    out(j) = v.squaredNorm();
  }
  return out;
}

JointEigenvector joint_eigenvector(const DiagonalKernelSpec& spec, const TruncationGrid& grid,
                                   std::span<const Complex> w) {
  if (static_cast<Index>(w.size()) != grid.arity()) throw InputError("point has wrong arity");
  JointEigenvector out;
  out.v = Vector(grid.size());
  double top = 0.0;
  for (Index j = 0; j < grid.size(); ++j) {
    const auto& a = grid[j];
    Complex mono = 1.0;
    for (Index i = 0; i < grid.arity(); ++i) mono *= std::pow(w[static_cast<std::size_t>(i)], a[static_cast<std::size_t>(i)]);
    out.v(j) = std::sqrt(spec.fhat(a)) * mono;
    if (degree(a) == grid.max_degree()) top += std::norm(out.v(j));
  }
  const auto t = truncated_tuple(spec, grid, ShiftMode::adjoint);
  double res2 = 0.0, wnorm2 = 0.0;
  for (Index i = 0; i < t.arity(); ++i) {
    res2 += (t[i] * out.v - w[static_cast<std::size_t>(i)] * out.v).squaredNorm();
    wnorm2 += std::norm(w[static_cast<std::size_t>(i)]);
  }
  const double vn = out.v.norm();
  out.residual = std::sqrt(res2) / vn;
  out.tail_bound = std::sqrt(wnorm2 * top) / vn;
  return out;
}

namespace {

Matrix gram_sum(const OperatorTuple& t) {
  Matrix s = Matrix::Zero(t.dim(), t.dim());
  for (const auto& a : t.matrices()) s += a.adjoint() * a;
  return s;
}

Matrix compress(const Matrix& a, const std::vector<bool>& mask) {
  if (mask.empty()) return a;
  std::vector<Index> keep;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) keep.push_back(static_cast<Index>(i));
  Matrix out(static_cast<Index>(keep.size()), static_cast<Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j)
      out(static_cast<Index>(i), static_cast<Index>(j)) = a(keep[i], keep[j]);
  return out;
}

}  // namespace

DefectReport defect_operator(const OperatorTuple& t) {
  DefectReport out;
  const Index d = t.dim();
  out.defect = linalg::identity(d) - gram_sum(t);
  out.projection_residual = linalg::idempotent_residual(out.defect);
  out.rank = linalg::numerical_rank(out.defect, 1e-10);
  Matrix vac = Matrix::Zero(d, d);
  vac(0, 0) = 1.0;
  out.vacuum_residual = (out.defect - vac).norm();
  return out;
}

PSequence p_sequence(const OperatorTuple& t, const TruncationGrid& grid, Index n_max) {
  if (n_max > grid.max_degree()) throw InputError("n_max exceeds the grid degree");
  if (t.dim() != grid.size()) throw InputError("tuple does not match the grid");
  PSequence out;
  const Index d = t.dim();
  out.p.push_back(linalg::identity(d));
  for (Index n = 0; n < n_max; ++n) {
    Matrix next = Matrix::Zero(d, d);
    for (const auto& a : t.matrices()) next += a.adjoint() * out.p.back() * a;
    out.p.push_back(std::move(next));
  }
  for (std::size_t n = 0; n < out.p.size(); ++n) {
    out.min_eig.push_back(linalg::min_hermitian_eigenvalue(out.p[n]));
    if (out.min_eig.back() < -1e-10) out.psd = false;
    if (n + 1 < out.p.size()) {
      out.min_gap_eig.push_back(linalg::min_hermitian_eigenvalue(out.p[n] - out.p[n + 1]));
      if (out.min_gap_eig.back() < -1e-10) out.decreasing = false;
    }
    for (Index j = 0; j < d; ++j)
      if (static_cast<Index>(n) > degree(grid[j]))
        out.vanishing = std::max(out.vanishing, out.p[n].col(j).cwiseAbs().maxCoeff());
  }
  return out;
}

SphericalShift spherical_shift(const TruncationGrid& grid) {
  const Index n = grid.size();
  const Index m = grid.arity();
  std::vector<Matrix> mats;
  for (Index i = 0; i < m; ++i) {
    Matrix v = Matrix::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
      const auto& a = grid[j];
      if (degree(a) >= grid.max_degree()) continue;
      const double w = std::sqrt((a[static_cast<std::size_t>(i)] + 1.0) / (degree(a) + static_cast<double>(m)));
      v(*grid.find(raise(a, i)), j) = w;
    }
    mats.push_back(std::move(v));
  }
  return {OperatorTuple(std::move(mats)), grid.interior()};
}

SphereReport check_sphere_conditions(const OperatorTuple& t, Index n, const std::vector<bool>& interior,
                                     double psd_tol) {
  if (!interior.empty() && static_cast<Index>(interior.size()) != t.dim())
    throw InputError("interior mask has wrong length");
  SphereReport out;
  const Matrix s = compress(gram_sum(t), interior);
  const Matrix defect = linalg::identity(s.rows()) - s;
  out.isometry_residual = defect.norm();
  out.min_defect_eig = linalg::min_hermitian_eigenvalue(defect);
  out.row_contraction = out.min_defect_eig >= -psd_tol;
  out.spherical_isometry = out.isometry_residual <= psd_tol * std::max<double>(1.0, std::sqrt(static_cast<double>(s.rows())));
  bool normal = true;
  for (const auto& a : t.matrices()) {
    const Matrix c = compress(a * a.adjoint() - a.adjoint() * a, interior);
    if (c.norm() > psd_tol * std::max(1.0, a.squaredNorm())) normal = false;
  }
  out.spherical_unitary = out.spherical_isometry && normal;
  Matrix power = linalg::identity(defect.rows());
  out.n_hypercontraction = true;
  for (Index k = 1; k <= n; ++k) {
    power = power * defect;
    const bool ok = linalg::min_hermitian_eigenvalue(power) >= -psd_tol;
    out.hypercontraction.push_back(ok);
    out.n_hypercontraction = out.n_hypercontraction && ok;
  }
  return out;
}

ModelReport check_model_hypotheses(const OperatorTuple& t, const NumericPolicy& policy, const std::vector<bool>& support,
                                   Index batch) {
  const Index d = t.dim();
  const Index m = t.arity();
  if (!support.empty() && static_cast<Index>(support.size()) != d) throw InputError("support mask has wrong length");
  ModelReport out;
  const Matrix s = gram_sum(t);
  out.projection_residual = (s * s - s).norm();
  out.projection = out.projection_residual <= 1e-10;

  // compatibility constraints T_i x_j - T_j x_i = 0 and the support mask
  const Index pairs = m * (m - 1) / 2;
  Index masked = 0;
  if (!support.empty())
    for (bool b : support)
      if (!b) ++masked;
  Matrix c = Matrix::Zero(pairs * d + masked * m, m * d);
  Index row = 0;
  for (Index i = 0; i < m; ++i)
    for (Index j = i + 1; j < m; ++j) {
      c.block(row, j * d, d, d) += t[i];
      c.block(row, i * d, d, d) -= t[j];
      row += d;
    }
  if (masked > 0)
    for (Index blk = 0; blk < m; ++blk)
      for (Index q = 0; q < d; ++q)
        if (!support[static_cast<std::size_t>(q)]) c(row++, blk * d + q) = 1.0;
  const Matrix compat = c.rows() ? linalg::nullspace(c, policy.rank_rel).basis : linalg::identity(m * d);
  out.compatible_dim = compat.cols();

  Matrix stacked(m * d, d);
  for (Index i = 0; i < m; ++i) stacked.middleRows(i * d, d) = t[i];
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(stacked);
  Rng rng(policy.seed);
  out.batch = out.compatible_dim ? batch : 0;
  for (Index b = 0; b < out.batch; ++b) {
    Vector g(compat.cols());
    for (Index j = 0; j < g.size(); ++j) g(j) = rng.complex_normal();
    const Vector xi = compat * g;
    const Vector x = cod.solve(xi);
    out.max_solve_residual = std::max(out.max_solve_residual, (stacked * x - xi).norm() / xi.norm());
  }
  out.solvable = out.max_solve_residual <= 1e-8;
  out.conclusion = out.projection && out.solvable ? "consistent with backward multishift plus spherical isometry model"
                                                  : "model hypotheses not satisfied";
  return out;
}

std::vector<GammaSample> gamma_transform(const OperatorTuple& t, const Matrix& a,
                                         std::span<const std::vector<Complex>> points, const NumericPolicy& policy) {
  if (a.rows() != t.dim() || a.cols() != t.dim()) throw InputError("gamma_transform: A has wrong size");
  for (const auto& ti : t.matrices())
    if ((a * ti - ti * a).norm() > policy.commute_tol * std::max(1.0, a.norm() * ti.norm()))
      throw InputError("gamma_transform: A is not in the commutant");
  const double anorm = linalg::spectral_norm(a);
  std::vector<GammaSample> out;
  for (const auto& w : points) {
    GammaSample g;
    g.point = w;
    const auto k = joint_kernel(t, w, policy);
    if (k.dimension == 0) {
      g.skipped = true;
      out.push_back(std::move(g));
      continue;
    }
    g.symbol = k.basis.adjoint() * a * k.basis;
    g.invariance_residual = (a * k.basis - k.basis * g.symbol).norm();
    g.norm = linalg::spectral_norm(g.symbol);
    g.contraction = g.norm <= anorm + 1e-8;
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace sidecomp
