#include "sidecomp/commutant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sidecomp/errors.hpp"

namespace sidecomp {

Vector CommutantBasis::coordinates(const Matrix& y) const {
  Vector c(algebra_dim());
  for (Index j = 0; j < algebra_dim(); ++j) c(j) = linalg::frobenius_inner(y, basis[static_cast<std::size_t>(j)]);
  return c;
}

Matrix CommutantBasis::element(const Vector& coords) const {
  Matrix out = Matrix::Zero(dim, dim);
  for (Index j = 0; j < algebra_dim(); ++j) out += coords(j) * basis[static_cast<std::size_t>(j)];
  return out;
}

double CommutantBasis::distance(const Matrix& y) const { return (y - element(coordinates(y))).norm(); }

std::vector<Matrix> intertwiner_space(const OperatorTuple& t, const OperatorTuple& s,
                                      const NumericPolicy& policy) {
  if (t.arity() != s.arity()) throw InputError("intertwiner space needs tuples of equal arity");
  const Index p = s.dim();
  const Index q = t.dim();
  const Index n = p * q;
  Matrix stacked(t.arity() * n, n);
  for (Index i = 0; i < t.arity(); ++i) stacked.middleRows(i * n, n) = linalg::sylvester_operator(t[i], s[i]);
  double scale = policy.scale;
  for (Index i = 0; i < t.arity(); ++i) scale = std::max(scale, t[i].norm() + s[i].norm());
  const auto ns = linalg::nullspace(stacked, policy.rank_rel, -1.0, scale);
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(ns.basis.cols()));
  for (Index j = 0; j < ns.basis.cols(); ++j) out.push_back(linalg::unvec(ns.basis.col(j), p, q));
  return out;
}

CommutantBasis joint_commutant(const OperatorTuple& t, const NumericPolicy& policy) {
  CommutantBasis out;
  out.dim = t.dim();
  out.basis = intertwiner_space(t, t, policy);
  const double miss = out.distance(linalg::identity(t.dim()));
  if (miss > 1e-8 * std::sqrt(static_cast<double>(t.dim())))
    throw NumericalDegeneracy("computed commutant does not contain the identity (distance " +
                              std::to_string(miss) + ")");
  return out;
}

InflationCheck inflation_commutant_check(const OperatorTuple& t, Index n, const NumericPolicy& policy) {
  if (n < 1) throw InputError("inflation count must be at least 1");
  if (n * t.dim() > policy.size_cap)
    throw InputError("inflated size " + std::to_string(n * t.dim()) + " exceeds cap " +
                     std::to_string(policy.size_cap));
  InflationCheck out;
  out.n = n;
  out.base_dim = joint_commutant(t, policy).algebra_dim();
  out.inflated_dim = joint_commutant(inflate(t, n), policy).algebra_dim();
  out.pass = out.inflated_dim == n * n * out.base_dim;
  return out;
}

RadicalResult radical(const CommutantBasis& a, const NumericPolicy& policy) {
  const Index n = a.algebra_dim();
  Matrix gram(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index k = j; k < n; ++k) {
      const Complex v = (a.basis[static_cast<std::size_t>(j)] * a.basis[static_cast<std::size_t>(k)]).trace();
      gram(j, k) = v;
      gram(k, j) = v;
    }
  RadicalResult out;
  const auto dec = linalg::svd(gram, linalg::SvdVectors::full);
  out.trace_form_singular_values = dec.values;
  const double smax = out.trace_form_singular_values(0);
  out.threshold = smax * std::max(policy.radical_rel, static_cast<double>(n) * policy.rank_rel);
  Index rank = 0;
  for (Index i = 0; i < n; ++i) {
    const double s = out.trace_form_singular_values(i);
    if (s > out.threshold) ++rank;
    if (s > out.threshold / 10.0 && s < out.threshold * 10.0) out.ambiguous = true;
  }
  out.coefficients = dec.v.rightCols(n - rank);
  const Index d = a.dim;
  for (Index j = 0; j < out.coefficients.cols(); ++j) {
    Matrix x = a.element(out.coefficients.col(j));
    Matrix power = x;
    for (Index p = 1; p < d; ++p) power = power * x;
    if (power.norm() > 1e-6)
      throw NumericalDegeneracy("radical element is not nilpotent (||x^d|| = " + std::to_string(power.norm()) + ")");
    out.basis.push_back(std::move(x));
  }
  return out;
}

namespace {

// Reorders a complex Schur form so that the entries flagged in `take` come
// first, then returns the spectral projection onto their invariant subspace
// along the complementary one.
Matrix spectral_projection(Matrix u, Matrix q, std::vector<int> labels, int target) {
  const Index d = u.rows();
  Index next = 0;
  for (Index i = 0; i < d; ++i) {
    if (labels[static_cast<std::size_t>(i)] != target) continue;
    for (Index k = i - 1; k >= next; --k) {
      // swap diagonal entries k and k+1
      const Complex a = u(k, k);
      const Complex b = u(k, k + 1);
      const Complex c = u(k + 1, k + 1);
      Complex v1 = b, v2 = c - a;
      const double nv = std::sqrt(std::norm(v1) + std::norm(v2));
      v1 /= nv;
      v2 /= nv;
      Eigen::Matrix2cd g;
      g << v1, -std::conj(v2), v2, std::conj(v1);
      u.middleRows(k, 2) = g.adjoint() * u.middleRows(k, 2);
      u.middleCols(k, 2) = u.middleCols(k, 2) * g;
      q.middleCols(k, 2) = q.middleCols(k, 2) * g;
      u(k + 1, k) = 0.0;
      std::swap(labels[static_cast<std::size_t>(k)], labels[static_cast<std::size_t>(k + 1)]);
    }
    ++next;
  }
  const Index p = next;
  const Index rest = d - p;
  Matrix y = Matrix::Zero(p, rest);
  if (rest > 0) {
    const Matrix t11 = u.topLeftCorner(p, p);
    const Matrix t12 = u.topRightCorner(p, rest);
    const Matrix t22 = u.bottomRightCorner(rest, rest);
    // t11 Y - Y t22 = -t12, column by column
    for (Index c = 0; c < rest; ++c) {
      Vector rhs = -t12.col(c);
      for (Index l = 0; l < c; ++l) rhs += t22(l, c) * y.col(l);
      Matrix shifted = t11 - t22(c, c) * linalg::identity(p);
      y.col(c) = shifted.triangularView<Eigen::Upper>().solve(rhs);
    }
  }
  Matrix block = Matrix::Zero(d, d);
  block.topLeftCorner(p, p) = linalg::identity(p);
  block.topRightCorner(p, rest) = -y;
  return q * block * q.adjoint();
}

struct Clusters {
  std::vector<Complex> centers;
  std::vector<Index> multiplicity;
  double min_gap = 0.0;
  double spread = 0.0;
};

Clusters cluster_eigenvalues(const Vector& ev, double rel) {
  const Index n = ev.size();
  const Complex mean = ev.mean();
  double spread = 0.0;
  for (Index i = 0; i < n; ++i) spread = std::max(spread, std::abs(ev(i) - mean));
  Clusters out;
  out.spread = spread;
  const double tol = rel * std::max(spread, 1e-300);
  // single linkage via union-find
  std::vector<Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  };
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (std::abs(ev(i) - ev(j)) <= tol) parent[static_cast<std::size_t>(find(i))] = find(j);
  std::vector<Index> root_to_cluster(static_cast<std::size_t>(n), -1);
  std::vector<Complex> sums;
  for (Index i = 0; i < n; ++i) {
    const Index r = find(i);
    auto& id = root_to_cluster[static_cast<std::size_t>(r)];
    if (id < 0) {
      id = static_cast<Index>(sums.size());
      sums.push_back(0.0);
      out.multiplicity.push_back(0);
    }
    sums[static_cast<std::size_t>(id)] += ev(i);
    ++out.multiplicity[static_cast<std::size_t>(id)];
  }
  for (std::size_t c = 0; c < sums.size(); ++c)
    out.centers.push_back(sums[c] / static_cast<double>(out.multiplicity[c]));
  out.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < out.centers.size(); ++a)
    for (std::size_t b = a + 1; b < out.centers.size(); ++b)
      out.min_gap = std::min(out.min_gap, std::abs(out.centers[a] - out.centers[b]));
  return out;
}

// Projections of a defective x are only accurate to roughly eps / sep, and
// polishing each one separately does not make them sum to I. Alternate
// between polishing and rescaling by S^{-1}, S = sum e_i, which stays inside
// the commutative algebra generated by the family.
// Throws NumericalDegeneracy when the family still misses sum e = I by more
// than 1e-10 max ||e||_F after the last round.
void refine_complete_family(std::vector<Matrix>& family, Index d) {
  const Matrix id = linalg::identity(d);
  double residual = 0.0;
  for (int round = 0; round <= 8; ++round) {
    Matrix sum = Matrix::Zero(d, d);
    for (const auto& e : family) sum += e;
    residual = (sum - id).norm();
    if (residual <= 1e-13 * std::sqrt(static_cast<double>(d)) || round == 8) break;
    const Matrix inv = Eigen::PartialPivLU<Matrix>(sum).inverse();
    for (auto& e : family) e = linalg::polish_idempotent(Matrix(e * inv), 60);
  }
  double largest = 1.0;
  for (const auto& e : family) largest = std::max(largest, e.norm());
  if (residual > 1e-10 * largest) throw NumericalDegeneracy("primitive idempotents do not sum to the identity");
}

// Minimum separation between distinct quotient eigenvalues, relative to their
// spread, before a random element is accepted as separating.
constexpr double kSeparation = 2e-2;
// Size of e_a A e_b modulo the radical, relative to ||e_a|| ||e_b||, above
// which a and b are taken to lie in the same simple block.
constexpr double kBlockLink = 1e-10;
constexpr int kMaxAttempts = 12;
constexpr int kWantedDraws = 6;
// A draw whose primitives are at most this much larger than the central
// idempotents is kept without looking further.
constexpr double kObliqueness = 4.0;

}  // namespace

AlgebraStructure semisimple_structure(const CommutantBasis& a, const RadicalResult& rad,
                                      const NumericPolicy& policy) {
  const Index n = a.algebra_dim();
  const Index d = a.dim;
  const Index r = rad.dim();
  const Index s = n - r;
  if (s < 1) throw NumericalDegeneracy("radical fills the whole algebra");

  AlgebraStructure out;
  out.radical_dim = r;
  if (s == 1) {
    out.block_dims = {1};
    out.central_idempotents = {linalg::identity(d)};
    out.primitive_idempotents = {linalg::identity(d)};
    out.primitive_block = {0};
    return out;
  }

  // Orthonormal coordinates of the complement of the radical; A = C + rad
  // is an orthogonal splitting, so quotient coordinates are projections.
  const Matrix comp = r > 0 ? linalg::nullspace(rad.coefficients.adjoint(), 1e-12).basis
                            : linalg::identity(n);
  if (comp.cols() != s) throw NumericalDegeneracy("radical complement has wrong dimension");
  std::vector<Matrix> cbasis;
  for (Index j = 0; j < s; ++j) cbasis.push_back(a.element(comp.col(j)));
  auto quotient = [&](const Matrix& y) -> Vector { return comp.adjoint() * a.coordinates(y); };

  Rng rng(policy.seed);
  int successes = 0;
  double best_norm = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Vector g(n);
    for (Index j = 0; j < n; ++j) g(j) = rng.complex_normal();
    const Matrix x = a.element(g);

    // left multiplication by x on A/rad(A)
    Matrix left(s, s);
    for (Index b = 0; b < s; ++b) left.col(b) = quotient(x * cbasis[static_cast<std::size_t>(b)]);
    Eigen::ComplexEigenSolver<Matrix> les(left, false);
    const Clusters cl = cluster_eigenvalues(les.eigenvalues(), policy.cluster_rel);
    const Index p = static_cast<Index>(cl.centers.size());
    if (p < 2 || cl.min_gap < kSeparation * cl.spread) continue;

    Eigen::ComplexSchur<Matrix> schur(x);
    const Matrix& u = schur.matrixT();
    std::vector<int> labels(static_cast<std::size_t>(d));
    std::vector<Index> counts(static_cast<std::size_t>(p), 0);
    bool assigned = true;
    for (Index i = 0; i < d && assigned; ++i) {
      Index best = 0;
      double dist = std::abs(u(i, i) - cl.centers[0]);
      for (Index c = 1; c < p; ++c) {
        const double dc = std::abs(u(i, i) - cl.centers[static_cast<std::size_t>(c)]);
        if (dc < dist) {
          dist = dc;
          best = c;
        }
      }
      if (dist > cl.min_gap / 3.0) assigned = false;
      labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
      ++counts[static_cast<std::size_t>(best)];
    }
    if (!assigned || std::any_of(counts.begin(), counts.end(), [](Index c) { return c == 0; })) continue;

    std::vector<Matrix> prim;
    bool ok = true;
    for (Index c = 0; c < p && ok; ++c) {
      Matrix e = spectral_projection(u, schur.matrixU(), labels, static_cast<int>(c));
      e = a.element(a.coordinates(e));
      try {
        e = linalg::polish_idempotent(std::move(e), 60);
      } catch (const NumericalDegeneracy&) {
        ok = false;
      }
      prim.push_back(std::move(e));
    }
    if (!ok) continue;
    try {
      refine_complete_family(prim, d);
    } catch (const NumericalDegeneracy&) {
      continue;
    }

    // group primitives: e_a ~ e_b iff e_a A e_b is not contained in rad(A)
    std::vector<Index> parent(static_cast<std::size_t>(p));
    std::iota(parent.begin(), parent.end(), Index{0});
    auto find = [&](Index v) {
      while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)];
      return v;
    };
    for (Index ia = 0; ia < p; ++ia)
      for (Index ib = ia + 1; ib < p; ++ib) {
        const Matrix& ea = prim[static_cast<std::size_t>(ia)];
        const Matrix& eb = prim[static_cast<std::size_t>(ib)];
        double q2 = 0.0;
        for (Index j = 0; j < n; ++j) q2 += quotient(ea * a.basis[static_cast<std::size_t>(j)] * eb).squaredNorm();
        // rounding leaves ~1e-15 here; linked pairs of oblique idempotents
        // have been seen as low as 1e-8
        if (std::sqrt(q2) > kBlockLink * ea.norm() * eb.norm())
          parent[static_cast<std::size_t>(find(ib))] = find(ia);
      }
    std::vector<std::vector<Index>> groups;
    std::vector<Index> group_of_root(static_cast<std::size_t>(p), -1);
    for (Index c = 0; c < p; ++c) {
      const Index root = find(c);
      auto& gid = group_of_root[static_cast<std::size_t>(root)];
      if (gid < 0) {
        gid = static_cast<Index>(groups.size());
        groups.emplace_back();
      }
      groups[static_cast<std::size_t>(gid)].push_back(c);
    }
    // each quotient eigenvalue of block i appears n_i times under left multiplication
    bool consistent = true;
    Index sum_sq = 0;
    for (const auto& grp : groups) {
      const Index ni = static_cast<Index>(grp.size());
      sum_sq += ni * ni;
      for (Index c : grp)
        if (cl.multiplicity[static_cast<std::size_t>(c)] != ni) consistent = false;
    }
    if (!consistent || sum_sq != s) continue;

    std::vector<std::size_t> order(groups.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x1, std::size_t x2) { return groups[x1].size() > groups[x2].size(); });
    AlgebraStructure cand;
    cand.radical_dim = r;
    double worst = 0.0;
    for (std::size_t bi = 0; bi < order.size(); ++bi) {
      const auto& grp = groups[order[bi]];
      cand.block_dims.push_back(static_cast<Index>(grp.size()));
      Matrix central = Matrix::Zero(d, d);
      for (Index c : grp) {
        central += prim[static_cast<std::size_t>(c)];
        worst = std::max(worst, prim[static_cast<std::size_t>(c)].norm());
        cand.primitive_idempotents.push_back(prim[static_cast<std::size_t>(c)]);
        cand.primitive_block.push_back(static_cast<Index>(bi));
      }
      cand.central_idempotents.push_back(linalg::polish_idempotent(std::move(central), 60));
    }
    // Inside an n x n block the primitives depend on x and can be needlessly
    // oblique; keep the best conditioned of a few successful draws.
    double central_norm = 1.0;
    for (const auto& e : cand.central_idempotents) central_norm = std::max(central_norm, e.norm());
    const bool good = worst <= kObliqueness * central_norm;
    if (worst < best_norm) {
      best_norm = worst;
      out = std::move(cand);
    }
    ++successes;
    if (good || successes == kWantedDraws) break;
  }
  if (successes == 0)
    throw NumericalDegeneracy("no separating element found for the semisimple quotient after " +
                              std::to_string(kMaxAttempts) + " draws");
  return out;
}

InvertibleSearch contains_invertible(std::span<const Matrix> space, const NumericPolicy& policy) {
  InvertibleSearch out;
  if (space.empty()) return out;
  const Index rows = space.front().rows();
  const Index cols = space.front().cols();
  for (const auto& m : space)
    if (m.rows() != rows || m.cols() != cols) throw InputError("contains_invertible: mixed sizes");
  if (rows != cols) {
    out.rank_deficient = true;
    out.max_rank = std::min(rows, cols);
    return out;
  }
  Rng rng(policy.seed);
  auto draw = [&] {
    Matrix m = Matrix::Zero(rows, cols);
    for (const auto& b : space) m += rng.complex_normal() * b;
    return m;
  };
  constexpr int kTrials = 64;
  constexpr int kRankDraws = 8;
  for (int t = 0; t < kTrials; ++t) {
    Matrix m = draw();
    ++out.trials;
    const RealVector sv = linalg::singular_values(m);
    const double smax = sv(0);
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
      if (sv(i) > policy.inv_tol * smax) ++rank;
    out.max_rank = std::max(out.max_rank, rank);
    if (smax > 0.0 && sv(sv.size() - 1) > policy.inv_tol * smax) {
      out.element = std::move(m);
      return out;
    }
    if (t + 1 >= kRankDraws && out.max_rank < rows) break;
  }
  out.rank_deficient = out.max_rank < rows;
  return out;
}

}  // namespace sidecomp
