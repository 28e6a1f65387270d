#include "sidecomp/decomposition.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <string>

#include "sidecomp/errors.hpp"

namespace sidecomp {

namespace {

double rel_scale(const Matrix& m) { return std::max(1.0, m.norm()); }

Matrix inverse(const Matrix& x) { return Eigen::PartialPivLU<Matrix>(x).inverse(); }

}  // namespace

DecompositionResiduals check_unit_decomposition(const UnitDecomposition& dec, const NumericPolicy& policy,
                                                bool check_si) {
  DecompositionResiduals res;
  const Index d = dec.tuple.dim();
  Matrix sum = Matrix::Zero(d, d);
  bool scaled_ok = true;
  for (std::size_t i = 0; i < dec.idempotents.size(); ++i) {
    const Matrix& p = dec.idempotents[i];
    sum += p;
    const double idem = linalg::idempotent_residual(p);
    res.max_idempotent = std::max(res.max_idempotent, idem);
    if (idem > policy.idem_tol * std::max(1.0, p.squaredNorm())) scaled_ok = false;
    for (const auto& a : dec.tuple.matrices()) {
      const double c = (p * a - a * p).norm();
      res.max_commutator = std::max(res.max_commutator, c);
      if (c > policy.commute_tol * std::max(1.0, p.norm() * a.norm())) scaled_ok = false;
    }
    for (std::size_t j = 0; j < dec.idempotents.size(); ++j) {
      if (i == j) continue;
      const double an = (p * dec.idempotents[j]).norm();
      res.max_annihilation = std::max(res.max_annihilation, an);
      if (an > policy.idem_tol * std::max(1.0, p.norm() * dec.idempotents[j].norm())) scaled_ok = false;
    }
  }
  res.sum_residual = (sum - linalg::identity(d)).norm();
  if (check_si) {
    const auto local = scaled_for(dec.tuple, policy);
    for (const auto& p : dec.idempotents) {
      const auto r = restrict(dec.tuple, p, local);
      if (!is_strongly_irreducible(r.tuple, local)) res.blocks_si = false;
    }
  }
  double largest = 1.0;
  for (const auto& p : dec.idempotents) largest = std::max(largest, p.norm());
  res.pass = scaled_ok && res.sum_residual <= policy.idem_tol * largest && res.blocks_si;
  return res;
}

bool is_strongly_irreducible(const OperatorTuple& t, const NumericPolicy& policy) {
  const auto a = joint_commutant(t, policy);
  if (a.algebra_dim() == 1) return true;
  const auto rad = radical(a, policy);
  if (rad.ambiguous)
    throw NumericalDegeneracy("trace-form rank decision is ambiguous; tighten radical_rel");
  return a.algebra_dim() - rad.dim() == 1;
}

UnitDecomposition unit_si_decomposition(const OperatorTuple& t, const NumericPolicy& policy) {
  const auto a = joint_commutant(t, policy);
  const auto rad = radical(a, policy);
  const auto st = semisimple_structure(a, rad, policy);
  UnitDecomposition out;
  out.tuple = t;
  out.idempotents = st.primitive_idempotents;
  out.block = st.primitive_block;
  out.strongly_irreducible = true;
  const auto res = check_unit_decomposition(out, policy);
  if (!res.pass) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "decomposition fails its invariants (sum %.3e, idempotent %.3e, annihilation %.3e, commutator %.3e)",
                  res.sum_residual, res.max_idempotent, res.max_annihilation, res.max_commutator);
    throw NumericalDegeneracy(buf);
  }
  return out;
}

UnitDecomposition transport_decomposition(const UnitDecomposition& dec, const Matrix& x,
                                          const NumericPolicy& policy) {
  UnitDecomposition out;
  out.tuple = conjugate(dec.tuple, x, policy);
  const Matrix xinv = inverse(x);
  for (const auto& p : dec.idempotents) out.idempotents.push_back(linalg::polish_idempotent(x * p * xinv));
  out.block = dec.block;
  out.strongly_irreducible = dec.strongly_irreducible;
  return out;
}

TupleSimilarity find_similarity(const OperatorTuple& a, const OperatorTuple& b, const NumericPolicy& policy) {
  TupleSimilarity out;
  if (a.arity() != b.arity()) {
    out.reason = "arity";
    return out;
  }
  if (a.dim() != b.dim()) {
    out.reason = "dimension";
    return out;
  }
  const auto space = intertwiner_space(a, b, policy);
  out.intertwiner_dim = static_cast<Index>(space.size());
  if (space.empty()) {
    out.reason = "no intertwiners";
    return out;
  }
  auto inv = contains_invertible(space, policy);
  if (!inv.element) {
    out.reason = "no invertible intertwiner (max rank " + std::to_string(inv.max_rank) + ")";
    return out;
  }
  out.similar = true;
  out.intertwiner = std::move(*inv.element);
  return out;
}

Matrix BlockIntertwiner::ambient(const Matrix& p) const {
  return target_basis * local * source_basis.adjoint() * p;
}

BlockSimilarity block_similarity(const OperatorTuple& t, const Matrix& p, const Matrix& q,
                                 const NumericPolicy& policy) {
  BlockSimilarity out;
  const auto local = scaled_for(t, policy);
  const auto rp = restrict(t, p, local);
  const auto rq = restrict(t, q, local);
  if (rp.basis.cols() != rq.basis.cols()) {
    out.reason = "rank mismatch";
    return out;
  }
  auto sim = find_similarity(rp.tuple, rq.tuple, local);
  if (!sim.similar) {
    out.reason = sim.reason;
    return out;
  }
  out.intertwiner = BlockIntertwiner{std::move(sim.intertwiner), rp.basis, rq.basis};
  return out;
}

Matrix assemble_global(const OperatorTuple& t, std::span<const BlockPairing> pairs, const NumericPolicy& policy) {
  const Index d = t.dim();
  if (pairs.empty()) throw InputError("assemble_global: no pairs");
  Matrix x = Matrix::Zero(d, d);
  Matrix psum = Matrix::Zero(d, d), qsum = Matrix::Zero(d, d);
  for (const auto& pr : pairs) {
    const auto& m = pr.map;
    if (pr.p.rows() != d || pr.q.rows() != d || m.source_basis.rows() != d || m.target_basis.rows() != d ||
        m.local.rows() != m.target_basis.cols() || m.local.cols() != m.source_basis.cols())
      throw InputError("assemble_global: incompatible pairing shapes");
    for (Index j = 0; j < t.arity(); ++j) {
      const Matrix tp = m.source_basis.adjoint() * t[j] * m.source_basis;
      const Matrix tq = m.target_basis.adjoint() * t[j] * m.target_basis;
      const double c = (m.local * tp - tq * m.local).norm();
      if (c > 1e-6 * std::max(1.0, m.local.norm() * t[j].norm()))
        throw InputError("assemble_global: block map does not intertwine the restrictions");
    }
    psum += pr.p;
    qsum += pr.q;
    x += m.ambient(pr.p);
  }
  if ((psum - linalg::identity(d)).norm() > 1e-8 || (qsum - linalg::identity(d)).norm() > 1e-8)
    throw InputError("assemble_global: idempotents do not sum to the identity");

  const RealVector sv = linalg::singular_values(x);
  if (sv(sv.size() - 1) <= policy.inv_tol * sv(0))
    throw NumericalDegeneracy("assembled conjugator is singular");
  for (Index j = 0; j < t.arity(); ++j)
    if ((x * t[j] - t[j] * x).norm() > policy.commute_tol * std::max(1.0, x.norm() * t[j].norm()))
      throw NumericalDegeneracy("assembled conjugator does not commute with T");
  const Matrix xinv = inverse(x);
  for (const auto& pr : pairs)
    if ((x * pr.p * xinv - pr.q).norm() > 1e-6 * rel_scale(pr.q))
      throw NumericalDegeneracy("assembled conjugator does not carry P onto Q");
  return x;
}

Alignment align_decompositions(const OperatorTuple& t, std::span<const Matrix> p_list,
                               std::span<const Matrix> q_list, std::span<const PartialConjugator> partial,
                               const Matrix& y, std::span<const Index> perm, const NumericPolicy& policy) {
  (void)policy;
  const Index n = static_cast<Index>(p_list.size());
  if (static_cast<Index>(q_list.size()) != n || static_cast<Index>(perm.size()) != n)
    throw InputError("align_decompositions: list sizes differ");
  for (const auto& a : t.matrices())
    if ((y * a - a * y).norm() > 1e-6 * std::max(1.0, y.norm() * a.norm()))
      throw InputError("align_decompositions: Y is not in the commutant");

  std::vector<Index> inv_perm(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    const Index pi = perm[static_cast<std::size_t>(i)];
    if (pi < 0 || pi >= n || inv_perm[static_cast<std::size_t>(pi)] >= 0)
      throw InputError("align_decompositions: perm is not a permutation");
    inv_perm[static_cast<std::size_t>(pi)] = i;
  }
  const Matrix yinv = inverse(y);
  for (Index i = 0; i < n; ++i) {
    const Matrix& target = q_list[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    if ((yinv * p_list[static_cast<std::size_t>(i)] * y - target).norm() > 1e-6 * rel_scale(target))
      throw InputError("align_decompositions: Y^{-1} P_" + std::to_string(i + 1) + " Y != Q_pi(" +
                       std::to_string(i + 1) + ")");
  }

  std::vector<Index> cover(static_cast<std::size_t>(n), -1);
  std::vector<Matrix> xinvs;
  for (std::size_t s = 0; s < partial.size(); ++s) {
    const Matrix& x = partial[s].x;
    xinvs.push_back(inverse(x));
    for (Index i : partial[s].indices) {
      if (i < 0 || i >= n || cover[static_cast<std::size_t>(i)] >= 0)
        throw InputError("align_decompositions: partial conjugator indices overlap or are out of range");
      const Matrix& q = q_list[static_cast<std::size_t>(i)];
      if ((x * p_list[static_cast<std::size_t>(i)] * xinvs.back() - q).norm() > 1e-6 * rel_scale(q))
        throw InputError("align_decompositions: X P_" + std::to_string(i + 1) + " X^{-1} != Q_" +
                         std::to_string(i + 1));
      cover[static_cast<std::size_t>(i)] = static_cast<Index>(s);
    }
  }
  const Index k = static_cast<Index>(std::count_if(cover.begin(), cover.end(), [](Index c) { return c >= 0; }));
  const Index cap = 2 * k + 1;
  auto x_name = [&](Index s) {
    return partial.size() == 1 ? std::string("X") : "X" + std::to_string(s + 1);
  };

  Alignment out;
  std::vector<bool> hit(static_cast<std::size_t>(n), false);
  bool injective = true;
  for (Index r = 0; r < n; ++r) {
    if (cover[static_cast<std::size_t>(r)] >= 0) continue;
    AlignedIndex ai;
    ai.r = r;
    Matrix z = y;
    std::string word = "Y";
    Index letters = 1;
    Index j = inv_perm[static_cast<std::size_t>(r)];
    while (cover[static_cast<std::size_t>(j)] >= 0) {
      if (letters + 2 > cap) {
        out.word_cap_exceeded = true;
        break;
      }
      const Index s = cover[static_cast<std::size_t>(j)];
      z = y * partial[static_cast<std::size_t>(s)].x * z;
      word = "Y " + x_name(s) + " " + word;
      letters += 2;
      j = inv_perm[static_cast<std::size_t>(j)];
    }
    if (out.word_cap_exceeded) break;
    ai.r_prime = j;
    ai.word = word;
    ai.alternations = letters;
    const Matrix& target = p_list[static_cast<std::size_t>(j)];
    ai.residual = (z * q_list[static_cast<std::size_t>(r)] * inverse(z) - target).norm() / rel_scale(target);
    if (ai.residual > 1e-6) throw NumericalDegeneracy("alignment word fails its conjugation identity");
    ai.z = std::move(z);
    if (hit[static_cast<std::size_t>(j)]) injective = false;
    hit[static_cast<std::size_t>(j)] = true;
    out.matches.push_back(std::move(ai));
  }
  out.bijective = injective && !out.word_cap_exceeded &&
                  static_cast<Index>(out.matches.size()) == n - k;
  return out;
}

EquivalenceResult decompositions_equivalent(const OperatorTuple& t, const UnitDecomposition& d1,
                                            const UnitDecomposition& d2, const NumericPolicy& policy) {
  EquivalenceResult out;
  if (d1.size() != d2.size()) {
    out.reason = "count mismatch";
    return out;
  }
  const Index n = d1.size();
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  std::vector<Index> perm(static_cast<std::size_t>(n), -1);
  std::vector<BlockPairing> pairs;
  for (Index i = 0; i < n; ++i) {
    const Matrix& p = d1.idempotents[static_cast<std::size_t>(i)];
    for (Index j = 0; j < n; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const Matrix& q = d2.idempotents[static_cast<std::size_t>(j)];
      auto bs = block_similarity(t, p, q, policy);
      if (!bs.intertwiner) continue;
      used[static_cast<std::size_t>(j)] = true;
      perm[static_cast<std::size_t>(i)] = j;
      pairs.push_back({p, q, std::move(*bs.intertwiner)});
      break;
    }
    if (perm[static_cast<std::size_t>(i)] < 0) {
      out.reason = "block " + std::to_string(i + 1) + " has no similar partner";
      return out;
    }
  }
  DecompositionEquivalence eq;
  eq.conjugator = assemble_global(t, pairs, policy);
  eq.permutation = std::move(perm);
  const Matrix xinv = inverse(eq.conjugator);
  for (Index i = 0; i < n; ++i) {
    const Matrix& q = d2.idempotents[static_cast<std::size_t>(eq.permutation[static_cast<std::size_t>(i)])];
    eq.residual = std::max(eq.residual, (eq.conjugator * d1.idempotents[static_cast<std::size_t>(i)] * xinv - q).norm());
  }
  out.equivalence = std::move(eq);
  return out;
}

}  // namespace sidecomp
