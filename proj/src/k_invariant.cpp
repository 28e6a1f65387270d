#include "sidecomp/k_invariant.hpp"

#include <algorithm>
#include <numeric>

#include "sidecomp/errors.hpp"

namespace sidecomp {

namespace {

struct Block {
  Restriction restriction;
  Matrix idempotent;
  int side = 0;  // 0: lhs, 1: rhs
};

struct ClassGroup {
  std::vector<std::size_t> members;  // indices into the block list
  Index side_count[2] = {0, 0};
};

bool nearly_less(Complex a, Complex b) {
  const double tol = 1e-6 * (1.0 + std::max(std::abs(a), std::abs(b)));
  if (std::abs(a.real() - b.real()) > tol) return a.real() < b.real();
  if (std::abs(a.imag() - b.imag()) > tol) return a.imag() < b.imag();
  return false;
}

// lexicographic order of the sorted spectra of the first matrix
bool spectrum_less(const OperatorTuple& a, const OperatorTuple& b) {
  const auto sa = linalg::sorted_eigenvalues(a[0]);
  const auto sb = linalg::sorted_eigenvalues(b[0]);
  const std::size_t n = std::min(sa.size(), sb.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (nearly_less(sa[i], sb[i])) return true;
    if (nearly_less(sb[i], sa[i])) return false;
  }
  return sa.size() < sb.size();
}

// Greedy grouping of blocks into similarity classes; the first member of each
// class is its representative.
std::vector<ClassGroup> group_blocks(const std::vector<Block>& blocks, const NumericPolicy& policy) {
  std::vector<ClassGroup> groups;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    bool placed = false;
    for (auto& g : groups) {
      const auto& rep = blocks[g.members.front()].restriction.tuple;
      if (find_similarity(blocks[b].restriction.tuple, rep, policy).similar) {
        g.members.push_back(b);
        ++g.side_count[blocks[b].side];
        placed = true;
        break;
      }
    }
    if (!placed) {
      ClassGroup g;
      g.members.push_back(b);
      ++g.side_count[blocks[b].side];
      groups.push_back(std::move(g));
    }
  }
  return groups;
}

SimilarityInvariant invariant_from_groups(const std::vector<Block>& blocks, const std::vector<ClassGroup>& groups,
                                          int side /* -1 for both */) {
  struct Entry {
    Index count;
    const OperatorTuple* rep;
  };
  std::vector<Entry> entries;
  for (const auto& g : groups) {
    Index c = 0;
    const OperatorTuple* rep = nullptr;
    for (std::size_t m : g.members) {
      if (side >= 0 && blocks[m].side != side) continue;
      if (!rep) rep = &blocks[m].restriction.tuple;
      ++c;
    }
    if (c > 0) entries.push_back({c, rep});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.count != b.count) return a.count > b.count;
    if (a.rep->dim() != b.rep->dim()) return a.rep->dim() < b.rep->dim();
    return spectrum_less(*a.rep, *b.rep);
  });
  SimilarityInvariant inv;
  inv.k = static_cast<Index>(entries.size());
  for (const auto& e : entries) {
    inv.multiplicities.push_back(e.count);
    inv.representatives.push_back(*e.rep);
  }
  return inv;
}

std::vector<Block> blocks_of(const OperatorTuple& t, int side, const NumericPolicy& policy) {
  const auto dec = unit_si_decomposition(t, policy);
  std::vector<Block> out;
  for (const auto& p : dec.idempotents) out.push_back({restrict(t, p, policy), p, side});
  return out;
}

}  // namespace

SimilarityInvariant v_semigroup_invariant(const OperatorTuple& t, const NumericPolicy& base) {
  const auto policy = scaled_for(t, base);
  const auto dec = unit_si_decomposition(t, policy);
  std::vector<Block> blocks;
  for (const auto& p : dec.idempotents) blocks.push_back({restrict(t, p, policy), p, 0});
  const auto groups = group_blocks(blocks, policy);

  // The Wedderburn block labels and the restriction-similarity classes are two
  // independent routes to the same partition.
  for (const auto& g : groups)
    for (std::size_t m : g.members)
      if (dec.block[m] != dec.block[g.members.front()])
        throw NumericalDegeneracy("block similarity classes disagree with the Wedderburn blocks");
  Index labels = 0;
  for (Index b : dec.block) labels = std::max(labels, b + 1);
  if (labels != static_cast<Index>(groups.size()))
    throw NumericalDegeneracy("block similarity classes disagree with the Wedderburn blocks");

  return invariant_from_groups(blocks, groups, -1);
}

K0Descriptor k0_descriptor(const SimilarityInvariant& inv) { return {inv.k, inv.multiplicities}; }

K0Descriptor k0_descriptor(const OperatorTuple& t, const NumericPolicy& policy) {
  return k0_descriptor(v_semigroup_invariant(t, policy));
}

SimilarityVerdict similar(const OperatorTuple& t, const OperatorTuple& s, const NumericPolicy& base,
                          bool want_witness) {
  if (t.arity() != s.arity()) throw InputError("similar: tuples have different arity");
  const auto policy = scaled_for(s, scaled_for(t, base));
  SimilarityVerdict out;
  auto blocks = blocks_of(t, 0, policy);
  auto rhs = blocks_of(s, 1, policy);
  blocks.insert(blocks.end(), std::make_move_iterator(rhs.begin()), std::make_move_iterator(rhs.end()));
  const auto groups = group_blocks(blocks, policy);
  out.invariant_lhs = invariant_from_groups(blocks, groups, 0);
  out.invariant_rhs = invariant_from_groups(blocks, groups, 1);
  out.invariant_sum = invariant_from_groups(blocks, groups, -1);

  if (t.dim() != s.dim()) {
    out.reason = "dimension";
    return out;
  }
  for (const auto& g : groups)
    if (g.side_count[0] != g.side_count[1]) {
      out.reason = "block multiplicities differ";
      return out;
    }
  out.similar = true;
  out.reason = "block multiplicities agree";
  if (!want_witness) return out;

  // The verdict comes from the block counts. The witness is a generic element
  // of the full intertwiner space {X : X T_i = S_i X}, which is invertible
  // exactly when the tuples are similar.
  const auto space = intertwiner_space(t, s, policy);
  const auto found = contains_invertible(space, policy);
  if (!found.element) throw NumericalDegeneracy("no invertible intertwiner found for similar tuples");
  Matrix x = *found.element;
  const RealVector sv = linalg::singular_values(x);
  if (sv(sv.size() - 1) <= policy.inv_tol * sv(0)) throw NumericalDegeneracy("assembled witness is singular");
  const Matrix xinv = Eigen::PartialPivLU<Matrix>(x).inverse();
  for (Index i = 0; i < t.arity(); ++i) out.residual = std::max(out.residual, (x * t[i] * xinv - s[i]).norm());
  if (out.residual > 1e-6) throw NumericalDegeneracy("assembled witness fails verification");
  out.witness = std::move(x);
  return out;
}

bool idempotent_classes_equal(const OperatorTuple& t, const Matrix& p, const Matrix& q, const NumericPolicy& policy) {
  return block_similarity(t, p, q, policy).intertwiner.has_value();
}

}  // namespace sidecomp
