#pragma once

#include <cstdint>
#include <vector>

#include "sidecomp/numeric.hpp"
#include "sidecomp/tuple_core.hpp"

namespace sidecomp {

/// A strongly irreducible block (J_r(lambda), p_2(J_r(lambda)), ...) where the
/// later entries are fixed polynomials in the Jordan block.
struct BlockSpec {
  Index r = 1;
  Complex lambda = 0.0;

  bool operator==(const BlockSpec&) const = default;
};

OperatorTuple block_tuple(const BlockSpec& spec, Index arity);

struct PlantedClass {
  BlockSpec block;
  Index multiplicity = 1;
};

struct PlantedInstance {
  std::uint64_t seed = 0;
  std::vector<PlantedClass> classes;
  OperatorTuple block_form;  // direct sum of inflated blocks, before conjugation
  Matrix conjugator;         // X
  double condition = 1.0;    // cond_2(X)
  OperatorTuple tuple;       // X (block_form) X^{-1}

  /// Ground truth (k; n_1 >= ... >= n_k).
  Index k() const { return static_cast<Index>(classes.size()); }
  std::vector<Index> multiplicities() const;
  Index dim() const { return tuple.dim(); }
};

struct PlantedOptions {
  Index max_classes = 3;
  Index max_multiplicity = 3;
  Index max_block = 4;
  Index max_dim = 24;
  Index max_arity = 2;
  double max_condition = 100.0;
};

/// X = U diag(s) V^* with Haar-like unitaries and log-spaced singular values
/// from 1 to `condition`.
Matrix random_conjugator(Rng& rng, Index d, double condition);

/// Assembles X (sum_i A_i^(n_i)) X^{-1} for the given classes.
PlantedInstance make_planted(const std::vector<PlantedClass>& classes, Index arity, Rng& rng, double condition);

/// Draws classes with distinct (r, lambda), rejecting draws above max_dim.
PlantedInstance random_planted(std::uint64_t seed, const PlantedOptions& options = {});

/// A commuting tuple of size at most max_dim: block-diagonal Jordan pieces with
/// random per-block polynomials, repeated eigenvalues allowed, conjugated by a
/// well-conditioned X.
OperatorTuple random_commuting_tuple(std::uint64_t seed, Index max_dim = 6, Index max_arity = 3);

}  // namespace sidecomp
