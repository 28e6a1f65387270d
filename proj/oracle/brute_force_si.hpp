#pragma once

// Reference decision of strong irreducibility by direct search for a
// nontrivial idempotent in the commutant. Shares no code with the structure
// algorithms in src/ beyond the OperatorTuple container.

#include <cstdint>
#include <string>
#include <vector>

#include "sidecomp/numeric.hpp"
#include "sidecomp/tuple_core.hpp"

namespace sidecomp::oracle {

struct IdempotentSearch {
  bool found = false;       // a nontrivial idempotent was found
  Matrix idempotent;        // valid when found
  double residual = 0.0;    // ||e^2 - e||_F of the witness
  Index trace = 0;          // rounded trace (rank) of the witness
  Index commutant_dim = 0;
  int starts = 0;
};

/// Commutant basis from the kernel of the stacked Kronecker operator
/// (full-pivot LU), orthonormalised.
std::vector<Matrix> commutant_by_lu(const OperatorTuple& t);

/// Multistart Gauss-Newton on e^2 = e over commutant coordinates.
IdempotentSearch search_idempotent(const OperatorTuple& t, std::uint64_t seed, int starts = 200);

inline bool oracle_strongly_irreducible(const OperatorTuple& t, std::uint64_t seed) {
  return !search_idempotent(t, seed).found;
}

struct NamedTuple {
  std::string name;
  OperatorTuple tuple;
};

/// Fixed corpus of tuples with d <= 4.
std::vector<NamedTuple> small_corpus();

}  // namespace sidecomp::oracle
