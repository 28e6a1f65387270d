#pragma once

#include <cmath>
#include <vector>

#include "sidecomp/numeric.hpp"
#include "sidecomp/tuple_core.hpp"

namespace sidecomp::test {

inline Matrix diag(std::vector<Complex> d) {
  Matrix a = Matrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) a(static_cast<Index>(i), static_cast<Index>(i)) = d[i];
  return a;
}

inline OperatorTuple single(const Matrix& a) { return OperatorTuple::single(a); }

inline OperatorTuple j2_0_plus_j2_1() {
  return direct_sum(single(jordan_block(2, 0.0)), single(jordan_block(2, 1.0)));
}

inline Matrix swap2() {
  Matrix p(2, 2);
  p << 0, 1, 1, 0;
  return p;
}

/// Random complex matrix with entries of unit variance.
inline Matrix random_matrix(Rng& rng, Index rows, Index cols) {
  Matrix a(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) a(i, j) = rng.complex_normal();
  return a;
}

inline double max_tuple_diff(const OperatorTuple& a, const OperatorTuple& b) {
  double out = 0.0;
  for (Index i = 0; i < a.arity(); ++i) out = std::max(out, (a[i] - b[i]).norm());
  return out;
}

}  // namespace sidecomp::test
