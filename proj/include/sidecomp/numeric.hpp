#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace sidecomp {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

/// Tolerances shared by every module. Passed explicitly; never global.
struct NumericPolicy {
  double commute_tol = 1e-8;
  double idem_tol = 1e-8;
  double kernel_tol = 1e-8;
  double inv_tol = 1e-8;
  /// Singular-value rank threshold is n * sigma_max * rank_rel.
  double rank_rel = 1e-10;
  /// Relative threshold on the trace form when extracting the radical.
  double radical_rel = 1e-8;
  /// Relative gap used to merge numerically split eigenvalues.
  double cluster_rel = 1e-6;
  /// Magnitude of the ambient tuple. Rank thresholds use it in place of a
  /// smaller sigma_max, so restrictions that are pure rounding noise (a zero
  /// block) are still seen as zero. 0 means "use the operator itself".
  double scale = 0.0;
  /// Upper bound on n * d accepted by the inflation check.
  Index size_cap = 48;
  std::uint64_t seed = kDefaultSeed;
};

/// Small deterministic generator. Distributions are derived from raw 64-bit
/// draws so results do not depend on the standard library's distribution
/// implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box-Muller).
  double normal();
  /// Circularly symmetric complex normal with E|z|^2 = 1.
  Complex complex_normal();
  Index uniform_index(Index n);

  /// Derive an independent stream, e.g. one per planted instance.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t salt);

 private:
  std::uint64_t state_;
};

namespace linalg {

Matrix identity(Index n);

double frobenius(const Matrix& a);
/// <A, B> = tr(B^* A)
Complex frobenius_inner(const Matrix& a, const Matrix& b);

Matrix kron(const Matrix& a, const Matrix& b);

/// Column-major vec / unvec.
Vector vec(const Matrix& a);
Matrix unvec(const Vector& v, Index rows, Index cols);

enum class SvdVectors { none, thin, full };

struct Svd {
  RealVector values;  // descending
  Matrix u;           // left vectors (thin: rows x min, full: rows x rows)
  Matrix v;           // right vectors (thin: cols x min, full: cols x cols)
};

/// Dense SVD through LAPACK (zgesdd).
Svd svd(const Matrix& a, SvdVectors vectors);

RealVector singular_values(const Matrix& a);
double sigma_max(const Matrix& a);
double sigma_min(const Matrix& a);
double spectral_norm(const Matrix& a);

/// Threshold tau = max(rows, cols) * sigma_max * rel.
double rank_threshold(const RealVector& sv, Index rows, Index cols, double rel);

struct NullspaceResult {
  Matrix basis;            // orthonormal columns
  RealVector singular_values;
  double threshold = 0.0;
};

/// Orthonormal basis of {x : A x = 0}, singular values at or below tau
/// counted as zero. An absolute threshold overrides the relative one when
/// positive. A positive `scale` is used in place of sigma_max when larger, so
/// an operator that is only rounding noise still has a full nullspace.
NullspaceResult nullspace(const Matrix& a, double rel, double absolute = -1.0, double scale = 0.0);

/// Orthonormal basis of range(A) at the same rank rule.
Matrix range_basis(const Matrix& a, double rel);

Index numerical_rank(const Matrix& a, double rel);

/// Orthonormal basis for the column span of a list of vectors.
Matrix orthonormalize(const Matrix& columns, double rel);

/// Sylvester operator X -> X T - S X acting on column-major vec(X),
/// X of shape (S.rows() x T.rows()).
Matrix sylvester_operator(const Matrix& t, const Matrix& s);

/// Newton iteration e <- 3e^2 - 2e^3 until ||e^2 - e||_F <= tol * max(1, ||e||_F^2).
/// Throws NumericalDegeneracy after max_iter steps.
Matrix polish_idempotent(Matrix e, int max_iter = 40, double tol = 1e-12);

double idempotent_residual(const Matrix& e);

bool all_finite(const Matrix& a);

/// Smallest eigenvalue of the Hermitian part of a.
double min_hermitian_eigenvalue(const Matrix& a);

/// Eigenvalues sorted by (real, imag).
std::vector<Complex> sorted_eigenvalues(const Matrix& a);

}  // namespace linalg
}  // namespace sidecomp
