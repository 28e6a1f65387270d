#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sidecomp/numeric.hpp"
#include "sidecomp/tuple_core.hpp"

namespace sidecomp {

using MultiIndex = std::vector<int>;

inline int degree(const MultiIndex& a) {
  int s = 0;
  for (int v : a) s += v;
  return s;
}

/// Order of multi-indices within one total degree. graded_lex puts larger
/// leading exponents first; graded_colex is its reverse within each degree.
enum class GridOrder { graded_lex, graded_colex };

/// All alpha in N^m with |alpha| <= dmax, graded by total degree. Index 0 is
/// always alpha = 0.
class TruncationGrid {
 public:
  TruncationGrid(Index m, Index dmax, GridOrder order = GridOrder::graded_lex);

  Index arity() const { return m_; }
  Index max_degree() const { return dmax_; }
  Index size() const { return static_cast<Index>(alphas_.size()); }
  GridOrder order() const { return order_; }
  const MultiIndex& operator[](Index i) const { return alphas_[static_cast<std::size_t>(i)]; }
  const std::vector<MultiIndex>& alphas() const { return alphas_; }
  std::optional<Index> find(const MultiIndex& a) const;
  /// Mask of indices with |alpha| < dmax.
  std::vector<bool> interior() const;

 private:
  Index m_;
  Index dmax_;
  GridOrder order_;
  std::vector<MultiIndex> alphas_;
  std::map<MultiIndex, Index> index_;
};

enum class KernelPreset { drury_arveson, bergman, hardy_like, custom };

std::string to_string(KernelPreset p);

/// Diagonal kernel K(z, w) = sum_alpha fhat(alpha) z^alpha conj(w)^alpha.
class DiagonalKernelSpec {
 public:
  /// fhat(alpha) = |alpha|! / alpha!
  static DiagonalKernelSpec drury_arveson(Index m);
  /// fhat(alpha) = Gamma(k + |alpha|) / (alpha! Gamma(k)), the weighted Bergman space A_k^2.
  static DiagonalKernelSpec bergman(Index m, double k);
  /// fhat == 1
  static DiagonalKernelSpec hardy_like(Index m);
  /// Explicit table; every value must be positive.
  static DiagonalKernelSpec custom(Index m, std::map<MultiIndex, double> table);

  Index arity() const { return m_; }
  KernelPreset preset() const { return preset_; }
  double bergman_k() const { return k_; }

  double log_fhat(const MultiIndex& a) const;
  double fhat(const MultiIndex& a) const;

 private:
  DiagonalKernelSpec(Index m, KernelPreset p, double k) : m_(m), preset_(p), k_(k) {}
  Index m_;
  KernelPreset preset_;
  double k_ = 0.0;
  std::map<MultiIndex, double> table_;
};

/// weights[i](idx(alpha)) = sqrt(fhat(alpha) / fhat(alpha + e_i)) for |alpha| < dmax,
/// zero on the top degree (those raisings leave the truncation).
struct WeightTable {
  std::vector<RealVector> weights;
};

WeightTable multishift_weights(const DiagonalKernelSpec& spec, const TruncationGrid& grid);

/// forward: M_{z_i} e_alpha = w_i(alpha) e_{alpha + e_i}, compressed to the grid.
/// adjoint: the exact matrix adjoint (weighted backward shifts).
enum class ShiftMode { forward, adjoint };

OperatorTuple truncated_tuple(const DiagonalKernelSpec& spec, const TruncationGrid& grid, ShiftMode mode);

/// ||z^alpha||^2 read off the forward tuple by applying M^alpha to e_0.
RealVector constructed_monomial_norms(const OperatorTuple& forward, const TruncationGrid& grid);

struct JointEigenvector {
  Vector v;                  // a_alpha = sqrt(fhat(alpha)) w^alpha
  double residual = 0.0;     // sqrt(sum_i ||(T_i - w_i) v||^2) / ||v|| on the adjoint tuple
  double tail_bound = 0.0;   // sqrt(sum |w_i|^2 * sum_{|alpha| = dmax} |a_alpha|^2) / ||v||
};

JointEigenvector joint_eigenvector(const DiagonalKernelSpec& spec, const TruncationGrid& grid,
                                   std::span<const Complex> w);

struct DefectReport {
  Matrix defect;                 // I - sum T_i^* T_i
  double projection_residual = 0.0;
  Index rank = 0;
  double vacuum_residual = 0.0;  // ||defect - e_0 e_0^*||_F
};

/// For an adjoint-mode tuple T = M^*, I - sum M M^*.
DefectReport defect_operator(const OperatorTuple& t);

struct PSequence {
  std::vector<Matrix> p;           // P_0 ... P_{n_max}
  std::vector<double> min_eig;     // smallest eigenvalue of each P_n
  std::vector<double> min_gap_eig; // smallest eigenvalue of P_n - P_{n+1}
  double vanishing = 0.0;          // max |P_n e_alpha| over n > |alpha|
  bool psd = true;
  bool decreasing = true;
};

/// P_0 = I, P_{n+1} = sum_i T_i^* P_n T_i.
PSequence p_sequence(const OperatorTuple& t, const TruncationGrid& grid, Index n_max);

struct SphericalShift {
  OperatorTuple tuple;
  std::vector<bool> interior;  // false on the top degree, where compression shows
};

/// V_i e_alpha = sqrt((alpha_i + 1) / (|alpha| + m)) e_{alpha + e_i}.
SphericalShift spherical_shift(const TruncationGrid& grid);

struct SphereReport {
  bool row_contraction = false;     // I - sum T_i^* T_i >= 0
  bool spherical_isometry = false;  // sum T_i^* T_i = I
  bool spherical_unitary = false;   // isometry and every T_i normal
  std::vector<bool> hypercontraction;  // entry k-1: (I - sum T_i^* T_i)^k >= 0
  bool n_hypercontraction = false;
  double isometry_residual = 0.0;
  double min_defect_eig = 0.0;
};

/// Predicates evaluated on the coordinates selected by `interior` (all when empty).
SphereReport check_sphere_conditions(const OperatorTuple& t, Index n, const std::vector<bool>& interior = {},
                                     double psd_tol = 1e-10);

struct ModelReport {
  double projection_residual = 0.0;   // ||S^2 - S||_F, S = sum T_i^* T_i
  bool projection = false;
  Index compatible_dim = 0;
  Index batch = 0;
  double max_solve_residual = 0.0;    // relative least-squares residual
  bool solvable = false;
  std::string conclusion;
};

/// Checks (1) sum T_i^* T_i is a projection and (2) every compatible family
/// (x_i) with T_i x_j = T_j x_i is of the form x_i = T_i x, by random probing
/// of the compatibility subspace. `support` restricts the data x_i to the
/// selected coordinates.
ModelReport check_model_hypotheses(const OperatorTuple& t, const NumericPolicy& policy = {},
                                   const std::vector<bool>& support = {}, Index batch = 32);

struct GammaSample {
  std::vector<Complex> point;
  bool skipped = false;
  Matrix symbol;          // A restricted to ker(T - w), in the kernel basis
  double norm = 0.0;
  bool contraction = false;
  double invariance_residual = 0.0;  // ||A K - K symbol||
};

std::vector<GammaSample> gamma_transform(const OperatorTuple& t, const Matrix& a,
                                         std::span<const std::vector<Complex>> points,
                                         const NumericPolicy& policy = {});

}  // namespace sidecomp
