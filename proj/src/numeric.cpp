#include "sidecomp/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sidecomp/errors.hpp"

extern "C" void zgesdd_(const char* jobz, const int* m, const int* n, std::complex<double>* a, const int* lda,
                        double* s, std::complex<double>* u, const int* ldu, std::complex<double>* vt,
                        const int* ldvt, std::complex<double>* work, const int* lwork, double* rwork, int* iwork,
                        int* info);
extern "C" void zgesvd_(const char* jobu, const char* jobvt, const int* m, const int* n, std::complex<double>* a,
                        const int* lda, double* s, std::complex<double>* u, const int* ldu,
                        std::complex<double>* vt, const int* ldvt, std::complex<double>* work, const int* lwork,
                        double* rwork, int* info);

namespace sidecomp {

std::uint64_t Rng::next_u64() {
  // splitmix64
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Complex Rng::complex_normal() {
  constexpr double s = 0.70710678118654752440;
  const double re = normal();
  const double im = normal();
  return {s * re, s * im};
}

Index Rng::uniform_index(Index n) {
  return static_cast<Index>(next_u64() % static_cast<std::uint64_t>(n));
}

std::uint64_t Rng::mix(std::uint64_t seed, std::uint64_t salt) {
  Rng r(seed ^ (salt * 0xD1B54A32D192ED03ULL));
  r.next_u64();
  return r.next_u64();
}

namespace linalg {

Matrix identity(Index n) { return Matrix::Identity(n, n); }

double frobenius(const Matrix& a) { return a.norm(); }

Complex frobenius_inner(const Matrix& a, const Matrix& b) {
  // tr(B^* A) = sum conj(b_ij) a_ij
  return (b.array().conjugate() * a.array()).sum();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vector vec(const Matrix& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

Matrix unvec(const Vector& v, Index rows, Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Svd svd(const Matrix& a, SvdVectors vectors) {
  Svd out;
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  const int mn = std::min(m, n);
  const int mx = std::max(m, n);
  if (mn == 0) {
    out.u = vectors == SvdVectors::full ? identity(a.rows()) : Matrix(a.rows(), 0);
    out.v = vectors == SvdVectors::full ? identity(a.cols()) : Matrix(a.cols(), 0);
    return out;
  }
  Matrix work_a = a;
  const char job = vectors == SvdVectors::none ? 'N' : vectors == SvdVectors::thin ? 'S' : 'A';
  const int ucols = vectors == SvdVectors::full ? m : mn;
  const int vtrows = vectors == SvdVectors::full ? n : mn;
  Matrix u = vectors == SvdVectors::none ? Matrix(1, 1) : Matrix(m, ucols);
  Matrix vt = vectors == SvdVectors::none ? Matrix(1, 1) : Matrix(vtrows, n);
  const int ldu = vectors == SvdVectors::none ? 1 : m;
  const int ldvt = vectors == SvdVectors::none ? 1 : vtrows;
  out.values.resize(mn);
  const std::size_t lrwork = vectors == SvdVectors::none
                                 ? static_cast<std::size_t>(7) * mn
                                 : std::max<std::size_t>(static_cast<std::size_t>(5) * mn * mn + 5 * mn,
                                                         static_cast<std::size_t>(2) * mx * mn + 2 * mn * mn + mn);
  std::vector<double> rwork(lrwork);
  std::vector<int> iwork(static_cast<std::size_t>(8) * mn);
  int info = 0;
  int lwork = -1;
  Complex query;
  zgesdd_(&job, &m, &n, work_a.data(), &m, out.values.data(), u.data(), &ldu, vt.data(), &ldvt, &query, &lwork,
          rwork.data(), iwork.data(), &info);
  lwork = static_cast<int>(query.real());
  std::vector<Complex> work(static_cast<std::size_t>(std::max(lwork, 1)));
  zgesdd_(&job, &m, &n, work_a.data(), &m, out.values.data(), u.data(), &ldu, vt.data(), &ldvt, work.data(), &lwork,
          rwork.data(), iwork.data(), &info);
  if (info > 0) {
    // divide and conquer occasionally fails to converge; QR iteration is slower but steadier
    work_a = a;
    lwork = -1;
    zgesvd_(&job, &job, &m, &n, work_a.data(), &m, out.values.data(), u.data(), &ldu, vt.data(), &ldvt, &query,
            &lwork, rwork.data(), &info);
    lwork = static_cast<int>(query.real());
    work.assign(static_cast<std::size_t>(std::max(lwork, 1)), Complex());
    zgesvd_(&job, &job, &m, &n, work_a.data(), &m, out.values.data(), u.data(), &ldu, vt.data(), &ldvt,
            work.data(), &lwork, rwork.data(), &info);
  }
  if (info != 0) throw NumericalDegeneracy("SVD did not converge (info " + std::to_string(info) + ")");
  if (vectors != SvdVectors::none) {
    out.u = std::move(u);
    out.v = vt.adjoint();
  }
  return out;
}

RealVector singular_values(const Matrix& a) { return svd(a, SvdVectors::none).values; }

double sigma_max(const Matrix& a) {
  const RealVector sv = singular_values(a);
  return sv.size() ? sv(0) : 0.0;
}

double sigma_min(const Matrix& a) {
  const RealVector sv = singular_values(a);
  if (sv.size() == 0) return 0.0;
  // square matrices only are meaningful here; rectangular returns the
  // smallest of min(rows, cols) values
  return sv(sv.size() - 1);
}

double spectral_norm(const Matrix& a) { return sigma_max(a); }

double rank_threshold(const RealVector& sv, Index rows, Index cols, double rel) {
  const double smax = sv.size() ? sv(0) : 0.0;
  return static_cast<double>(std::max(rows, cols)) * smax * rel;
}

NullspaceResult nullspace(const Matrix& a, double rel, double absolute, double scale) {
  NullspaceResult out;
  const Index n = a.cols();
  if (n == 0) {
    out.basis = Matrix(0, 0);
    return out;
  }
  if (a.rows() == 0) {
    out.basis = identity(n);
    return out;
  }
  // Tall stacked operators are reduced by QR first; the R factor has the same
  // singular values and right singular vectors.
  Matrix work;
  if (a.rows() > n) {
    Eigen::HouseholderQR<Matrix> qr(a);
    work = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  } else {
    work = a;
  }
  const Svd dec = svd(work, SvdVectors::full);
  RealVector sv = RealVector::Zero(n);
  sv.head(dec.values.size()) = dec.values;
  out.singular_values = sv;
  out.threshold = absolute > 0.0 ? absolute : rank_threshold(sv, a.rows(), a.cols(), rel);
  if (absolute <= 0.0 && scale > 0.0)
    out.threshold = std::max(out.threshold, static_cast<double>(std::max(a.rows(), a.cols())) * scale * rel);
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > out.threshold) ++rank;
  out.basis = dec.v.rightCols(n - rank);
  return out;
}

Matrix range_basis(const Matrix& a, double rel) {
  if (a.size() == 0) return Matrix(a.rows(), 0);
  const Svd dec = svd(a, SvdVectors::thin);
  const RealVector& sv = dec.values;
  const double tau = rank_threshold(sv, a.rows(), a.cols(), rel);
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tau) ++rank;
  return dec.u.leftCols(rank);
}

Index numerical_rank(const Matrix& a, double rel) {
  const RealVector sv = singular_values(a);
  const double tau = rank_threshold(sv, a.rows(), a.cols(), rel);
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tau) ++rank;
  return rank;
}

Matrix orthonormalize(const Matrix& columns, double rel) { return range_basis(columns, rel); }

Matrix sylvester_operator(const Matrix& t, const Matrix& s) {
  const Index p = s.rows();
  const Index q = t.rows();
  return kron(t.transpose(), identity(p)) - kron(identity(q), s);
}

double idempotent_residual(const Matrix& e) { return (e * e - e).norm(); }

Matrix polish_idempotent(Matrix e, int max_iter, double tol) {
  for (int it = 0; it <= max_iter; ++it) {
    const Matrix e2 = e * e;
    const double scale = std::max(1.0, e.squaredNorm());
    if ((e2 - e).norm() <= tol * scale) return e;
    if (it == max_iter) break;
    e = 3.0 * e2 - 2.0 * e2 * e;
  }
  throw NumericalDegeneracy("idempotent lifting did not converge");
}

bool all_finite(const Matrix& a) {
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
  return true;
}

double min_hermitian_eigenvalue(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  const Matrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

std::vector<Complex> sorted_eigenvalues(const Matrix& a) {
  std::vector<Complex> out;
  if (a.size() == 0) return out;
  Eigen::ComplexEigenSolver<Matrix> es(a, false);
  for (Index i = 0; i < a.rows(); ++i) out.push_back(es.eigenvalues()(i));
  std::sort(out.begin(), out.end(), [](Complex x, Complex y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return out;
}

}  // namespace linalg
}  // namespace sidecomp
