#include "brute_force_si.hpp"

#include <cmath>

#include <Eigen/LU>
#include <Eigen/QR>

namespace sidecomp::oracle {

namespace {

Matrix unit(Index d, Index i, Index j) {
  Matrix e = Matrix::Zero(d, d);
  e(i, j) = 1.0;
  return e;
}

}  // namespace

std::vector<Matrix> commutant_by_lu(const OperatorTuple& t) {
  const Index d = t.dim();
  const Index n = d * d;
  // row block i: entries of X T_i - T_i X, unknown x_{pq} at column p + q d
  Matrix op = Matrix::Zero(t.arity() * n, n);
  for (Index i = 0; i < t.arity(); ++i)
    for (Index p = 0; p < d; ++p)
      for (Index q = 0; q < d; ++q) {
        const Matrix e = unit(d, p, q);
        const Matrix c = e * t[i] - t[i] * e;
        for (Index r = 0; r < d; ++r)
          for (Index s = 0; s < d; ++s) op(i * n + r + s * d, p + q * d) = c(r, s);
      }
  Eigen::FullPivLU<Matrix> lu(op);
  lu.setThreshold(1e-9);
  const Matrix kernel = lu.kernel();
  std::vector<Matrix> out;
  if (lu.dimensionOfKernel() == 0) return out;
  Eigen::HouseholderQR<Matrix> qr(kernel);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, kernel.cols());
  for (Index j = 0; j < q.cols(); ++j) out.push_back(Eigen::Map<const Matrix>(q.col(j).data(), d, d));
  return out;
}

IdempotentSearch search_idempotent(const OperatorTuple& t, std::uint64_t seed, int starts) {
  IdempotentSearch out;
  const Index d = t.dim();
  const auto basis = commutant_by_lu(t);
  const Index n = static_cast<Index>(basis.size());
  out.commutant_dim = n;
  if (n == 0 || d < 2) return out;
  auto element = [&](const Vector& c) {
    Matrix e = Matrix::Zero(d, d);
    for (Index j = 0; j < n; ++j) e += c(j) * basis[static_cast<std::size_t>(j)];
    return e;
  };
  // coordinates of I/2, the centre of the search
  Vector half(n);
  for (Index j = 0; j < n; ++j) half(j) = 0.5 * basis[static_cast<std::size_t>(j)].conjugate().trace();
  Rng rng(seed);
  for (int s = 0; s < starts; ++s) {
    ++out.starts;
    const double radius = rng.uniform(0.1, 3.0);
    Vector c(n);
    for (Index j = 0; j < n; ++j) c(j) = half(j) + radius * rng.complex_normal();
    double res = 0.0;
    for (int it = 0; it < 80; ++it) {
      const Matrix e = element(c);
      const Matrix f = e * e - e;
      res = f.norm();
      if (res <= 1e-13 || !std::isfinite(res)) break;
      Matrix jac(d * d, n);
      for (Index j = 0; j < n; ++j) {
        const Matrix& b = basis[static_cast<std::size_t>(j)];
        const Matrix dj = e * b + b * e - b;
        jac.col(j) = Eigen::Map<const Vector>(dj.data(), d * d);
      }
      const Vector rhs = -Eigen::Map<const Vector>(f.data(), d * d);
      c += jac.completeOrthogonalDecomposition().solve(rhs);
    }
    if (!std::isfinite(res) || res > 1e-10) continue;
    const Matrix e = element(c);
    const double tr = e.trace().real();
    const double rounded = std::round(tr);
    if (std::abs(tr - rounded) > 1e-6) continue;
    if (rounded >= 1.0 && rounded <= static_cast<double>(d - 1)) {
      out.found = true;
      out.idempotent = e;
      out.residual = (e * e - e).norm();
      out.trace = static_cast<Index>(rounded);
      return out;
    }
  }
  return out;
}

std::vector<NamedTuple> small_corpus() {
  auto unit3 = [](Index d, Index i, Index j) { return unit(d, i, j); };
  std::vector<NamedTuple> c;
  auto add = [&](std::string name, std::vector<Matrix> mats) { c.push_back({std::move(name), OperatorTuple(std::move(mats))}); };
  auto sum = [](const Matrix& a, const Matrix& b) {
    const Matrix blocks[] = {a, b};
    return block_diagonal(blocks);
  };
  const Complex i(0.0, 1.0);
  add("zero_1", {Matrix::Zero(1, 1)});
  add("scalar_3", {Matrix::Constant(1, 1, 3.0)});
  add("J2(0)", {jordan_block(2, 0.0)});
  add("J3(0)", {jordan_block(3, 0.0)});
  add("J4(0)", {jordan_block(4, 0.0)});
  add("J2(1)", {jordan_block(2, 1.0)});
  add("J3(i)", {jordan_block(3, i)});
  add("zero_2", {Matrix::Zero(2, 2)});
  add("I2", {Matrix::Identity(2, 2)});
  add("I3", {Matrix::Identity(3, 3)});
  {
    Matrix dg = Matrix::Zero(2, 2);
    dg(0, 0) = 1.0;
    dg(1, 1) = 2.0;
    add("diag(1,2)", {dg});
  }
  add("J2(0)+J1(0)", {sum(jordan_block(2, 0.0), jordan_block(1, 0.0))});
  add("J2(0)+J2(0)", {sum(jordan_block(2, 0.0), jordan_block(2, 0.0))});
  add("J2(0)+J2(1)", {sum(jordan_block(2, 0.0), jordan_block(2, 1.0))});
  add("J3(0)+J1(0)", {sum(jordan_block(3, 0.0), jordan_block(1, 0.0))});
  add("J3(2)+J1(-1)", {sum(jordan_block(3, 2.0), jordan_block(1, -1.0))});
  {
    const Matrix j = jordan_block(3, 0.0);
    add("(J3(0), J3(0)^2)", {j, j * j});
  }
  {
    const Matrix j = jordan_block(4, 0.0);
    add("(J4(0), J4(0)^2, J4(0)^3)", {j, j * j, j * j * j});
  }
  add("(J2(0), 0)", {jordan_block(2, 0.0), Matrix::Zero(2, 2)});
  add("(E13, E23)", {unit3(3, 0, 2), unit3(3, 1, 2)});
  add("(E12, E13)", {unit3(3, 0, 1), unit3(3, 0, 2)});
  add("(E14, E24, E34)", {unit3(4, 0, 3), unit3(4, 1, 3), unit3(4, 2, 3)});
  add("(E13 + E24, E14)", {Matrix(unit3(4, 0, 2) + unit3(4, 1, 3)), unit3(4, 0, 3)});
  {
    Matrix a = Matrix::Zero(3, 3), b = Matrix::Zero(3, 3);
    a(0, 0) = a(1, 1) = 1.0;
    a(2, 2) = 2.0;
    b(2, 2) = 1.0;
    add("(diag(1,1,2), diag(0,0,1))", {a, b});
  }
  {
    // similarity images of a split and of an SI tuple
    Rng rng(0x5EED);
    Matrix x(4, 4);
    for (Index r = 0; r < 4; ++r)
      for (Index s = 0; s < 4; ++s) x(r, s) = rng.complex_normal();
    x += 3.0 * Matrix::Identity(4, 4);
    const Matrix xinv = x.inverse();
    const Matrix split = sum(jordan_block(2, i), jordan_block(2, i));
    add("X(J2(i)+J2(i))X^-1", {Matrix(x * split * xinv)});
    const Matrix j = jordan_block(4, 1.0);
    add("X(J4(1), J4(1)^2)X^-1", {Matrix(x * j * xinv), Matrix(x * j * j * xinv)});
  }
  return c;
}

}  // namespace sidecomp::oracle
